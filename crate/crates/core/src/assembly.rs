//! Global homogeneous system from boundary and interface conditions, and its
//! scaled characteristic determinant.
//!
//! Unknowns are the four basis coefficients of every segment, ordered by
//! segment. Basis functions are evaluated at the angle measured from the
//! segment's left edge.

use thiserror::Error;

use crate::linalg::{DenseLu, LinalgError, LogDet};
use crate::model::{BoundarySpec, DimensionlessProblem, FreeEdgeRule};
use crate::segment::{frequency_params, StableBasis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("conditioning failure at Ω = {omega}: {source}")]
    Conditioning { omega: f64, source: LinalgError },
    #[error("row {row} of the system vanishes identically at Ω = {omega}")]
    ZeroRow { omega: f64, row: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Deflection,
    Slope,
    Moment,
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Condition at φ = 0.
    Root(Condition),
    /// Condition at φ = β.
    Tip(Condition),
    /// Continuity or jump across interior interface `index` (0-based).
    Interface { index: usize, condition: Condition },
    /// Ring closure between φ = 2π and φ = 0.
    Closure(Condition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: RowKind,
    pub entries: Vec<f64>,
}

/// The square system at one frequency.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub omega: f64,
    pub dim: usize,
    /// Row-equilibrated matrix, row-major.
    pub matrix: Vec<f64>,
    /// Max-abs of each row before equilibration.
    pub row_scale: Vec<f64>,
    pub rows: Vec<RowKind>,
    pub bases: Vec<StableBasis>,
    /// ln of the factor converting the stable-basis determinant to the
    /// analytic-basis determinant.
    pub column_log_correction: f64,
}

/// Per-segment bases at frequency `omega`.
pub fn segment_bases(omega: f64, problem: &DimensionlessProblem) -> Vec<StableBasis> {
    problem
        .segments
        .iter()
        .map(|s| {
            StableBasis::new(
                frequency_params(omega, s.thickness_ratio, problem.eta_bar),
                s.length(),
            )
        })
        .collect()
}

fn place(dim: usize, seg: usize, coeffs: [f64; 4]) -> Vec<f64> {
    let mut row = vec![0.0; dim];
    row[4 * seg..4 * seg + 4].copy_from_slice(&coeffs);
    row
}

fn add(row: &mut [f64], seg: usize, coeffs: [f64; 4], scale: f64) {
    for f in 0..4 {
        row[4 * seg + f] += scale * coeffs[f];
    }
}

/// d'' + factor·d0 for each basis function (moment-like combination).
fn combine(e: &[[f64; 4]; 4], hi: usize, lo: usize, factor: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for f in 0..4 {
        out[f] = e[hi][f] + factor * e[lo][f];
    }
    out
}

/// Boundary rows: clamped root plus tip conditions; empty for the ring,
/// whose closure is emitted by [`closure_rows`].
pub fn boundary_rows(problem: &DimensionlessProblem, bases: &[StableBasis]) -> Vec<Row> {
    let dim = 4 * bases.len();
    let last = bases.len() - 1;
    let tip_len = problem.segments[last].length();
    let clamp = |kind: fn(Condition) -> RowKind, seg: usize, phi: f64| {
        let e = bases[seg].eval(phi);
        vec![
            Row {
                kind: kind(Condition::Deflection),
                entries: place(dim, seg, e[0]),
            },
            Row {
                kind: kind(Condition::Slope),
                entries: place(dim, seg, e[1]),
            },
        ]
    };
    match problem.boundary {
        BoundarySpec::ClampedFree => {
            let mut rows = clamp(RowKind::Root, 0, 0.0);
            let p = bases[last].params;
            let factor = match problem.free_edge {
                FreeEdgeRule::Consistent => p.moment_factor(),
                FreeEdgeRule::PaperLiteral => 1.0 + p.a,
            };
            let e = bases[last].eval(tip_len);
            rows.push(Row {
                kind: RowKind::Tip(Condition::Moment),
                entries: place(dim, last, combine(&e, 2, 0, factor)),
            });
            rows.push(Row {
                kind: RowKind::Tip(Condition::Shear),
                entries: place(dim, last, combine(&e, 3, 1, factor)),
            });
            rows
        }
        BoundarySpec::ClampedClamped => {
            let mut rows = clamp(RowKind::Root, 0, 0.0);
            rows.extend(clamp(RowKind::Tip, last, tip_len));
            rows
        }
        BoundarySpec::PeriodicRing => Vec::new(),
    }
}

/// Joint rows between the right end of `left` and the left end of `right`:
/// [X] = 0, [X'] = κ̃ M̃_L/(1+η̄), [t³M̃] = 0, [t³Q̃] = 0 with
/// M̃ = X'' + (1 + Aη̄)X and Q̃ = X''' + (1 + Aη̄)X'.
///
/// `kappa_eff` already includes the (t_L / t_ref)³ conversion from the
/// reference-section flexibility to the left-side moment expression.
#[allow(clippy::too_many_arguments)]
fn joint_rows(
    dim: usize,
    bases: &[StableBasis],
    left: usize,
    left_len: f64,
    right: usize,
    t_left: f64,
    t_right: f64,
    kappa_eff: f64,
    eta_bar: f64,
    kind: impl Fn(Condition) -> RowKind,
) -> Vec<Row> {
    let el = bases[left].eval(left_len);
    let er = bases[right].eval(0.0);
    let fl = bases[left].params.moment_factor();
    let fr = bases[right].params.moment_factor();
    let (cl, cr) = (t_left.powi(3), t_right.powi(3));
    let ml = combine(&el, 2, 0, fl);
    let mr = combine(&er, 2, 0, fr);
    let ql = combine(&el, 3, 1, fl);
    let qr = combine(&er, 3, 1, fr);

    let mut deflection = vec![0.0; dim];
    add(&mut deflection, left, el[0], 1.0);
    add(&mut deflection, right, er[0], -1.0);

    let mut slope = vec![0.0; dim];
    add(&mut slope, right, er[1], 1.0);
    add(&mut slope, left, el[1], -1.0);
    add(&mut slope, left, ml, -kappa_eff / (1.0 + eta_bar));

    let mut moment = vec![0.0; dim];
    add(&mut moment, left, ml, cl);
    add(&mut moment, right, mr, -cr);

    let mut shear = vec![0.0; dim];
    add(&mut shear, left, ql, cl);
    add(&mut shear, right, qr, -cr);

    vec![
        Row {
            kind: kind(Condition::Deflection),
            entries: deflection,
        },
        Row {
            kind: kind(Condition::Slope),
            entries: slope,
        },
        Row {
            kind: kind(Condition::Moment),
            entries: moment,
        },
        Row {
            kind: kind(Condition::Shear),
            entries: shear,
        },
    ]
}

/// Effective flexibility of interface `index` referred to the left-side
/// moment expression.
pub fn effective_kappa(problem: &DimensionlessProblem, index: usize) -> f64 {
    let t_left = problem.segments[index].thickness_ratio;
    let t_ref = problem.reference_ratio(index);
    problem.interfaces[index].kappa * (t_left / t_ref).powi(3)
}

pub fn interface_rows(
    problem: &DimensionlessProblem,
    bases: &[StableBasis],
    index: usize,
) -> Vec<Row> {
    let left = &problem.segments[index];
    let right = &problem.segments[index + 1];
    joint_rows(
        4 * bases.len(),
        bases,
        index,
        left.length(),
        index + 1,
        left.thickness_ratio,
        right.thickness_ratio,
        effective_kappa(problem, index),
        problem.eta_bar,
        |condition| RowKind::Interface { index, condition },
    )
}

/// Periodicity rows for a full ring: the joint at φ = 2π ≡ 0.
pub fn closure_rows(problem: &DimensionlessProblem, bases: &[StableBasis]) -> Vec<Row> {
    let last = bases.len() - 1;
    let seg_last = &problem.segments[last];
    joint_rows(
        4 * bases.len(),
        bases,
        last,
        seg_last.length(),
        0,
        seg_last.thickness_ratio,
        problem.segments[0].thickness_ratio,
        0.0,
        problem.eta_bar,
        RowKind::Closure,
    )
}

pub fn build_system(
    omega: f64,
    problem: &DimensionlessProblem,
) -> Result<GlobalSystem, AssemblyError> {
    if problem.segments.is_empty() || problem.interfaces.len() + 1 != problem.segments.len() {
        return Err(AssemblyError::InvalidProblem(
            "segments and interfaces are inconsistent".into(),
        ));
    }
    let bases = segment_bases(omega, problem);
    let dim = 4 * bases.len();
    let mut rows = boundary_rows(problem, &bases);
    for i in 0..problem.interfaces.len() {
        rows.extend(interface_rows(problem, &bases, i));
    }
    if problem.boundary == BoundarySpec::PeriodicRing {
        rows.extend(closure_rows(problem, &bases));
    }
    debug_assert_eq!(rows.len(), dim);

    let mut matrix = Vec::with_capacity(dim * dim);
    let mut row_scale = Vec::with_capacity(dim);
    let mut kinds = Vec::with_capacity(dim);
    for (r, row) in rows.into_iter().enumerate() {
        if row.entries.iter().any(|v| !v.is_finite()) {
            return Err(AssemblyError::Conditioning {
                omega,
                source: LinalgError::NonFinite,
            });
        }
        let scale = row.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(AssemblyError::ZeroRow { omega, row: r });
        }
        matrix.extend(row.entries.iter().map(|v| v / scale));
        row_scale.push(scale);
        kinds.push(row.kind);
    }
    let column_log_correction = bases.iter().map(StableBasis::log_correction).sum();
    Ok(GlobalSystem {
        omega,
        dim,
        matrix,
        row_scale,
        rows: kinds,
        bases,
        column_log_correction,
    })
}

impl GlobalSystem {
    /// Sign and natural log-magnitude of the analytic-basis determinant.
    pub fn determinant(&self) -> Result<LogDet, AssemblyError> {
        let lu = DenseLu::new(self.dim, self.matrix.clone()).map_err(|source| {
            AssemblyError::Conditioning {
                omega: self.omega,
                source,
            }
        })?;
        let d = lu.log_det();
        if d.is_zero() {
            return Ok(d);
        }
        let rows: f64 = self.row_scale.iter().map(|s| s.ln()).sum();
        Ok(LogDet {
            sign: d.sign,
            log_abs: d.log_abs + rows + self.column_log_correction,
        })
    }
}

/// Characteristic determinant D(Ω).
pub fn determinant(omega: f64, problem: &DimensionlessProblem) -> Result<LogDet, AssemblyError> {
    build_system(omega, problem)?.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::Regime;
    use std::f64::consts::PI;

    fn cantilever() -> DimensionlessProblem {
        DimensionlessProblem::uniform(PI / 6.0, 0.0, BoundarySpec::ClampedFree)
    }

    #[test]
    fn clamped_rows_are_basis_at_origin() {
        let p = cantilever();
        let sys = build_system(2.0, &p).unwrap();
        // A = 4 → hyperbolic pair is analytic with μL < 1 here: (1, 0, 1, 0), (0, 1, 0, 1)
        assert_eq!(sys.bases[0].params.regime, Regime::HyperTrig);
        let r0: Vec<f64> = sys.matrix[0..4].iter().map(|v| v * sys.row_scale[0]).collect();
        let r1: Vec<f64> = sys.matrix[4..8].iter().map(|v| v * sys.row_scale[1]).collect();
        assert_eq!(r0, vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(r1, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn local_free_edge_uses_unit_factor() {
        let p = cantilever();
        let bases = segment_bases(2.0, &p);
        let rows = boundary_rows(&p, &bases);
        let e = bases[0].eval(p.segments[0].length());
        for f in 0..4 {
            assert!((rows[2].entries[f] - (e[2][f] + e[0][f])).abs() < 1e-14);
        }
        let mut lit = p.clone();
        lit.free_edge = FreeEdgeRule::PaperLiteral;
        let rows = boundary_rows(&lit, &bases);
        for f in 0..4 {
            assert!((rows[2].entries[f] - (e[2][f] + 5.0 * e[0][f])).abs() < 1e-12);
        }
    }

    #[test]
    fn thickness_step_weights_moment_by_cube() {
        let p = cantilever().with_step(0.2, 2.0);
        let bases = segment_bases(3.0, &p);
        let rows = interface_rows(&p, &bases, 0);
        let moment = &rows[2].entries;
        let el = bases[0].eval(0.2);
        let er = bases[1].eval(0.0);
        let fl = bases[0].params.moment_factor();
        let fr = bases[1].params.moment_factor();
        for f in 0..4 {
            assert!((moment[f] - (el[2][f] + fl * el[0][f])).abs() < 1e-12);
            assert!((moment[4 + f] + 8.0 * (er[2][f] + fr * er[0][f])).abs() < 1e-12);
        }
    }

    #[test]
    fn crack_adds_left_side_term_to_slope_row_only() {
        let plain = cantilever().with_crack(0.2, 0.0);
        let cracked = cantilever().with_crack(0.2, 0.5);
        let bases = segment_bases(3.0, &plain);
        let a = interface_rows(&plain, &bases, 0);
        let b = interface_rows(&cracked, &bases, 0);
        assert_eq!(a[0], b[0]);
        assert_eq!(a[2], b[2]);
        assert_eq!(a[3], b[3]);
        assert_eq!(a[1].entries[4..], b[1].entries[4..]);
        assert_ne!(a[1].entries[..4], b[1].entries[..4]);
    }

    #[test]
    fn determinant_is_continuous_across_regime_change() {
        let p = cantilever();
        let below = determinant(1.0 - 1e-9, &p).unwrap();
        let at = determinant(1.0, &p).unwrap();
        let above = determinant(1.0 + 1e-9, &p).unwrap();
        assert_eq!(below.sign, above.sign);
        assert!((below.log_abs - above.log_abs).abs() < 1e-6);
        assert!((at.log_abs - above.log_abs).abs() < 1e-6);
    }

    #[test]
    fn exponential_switch_leaves_determinant_continuous() {
        // μL crosses the switch threshold: μ² ≈ Ω for η̄ = 0, so μL = 1 at Ω ≈ 1/L² + 1.
        let p = cantilever();
        let l = p.segments[0].length();
        let mut prev: Option<LogDet> = None;
        for i in 0..200 {
            let omega = (1.0 / (l * l) + 1.0) * (0.95 + i as f64 * 0.0005);
            let d = determinant(omega, &p).unwrap();
            if let Some(q) = prev {
                assert_eq!(q.sign, d.sign);
                assert!((q.log_abs - d.log_abs).abs() < 1e-2);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn large_mu_beta_stays_finite() {
        let p = DimensionlessProblem::uniform(2.0 * PI, 0.0, BoundarySpec::PeriodicRing);
        // μ ≈ √Ω ≈ 8 → μβ ≈ 50
        let d = determinant(64.5, &p).unwrap();
        assert!(d.log_abs.is_finite());
    }
}
