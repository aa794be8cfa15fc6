//! Root finding on the characteristic determinant and mode-shape recovery.
//!
//! A uniform grid is scanned for sign changes and for deep local minima of
//! log|D| (tangential zeros, e.g. the double roots of an intact ring).
//! Sign-change brackets are bisected; minima are refined by golden-section
//! search and accepted only when |D| collapses by several decades.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::assembly::{build_system, segment_bases, AssemblyError};
use crate::linalg::LogDet;
use crate::model::{BoundarySpec, DimensionlessProblem, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("invalid search window [{lo}, {hi}]")]
    Window { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    SignChange,
    Tangential,
}

impl RootKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootKind::SignChange => "sign_change",
            RootKind::Tangential => "tangential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub omega: f64,
    pub kind: RootKind,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, serde::Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Lower end of the search, Ω.
    pub omega_min: f64,
    /// Fixed upper end; when absent the window grows until enough roots appear.
    pub omega_max: Option<f64>,
    /// Grid cells per window.
    pub grid_cells: usize,
    /// Relative bracket width at which bisection stops.
    pub root_rel_tol: f64,
    /// Decades |D| must drop below its grid neighbours for a tangential root.
    pub tangential_decades: f64,
    /// Points in the sampled mode shape.
    pub shape_points: usize,
    /// Largest Ω the growing window may reach.
    pub omega_ceiling: f64,
    /// Ring modes whose mean deflection exceeds this fraction of the peak are
    /// dropped as extensional.
    pub ring_mean_threshold: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            omega_min: 1e-3,
            omega_max: None,
            grid_cells: 2000,
            root_rel_tol: 1e-10,
            tangential_decades: 6.0,
            shape_points: 201,
            omega_ceiling: 1e7,
            ring_mean_threshold: 0.5,
        }
    }
}

/// D(Ω) at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub omega: f64,
    pub det: LogDet,
}

/// A root candidate produced by [`scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bracket {
    /// D changes sign between the two samples.
    SignChange { lo: Sample, hi: Sample },
    /// |D| has a local minimum at `center` without a sign change.
    Tangential {
        left: Sample,
        center: Sample,
        right: Sample,
    },
    /// D vanished exactly at a grid point.
    Exact(Sample),
}

impl Bracket {
    pub fn lower(&self) -> f64 {
        match self {
            Bracket::SignChange { lo, .. } => lo.omega,
            Bracket::Tangential { left, .. } => left.omega,
            Bracket::Exact(s) => s.omega,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanOutcome {
    pub brackets: Vec<Bracket>,
    pub warnings: Vec<String>,
    pub step: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Refined {
    /// Zero, one or two roots (two when a minimum hides a close pair).
    pub roots: Vec<Root>,
    pub note: Option<String>,
}

pub fn sample(problem: &DimensionlessProblem, omega: f64) -> Result<Sample, SolveError> {
    Ok(Sample {
        omega,
        det: build_system(omega, problem)?.determinant()?,
    })
}

fn eval_all(problem: &DimensionlessProblem, omegas: &[f64]) -> Result<Vec<Sample>, SolveError> {
    omegas.par_iter().map(|&w| sample(problem, w)).collect()
}

fn sign_change(a: &Sample, b: &Sample) -> bool {
    a.det.sign != 0 && b.det.sign != 0 && a.det.sign != b.det.sign
}

fn detect(samples: &[Sample]) -> Vec<Bracket> {
    let n = samples.len();
    let mut out = Vec::new();
    for i in 0..n {
        if samples[i].det.is_zero() {
            out.push(Bracket::Exact(samples[i]));
            continue;
        }
        if i + 1 < n && sign_change(&samples[i], &samples[i + 1]) {
            out.push(Bracket::SignChange {
                lo: samples[i],
                hi: samples[i + 1],
            });
        }
        if i > 0 && i + 1 < n {
            let (l, c, r) = (samples[i - 1], samples[i], samples[i + 1]);
            let same = l.det.sign == c.det.sign && c.det.sign == r.det.sign;
            if same && c.det.log_abs < l.det.log_abs && c.det.log_abs < r.det.log_abs {
                out.push(Bracket::Tangential {
                    left: l,
                    center: c,
                    right: r,
                });
            }
        }
    }
    out
}

fn bisect(
    problem: &DimensionlessProblem,
    mut a: Sample,
    mut b: Sample,
    rel_tol: f64,
) -> Result<f64, SolveError> {
    for _ in 0..200 {
        let mid = 0.5 * (a.omega + b.omega);
        if b.omega - a.omega <= rel_tol * mid || mid <= a.omega || mid >= b.omega {
            break;
        }
        let m = sample(problem, mid)?;
        if m.det.is_zero() {
            return Ok(mid);
        }
        if m.det.sign == a.det.sign {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a.omega + b.omega))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimum of log|D| on `[lo, hi]`; stops early at a sign flip.
fn golden_min(
    problem: &DimensionlessProblem,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    sign: i8,
) -> Result<Sample, SolveError> {
    let (mut a, mut b) = (lo, hi);
    let mut c = sample(problem, b - INV_PHI * (b - a))?;
    let mut d = sample(problem, a + INV_PHI * (b - a))?;
    for _ in 0..200 {
        for s in [c, d] {
            if s.det.sign != sign {
                return Ok(s);
            }
        }
        if b - a <= rel_tol * 0.5 * (a + b) {
            break;
        }
        if c.det.log_abs < d.det.log_abs {
            b = d.omega;
            d = c;
            c = sample(problem, b - INV_PHI * (b - a))?;
        } else {
            a = c.omega;
            c = d;
            d = sample(problem, a + INV_PHI * (b - a))?;
        }
    }
    Ok(if c.det.log_abs < d.det.log_abs { c } else { d })
}

/// Whether a minimum of |D| is deep enough to count as a tangential zero.
pub fn accept_tangential(minimum: &LogDet, left: &LogDet, right: &LogDet, decades: f64) -> bool {
    minimum.is_zero()
        || minimum.log_abs <= left.log_abs.min(right.log_abs) - decades * std::f64::consts::LN_10
}

/// Grid scan of D over `[lo, hi]` with one level of halving around every
/// candidate so that pairs of roots sharing a coarse cell separate where
/// possible.
pub fn scan(
    problem: &DimensionlessProblem,
    lo: f64,
    hi: f64,
    settings: &SolverSettings,
) -> Result<ScanOutcome, SolveError> {
    if lo == hi && lo.is_finite() {
        return Ok(ScanOutcome::default());
    }
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(SolveError::Window { lo, hi });
    }
    let report = problem.check();
    if !report.is_empty() {
        return Err(SolveError::Invalid(report));
    }
    let cells = settings.grid_cells.max(4);
    let step = (hi - lo) / cells as f64;
    let grid: Vec<f64> = (0..=cells).map(|i| lo + step * i as f64).collect();
    let coarse = eval_all(problem, &grid)?;

    let mut refine = vec![false; cells];
    for b in detect(&coarse) {
        let at = b.lower();
        let i = (((at - lo) / step).round() as usize).min(cells);
        for c in i.saturating_sub(1)..(i + 2).min(cells) {
            refine[c] = true;
        }
    }
    let mids: Vec<f64> = (0..cells)
        .filter(|&c| refine[c])
        .map(|c| 0.5 * (grid[c] + grid[c + 1]))
        .collect();
    let mut samples = coarse;
    samples.extend(eval_all(problem, &mids)?);
    samples.sort_by(|a, b| a.omega.total_cmp(&b.omega));

    let brackets = detect(&samples);
    let mut warnings = Vec::new();
    for w in brackets.windows(2) {
        let (a, b) = (w[0].lower(), w[1].lower());
        if b - a < 2.0 * step {
            warnings.push(format!(
                "root candidates near Ω = {a:.6e} and {b:.6e} are closer than two grid steps; a root may be missed"
            ));
        }
    }
    Ok(ScanOutcome {
        brackets,
        warnings,
        step,
    })
}

/// Refines one bracket: bisection for sign changes, golden-section search
/// with a depth test for tangential candidates.
pub fn refine(
    problem: &DimensionlessProblem,
    bracket: &Bracket,
    settings: &SolverSettings,
) -> Result<Refined, SolveError> {
    let tol = settings.root_rel_tol;
    let single = |omega, kind, multiplicity| Refined {
        roots: vec![Root {
            omega,
            kind,
            multiplicity,
        }],
        note: None,
    };
    match *bracket {
        Bracket::Exact(s) => Ok(single(s.omega, RootKind::SignChange, 1)),
        Bracket::SignChange { lo, hi } => {
            Ok(single(bisect(problem, lo, hi, tol)?, RootKind::SignChange, 1))
        }
        Bracket::Tangential {
            left,
            center,
            right,
        } => {
            let best = golden_min(problem, left.omega, right.omega, tol, center.det.sign)?;
            if !best.det.is_zero() && best.det.sign != center.det.sign {
                let first = bisect(problem, left, best, tol)?;
                let second = bisect(problem, best, right, tol)?;
                if second - first <= 1e-7 * second {
                    return Ok(single(0.5 * (first + second), RootKind::Tangential, 2));
                }
                let pair = [first, second].map(|omega| Root {
                    omega,
                    kind: RootKind::SignChange,
                    multiplicity: 1,
                });
                return Ok(Refined {
                    roots: pair.to_vec(),
                    note: Some(format!(
                        "close roots at Ω = {first:.10e} and {second:.10e} resolved inside one grid cell"
                    )),
                });
            }
            if accept_tangential(&best.det, &left.det, &right.det, settings.tangential_decades) {
                Ok(single(best.omega, RootKind::Tangential, 2))
            } else {
                Ok(Refined {
                    roots: Vec::new(),
                    note: Some(format!(
                        "discarded |D| minimum at Ω = {:.6e}: depth below {} decades",
                        best.omega, settings.tangential_decades
                    )),
                })
            }
        }
    }
}

/// All roots in `[lo, hi]`, ascending, with scan and refinement diagnostics.
pub fn roots_in(
    problem: &DimensionlessProblem,
    lo: f64,
    hi: f64,
    settings: &SolverSettings,
) -> Result<(Vec<Root>, Vec<String>, f64), SolveError> {
    let outcome = scan(problem, lo, hi, settings)?;
    let mut warnings = outcome.warnings;
    let mut roots = Vec::new();
    for b in &outcome.brackets {
        let r = refine(problem, b, settings)?;
        if let Some(note) = r.note {
            warnings.push(note);
        }
        roots.extend(r.roots);
    }
    roots.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    Ok((roots, warnings, outcome.step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeSample {
    pub phi: f64,
    pub deflection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeResult {
    /// 1-based position in the ascending mode list.
    pub index: usize,
    pub omega: f64,
    pub kind: RootKind,
    pub multiplicity: u8,
    /// Assembly-basis coefficients per segment (local angle).
    pub coefficients: Vec<[f64; 4]>,
    /// Closed-form-basis coefficients per segment (local angle).
    pub closed_form: Vec<[f64; 4]>,
    pub shape: Vec<ShapeSample>,
    /// |∮X| / (β max|X|).
    pub mean_ratio: f64,
    /// Smallest over largest singular value of the equilibrated system.
    pub null_quality: f64,
}

impl ModeResult {
    /// X and its first three derivatives at global angle `phi`. At an
    /// interface `side` selects the segment.
    pub fn evaluate(&self, problem: &DimensionlessProblem, phi: f64, side: Side) -> [f64; 4] {
        let bases = segment_bases(self.omega, problem);
        let j = locate(problem, phi, side);
        let e = bases[j].eval(phi - problem.segments[j].start);
        let c = &self.coefficients[j];
        let mut out = [0.0; 4];
        for (k, row) in e.iter().enumerate() {
            out[k] = (0..4).map(|f| row[f] * c[f]).sum();
        }
        out
    }
}

fn locate(problem: &DimensionlessProblem, phi: f64, side: Side) -> usize {
    let last = problem.segments.len() - 1;
    for (j, s) in problem.segments.iter().enumerate() {
        let hit = match side {
            Side::Left => phi <= s.end,
            Side::Right => phi < s.end,
        };
        if hit {
            return j;
        }
    }
    last
}

/// Null vector of the system at a root and the sampled, normalised shape.
pub fn mode_at(
    problem: &DimensionlessProblem,
    root: Root,
    settings: &SolverSettings,
) -> Result<ModeResult, SolveError> {
    let sys = build_system(root.omega, problem)?;
    let m = DMatrix::from_row_slice(sys.dim, sys.dim, &sys.matrix);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let smax = svd.singular_values.max();
    let null: Vec<f64> = v_t.row(imin).iter().copied().collect();
    let mut coefficients: Vec<[f64; 4]> = null
        .chunks(4)
        .map(|c| [c[0], c[1], c[2], c[3]])
        .collect();

    let beta = problem.central_angle();
    let n = settings.shape_points.max(2);
    let mut shape = Vec::with_capacity(n);
    let mut mode = ModeResult {
        index: 0,
        omega: root.omega,
        kind: root.kind,
        multiplicity: root.multiplicity,
        coefficients: coefficients.clone(),
        closed_form: Vec::new(),
        shape: Vec::new(),
        mean_ratio: 0.0,
        null_quality: if smax > 0.0 { smin / smax } else { 0.0 },
    };
    for i in 0..n {
        let phi = beta * i as f64 / (n - 1) as f64;
        let x = mode.evaluate(problem, phi, Side::Right)[0];
        shape.push(ShapeSample { phi, deflection: x });
    }
    let peak = shape
        .iter()
        .fold(0.0f64, |m, s| if s.deflection.abs() > m.abs() { s.deflection } else { m });
    let scale = if peak != 0.0 { 1.0 / peak } else { 1.0 };
    for s in &mut shape {
        s.deflection *= scale;
    }
    for c in &mut coefficients {
        for v in c.iter_mut() {
            *v *= scale;
        }
    }
    let closed_form = sys
        .bases
        .iter()
        .zip(&coefficients)
        .map(|(b, c)| b.to_closed_form(*c))
        .collect();
    // trapezoid on the uniform shape grid
    let h = beta / (n - 1) as f64;
    let integral: f64 = shape
        .windows(2)
        .map(|w| 0.5 * h * (w[0].deflection + w[1].deflection))
        .sum();
    mode.mean_ratio = integral.abs() / beta;
    mode.coefficients = coefficients;
    mode.closed_form = closed_form;
    mode.shape = shape;
    Ok(mode)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSet {
    pub requested: usize,
    pub modes: Vec<ModeResult>,
    pub warnings: Vec<String>,
}

impl ModeSet {
    pub fn omegas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.modes.len() >= self.requested
    }
}

fn keep(problem: &DimensionlessProblem, mode: &ModeResult, settings: &SolverSettings) -> bool {
    problem.boundary != BoundarySpec::PeriodicRing || mode.mean_ratio <= settings.ring_mean_threshold
}

/// The lowest `k` distinct flexural roots with their mode shapes. When the
/// ceiling is reached first, the partial list is returned with a diagnostic.
pub fn modes(
    problem: &DimensionlessProblem,
    k: usize,
    settings: &SolverSettings,
) -> Result<ModeSet, SolveError> {
    let beta = problem.central_angle();
    let mut lo = settings.omega_min;
    let mut hi = match settings.omega_max {
        Some(h) => h,
        None => {
            let guess = ((k as f64 + 1.0) * std::f64::consts::PI / beta).powi(2);
            guess.max(10.0).min(settings.omega_ceiling)
        }
    };
    let mut found: Vec<ModeResult> = Vec::new();
    let mut warnings = Vec::new();
    loop {
        let (roots, notes, step) = roots_in(problem, lo, hi, settings)?;
        warnings.extend(notes);
        for root in roots {
            if found
                .iter()
                .any(|m| (m.omega - root.omega).abs() <= 1e-8 * root.omega)
            {
                continue;
            }
            let mode = mode_at(problem, root, settings)?;
            if keep(problem, &mode, settings) {
                found.push(mode);
            }
        }
        found.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        let exhausted = settings.omega_max.is_some() || hi >= settings.omega_ceiling;
        if found.len() >= k || exhausted {
            if found.len() < k {
                warnings.push(format!(
                    "found {} of {k} modes below Ω = {hi:e}",
                    found.len()
                ));
            }
            found.truncate(k);
            for (i, m) in found.iter_mut().enumerate() {
                m.index = i + 1;
            }
            return Ok(ModeSet {
                requested: k,
                modes: found,
                warnings,
            });
        }
        // overlap by one coarse step so an edge root is never lost
        lo = hi - step;
        hi = (2.0 * hi).min(settings.omega_ceiling);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cantilever() -> DimensionlessProblem {
        DimensionlessProblem::uniform(PI / 6.0, 0.0, BoundarySpec::ClampedFree)
    }

    fn s(omega: f64, sign: i8, log_abs: f64) -> Sample {
        Sample {
            omega,
            det: LogDet { sign, log_abs },
        }
    }

    #[test]
    fn detect_classifies_events() {
        let samples = [
            s(0.0, 1, 3.0),
            s(1.0, -1, 2.0),
            s(2.0, -1, 1.0),
            s(3.0, -1, 2.0),
            s(4.0, 0, f64::NEG_INFINITY),
        ];
        let found = detect(&samples);
        assert_eq!(found.len(), 3);
        assert!(matches!(found[0], Bracket::SignChange { lo, .. } if lo.omega == 0.0));
        assert!(matches!(found[1], Bracket::Tangential { center, .. } if center.omega == 2.0));
        assert!(matches!(found[2], Bracket::Exact(x) if x.omega == 4.0));
    }

    #[test]
    fn empty_range_gives_no_brackets() {
        let out = scan(&cantilever(), 7.0, 7.0, &SolverSettings::default()).unwrap();
        assert!(out.brackets.is_empty());
    }

    #[test]
    fn bad_window_is_rejected() {
        assert!(matches!(
            scan(&cantilever(), 5.0, 1.0, &SolverSettings::default()),
            Err(SolveError::Window { .. })
        ));
    }

    #[test]
    fn scan_brackets_first_three_cantilever_roots() {
        let out = scan(&cantilever(), 1e-3, 250.0, &SolverSettings::default()).unwrap();
        let sign_changes = out
            .brackets
            .iter()
            .filter(|b| matches!(b, Bracket::SignChange { .. }))
            .count();
        assert!(sign_changes >= 3);
    }

    #[test]
    fn bisection_keeps_sign_change_within_tolerance() {
        let p = cantilever();
        let settings = SolverSettings::default();
        let out = scan(&p, 10.0, 20.0, &settings).unwrap();
        let b = out.brackets[0];
        let r = refine(&p, &b, &settings).unwrap().roots[0].omega;
        let h = 1e-10 * r;
        let lo = sample(&p, r - h).unwrap();
        let hi = sample(&p, r + h).unwrap();
        assert!(lo.det.sign != hi.det.sign || lo.det.is_zero() || hi.det.is_zero());
    }

    #[test]
    fn shallow_minimum_is_discarded() {
        let left = LogDet { sign: 1, log_abs: 0.0 };
        let ten_x = LogDet { sign: 1, log_abs: -std::f64::consts::LN_10 };
        assert!(!accept_tangential(&ten_x, &left, &left, 6.0));
        let deep = LogDet { sign: 1, log_abs: -7.0 * std::f64::consts::LN_10 };
        assert!(accept_tangential(&deep, &left, &left, 6.0));

        // a |D| dip between two cantilever roots is not a root
        let p = cantilever();
        let settings = SolverSettings::default();
        let bracket = Bracket::Tangential {
            left: sample(&p, 30.0).unwrap(),
            center: sample(&p, 40.0).unwrap(),
            right: sample(&p, 50.0).unwrap(),
        };
        let r = refine(&p, &bracket, &settings).unwrap();
        assert!(r.roots.is_empty());
        assert!(r.note.unwrap().contains("discarded"));
    }

    #[test]
    fn intact_cantilever_roots() {
        let set = modes(&cantilever(), 3, &SolverSettings::default()).unwrap();
        assert!(set.is_complete());
        let expect = [13.071247, 79.771810, 224.301368];
        for (i, (m, e)) in set.modes.iter().zip(expect).enumerate() {
            assert!((m.omega - e).abs() < 1e-5 * e, "{} vs {e}", m.omega);
            assert_eq!(m.kind, RootKind::SignChange);
            assert_eq!(m.index, i + 1);
        }
    }

    #[test]
    fn intact_ring_double_roots_follow_closed_form() {
        let eta = 0.01;
        let p = DimensionlessProblem::uniform(2.0 * PI, eta, BoundarySpec::PeriodicRing);
        let set = modes(&p, 3, &SolverSettings::default()).unwrap();
        for (i, m) in set.modes.iter().enumerate() {
            let n = (i + 2) as f64;
            let exact = (n * n - 1.0) / (1.0 + eta * n * n).sqrt();
            assert!((m.omega - exact).abs() < 1e-8 * exact, "{} vs {exact}", m.omega);
            assert_eq!(m.kind, RootKind::Tangential);
            assert_eq!(m.multiplicity, 2);
        }
    }

    #[test]
    fn close_roots_on_coarse_grid_are_flagged() {
        // a weak defect splits the n = 2 ring pair by a few percent
        let p = DimensionlessProblem::uniform(2.0 * PI, 0.01, BoundarySpec::PeriodicRing)
            .with_crack(PI, 0.2);
        let settings = SolverSettings {
            grid_cells: 8,
            ..SolverSettings::default()
        };
        let (_, warnings, _) = roots_in(&p, 1.0, 5.0, &settings).unwrap();
        assert!(
            warnings
                .iter()
                .any(|w| w.contains("closer than two grid steps") || w.contains("close roots")),
            "{warnings:?}"
        );
    }

    #[test]
    fn partial_result_when_ceiling_is_too_low() {
        let settings = SolverSettings {
            omega_max: Some(100.0),
            ..SolverSettings::default()
        };
        let set = modes(&cantilever(), 5, &settings).unwrap();
        assert_eq!(set.modes.len(), 2);
        assert!(!set.is_complete());
        assert!(set.warnings.iter().any(|w| w.contains("found 2 of 5")));
    }

    #[test]
    fn mode_shape_is_normalised_and_satisfies_clamp() {
        let p = DimensionlessProblem::uniform(PI / 3.0, 0.0, BoundarySpec::ClampedFree)
            .with_crack(0.4, 0.3);
        let set = modes(&p, 2, &SolverSettings::default()).unwrap();
        for m in &set.modes {
            let peak = m.shape.iter().map(|s| s.deflection).fold(f64::MIN, f64::max);
            assert!((peak - 1.0).abs() < 1e-12);
            let root = m.evaluate(&p, 0.0, Side::Right);
            assert!(root[0].abs() < 1e-8 && root[1].abs() < 1e-8);
            assert!(m.null_quality < 1e-8);
        }
    }

    #[test]
    fn slope_jump_matches_crack_spring() {
        let eta = 0.01;
        let kappa = 0.3;
        let at = 0.4 * PI / 6.0;
        let p = DimensionlessProblem::uniform(PI / 6.0, eta, BoundarySpec::ClampedFree)
            .with_crack(at, kappa);
        let set = modes(&p, 3, &SolverSettings::default()).unwrap();
        for m in &set.modes {
            let l = m.evaluate(&p, at, Side::Left);
            let r = m.evaluate(&p, at, Side::Right);
            let a = m.omega * m.omega;
            let moment = l[2] + (1.0 + a * eta) * l[0];
            let expected = kappa * moment / (1.0 + eta);
            let scale = l[1].abs().max(r[1].abs()).max(expected.abs());
            assert!((l[0] - r[0]).abs() < 1e-6);
            assert!(((r[1] - l[1]) - expected).abs() < 1e-6 * scale.max(1.0));
            assert!(expected.abs() > 1e-3);
        }
    }

    #[test]
    fn splitting_leaves_roots_unchanged() {
        let base = cantilever();
        let mut split = base.clone();
        split.split_at(0.3 * PI / 6.0);
        split.split_at(0.77 * PI / 6.0);
        let settings = SolverSettings::default();
        let a = modes(&base, 4, &settings).unwrap().omegas();
        let b = modes(&split, 4, &settings).unwrap().omegas();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn crack_at_free_end_is_neutral() {
        let beta = PI / 6.0;
        let settings = SolverSettings::default();
        let intact = modes(&cantilever(), 3, &settings).unwrap().omegas();
        let cracked = modes(&cantilever().with_crack(0.999 * beta, 0.5), 3, &settings)
            .unwrap()
            .omegas();
        for (x, y) in intact.iter().zip(&cracked) {
            assert!((x - y).abs() < 1e-4 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn crack_lowers_fundamental() {
        let settings = SolverSettings::default();
        let intact = modes(&cantilever(), 1, &settings).unwrap().omegas()[0];
        let cracked = modes(&cantilever().with_crack(PI / 12.0, 0.5), 1, &settings)
            .unwrap()
            .omegas()[0];
        assert!(cracked < intact);
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let p = cantilever().with_crack(0.2, 0.4);
        let settings = SolverSettings::default();
        let a = modes(&p, 3, &settings).unwrap();
        let b = modes(&p, 3, &settings).unwrap();
        assert_eq!(a, b);
    }
}
