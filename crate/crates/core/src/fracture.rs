//! Crack shape functions, local compliance of a cracked section, and the
//! dimensionless rotational-spring flexibility used in the slope-jump
//! condition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ArchGeometry, CrackSpec, Material, ShapeFunction};
use crate::quadrature::{self, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractureError {
    #[error("crack depth ratio {s} outside the admissible range {range}")]
    DepthOutOfRange { s: f64, range: &'static str },
    #[error("compliance integral failed: {0}")]
    Quadrature(#[from] QuadratureError),
}

/// How the compliance integrals are scaled into physical compliances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ComplianceModel {
    /// c11 = 2/(Eb)∫ξF1², c12 = 2/(Ebh)∫ξF1F2, c22 = 2/(Eb)∫ξF2², evaluated
    /// with lengths expressed in nanometres.
    #[default]
    Paper,
    /// Compliances derived from K = √(πc)(N F1/(bh) + 6M F2/(bh²)):
    /// c11 = 72π/(Ebh²)∫ξF2², c12 = 12π/(Ebh)∫ξF1F2, c22 = 2π/(Eb)∫ξF1².
    Dimarogonas,
}

/// Length unit in which the `Paper` compliance variant is evaluated.
pub const PAPER_LENGTH_UNIT: f64 = 1e-9;

/// Absolute tolerance for the adaptive compliance quadrature.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// Order of the fixed Gauss–Legendre cross-check rule.
pub const CROSS_CHECK_ORDER: usize = 64;

fn check_closed(s: f64) -> Result<(), FractureError> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(FractureError::DepthOutOfRange {
            s,
            range: "[0, 1]",
        })
    }
}

fn check_open(s: f64) -> Result<(), FractureError> {
    if (0.0..1.0).contains(&s) {
        Ok(())
    } else {
        Err(FractureError::DepthOutOfRange {
            s,
            range: "[0, 1)",
        })
    }
}

fn horner(coeffs: &[f64; 5], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

const F1_COEFFS: [f64; 5] = [1.12, -0.23, 10.55, -21.72, 30.39];
const F2_COEFFS: [f64; 5] = [1.12, -1.4, 7.33, -13.08, 14.08];

/// F1(s) = 1.12 − 0.23s + 10.55s² − 21.72s³ + 30.39s⁴.
pub fn shape_f1(s: f64) -> Result<f64, FractureError> {
    check_closed(s)?;
    Ok(horner(&F1_COEFFS, s))
}

/// F2(s) = 1.12 − 1.4s + 7.33s² − 13.08s³ + 14.08s⁴.
pub fn shape_f2(s: f64) -> Result<f64, FractureError> {
    check_closed(s)?;
    Ok(horner(&F2_COEFFS, s))
}

/// Tada's closed-form shape function; 1.122 in the limit s → 0.
pub fn shape_tada(s: f64) -> Result<f64, FractureError> {
    check_open(s)?;
    Ok(tada_unchecked(s))
}

fn tada_unchecked(s: f64) -> f64 {
    let x = 0.5 * PI * s;
    // tan(x)/x → 1 as x → 0
    let ratio = if x < 1e-8 { 1.0 } else { x.tan() / x };
    ratio.sqrt() * (0.923 + 0.199 * (1.0 - x.sin()).powi(4)) / x.cos()
}

/// The (F1, F2) pair selected by `shape`.
fn shape_pair(shape: ShapeFunction, s: f64) -> (f64, f64) {
    match shape {
        ShapeFunction::Poly31_32 => (horner(&F1_COEFFS, s), horner(&F2_COEFFS, s)),
        ShapeFunction::Tada33 => {
            let f = tada_unchecked(s);
            (f, f)
        }
    }
}

/// ∫₀^s ξF1², ∫₀^s ξF1F2 and ∫₀^s ξF2² over the dimensionless depth ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceIntegrals {
    pub f1f1: f64,
    pub f1f2: f64,
    pub f2f2: f64,
    pub error_estimate: f64,
}

pub fn compliance_integrals(
    s: f64,
    shape: ShapeFunction,
) -> Result<ComplianceIntegrals, FractureError> {
    check_open(s)?;
    let integrate = |g: fn(f64, f64) -> f64| {
        quadrature::integrate_adaptive(
            |xi| {
                let (f1, f2) = shape_pair(shape, xi);
                xi * g(f1, f2)
            },
            0.0,
            s,
            QUADRATURE_TOL,
        )
    };
    let a = integrate(|f1, _| f1 * f1)?;
    let b = integrate(|f1, f2| f1 * f2)?;
    let c = integrate(|_, f2| f2 * f2)?;
    Ok(ComplianceIntegrals {
        f1f1: a.value,
        f1f2: b.value,
        f2f2: c.value,
        error_estimate: a.error_estimate + b.error_estimate + c.error_estimate,
    })
}

/// The same integrals with the fixed 64-node rule; used as a cross-check.
pub fn compliance_integrals_fixed(
    s: f64,
    shape: ShapeFunction,
) -> Result<[f64; 3], FractureError> {
    check_open(s)?;
    let rule = |g: fn(f64, f64) -> f64| {
        quadrature::integrate_fixed(
            |xi| {
                let (f1, f2) = shape_pair(shape, xi);
                xi * g(f1, f2)
            },
            0.0,
            s,
            CROSS_CHECK_ORDER,
        )
    };
    Ok([
        rule(|f1, _| f1 * f1),
        rule(|f1, f2| f1 * f2),
        rule(|_, f2| f2 * f2),
    ])
}

/// Local compliance entries of a cracked section; c21 = c12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCompliance {
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
}

impl LocalCompliance {
    pub const ZERO: LocalCompliance = LocalCompliance {
        c11: 0.0,
        c12: 0.0,
        c22: 0.0,
    };

    pub fn is_positive_semidefinite(&self) -> bool {
        self.c11 >= 0.0 && self.c22 >= 0.0 && self.c12 * self.c12 <= self.c11 * self.c22 * (1.0 + 1e-12)
    }
}

pub fn compliance(
    s: f64,
    youngs_modulus: f64,
    width: f64,
    thickness: f64,
    shape: ShapeFunction,
    model: ComplianceModel,
) -> Result<LocalCompliance, FractureError> {
    check_open(s)?;
    if s == 0.0 {
        return Ok(LocalCompliance::ZERO);
    }
    let ints = compliance_integrals(s, shape)?;
    let eb = youngs_modulus * width;
    let h = thickness;
    Ok(match model {
        ComplianceModel::Paper => LocalCompliance {
            c11: 2.0 / eb * ints.f1f1,
            c12: 2.0 / (eb * h) * ints.f1f2,
            c22: 2.0 / eb * ints.f2f2,
        },
        ComplianceModel::Dimarogonas => LocalCompliance {
            c11: 72.0 * PI / (eb * h * h) * ints.f2f2,
            c12: 12.0 * PI / (eb * h) * ints.f1f2,
            c22: 2.0 * PI / eb * ints.f1f1,
        },
    })
}

/// κ = (c11 − c12/R)·E·I/R, the coefficient relating the slope jump to the
/// bending-moment expression at the crack (membrane force N = −M/R).
pub fn spring_flexibility(
    compliance: &LocalCompliance,
    youngs_modulus: f64,
    inertia: f64,
    radius: f64,
) -> f64 {
    (compliance.c11 - compliance.c12 / radius) * youngs_modulus * inertia / radius
}

/// Dimensionless flexibility of `crack` using the thinner neighbouring
/// segment as reference section.
pub fn crack_flexibility(
    crack: &CrackSpec,
    material: &Material,
    geometry: &ArchGeometry,
    model: ComplianceModel,
) -> Result<f64, FractureError> {
    let j = crack.interface;
    let h = geometry.thicknesses[j - 1].min(geometry.thicknesses[j]);
    let unit = match model {
        ComplianceModel::Paper => PAPER_LENGTH_UNIT,
        ComplianceModel::Dimarogonas => 1.0,
    };
    let (h, b, r) = (h / unit, geometry.width / unit, geometry.radius / unit);
    let e = material.youngs_modulus;
    let c = compliance(crack.depth_ratio, e, b, h, crack.shape, model)?;
    Ok(spring_flexibility(&c, e, b * h * h * h / 12.0, r))
}
