//! Physical input data, validation, and reduction to the dimensionless
//! problem consumed by the solvers.
//!
//! All angles are radians. Lengths are metres on the physical side and
//! multiples of the arch radius on the dimensionless side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fracture::{self, ComplianceModel, FractureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Fracture(#[from] FractureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus E (Pa).
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Mass density (kg/m³).
    pub density: f64,
    /// Nonlocal parameter (e0·a)² in m².
    pub nonlocal_length_sq: f64,
}

impl Material {
    /// E = 7e11 Pa, ν = 0.3, ρ = 10 kg/m³, local elasticity.
    pub fn nano_defaults() -> Self {
        Material {
            youngs_modulus: 7e11,
            poisson_ratio: 0.3,
            density: 10.0,
            nonlocal_length_sq: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchGeometry {
    /// Radius of the middle line (m).
    pub radius: f64,
    /// Cross-section width (m).
    pub width: f64,
    /// Central angle β (rad).
    pub central_angle: f64,
    /// α_0 = 0 < α_1 < ... < α_{n+1} = β.
    pub interface_angles: Vec<f64>,
    /// Thickness h_j of segment (α_j, α_{j+1}), one per segment.
    pub thicknesses: Vec<f64>,
}

impl ArchGeometry {
    pub fn uniform(radius: f64, width: f64, central_angle: f64, thickness: f64) -> Self {
        ArchGeometry {
            radius,
            width,
            central_angle,
            interface_angles: vec![0.0, central_angle],
            thicknesses: vec![thickness],
        }
    }

    pub fn segment_count(&self) -> usize {
        self.thicknesses.len()
    }

    pub fn moment_of_inertia(&self, segment: usize) -> f64 {
        self.width * self.thicknesses[segment].powi(3) / 12.0
    }

    /// Index of the interface at `angle`, inserting an equal-thickness
    /// interface if none exists there. Returns `None` for angles outside
    /// the open interval (0, β).
    pub fn split_at(&mut self, angle: f64) -> Option<usize> {
        if !(angle > 0.0 && angle < self.central_angle) {
            return None;
        }
        let tol = 1e-12 * self.central_angle;
        if let Some(i) = self
            .interface_angles
            .iter()
            .position(|a| (a - angle).abs() <= tol)
        {
            return (i > 0 && i + 1 < self.interface_angles.len()).then_some(i);
        }
        let pos = self.interface_angles.iter().position(|&a| a > angle)?;
        self.interface_angles.insert(pos, angle);
        let h = self.thicknesses[pos - 1];
        self.thicknesses.insert(pos - 1, h);
        Some(pos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShapeFunction {
    /// Quartic fits F1 (tension) and F2 (bending).
    #[default]
    #[serde(rename = "poly31_32")]
    Poly31_32,
    /// Tada's closed form, used for both entries.
    #[serde(rename = "tada33")]
    Tada33,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceThickness {
    /// h = min(h_j, h_{j+1}) at a step.
    #[default]
    MinNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrackSpec {
    /// Interior interface index j in 1..=n.
    pub interface: usize,
    /// Crack depth over thickness, c/h.
    pub depth_ratio: f64,
    #[serde(default)]
    pub shape: ShapeFunction,
    #[serde(default)]
    pub reference: ReferenceThickness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySpec {
    ClampedFree,
    ClampedClamped,
    PeriodicRing,
}

/// Which moment expression the free edge of a clamped-free arch sets to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FreeEdgeRule {
    /// X'' + (1 + A η̄) X = 0 and X''' + (1 + A η̄) X' = 0, i.e. M = Q = 0.
    #[default]
    Consistent,
    /// X'' + (1 + A) X = 0 and X''' + (1 + A) X' = 0.
    PaperLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

pub fn validate(
    material: &Material,
    geometry: &ArchGeometry,
    cracks: &[CrackSpec],
    boundary: BoundarySpec,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let positive = |x: f64| x.is_finite() && x > 0.0;

    if !positive(material.youngs_modulus) {
        report.push("material.youngs_modulus", "must be positive");
    }
    if !(material.poisson_ratio >= 0.0 && material.poisson_ratio < 0.5) {
        report.push("material.poisson_ratio", "must lie in [0, 0.5)");
    }
    if !positive(material.density) {
        report.push("material.density", "must be positive");
    }
    if !(material.nonlocal_length_sq.is_finite() && material.nonlocal_length_sq >= 0.0) {
        report.push("material.nonlocal_length_sq", "must be non-negative");
    }

    if !positive(geometry.radius) {
        report.push("geometry.radius", "must be positive");
    }
    if !positive(geometry.width) {
        report.push("geometry.width", "must be positive");
    }
    let beta = geometry.central_angle;
    if !(beta > 0.0 && beta <= 2.0 * std::f64::consts::PI * (1.0 + 1e-12)) {
        report.push("geometry.central_angle", "must lie in (0, 2π]");
    }
    let angles = &geometry.interface_angles;
    if angles.len() < 2 {
        report.push("geometry.interface_angles", "needs at least α_0 and β");
    } else {
        if angles[0] != 0.0 {
            report.push("geometry.interface_angles", "α_0 must be 0");
        }
        if (angles[angles.len() - 1] - beta).abs() > 1e-12 * beta.abs().max(1.0) {
            report.push("geometry.interface_angles", "last angle must equal β");
        }
        if angles.windows(2).any(|w| !(w[1] > w[0])) {
            report.push("geometry.interface_angles", "angles must be strictly increasing");
        }
        if geometry.thicknesses.len() + 1 != angles.len() {
            report.push(
                "geometry.thicknesses",
                "need exactly one thickness per segment",
            );
        }
    }
    for (j, &h) in geometry.thicknesses.iter().enumerate() {
        if !positive(h) {
            report.push(format!("geometry.thicknesses[{j}]"), "must be positive");
        }
    }

    let interior = geometry.interface_angles.len().saturating_sub(2);
    for (i, c) in cracks.iter().enumerate() {
        if c.interface == 0 || c.interface > interior {
            report.push(
                format!("cracks[{i}].interface"),
                "must address an interior interface",
            );
        }
        if !(c.depth_ratio >= 0.0) {
            report.push(format!("cracks[{i}].depth_ratio"), "must be non-negative");
        } else if c.depth_ratio >= 1.0 {
            report.push(
                format!("cracks[{i}].depth_ratio"),
                "through-crack forbidden (s must be < 1)",
            );
        }
        if cracks[..i].iter().any(|o| o.interface == c.interface) {
            report.push(
                format!("cracks[{i}].interface"),
                "at most one crack per interface",
            );
        }
    }

    if boundary == BoundarySpec::PeriodicRing
        && (beta - 2.0 * std::f64::consts::PI).abs() > 1e-9
    {
        report.push("boundary", "ring requires full circle (β = 2π)");
    }
    report
}

/// A segment (ᾱ_j, ᾱ_{j+1}) with thickness ratio t_j = h_j / h_0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub thickness_ratio: f64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Interior interface between segments `j - 1` and `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub angle: f64,
    /// Dimensionless rotational-spring flexibility κ_j (0 when uncracked).
    pub kappa: f64,
}

/// Canonical nondimensional problem: lengths in units of R, frequency
/// Ω = ω R² √(12ρ/E) / h_0 so that A_j = Ω² / t_j².
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessProblem {
    /// η̄ = (e0·a)² / R².
    pub eta_bar: f64,
    pub segments: Vec<Segment>,
    /// `segments.len() - 1` interior interfaces in angular order.
    pub interfaces: Vec<Interface>,
    pub boundary: BoundarySpec,
    pub free_edge: FreeEdgeRule,
    /// h_0 / R.
    pub slenderness: f64,
}

impl DimensionlessProblem {
    /// Single uniform segment spanning `[0, beta]`.
    pub fn uniform(beta: f64, eta_bar: f64, boundary: BoundarySpec) -> Self {
        DimensionlessProblem {
            eta_bar,
            segments: vec![Segment {
                start: 0.0,
                end: beta,
                thickness_ratio: 1.0,
            }],
            interfaces: Vec::new(),
            boundary,
            free_edge: FreeEdgeRule::Consistent,
            slenderness: 0.1,
        }
    }

    pub fn central_angle(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end)
    }

    /// Splits the segment containing `angle` and returns the new interface
    /// index (0-based into `interfaces`). An existing interface at `angle` is
    /// reused.
    pub fn split_at(&mut self, angle: f64) -> Option<usize> {
        let beta = self.central_angle();
        if !(angle > 0.0 && angle < beta) {
            return None;
        }
        let tol = 1e-12 * beta;
        if let Some(i) = self
            .interfaces
            .iter()
            .position(|f| (f.angle - angle).abs() <= tol)
        {
            return Some(i);
        }
        let j = self
            .segments
            .iter()
            .position(|s| angle > s.start && angle < s.end)?;
        let seg = self.segments[j];
        self.segments[j].end = angle;
        self.segments.insert(
            j + 1,
            Segment {
                start: angle,
                end: seg.end,
                thickness_ratio: seg.thickness_ratio,
            },
        );
        self.interfaces.insert(j, Interface { angle, kappa: 0.0 });
        Some(j)
    }

    /// Builder-style crack insertion with a given flexibility.
    pub fn with_crack(mut self, angle: f64, kappa: f64) -> Self {
        if let Some(i) = self.split_at(angle) {
            self.interfaces[i].kappa = kappa;
        }
        self
    }

    /// Builder-style thickness step: segments starting at or after `angle`
    /// get thickness ratio `ratio`.
    pub fn with_step(mut self, angle: f64, ratio: f64) -> Self {
        self.split_at(angle);
        for s in &mut self.segments {
            if s.start >= angle - 1e-12 {
                s.thickness_ratio = ratio;
            }
        }
        self
    }

    /// Thickness ratio of the thinner neighbour of interface `i`.
    pub fn reference_ratio(&self, i: usize) -> f64 {
        self.segments[i]
            .thickness_ratio
            .min(self.segments[i + 1].thickness_ratio)
    }

    /// Structural checks on an already nondimensional problem.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if !(self.eta_bar.is_finite() && self.eta_bar >= 0.0) {
            report.push("eta_bar", "must be non-negative");
        }
        if self.segments.is_empty() {
            report.push("segments", "at least one segment required");
            return report;
        }
        if self.segments[0].start != 0.0 {
            report.push("segments[0].start", "must be 0");
        }
        for (j, s) in self.segments.iter().enumerate() {
            if !(s.thickness_ratio.is_finite() && s.thickness_ratio > 0.0) {
                report.push(format!("segments[{j}].thickness_ratio"), "must be positive");
            }
            if !(s.end > s.start) {
                report.push(format!("segments[{j}]"), "empty span");
            }
        }
        for (j, w) in self.segments.windows(2).enumerate() {
            if w[0].end != w[1].start {
                report.push(format!("segments[{j}]"), "spans must tile [0, β]");
            }
        }
        if self.interfaces.len() + 1 != self.segments.len() {
            report.push("interfaces", "need one interface between each pair of segments");
        } else {
            for (i, f) in self.interfaces.iter().enumerate() {
                if f.angle != self.segments[i].end || !f.kappa.is_finite() {
                    report.push(format!("interfaces[{i}]"), "inconsistent with segment spans");
                }
            }
        }
        if self.boundary == BoundarySpec::PeriodicRing
            && (self.central_angle() - 2.0 * std::f64::consts::PI).abs() > 1e-9
        {
            report.push("boundary", "ring requires full circle (β = 2π)");
        }
        report
    }
}

/// Reduces validated physical input to the dimensionless problem. Crack
/// flexibilities are left at zero; see [`build_problem`].
pub fn nondimensionalize(
    material: &Material,
    geometry: &ArchGeometry,
    cracks: &[CrackSpec],
    boundary: BoundarySpec,
) -> Result<DimensionlessProblem, ModelError> {
    let report = validate(material, geometry, cracks, boundary);
    if !report.is_empty() {
        return Err(ModelError::Invalid(report));
    }
    let r = geometry.radius;
    let h0 = geometry.thicknesses[0];
    let angles = &geometry.interface_angles;
    let segments = geometry
        .thicknesses
        .iter()
        .enumerate()
        .map(|(j, &h)| Segment {
            start: angles[j],
            end: angles[j + 1],
            thickness_ratio: h / h0,
        })
        .collect();
    let interfaces = angles[1..angles.len() - 1]
        .iter()
        .map(|&angle| Interface { angle, kappa: 0.0 })
        .collect();
    Ok(DimensionlessProblem {
        eta_bar: material.nonlocal_length_sq / (r * r),
        segments,
        interfaces,
        boundary,
        free_edge: FreeEdgeRule::Consistent,
        slenderness: h0 / r,
    })
}

/// Nondimensionalizes and fills every crack's spring flexibility.
pub fn build_problem(
    material: &Material,
    geometry: &ArchGeometry,
    cracks: &[CrackSpec],
    boundary: BoundarySpec,
    free_edge: FreeEdgeRule,
    compliance_model: ComplianceModel,
) -> Result<DimensionlessProblem, ModelError> {
    let mut problem = nondimensionalize(material, geometry, cracks, boundary)?;
    problem.free_edge = free_edge;
    for crack in cracks {
        let kappa = fracture::crack_flexibility(crack, material, geometry, compliance_model)?;
        problem.interfaces[crack.interface - 1].kappa = kappa;
    }
    Ok(problem)
}

/// Factor converting Ω to ω in rad/s: ω = Ω · h_0 / (R² √(12ρ/E)).
pub fn omega_scale(material: &Material, geometry: &ArchGeometry) -> f64 {
    let r = geometry.radius;
    geometry.thicknesses[0] / (r * r * (12.0 * material.density / material.youngs_modulus).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn defaults() -> (Material, ArchGeometry) {
        (
            Material::nano_defaults(),
            ArchGeometry::uniform(110e-9, 1e-9, PI / 6.0, 10e-9),
        )
    }

    #[test]
    fn default_configuration_is_valid() {
        let (m, g) = defaults();
        assert!(validate(&m, &g, &[], BoundarySpec::ClampedFree).is_empty());
    }

    #[test]
    fn through_crack_is_rejected() {
        let (m, mut g) = defaults();
        let j = g.split_at(0.2).unwrap();
        let crack = CrackSpec {
            interface: j,
            depth_ratio: 1.0,
            shape: ShapeFunction::Poly31_32,
            reference: ReferenceThickness::MinNeighbor,
        };
        let report = validate(&m, &g, &[crack], BoundarySpec::ClampedFree);
        assert!(report.mentions("through-crack forbidden"), "{report}");
    }

    #[test]
    fn ring_needs_full_circle() {
        let (m, g) = defaults();
        let g = ArchGeometry {
            central_angle: PI,
            interface_angles: vec![0.0, PI],
            ..g
        };
        let report = validate(&m, &g, &[], BoundarySpec::PeriodicRing);
        assert!(report.mentions("ring requires full circle"));
    }

    #[test]
    fn crack_must_sit_on_interior_interface() {
        let (m, g) = defaults();
        let crack = CrackSpec {
            interface: 1,
            depth_ratio: 0.2,
            shape: ShapeFunction::Poly31_32,
            reference: ReferenceThickness::MinNeighbor,
        };
        assert!(validate(&m, &g, &[crack], BoundarySpec::ClampedFree)
            .mentions("interior interface"));
    }

    #[test]
    fn uniform_arch_has_unit_ratios_even_when_split() {
        let (m, mut g) = defaults();
        g.split_at(0.1);
        g.split_at(0.3);
        let p = nondimensionalize(&m, &g, &[], BoundarySpec::ClampedFree).unwrap();
        assert_eq!(p.segments.len(), 3);
        assert!(p.segments.iter().all(|s| s.thickness_ratio == 1.0));
        assert!(p.check().is_empty());
    }

    #[test]
    fn classical_limit_and_nonlocal_scaling() {
        let (mut m, g) = defaults();
        let p = nondimensionalize(&m, &g, &[], BoundarySpec::ClampedFree).unwrap();
        assert_eq!(p.eta_bar, 0.0);
        m.nonlocal_length_sq = 1e-18;
        let p = nondimensionalize(&m, &g, &[], BoundarySpec::ClampedFree).unwrap();
        assert!((p.eta_bar - 1.0 / 110.0f64.powi(2)).abs() < 1e-18);
        assert!((p.eta_bar - 8.2645e-5).abs() < 1e-8);
    }

    #[test]
    fn invalid_config_is_refused() {
        let (m, mut g) = defaults();
        g.thicknesses[0] = -1.0;
        assert!(matches!(
            nondimensionalize(&m, &g, &[], BoundarySpec::ClampedFree),
            Err(ModelError::Invalid(_))
        ));
    }

    #[test]
    fn split_reuses_existing_interfaces() {
        let mut p = DimensionlessProblem::uniform(1.0, 0.0, BoundarySpec::ClampedFree);
        assert_eq!(p.split_at(0.5), Some(0));
        assert_eq!(p.split_at(0.25), Some(0));
        assert_eq!(p.split_at(0.5), Some(1));
        assert_eq!(p.split_at(1.0), None);
        assert!(p.check().is_empty());
    }
}
