//! JSON run configuration and its reduction to solver inputs.

use serde::Deserialize;

use crate::eigensolve::SolverSettings;
use crate::fracture::ComplianceModel;
use crate::model::{
    self, ArchGeometry, BoundarySpec, CrackSpec, DimensionlessProblem, FreeEdgeRule, Material,
    ModelError, ReferenceThickness, ShapeFunction,
};

use super::sweep::SweepSpec;
use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    M,
    Nm,
}

impl LengthUnit {
    pub fn metres(self) -> f64 {
        match self {
            LengthUnit::M => 1.0,
            LengthUnit::Nm => 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AngleUnit {
    #[default]
    Rad,
    Deg,
    /// Fraction of the central angle β (crack and step positions only).
    Fraction,
}

/// An angle given either as a bare number of radians or as
/// `{"value": 30, "unit": "deg"}`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Tagged {
        value: f64,
        #[serde(default)]
        unit: AngleUnit,
    },
}

impl Angle {
    pub fn value(&self) -> f64 {
        match *self {
            Angle::Radians(v) | Angle::Tagged { value: v, .. } => v,
        }
    }

    pub fn unit(&self) -> AngleUnit {
        match *self {
            Angle::Radians(_) => AngleUnit::Rad,
            Angle::Tagged { unit, .. } => unit,
        }
    }

    pub fn set_value(&mut self, v: f64) {
        *self = Angle::Tagged {
            value: v,
            unit: self.unit(),
        };
    }

    /// Radians, with fractions taken of `beta`.
    pub fn radians(&self, beta: f64) -> f64 {
        match self.unit() {
            AngleUnit::Rad => self.value(),
            AngleUnit::Deg => self.value().to_radians(),
            AngleUnit::Fraction => self.value() * beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConfig {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    /// (e0·a)² in squared length units.
    pub nonlocal_eta: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        let m = Material::nano_defaults();
        MaterialConfig {
            youngs_modulus: m.youngs_modulus,
            poisson_ratio: m.poisson_ratio,
            density: m.density,
            nonlocal_eta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub at: Angle,
    /// Thickness from `at` onwards.
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Defaults to 110 nm.
    pub radius: Option<f64>,
    /// Defaults to 1 nm.
    pub width: Option<f64>,
    pub central_angle: Angle,
    /// h_0; defaults to 10 nm.
    pub thickness: Option<f64>,
    #[serde(default)]
    pub steps: Vec<StepConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackConfig {
    pub at: Angle,
    pub depth_ratio: f64,
    #[serde(default)]
    pub shape: ShapeFunction,
    #[serde(default)]
    pub reference: ReferenceThickness,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub modes: usize,
    pub free_edge: FreeEdgeRule,
    pub compliance_model: ComplianceModel,
    pub oracle_nodes: usize,
    pub search: SolverSettings,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            modes: 5,
            free_edge: FreeEdgeRule::Consistent,
            compliance_model: ComplianceModel::Paper,
            oracle_nodes: 4000,
            search: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub length_unit: LengthUnit,
    #[serde(default)]
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub cracks: Vec<CrackConfig>,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweeps: Vec<SweepSpec>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub modes: Option<usize>,
    pub free_edge: Option<FreeEdgeRule>,
    pub compliance_model: Option<ComplianceModel>,
}

/// Physical inputs for one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub material: Material,
    pub geometry: ArchGeometry,
    pub cracks: Vec<CrackSpec>,
    pub boundary: BoundarySpec,
    pub free_edge: FreeEdgeRule,
    pub compliance_model: ComplianceModel,
}

impl Scenario {
    pub fn problem(&self) -> Result<DimensionlessProblem, ModelError> {
        model::build_problem(
            &self.material,
            &self.geometry,
            &self.cracks,
            self.boundary,
            self.free_edge,
            self.compliance_model,
        )
    }

    pub fn omega_scale(&self) -> f64 {
        model::omega_scale(&self.material, &self.geometry)
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.modes {
            self.solver.modes = k;
        }
        if let Some(f) = o.free_edge {
            self.solver.free_edge = f;
        }
        if let Some(c) = o.compliance_model {
            self.solver.compliance_model = c;
        }
    }

    /// Resolves units and positions into model inputs. Steps and cracks at
    /// the same angle share one interface.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let u = self.length_unit.metres();
        let g = &self.geometry;
        if g.central_angle.unit() == AngleUnit::Fraction {
            return Err(CliError::Config(
                "geometry.central_angle: unit must be rad or deg".into(),
            ));
        }
        let beta = g.central_angle.radians(0.0);
        let radius = g.radius.map_or(110e-9, |r| r * u);
        let width = g.width.map_or(1e-9, |b| b * u);
        let h0 = g.thickness.map_or(10e-9, |h| h * u);
        let mut geometry = ArchGeometry::uniform(radius, width, beta, h0);

        let mut steps: Vec<(f64, f64)> = g
            .steps
            .iter()
            .map(|s| (s.at.radians(beta), s.thickness * u))
            .collect();
        steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (i, &(at, h)) in steps.iter().enumerate() {
            let Some(j) = geometry.split_at(at) else {
                return Err(CliError::Config(format!(
                    "geometry.steps[{i}].at: must lie strictly inside (0, β)"
                )));
            };
            for t in &mut geometry.thicknesses[j..] {
                *t = h;
            }
        }
        let mut located = Vec::with_capacity(self.cracks.len());
        for (i, c) in self.cracks.iter().enumerate() {
            let at = c.at.radians(beta);
            if geometry.split_at(at).is_none() {
                return Err(CliError::Config(format!(
                    "cracks[{i}].at: must lie strictly inside (0, β)"
                )));
            }
            located.push(at);
        }
        // interface indices are final only after every split
        let cracks = self
            .cracks
            .iter()
            .zip(located)
            .map(|(c, at)| CrackSpec {
                interface: geometry
                    .split_at(at)
                    .expect("interface inserted above"),
                depth_ratio: c.depth_ratio,
                shape: c.shape,
                reference: c.reference,
            })
            .collect::<Vec<_>>();

        let m = &self.material;
        let material = Material {
            youngs_modulus: m.youngs_modulus,
            poisson_ratio: m.poisson_ratio,
            density: m.density,
            nonlocal_length_sq: m.nonlocal_eta * u * u,
        };
        let report = model::validate(&material, &geometry, &cracks, self.boundary);
        if !report.is_empty() {
            return Err(CliError::Config(report.to_string()));
        }
        Ok(Scenario {
            material,
            geometry,
            cracks,
            boundary: self.boundary,
            free_edge: self.solver.free_edge,
            compliance_model: self.solver.compliance_model,
        })
    }

    /// Checks everything that can be checked without solving.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        if self.solver.modes == 0 {
            problems.push("solver.modes: must be at least 1".to_string());
        }
        for (i, s) in self.sweeps.iter().enumerate() {
            problems.extend(s.check(self).into_iter().map(|m| format!("sweeps[{i}].{m}")));
        }
        if let Err(CliError::Config(m)) = self.scenario() {
            problems.push(m);
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(problems.join("\n")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "length_unit": "nm",
        "geometry": {"central_angle": {"value": 30, "unit": "deg"}},
        "cracks": [{"at": {"value": 0.4, "unit": "fraction"}, "depth_ratio": 0.5}],
        "boundary": "clamped_free"
    }"#;

    #[test]
    fn defaults_fill_in_nano_arch_values() {
        let c = Config::parse(MINIMAL).unwrap();
        let s = c.scenario().unwrap();
        assert_eq!(s.geometry.radius, 110e-9);
        assert_eq!(s.geometry.width, 1e-9);
        assert_eq!(s.geometry.thicknesses, vec![10e-9, 10e-9]);
        assert!((s.geometry.interface_angles[1] - 0.4 * std::f64::consts::PI / 6.0).abs() < 1e-15);
        assert_eq!(s.cracks[0].interface, 1);
        assert_eq!(s.material.youngs_modulus, 7e11);
    }

    #[test]
    fn steps_and_cracks_share_interfaces() {
        let text = r#"{
            "geometry": {"central_angle": 1.0, "radius": 1, "width": 1, "thickness": 0.1,
                         "steps": [{"at": 0.5, "thickness": 0.05}]},
            "cracks": [{"at": 0.7, "depth_ratio": 0.2}, {"at": 0.5, "depth_ratio": 0.1}],
            "boundary": "clamped_clamped"
        }"#;
        let s = Config::parse(text).unwrap().scenario().unwrap();
        assert_eq!(s.geometry.interface_angles, vec![0.0, 0.5, 0.7, 1.0]);
        assert_eq!(s.geometry.thicknesses, vec![0.1, 0.05, 0.05]);
        assert_eq!(s.cracks[0].interface, 2);
        assert_eq!(s.cracks[1].interface, 1);
    }

    #[test]
    fn unknown_field_reports_location() {
        let err = Config::parse(r#"{"geometry": {"central_angle": 1.0, "radios": 3},
            "boundary": "clamped_free"}"#)
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("radios") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn ring_needs_full_circle() {
        let text = r#"{"geometry": {"central_angle": {"value": 180, "unit": "deg"}},
            "boundary": "periodic_ring"}"#;
        let err = Config::parse(text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("ring requires full circle"));
        assert_eq!(err.exit_code(), 2);
    }
}
