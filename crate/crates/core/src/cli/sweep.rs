//! Parameter sweeps over a base configuration, written as CSV.

use std::io::Write;

use rayon::prelude::*;
use serde::Deserialize;

use crate::eigensolve::{self, ModeSet};
use crate::model::ShapeFunction;

use super::config::Config;
use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    ThicknessH0,
    CrackDepthS,
    NonlocalEta,
    CrackLocation,
    #[serde(rename = "radius_R")]
    RadiusR,
    CentralAngleBeta,
    /// Family axis only: selects the crack shape function.
    ShapeFunction,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::ThicknessH0 => "thickness_h0",
            Parameter::CrackDepthS => "crack_depth_s",
            Parameter::NonlocalEta => "nonlocal_eta",
            Parameter::CrackLocation => "crack_location",
            Parameter::RadiusR => "radius_R",
            Parameter::CentralAngleBeta => "central_angle_beta",
            Parameter::ShapeFunction => "shape_function",
        }
    }

    fn needs_crack(self) -> bool {
        matches!(
            self,
            Parameter::CrackDepthS | Parameter::CrackLocation | Parameter::ShapeFunction
        )
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Number(x) => fmt_sig12(*x),
            Value::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub parameter: Parameter,
    pub values: Vec<Value>,
}

/// One sweep: `parameter` runs over `values` for each family member.
/// Values are in the units of the configuration field they replace; crack
/// location and central angle keep the unit of the base config.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub parameter: Parameter,
    pub values: Vec<f64>,
    #[serde(default)]
    pub family: Option<Family>,
    #[serde(default)]
    pub modes: Option<usize>,
}

impl SweepSpec {
    /// Diagnostics for this sweep against `config`, each prefixed by field.
    pub fn check(&self, config: &Config) -> Vec<String> {
        let mut out = Vec::new();
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            out.push("name: use letters, digits, '_' or '-'".into());
        }
        if self.parameter == Parameter::ShapeFunction {
            out.push("parameter: shape_function can only be a family axis".into());
        }
        if self.values.is_empty() {
            out.push("values: grids non-empty (got an empty grid)".into());
        } else if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            out.push("values: grid must be strictly increasing".into());
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            out.push("values: must be finite".into());
        }
        if self.parameter.needs_crack() && config.cracks.is_empty() {
            out.push("parameter: needs at least one crack in the base config".into());
        }
        if self.modes == Some(0) {
            out.push("modes: must be at least 1".into());
        }
        if let Some(f) = &self.family {
            if f.parameter == self.parameter {
                out.push("family.parameter: must differ from the swept parameter".into());
            }
            if f.parameter.needs_crack() && config.cracks.is_empty() {
                out.push("family.parameter: needs at least one crack in the base config".into());
            }
            if f.values.is_empty() {
                out.push("family.values: grids non-empty (got an empty grid)".into());
            }
            let numbers: Option<Vec<f64>> = f
                .values
                .iter()
                .map(|v| match v {
                    Value::Number(x) => Some(*x),
                    Value::Text(_) => None,
                })
                .collect();
            match (f.parameter, numbers) {
                (Parameter::ShapeFunction, _) => {
                    for (i, v) in f.values.iter().enumerate() {
                        if shape_of(v).is_none() {
                            out.push(format!(
                                "family.values[{i}]: expected \"poly31_32\" or \"tada33\""
                            ));
                        }
                    }
                }
                (_, None) => out.push("family.values: must be numbers".into()),
                (_, Some(xs)) => {
                    if xs.windows(2).any(|w| !(w[1] > w[0])) {
                        out.push("family.values: grid must be strictly increasing".into());
                    }
                }
            }
        }
        out
    }

    fn family_values(&self) -> Vec<Option<&Value>> {
        match &self.family {
            Some(f) => f.values.iter().map(Some).collect(),
            None => vec![None],
        }
    }
}

fn shape_of(v: &Value) -> Option<ShapeFunction> {
    match v {
        Value::Text(s) => serde_json::from_value(serde_json::Value::String(s.clone())).ok(),
        Value::Number(_) => None,
    }
}

/// Sets `p` to `v` on a copy of the base configuration.
fn set(config: &mut Config, p: Parameter, v: &Value) {
    match (p, v) {
        (Parameter::ShapeFunction, v) => {
            let shape = shape_of(v).expect("checked by SweepSpec::check");
            for c in &mut config.cracks {
                c.shape = shape;
            }
        }
        (_, Value::Text(_)) => unreachable!("checked by SweepSpec::check"),
        (p, &Value::Number(x)) => match p {
            Parameter::ThicknessH0 => config.geometry.thickness = Some(x),
            Parameter::CrackDepthS => config.cracks[0].depth_ratio = x,
            Parameter::NonlocalEta => config.material.nonlocal_eta = x,
            Parameter::CrackLocation => config.cracks[0].at.set_value(x),
            Parameter::RadiusR => config.geometry.radius = Some(x),
            Parameter::CentralAngleBeta => config.geometry.central_angle.set_value(x),
            Parameter::ShapeFunction => unreachable!(),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub swept_value: f64,
    pub family_value: Option<Value>,
    pub mode_index: usize,
    pub omega: f64,
    pub omega_rad_per_s: f64,
    pub root_kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub name: String,
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// Ω of `mode` along the swept axis for one family member.
    pub fn series(&self, family: Option<&Value>, mode: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.mode_index == mode && r.family_value.as_ref() == family)
            .map(|r| (r.swept_value, r.omega))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record([
            "swept_value",
            "family_value",
            "mode_index",
            "omega_dimensionless",
            "omega_rad_per_s",
            "root_kind",
        ])
        .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                fmt_sig12(r.swept_value),
                r.family_value.as_ref().map(Value::csv).unwrap_or_default(),
                r.mode_index.to_string(),
                fmt_sig12(r.omega),
                fmt_sig12(r.omega_rad_per_s),
                r.root_kind.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }
}

struct Point<'a> {
    swept: f64,
    family: Option<&'a Value>,
}

/// Runs one sweep. Points are solved in parallel and reassembled in grid
/// order (family outer, swept value inner).
pub fn run_sweep(config: &Config, spec: &SweepSpec) -> Result<SweepResult, CliError> {
    let problems = spec.check(config);
    if !problems.is_empty() {
        return Err(CliError::Config(
            problems
                .into_iter()
                .map(|m| format!("sweep '{}': {m}", spec.name))
                .collect::<Vec<_>>()
                .join("\n"),
        ));
    }
    let k = spec.modes.unwrap_or(config.solver.modes);
    let points: Vec<Point> = spec
        .family_values()
        .into_iter()
        .flat_map(|family| spec.values.iter().map(move |&swept| Point { swept, family }))
        .collect();
    let solved: Vec<Result<(ModeSet, f64), CliError>> = points
        .par_iter()
        .map(|pt| {
            let at = || describe(spec, pt);
            let mut c = config.clone();
            if let Some(v) = pt.family {
                set(&mut c, spec.family.as_ref().expect("family present").parameter, v);
            }
            set(&mut c, spec.parameter, &Value::Number(pt.swept));
            let scenario = c
                .scenario()
                .map_err(|e| CliError::Config(format!("{}: {e}", at())))?;
            let problem = scenario
                .problem()
                .map_err(|e| CliError::Solver(format!("{}: {e}", at())))?;
            let set = eigensolve::modes(&problem, k, &c.solver.search)
                .map_err(|e| CliError::Solver(format!("{}: {e}", at())))?;
            Ok((set, scenario.omega_scale()))
        })
        .collect();

    let mut result = SweepResult {
        name: spec.name.clone(),
        ..SweepResult::default()
    };
    for (pt, outcome) in points.iter().zip(solved) {
        let (set, scale) = outcome?;
        for w in &set.warnings {
            result.warnings.push(format!("{}: {w}", describe(spec, pt)));
        }
        for m in &set.modes {
            result.rows.push(SweepRow {
                swept_value: pt.swept,
                family_value: pt.family.cloned(),
                mode_index: m.index,
                omega: m.omega,
                omega_rad_per_s: m.omega * scale,
                root_kind: m.kind.as_str(),
            });
        }
    }
    Ok(result)
}

fn describe(spec: &SweepSpec, pt: &Point) -> String {
    match pt.family {
        Some(v) => format!(
            "sweep '{}' at {} = {}, family {} = {}",
            spec.name,
            spec.parameter.name(),
            fmt_sig12(pt.swept),
            spec.family.as_ref().expect("family present").parameter.name(),
            v.csv()
        ),
        None => format!(
            "sweep '{}' at {} = {}",
            spec.name,
            spec.parameter.name(),
            fmt_sig12(pt.swept)
        ),
    }
}

/// Formats `x` with 12 significant digits, fixed notation for moderate
/// exponents and scientific otherwise, trailing zeros removed.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig12(13.071247078049195), "13.071247078");
        assert_eq!(fmt_sig12(0.1), "0.1");
        assert_eq!(fmt_sig12(2.0), "2");
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(-224.30136816590505), "-224.301368166");
        assert_eq!(fmt_sig12(1.234567890123456e13), "1.23456789012e13");
        assert_eq!(fmt_sig12(6.02e-9), "6.02e-9");
        assert_eq!(fmt_sig12(123456789012.0), "123456789012");
    }

    #[test]
    fn empty_grid_is_a_config_error() {
        let c = Config::parse(
            r#"{"geometry": {"central_angle": 0.5}, "boundary": "clamped_free",
                "sweeps": [{"name": "x", "parameter": "radius_R", "values": []}]}"#,
        )
        .unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("grids non-empty"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn family_must_differ_from_swept_axis() {
        let c = Config::parse(
            r#"{"geometry": {"central_angle": 0.5}, "boundary": "clamped_free",
                "sweeps": [{"name": "x", "parameter": "radius_R", "values": [1e-7],
                            "family": {"parameter": "radius_R", "values": [1e-7]}}]}"#,
        )
        .unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("must differ"));
    }
}
