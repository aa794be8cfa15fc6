//! Command-line front end: configuration, sweeps, table comparison and the
//! oracle cross-check. `main.rs` only parses arguments and maps errors to
//! exit codes.

pub mod check;
pub mod config;
pub mod sweep;
pub mod tables;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::eigensolve::{self, ModeSet};

pub use check::{oracle_check, Corruption, OracleReport};
pub use config::{Config, Overrides, Scenario};
pub use sweep::{fmt_sig12, run_sweep, SweepResult, SweepSpec};
pub use tables::{table_compare, TableReport, Which};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("oracle check failed (worst relative discrepancy {worst:.3e})")]
    OracleMismatch { worst: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleMismatch { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Loads, applies overrides and validates.
pub fn load(path: &Path, overrides: &Overrides) -> Result<Config, CliError> {
    let mut config = Config::load(path)?;
    config.apply(overrides);
    config.validate()?;
    Ok(config)
}

/// Solves the base configuration.
pub fn solve(config: &Config) -> Result<(ModeSet, f64), CliError> {
    let scenario = config.scenario()?;
    let problem = scenario
        .problem()
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let set = eigensolve::modes(&problem, config.solver.modes, &config.solver.search)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    Ok((set, scenario.omega_scale()))
}

pub fn write_modes<W: Write>(set: &ModeSet, scale: f64, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record([
        "mode_index",
        "omega_dimensionless",
        "omega_rad_per_s",
        "root_kind",
        "multiplicity",
    ])
    .map_err(io)?;
    for m in &set.modes {
        w.write_record([
            m.index.to_string(),
            fmt_sig12(m.omega),
            fmt_sig12(m.omega * scale),
            m.kind.as_str().to_string(),
            m.multiplicity.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_shapes<W: Write>(set: &ModeSet, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["mode_index", "phi", "deflection"]).map_err(io)?;
    for m in &set.modes {
        for s in &m.shape {
            w.write_record([
                m.index.to_string(),
                fmt_sig12(s.phi),
                fmt_sig12(s.deflection),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// `solve`: writes `modes.csv` and `mode_shapes.csv` into `out`.
pub fn run_solve(config: &Config, out: &Path) -> Result<(ModeSet, Vec<PathBuf>), CliError> {
    let (set, scale) = solve(config)?;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let modes = out.join("modes.csv");
    let shapes = out.join("mode_shapes.csv");
    write_modes(&set, scale, fs::File::create(&modes).map_err(|e| io_err(&modes, e))?)?;
    write_shapes(&set, fs::File::create(&shapes).map_err(|e| io_err(&shapes, e))?)?;
    Ok((set, vec![modes, shapes]))
}

/// `sweep`: one `<name>.csv` per sweep in `out`.
pub fn run_sweeps(config: &Config, out: &Path) -> Result<Vec<(SweepResult, PathBuf)>, CliError> {
    if config.sweeps.is_empty() {
        return Err(CliError::Config("sweeps: no sweep defined".into()));
    }
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut written = Vec::new();
    for spec in &config.sweeps {
        let result = run_sweep(config, spec)?;
        let path = out.join(format!("{}.csv", spec.name));
        result.write_csv(fs::File::create(&path).map_err(|e| io_err(&path, e))?)?;
        written.push((result, path));
    }
    Ok(written)
}
