//! Cross-check of the determinant path against the finite-difference oracle.

use std::fmt;

use crate::eigensolve::{self, SolverSettings};
use crate::model::DimensionlessProblem;
use crate::oracle::{self, FdMesh};

use super::CliError;

pub const CRACK_FREE_TOLERANCE: f64 = 0.002;
pub const CRACKED_TOLERANCE: f64 = 0.005;

/// Deliberate corruption of the determinant path, for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Corruption {
    #[default]
    None,
    /// Flip the sign of every crack flexibility before solving.
    NegateKappa,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeComparison {
    pub mode: usize,
    pub determinant: f64,
    pub oracle: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub nodes: usize,
    pub tolerance: f64,
    pub modes: Vec<ModeComparison>,
    /// Modes one path produced and the other did not.
    pub missing: usize,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.missing == 0 && self.modes.iter().all(|m| m.relative <= self.tolerance)
    }

    pub fn worst(&self) -> f64 {
        self.modes.iter().map(|m| m.relative).fold(0.0, f64::max)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>4} {:>18} {:>18} {:>12}",
            "mode", "determinant Ω", "oracle Ω", "rel. diff"
        )?;
        for m in &self.modes {
            writeln!(
                f,
                "{:>4} {:>18.10} {:>18.10} {:>12.3e}",
                m.mode, m.determinant, m.oracle, m.relative
            )?;
        }
        if self.missing > 0 {
            writeln!(f, "{} mode(s) found by only one path", self.missing)?;
        }
        write!(
            f,
            "{}: worst {:.3e} against {:.1}% with N = {}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.worst(),
            self.tolerance * 100.0,
            self.nodes
        )
    }
}

/// Compares the lowest `k` frequencies of both solution paths.
pub fn oracle_check(
    problem: &DimensionlessProblem,
    nodes: usize,
    k: usize,
    settings: &SolverSettings,
    corruption: Corruption,
) -> Result<OracleReport, CliError> {
    if nodes < oracle::MIN_NODES {
        return Err(CliError::Config(format!(
            "--nodes: mesh needs at least {} intervals, got {nodes}",
            oracle::MIN_NODES
        )));
    }
    FdMesh::new(problem, nodes).map_err(|e| CliError::Config(format!("--nodes: {e}")))?;

    let cracked = problem.interfaces.iter().any(|f| f.kappa != 0.0);
    let mut analysed = problem.clone();
    if corruption == Corruption::NegateKappa {
        for f in &mut analysed.interfaces {
            f.kappa = -f.kappa;
        }
    }
    let det = eigensolve::modes(&analysed, k, settings)
        .map_err(|e| CliError::Solver(format!("determinant path: {e}")))?;
    let fd = oracle::fd_eigen(problem, nodes, k)
        .map_err(|e| CliError::Solver(format!("oracle path: {e}")))?;

    let a = det.omegas();
    let b = fd.omegas();
    let modes = a
        .iter()
        .zip(&b)
        .enumerate()
        .map(|(i, (&d, &o))| ModeComparison {
            mode: i + 1,
            determinant: d,
            oracle: o,
            relative: (d - o).abs() / o.abs(),
        })
        .collect();
    Ok(OracleReport {
        nodes,
        tolerance: if cracked {
            CRACKED_TOLERANCE
        } else {
            CRACK_FREE_TOLERANCE
        },
        modes,
        missing: k.saturating_sub(a.len().min(b.len())),
    })
}
