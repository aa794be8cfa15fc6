//! The finite-difference oracle against the determinant method on every
//! configuration class.

use std::f64::consts::PI;

use arcfreq::eigensolve::{modes, SolverSettings};
use arcfreq::model::{BoundarySpec, DimensionlessProblem, FreeEdgeRule};
use arcfreq::oracle::fd_eigen;

const NODES: usize = 2000;

fn agree(p: &DimensionlessProblem, k: usize, tol: f64) {
    let a = modes(p, k, &SolverSettings::default()).unwrap().omegas();
    let b = fd_eigen(p, NODES, k).unwrap().omegas();
    assert_eq!(a.len(), k);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= tol * y, "determinant {a:?} vs oracle {b:?}");
    }
}

#[test]
fn clamped_clamped_nonlocal() {
    agree(
        &DimensionlessProblem::uniform(PI / 2.0, 0.02, BoundarySpec::ClampedClamped),
        4,
        2e-3,
    );
}

#[test]
fn stepped_and_cracked_cantilever() {
    let p = DimensionlessProblem::uniform(PI / 4.0, 0.01, BoundarySpec::ClampedFree)
        .with_step(0.35, 0.7)
        .with_crack(0.2, 0.4)
        .with_crack(0.5, 0.2);
    agree(&p, 3, 5e-3);
}

#[test]
fn cracked_ring_splits_pairs() {
    let p = DimensionlessProblem::uniform(2.0 * PI, 0.01, BoundarySpec::PeriodicRing)
        .with_crack(PI, 0.2);
    agree(&p, 4, 5e-3);
}

#[test]
fn paper_literal_free_edge() {
    let mut p = DimensionlessProblem::uniform(PI / 6.0, 0.0, BoundarySpec::ClampedFree);
    p.free_edge = FreeEdgeRule::PaperLiteral;
    agree(&p, 3, 2e-3);
}

#[test]
fn oracle_is_blind_to_artificial_interfaces() {
    let base = DimensionlessProblem::uniform(PI / 6.0, 0.01, BoundarySpec::ClampedFree);
    let mut split = base.clone();
    split.split_at(0.25 * PI / 6.0);
    split.split_at(0.5 * PI / 6.0);
    let a = fd_eigen(&base, NODES, 3).unwrap().omegas();
    let b = fd_eigen(&split, NODES, 3).unwrap().omegas();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-6 * x, "{a:?} vs {b:?}");
    }
}
