use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use arcfreq::cli::Config;
use arcfreq::eigensolve::{modes, SolverSettings};
use arcfreq::fracture::ComplianceModel;
use arcfreq::model::{
    build_problem, nondimensionalize, omega_scale, ArchGeometry, BoundarySpec, CrackSpec,
    DimensionlessProblem, FreeEdgeRule, Material, ReferenceThickness, ShapeFunction,
};

fn omega1(p: &DimensionlessProblem) -> f64 {
    modes(p, 1, &SolverSettings::default()).unwrap().modes[0].omega
}

fn cracked(depth: f64, fraction: f64, eta_nm2: f64, h_nm: f64) -> (DimensionlessProblem, f64) {
    let mut g = ArchGeometry::uniform(110e-9, 1e-9, PI / 6.0, h_nm * 1e-9);
    let j = g.split_at(fraction * PI / 6.0).unwrap();
    let m = Material {
        nonlocal_length_sq: eta_nm2 * 1e-18,
        ..Material::nano_defaults()
    };
    let crack = CrackSpec {
        interface: j,
        depth_ratio: depth,
        shape: ShapeFunction::Poly31_32,
        reference: ReferenceThickness::MinNeighbor,
    };
    let p = build_problem(
        &m,
        &g,
        &[crack],
        BoundarySpec::ClampedFree,
        FreeEdgeRule::Consistent,
        ComplianceModel::Paper,
    )
    .unwrap();
    (p, omega_scale(&m, &g))
}

#[test]
fn nonlocal_parameter_is_scaled_by_radius_squared() {
    let m = Material {
        nonlocal_length_sq: 1e-18,
        ..Material::nano_defaults()
    };
    let g = ArchGeometry::uniform(110e-9, 1e-9, 0.5, 10e-9);
    let p = nondimensionalize(&m, &g, &[], BoundarySpec::ClampedFree).unwrap();
    assert_relative_eq!(p.eta_bar, 8.264_462_809_917_355e-5, max_relative = 1e-12);
}

#[test]
fn crack_interface_order_does_not_matter() {
    let text = |first: &str, second: &str| {
        format!(
            r#"{{"length_unit": "nm", "geometry": {{"central_angle": {{"value": 40, "unit": "deg"}}}},
                "cracks": [{first}, {second}], "boundary": "clamped_clamped"}}"#
        )
    };
    let a = r#"{"at": {"value": 0.3, "unit": "fraction"}, "depth_ratio": 0.4}"#;
    let b = r#"{"at": {"value": 0.7, "unit": "fraction"}, "depth_ratio": 0.2}"#;
    let solve = |t: String| {
        let p = Config::parse(&t).unwrap().scenario().unwrap().problem().unwrap();
        modes(&p, 4, &SolverSettings::default()).unwrap().omegas()
    };
    assert_eq!(solve(text(a, b)), solve(text(b, a)));
}

#[test]
fn nonlocal_softening_for_clamped_clamped_and_ring() {
    for boundary in [BoundarySpec::ClampedClamped, BoundarySpec::PeriodicRing] {
        let beta = if boundary == BoundarySpec::PeriodicRing { 2.0 * PI } else { PI / 3.0 };
        let w: Vec<f64> = [0.0, 0.01, 0.02, 0.05, 0.1]
            .iter()
            .map(|&eta| omega1(&DimensionlessProblem::uniform(beta, eta, boundary)))
            .collect();
        assert!(w.windows(2).all(|p| p[1] < p[0]), "{boundary:?}: {w:?}");
    }
}

#[test]
fn thicker_arches_vibrate_faster() {
    let w: Vec<f64> = [6.0, 8.0, 10.0, 12.0, 14.0]
        .iter()
        .map(|&h| {
            let (p, scale) = cracked(0.3, 0.6, 0.0, h);
            omega1(&p) * scale
        })
        .collect();
    assert!(w.windows(2).all(|p| p[1] >= p[0]), "{w:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nondimensionalization_is_scale_invariant(lambda in 0.1f64..10.0, eta in 0.0f64..4.0) {
        let m = |e: f64| Material { nonlocal_length_sq: e, ..Material::nano_defaults() };
        let mut g = ArchGeometry::uniform(110e-9, 1e-9, 0.6, 10e-9);
        g.split_at(0.2);
        g.thicknesses[1] = 7e-9;
        let base = nondimensionalize(&m(eta * 1e-18), &g, &[], BoundarySpec::ClampedFree).unwrap();
        let mut scaled_g = g.clone();
        scaled_g.radius *= lambda;
        scaled_g.thicknesses.iter_mut().for_each(|h| *h *= lambda);
        let scaled = nondimensionalize(&m(eta * 1e-18 * lambda * lambda), &scaled_g, &[], BoundarySpec::ClampedFree).unwrap();
        prop_assert!((base.eta_bar - scaled.eta_bar).abs() <= 1e-12 * base.eta_bar.max(1e-30));
        prop_assert!((base.slenderness - scaled.slenderness).abs() <= 1e-12);
        for (a, b) in base.segments.iter().zip(&scaled.segments) {
            prop_assert!((a.thickness_ratio - b.thickness_ratio).abs() <= 1e-12);
            prop_assert_eq!(a.start, b.start);
        }
    }

    #[test]
    fn artificial_interfaces_keep_unit_thickness(cuts in proptest::collection::vec(0.01f64..0.99, 1..6)) {
        let mut g = ArchGeometry::uniform(1e-7, 1e-9, 1.0, 1e-8);
        for c in cuts {
            g.split_at(c);
        }
        let p = nondimensionalize(&Material::nano_defaults(), &g, &[], BoundarySpec::ClampedFree).unwrap();
        prop_assert!(p.segments.iter().all(|s| s.thickness_ratio == 1.0));
    }

    #[test]
    fn deeper_cracks_never_stiffen(fraction in 0.1f64..0.9, s in 0.05f64..0.65, ds in 0.01f64..0.1) {
        let (a, _) = cracked(s, fraction, 0.0, 10.0);
        let (b, _) = cracked(s + ds, fraction, 0.0, 10.0);
        prop_assert!(omega1(&b) <= omega1(&a));
    }

    #[test]
    fn frequencies_are_smooth_in_crack_depth(fraction in 0.1f64..0.9, s in 0.05f64..0.7) {
        let (a, _) = cracked(s, fraction, 1.0, 10.0);
        let (b, _) = cracked(s + 1e-6, fraction, 1.0, 10.0);
        let (x, y) = (omega1(&a), omega1(&b));
        prop_assert!((x - y).abs() < 1e-3 * x);
    }
}
