use std::f64::consts::PI;

use lattice_guide_core::lattice::{
    oracle_eigenfrequencies_with, smallest_singular_indicator_with, IndicatorMethod,
};
use lattice_guide_core::{
    find_gaps, find_guided_modes, oracle_eigenfrequencies, smallest_singular_indicator,
    FrequencyWindow, GapType, LatticeParams, OracleConfig, SpectralGap,
};

fn config_b(mu: f64) -> LatticeParams {
    LatticeParams::new([1.0, 1.0, 2.0], mu, PI / 2.0).unwrap()
}

fn type_i(p: &LatticeParams) -> SpectralGap {
    let w = FrequencyWindow::new(0.0, PI).unwrap();
    find_gaps(p, &w, 1e-3)
        .unwrap()
        .gaps
        .into_iter()
        .find(|g| g.gap_type == GapType::TypeI)
        .unwrap()
}

fn nearest(xs: &[f64], w: f64) -> f64 {
    xs.iter()
        .map(|x| (x - w).abs())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn oracle_finds_both_type_i_modes() {
    let p = config_b(0.5);
    let g = type_i(&p);
    let oracle = oracle_eigenfrequencies(&p, &g, 40, 400).unwrap();
    let modes = find_guided_modes(&p, &g).unwrap();
    assert_eq!(oracle.len(), 2);
    for m in &modes {
        assert!(nearest(&oracle, m.omega) <= 1e-3);
    }
}

#[test]
fn dip_structure_at_eigenfrequency() {
    let p = config_b(0.5);
    let modes = find_guided_modes(&p, &type_i(&p)).unwrap();
    for m in &modes {
        let at = smallest_singular_indicator(m.omega, &p, 40).unwrap();
        assert!(at <= 1e-3);
        assert!(at <= smallest_singular_indicator(m.omega - 0.02, &p, 40).unwrap());
        assert!(at <= smallest_singular_indicator(m.omega + 0.02, &p, 40).unwrap());
    }
}

#[test]
fn no_dips_without_shrinking() {
    for mu in [1.0, 1.5, 3.0] {
        let p = config_b(mu);
        assert!(oracle_eigenfrequencies(&p, &type_i(&p), 40, 400)
            .unwrap()
            .is_empty());
    }
}

#[test]
fn oracle_converges_in_radius() {
    let p = config_b(0.3);
    let g = type_i(&p);
    let modes = find_guided_modes(&p, &g).unwrap();
    let coarse = oracle_eigenfrequencies(&p, &g, 20, 400).unwrap();
    let fine = oracle_eigenfrequencies(&p, &g, 40, 400).unwrap();
    for m in &modes {
        let e20 = nearest(&coarse, m.omega);
        let e40 = nearest(&fine, m.omega);
        assert!(e20 <= 1e-2 && e40 <= 1e-3);
        assert!(e40 <= e20, "{e40} vs {e20}");
    }
}

#[test]
fn dense_route_agrees_on_small_lattices() {
    let p = config_b(0.5);
    let g = type_i(&p);
    let dense = OracleConfig {
        method: IndicatorMethod::Dense,
        ..OracleConfig::default()
    };
    let a = oracle_eigenfrequencies_with(&p, &g, 6, 100, &OracleConfig::default()).unwrap();
    let b = oracle_eigenfrequencies_with(&p, &g, 6, 100, &dense).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-6);
    }
    for w in [1.39, 1.5, 1.66] {
        let x = smallest_singular_indicator_with(w, &p, 10, &OracleConfig::default()).unwrap();
        let y = smallest_singular_indicator_with(w, &p, 10, &dense).unwrap();
        assert!((x - y).abs() <= 1e-10 * y.max(1.0));
    }
}

#[test]
fn smallest_lattice_runs() {
    let p = config_b(0.5);
    assert!(smallest_singular_indicator(1.45, &p, 1)
        .unwrap()
        .is_finite());
}
