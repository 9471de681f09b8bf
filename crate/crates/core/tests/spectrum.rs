use std::f64::consts::PI;

use lattice_guide_core::essential::{dispersion_relation, Interval};
use lattice_guide_core::{
    classify_gap, default_resolution, dispersion_roots, find_gaps, in_essential_spectrum,
    sigma_points, BandScan, FrequencyWindow, GapType, LatticeParams,
};
use proptest::prelude::*;

fn params(a: [f64; 3], beta: f64) -> LatticeParams {
    LatticeParams::new(a, 0.5, beta).unwrap()
}

fn scan(p: &LatticeParams, lo: f64, hi: f64) -> BandScan {
    let w = FrequencyWindow::new(lo, hi).unwrap();
    find_gaps(p, &w, default_resolution(p)).unwrap()
}

/// Maximal non-member runs of a uniform membership grid.
fn grid_gaps(p: &LatticeParams, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((hi - lo) / step) as usize;
    let mut runs = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..=n {
        let w = lo + i as f64 * step;
        match (in_essential_spectrum(w, p), start) {
            (false, None) => start = Some(w),
            (true, Some(s)) => {
                runs.push((s, w));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        if in_essential_spectrum(hi, p) {
            runs.push((s, hi));
        }
    }
    runs
}

#[test]
fn edges_match_dense_membership_grid() {
    let p = params([1.0, 1.0, 2.0], PI / 2.0);
    let found = scan(&p, 0.1, PI);
    let oracle = grid_gaps(&p, 0.1, PI, 1e-5);
    let closed: Vec<_> = oracle.iter().filter(|r| r.0 > 0.1 + 1e-5).collect();
    for g in &found.gaps {
        let hit = closed
            .iter()
            .any(|r| (r.0 - g.omega_b).abs() <= 2e-5 && (r.1 - g.omega_t).abs() <= 2e-5);
        assert!(hit, "gap {g:?} not in {closed:?}");
    }
    let type_i = found
        .gaps
        .iter()
        .find(|g| g.omega_b < PI / 2.0 && PI / 2.0 < g.omega_t)
        .unwrap();
    assert_eq!(type_i.gap_type, GapType::TypeI);
    assert_eq!(type_i.w_inside.len(), 1);
}

#[test]
fn edges_are_membership_flips() {
    let p = params([1.0, 1.0, 1.0], PI / 2.0);
    let found = scan(&p, 0.1, 2.0 * PI);
    assert!(!found.gaps.is_empty());
    let sigma = sigma_points(&p, &FrequencyWindow::new(0.0, 3.0 * PI).unwrap()).all();
    let isolated = |w: f64| sigma.iter().any(|s| (s - w).abs() < 1e-8);
    for g in &found.gaps {
        for i in 1..=20 {
            let w = g.omega_b + g.width() * i as f64 / 21.0;
            assert!(!in_essential_spectrum(w, &p), "{w} inside {g:?}");
        }
        for edge in [g.omega_b, g.omega_t] {
            assert!(in_essential_spectrum(edge, &p) || isolated(edge));
        }
        if !isolated(g.omega_b) {
            assert!(in_essential_spectrum(g.omega_b - 1e-4, &p));
        }
        if !isolated(g.omega_t) {
            assert!(in_essential_spectrum(g.omega_t + 1e-4, &p));
        }
    }
}

#[test]
fn sigma_points_are_in_bands_or_isolated() {
    for (a, beta) in [
        ([1.0, 1.0, 1.0], 0.5 * PI),
        ([1.0, 1.0, 2.0], 0.2 * PI),
        ([1.0, 1.3, 0.7], 0.9),
    ] {
        let p = params(a, beta);
        let s = scan(&p, 0.0, 6.0 * PI);
        for w in sigma_points(&p, &s.window).all() {
            let in_band = s.bands.iter().any(|b| b.contains(w));
            let isolated = s.embedded_points.iter().any(|e| (e - w).abs() < 1e-12);
            assert!(in_band || isolated, "{w} for {a:?}");
        }
    }
}

#[test]
fn bands_gaps_and_points_tile_the_window() {
    let p = params([1.0, 1.0, 1.0], 0.3 * PI);
    let s = scan(&p, 0.0, 4.0 * PI);
    let mut pieces: Vec<(f64, f64)> = s
        .bands
        .iter()
        .map(|b| (b.lo, b.hi))
        .chain(s.gaps.iter().map(|g| (g.omega_b, g.omega_t)))
        .chain(s.truncated.iter().map(|t| (t.lo, t.hi)))
        .chain(s.embedded_points.iter().map(|&e| (e, e)))
        .collect();
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    assert_eq!(pieces.first().unwrap().0, 0.0);
    assert!((pieces.last().unwrap().1 - 4.0 * PI).abs() < 1e-12);
    for w in pieces.windows(2) {
        assert!(
            (w[1].0 - w[0].1).abs() < 1e-12,
            "{:?} then {:?}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn scan_symmetries() {
    let p = params([1.0, 1.3, 2.0], 0.7);
    let a = scan(&p, 0.0, 3.0 * PI);
    let b = scan(&p.with_swapped_transverse(), 0.0, 3.0 * PI);
    assert_eq!(a.gaps.len(), b.gaps.len());
    for (x, y) in a.gaps.iter().zip(&b.gaps) {
        assert!((x.omega_b - y.omega_b).abs() <= 1e-10);
        assert!((x.omega_t - y.omega_t).abs() <= 1e-10);
        assert_eq!(x.gap_type, y.gap_type);
    }
    let c = scan(&params([1.0, 1.3, 2.0], 2.0 * PI - 0.7), 0.0, 3.0 * PI);
    assert_eq!(a.gaps.len(), c.gaps.len());
    for (x, y) in a.gaps.iter().zip(&c.gaps) {
        assert!((x.omega_b - y.omega_b).abs() <= 1e-10);
        assert!((x.omega_t - y.omega_t).abs() <= 1e-10);
    }
}

#[test]
fn scan_independent_of_mu() {
    let base = scan(
        &LatticeParams::new([1.0, 1.0, 2.0], 0.3, 1.0).unwrap(),
        0.0,
        2.0 * PI,
    );
    for mu in [1.0, 3.0] {
        let other = scan(
            &LatticeParams::new([1.0, 1.0, 2.0], mu, 1.0).unwrap(),
            0.0,
            2.0 * PI,
        );
        assert_eq!(base, other);
    }
}

#[test]
fn gap_count_grows_with_window() {
    let p = params([1.0, 1.0, 2.0], PI / 2.0);
    let mut prev = 0;
    for n in 1..=6 {
        let count = scan(&p, 0.0, n as f64 * PI).gaps.len();
        assert!(count >= prev);
        assert!(count >= 1);
        prev = count;
    }
}

#[test]
fn classification_trichotomy_below_six_pi() {
    for a in [[1.0, 1.0, 1.0], [1.0, 1.0, 2.0]] {
        for beta in [0.2 * PI, 0.5 * PI, 0.8 * PI] {
            let s = scan(&params(a, beta), 0.0, 6.0 * PI);
            for g in &s.gaps {
                let ok = match g.gap_type {
                    GapType::TypeI => g.edge_flags == (false, false) && g.w_inside.len() == 1,
                    GapType::TypeII => g.edge_flags == (true, false) && g.w_inside.is_empty(),
                    GapType::TypeIII => g.edge_flags == (false, true) && g.w_inside.is_empty(),
                };
                assert!(ok, "{g:?}");
            }
        }
    }
}

#[test]
fn classify_rejects_mixed_interval() {
    let p = params([1.0, 1.0, 2.0], PI / 2.0);
    assert!(classify_gap(Interval::new(1.4, PI), &p).is_err());
}

/// Sign-change roots of the dispersion relation on a uniform grid.
fn grid_roots(xi: f64, eta: f64, p: &LatticeParams, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step) as usize;
    let mut out = Vec::new();
    let mut prev = dispersion_relation(lo, xi, eta, p);
    for i in 1..=n {
        let w = lo + i as f64 * step;
        let v = dispersion_relation(w, xi, eta, p);
        if (v < 0.0) != (prev < 0.0) {
            // linear interpolation inside the cell
            out.push(w - step * v / (v - prev));
        }
        prev = v;
    }
    out
}

#[test]
fn dispersion_roots_match_grid_scan() {
    let p = params([1.0, 1.0, 2.0], 0.4);
    let w = FrequencyWindow::new(0.1, PI).unwrap();
    let roots: Vec<f64> = dispersion_roots(0.7, 1.3, &p, &w)
        .into_iter()
        .filter(|r| !r.degenerate)
        .map(|r| r.omega)
        .collect();
    let oracle = grid_roots(0.7, 1.3, &p, 0.1, PI, 1e-6);
    assert_eq!(roots.len(), oracle.len(), "{roots:?} vs {oracle:?}");
    for (x, y) in roots.iter().zip(&oracle) {
        assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn dispersion_identity(theta in 0.1f64..3.0) {
        let p = params([1.0, 1.0, 1.0], theta);
        let w = FrequencyWindow::new(0.0, PI).unwrap();
        let roots = dispersion_roots(theta, theta, &p, &w);
        prop_assert!(roots.iter().any(|r| (r.omega - theta).abs() <= 1e-9));
    }

    #[test]
    fn membership_matches_dispersion_roots(omega in 0.3f64..9.0) {
        let p = params([1.0, 1.3, 2.0], 0.9);
        let h = 0.01;
        // skip points whose neighbourhood contains a band edge
        let inside = in_essential_spectrum(omega, &p);
        let uniform = (-20..=20).all(|i| in_essential_spectrum(omega + 0.001 * i as f64 * 2.0, &p) == inside);
        prop_assume!(uniform);
        let w = FrequencyWindow::new(omega - h, omega + h).unwrap();
        let n = 40;
        let (mut below, mut above) = (false, false);
        for i in 0..=n {
            for j in 0..=n {
                let xi = PI * i as f64 / n as f64;
                let eta = PI * j as f64 / n as f64;
                for r in dispersion_roots(xi, eta, &p, &w) {
                    below |= r.omega <= omega;
                    above |= r.omega >= omega;
                }
            }
        }
        prop_assert_eq!(inside, below && above);
    }
}
