//! Essential spectrum: band membership, gap detection and classification,
//! and roots of the Bloch dispersion relation.
//!
//! Membership of `omega` (away from the singular frequencies) reduces to
//! `f_min(omega) <= phi_beta(omega) <= f_max(omega)`, so band edges are the
//! roots of the two scalar edge functions
//!
//! ```text
//! e_minus(omega) = phi_beta(omega) - f_min(omega)    (member: e_minus >= 0)
//! e_plus(omega)  = phi_beta(omega) - f_max(omega)    (member: e_plus  <= 0)
//! ```
//!
//! Both are continuous between consecutive points of sigma1, sigma2 and the
//! poles of `phi_beta`, which are therefore used as breakpoints of the scan.
//! Points of sigma1 and sigma2 always belong to the spectrum; when such a
//! point sits between two non-member regions it is reported as an isolated
//! (flat-band) point that splits the surrounding region into two gaps.

use crate::error::{Error, Result};
use crate::params::{FrequencyWindow, LatticeParams, Tolerances};
use crate::roots::{bisect, sign_changes};
use crate::symbols::{f_range_with, near_sigma12, phi_beta_with, sigma_points, w_points_with};

/// A closed frequency interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, omega: f64) -> bool {
        self.lo <= omega && omega <= self.hi
    }
}

/// The three kinds of gaps of the periodic operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapType {
    /// Neither edge in sigma1 or sigma2; exactly one pole of `phi_beta` inside.
    TypeI,
    /// Lower edge in sigma1 or sigma2; no pole inside.
    TypeII,
    /// Upper edge in sigma1 or sigma2; no pole inside.
    TypeIII,
}

impl GapType {
    pub fn label(self) -> &'static str {
        match self {
            GapType::TypeI => "I",
            GapType::TypeII => "II",
            GapType::TypeIII => "III",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGap {
    /// Position in the owning [`BandScan`]; zero for gaps classified on their own.
    pub index: usize,
    pub omega_b: f64,
    pub omega_t: f64,
    pub gap_type: GapType,
    /// Poles of `phi_beta` strictly inside the gap.
    pub w_inside: Vec<f64>,
    /// Whether `(omega_b, omega_t)` lie in sigma1 or sigma2.
    pub edge_flags: (bool, bool),
}

impl SpectralGap {
    pub fn interval(&self) -> Interval {
        Interval::new(self.omega_b, self.omega_t)
    }

    pub fn width(&self) -> f64 {
        self.omega_t - self.omega_b
    }

    /// The pole inside a type I gap.
    pub fn omega0(&self) -> Option<f64> {
        match self.gap_type {
            GapType::TypeI => self.w_inside.first().copied(),
            _ => None,
        }
    }

    pub fn lambda_b(&self) -> f64 {
        self.omega_b * self.omega_b
    }

    pub fn lambda_t(&self) -> f64 {
        self.omega_t * self.omega_t
    }
}

/// Result of a band/gap scan over a frequency window.
#[derive(Debug, Clone, PartialEq)]
pub struct BandScan {
    pub window: FrequencyWindow,
    /// Bands of positive width, in increasing order. A band touching a window
    /// end is cut at that end.
    pub bands: Vec<Interval>,
    /// Verified gaps: both edges are spectrum points inside the window.
    pub gaps: Vec<SpectralGap>,
    /// Isolated spectrum points separating two non-member regions.
    pub embedded_points: Vec<f64>,
    /// Non-member regions cut by a window end; their outer edge is not known
    /// to be in the spectrum.
    pub truncated: Vec<Interval>,
    pub resolution: f64,
}

/// Default scan step: a thousandth of the smallest period.
pub fn default_resolution(p: &LatticeParams) -> f64 {
    p.min_period() * 1e-3
}

/// `(e_minus, e_plus)` at `omega`, or `None` at singular frequencies and poles.
pub fn edge_functions(omega: f64, p: &LatticeParams) -> Option<(f64, f64)> {
    edge_functions_with(omega, p, &Tolerances::default())
}

fn edge_functions_with(omega: f64, p: &LatticeParams, tol: &Tolerances) -> Option<(f64, f64)> {
    let phi = phi_beta_with(omega, p, tol).finite()?;
    let range = f_range_with(omega, p, tol).ok()?;
    Some((phi - range.min, phi - range.max))
}

fn member_from_edges(e: (f64, f64)) -> bool {
    e.0 >= 0.0 && e.1 <= 0.0
}

/// Whether `lambda = omega^2` belongs to the essential spectrum.
///
/// `omega = 0` is in the spectrum exactly when `beta = 0`.
pub fn in_essential_spectrum(omega: f64, p: &LatticeParams) -> bool {
    in_essential_spectrum_with(omega, p, &Tolerances::default())
}

pub fn in_essential_spectrum_with(omega: f64, p: &LatticeParams, tol: &Tolerances) -> bool {
    if omega == 0.0 {
        return p.beta() == 0.0;
    }
    if omega < 0.0 {
        return false;
    }
    let s1 = (omega * p.a1()).sin();
    let s2 = (omega * p.a2()).sin();
    if s1.abs() < tol.sin_tol || s2.abs() < tol.sin_tol {
        return true;
    }
    match edge_functions_with(omega, p, tol) {
        Some(e) => member_from_edges(e),
        None => false,
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Open { lo: f64, hi: f64, member: bool },
    Point { at: f64, member: bool },
}

impl Piece {
    fn member(&self) -> bool {
        match *self {
            Piece::Open { member, .. } | Piece::Point { member, .. } => member,
        }
    }

    fn lo(&self) -> f64 {
        match *self {
            Piece::Open { lo, .. } => lo,
            Piece::Point { at, .. } => at,
        }
    }

    fn hi(&self) -> f64 {
        match *self {
            Piece::Open { hi, .. } => hi,
            Piece::Point { at, .. } => at,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Breakpoint {
    at: f64,
    sigma: bool,
}

fn breakpoints(p: &LatticeParams, window: &FrequencyWindow, tol: &Tolerances) -> Vec<Breakpoint> {
    // include a point sitting exactly on the lower window end
    let lo_pad = window.lo() - window.slack();
    let extended = FrequencyWindow::new(lo_pad.max(0.0), window.hi()).unwrap_or(*window);
    let sigma = sigma_points(p, &extended).sigma12();
    let poles = w_points_with(p, &extended, tol);
    let mut all: Vec<Breakpoint> = sigma
        .iter()
        .map(|&at| Breakpoint { at, sigma: true })
        .chain(poles.iter().map(|&at| Breakpoint { at, sigma: false }))
        .collect();
    all.sort_by(|x, y| x.at.total_cmp(&y.at));
    let mut merged: Vec<Breakpoint> = Vec::with_capacity(all.len());
    for b in all {
        match merged.last_mut() {
            Some(last) if (b.at - last.at).abs() <= 1e-12 * b.at.max(1.0) => {
                last.sigma |= b.sigma;
            }
            _ => merged.push(b),
        }
    }
    merged
}

/// Scans one open segment between consecutive breakpoints.
fn scan_segment(
    p: &LatticeParams,
    x0: f64,
    x1: f64,
    resolution: f64,
    tol: &Tolerances,
) -> Result<Vec<Piece>> {
    let len = x1 - x0;
    let n = ((len / resolution).ceil() as usize).max(16);
    let eps = 1e-9;
    let at = |i: usize| -> f64 {
        let u = if i == 0 {
            eps
        } else if i == n {
            1.0 - eps
        } else {
            i as f64 / n as f64
        };
        x0 + len * u
    };
    let samples: Vec<f64> = (0..=n).map(at).collect();
    let edges: Vec<(f64, f64)> = samples
        .iter()
        .map(|&w| {
            edge_functions_with(w, p, tol).ok_or(Error::ResolutionTooCoarse {
                resolution,
                omega: w,
            })
        })
        .collect::<Result<_>>()?;

    let mut transitions = Vec::new();
    for component in 0..2 {
        let vals: Vec<f64> = edges
            .iter()
            .map(|e| if component == 0 { e.0 } else { e.1 })
            .collect();
        let g = |w: f64| -> f64 {
            match edge_functions_with(w, p, tol) {
                Some(e) if component == 0 => e.0,
                Some(e) => e.1,
                None => f64::NAN,
            }
        };
        for i in sign_changes(&vals) {
            let (a, b) = bisect(g, samples[i], samples[i + 1], vals[i], tol.edge_tol);
            // report the side of the final bracket that belongs to the spectrum
            let a_member = edge_functions_with(a, p, tol).is_some_and(member_from_edges);
            transitions.push(if a_member { a } else { b });
        }
        // exact zeros on the grid are transitions as well
        for i in 1..n {
            if vals[i] == 0.0
                && vals[i - 1] != 0.0
                && vals[i + 1] != 0.0
                && (vals[i - 1] < 0.0) != (vals[i + 1] < 0.0)
            {
                transitions.push(samples[i]);
            }
        }
    }
    transitions.sort_by(f64::total_cmp);

    let mut cuts = Vec::with_capacity(transitions.len() + 2);
    cuts.push(x0);
    cuts.extend(transitions.iter().copied());
    cuts.push(x1);

    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let member = edge_functions_with(mid, p, tol)
            .map(member_from_edges)
            .ok_or(Error::ResolutionTooCoarse {
                resolution,
                omega: mid,
            })?;
        pieces.push(Piece::Open {
            lo: w[0],
            hi: w[1],
            member,
        });
    }

    // every refined transition must flip membership
    for w in pieces.windows(2) {
        if w[0].member() == w[1].member() {
            return Err(Error::ResolutionTooCoarse {
                resolution,
                omega: w[0].hi(),
            });
        }
    }
    // and grid samples must agree with the refined picture
    let mut k = 0;
    for (i, &w) in samples.iter().enumerate() {
        while k + 1 < pieces.len() && w > pieces[k].hi() {
            k += 1;
        }
        let near_cut = transitions
            .iter()
            .any(|t| (t - w).abs() < 1e-8 * len.max(1.0));
        if !near_cut && member_from_edges(edges[i]) != pieces[k].member() {
            return Err(Error::ResolutionTooCoarse {
                resolution,
                omega: w,
            });
        }
    }
    Ok(pieces)
}

/// Locates bands, gaps and isolated spectrum points in `window`.
pub fn find_gaps(p: &LatticeParams, window: &FrequencyWindow, resolution: f64) -> Result<BandScan> {
    find_gaps_with(p, window, resolution, &Tolerances::default())
}

pub fn find_gaps_with(
    p: &LatticeParams,
    window: &FrequencyWindow,
    resolution: f64,
    tol: &Tolerances,
) -> Result<BandScan> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "scan resolution must be positive, got {resolution}"
        )));
    }
    let bps = breakpoints(p, window, tol);
    let slack = window.slack();

    let mut pieces: Vec<Piece> = Vec::new();
    if window.lo() == 0.0 && p.beta() == 0.0 {
        pieces.push(Piece::Point {
            at: 0.0,
            member: true,
        });
    }
    let mut cursor = window.lo();
    for b in &bps {
        if b.at - cursor > slack {
            pieces.extend(scan_segment(p, cursor, b.at, resolution, tol)?);
        }
        pieces.push(Piece::Point {
            at: b.at,
            member: b.sigma,
        });
        cursor = b.at;
    }
    if window.hi() - cursor > slack {
        pieces.extend(scan_segment(p, cursor, window.hi(), resolution, tol)?);
    }

    // group consecutive pieces of equal membership
    let mut runs: Vec<(bool, usize, usize)> = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        match runs.last_mut() {
            Some((m, _, end)) if *m == piece.member() => *end = i,
            _ => runs.push((piece.member(), i, i)),
        }
    }

    let mut bands = Vec::new();
    let mut embedded_points = Vec::new();
    let mut truncated = Vec::new();
    let mut gaps = Vec::new();
    for (r, &(member, start, end)) in runs.iter().enumerate() {
        let lo = pieces[start].lo();
        let hi = pieces[end].hi();
        if member {
            if hi - lo > 0.0 {
                bands.push(Interval::new(lo, hi));
            } else {
                embedded_points.push(lo);
            }
            continue;
        }
        let closed_below = r > 0;
        let closed_above = r + 1 < runs.len();
        if closed_below && closed_above {
            let mut gap = classify_gap_with(Interval::new(lo, hi), p, tol)?;
            gap.index = gaps.len();
            gaps.push(gap);
        } else {
            truncated.push(Interval::new(lo, hi));
        }
    }

    Ok(BandScan {
        window: *window,
        bands,
        gaps,
        embedded_points,
        truncated,
        resolution,
    })
}

/// Classifies a verified gap by its edges and the poles of `phi_beta` inside it.
pub fn classify_gap(interval: Interval, p: &LatticeParams) -> Result<SpectralGap> {
    classify_gap_with(interval, p, &Tolerances::default())
}

pub fn classify_gap_with(
    interval: Interval,
    p: &LatticeParams,
    tol: &Tolerances,
) -> Result<SpectralGap> {
    let Interval { lo, hi } = interval;
    let window = FrequencyWindow::new(lo, hi)?;
    let margin = 1e-10 * hi.max(1.0);
    let w_inside: Vec<f64> = w_points_with(p, &window, tol)
        .into_iter()
        .filter(|&w| w > lo + margin && w < hi - margin)
        .collect();
    let edge_b = near_sigma12(lo, p, tol.sigma_match_tol);
    let edge_t = near_sigma12(hi, p, tol.sigma_match_tol);
    let gap_type = match (edge_b, edge_t, w_inside.len()) {
        (false, false, 1) => GapType::TypeI,
        (true, false, 0) => GapType::TypeII,
        (false, true, 0) => GapType::TypeIII,
        _ => {
            return Err(Error::ClassificationViolation {
                omega_b: lo,
                omega_t: hi,
                edge_b,
                edge_t,
                w_count: w_inside.len(),
            })
        }
    };
    Ok(SpectralGap {
        index: 0,
        omega_b: lo,
        omega_t: hi,
        gap_type,
        w_inside,
        edge_flags: (edge_b, edge_t),
    })
}

/// Left-hand side of the three-term Bloch dispersion relation.
pub fn dispersion_relation(omega: f64, xi: f64, eta: f64, p: &LatticeParams) -> f64 {
    let (s1, c1) = (omega * p.a1()).sin_cos();
    let (s2, c2) = (omega * p.a2()).sin_cos();
    let (s3, c3) = (omega * p.a3()).sin_cos();
    s2 * s3 * (c1 - xi.cos()) + s3 * s1 * (c2 - eta.cos()) + s1 * s2 * (c3 - p.beta().cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRoot {
    pub omega: f64,
    /// At least two of the sine prefactors vanish, so the relation holds for
    /// every wave vector.
    pub degenerate: bool,
}

fn degenerate_points(p: &LatticeParams, window: &FrequencyWindow) -> Vec<f64> {
    let sp = sigma_points(p, window);
    let a3_multiples = crate::symbols::w_points_with(
        p,
        window,
        &Tolerances {
            removable_tol: f64::NEG_INFINITY,
            ..Tolerances::default()
        },
    );
    let mut candidates: Vec<f64> = sp
        .sigma1
        .iter()
        .chain(&sp.sigma2)
        .chain(&a3_multiples)
        .copied()
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * a.max(1.0));
    candidates
        .into_iter()
        .filter(|&w| {
            p.periods()
                .iter()
                .filter(|&&a| (w * a).sin().abs() < 1e-9)
                .count()
                >= 2
        })
        .collect()
}

/// Roots in `window` of the dispersion relation at wave vector `(xi, eta)`.
pub fn dispersion_roots(
    xi: f64,
    eta: f64,
    p: &LatticeParams,
    window: &FrequencyWindow,
) -> Vec<DispersionRoot> {
    dispersion_roots_with(xi, eta, p, window, default_resolution(p), 1e-10)
}

pub fn dispersion_roots_with(
    xi: f64,
    eta: f64,
    p: &LatticeParams,
    window: &FrequencyWindow,
    resolution: f64,
    root_tol: f64,
) -> Vec<DispersionRoot> {
    let degenerate = degenerate_points(p, window);
    let n = ((window.width() / resolution).ceil() as usize).max(16);
    let h = window.width() / n as f64;
    let samples: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 && window.lo() == 0.0 {
                1e-3 * h
            } else {
                window.lo() + i as f64 * h
            }
        })
        .collect();
    let d = |w: f64| dispersion_relation(w, xi, eta, p);
    let values: Vec<f64> = samples.iter().map(|&w| d(w)).collect();

    let mut roots: Vec<f64> = sign_changes(&values)
        .into_iter()
        .map(|i| {
            let (a, b) = bisect(d, samples[i], samples[i + 1], values[i], root_tol);
            0.5 * (a + b)
        })
        .collect();
    roots.extend(
        samples
            .iter()
            .zip(&values)
            .filter(|(w, v)| **v == 0.0 && window.contains(**w))
            .map(|(w, _)| *w),
    );
    roots.retain(|r| !degenerate.iter().any(|g| (g - r).abs() < 1e-8));

    let mut out: Vec<DispersionRoot> = roots
        .into_iter()
        .map(|omega| DispersionRoot {
            omega,
            degenerate: false,
        })
        .chain(degenerate.into_iter().map(|omega| DispersionRoot {
            omega,
            degenerate: true,
        }))
        .collect();
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(a: [f64; 3], beta: f64) -> LatticeParams {
        LatticeParams::new(a, 0.5, beta).unwrap()
    }

    #[test]
    fn membership_examples() {
        let p = params([1.0, 1.0, 1.0], PI / 2.0);
        assert!(in_essential_spectrum(PI / 2.0, &p));
        assert!(in_essential_spectrum(PI, &p));
        let q = params([1.0, 1.0, 2.0], PI / 2.0);
        assert!(!in_essential_spectrum(PI / 2.0, &q));
    }

    #[test]
    fn zero_frequency_special_case() {
        assert!(in_essential_spectrum(0.0, &params([1.0, 1.0, 1.0], 0.0)));
        assert!(!in_essential_spectrum(0.0, &params([1.0, 1.0, 1.0], 0.3)));
    }

    #[test]
    fn membership_independent_of_mu() {
        let a = LatticeParams::new([1.0, 1.3, 2.0], 0.5, 0.7).unwrap();
        let b = a.with_mu(2.0).unwrap();
        for i in 1..2000 {
            let w = i as f64 * 0.005;
            assert_eq!(in_essential_spectrum(w, &a), in_essential_spectrum(w, &b));
        }
    }

    #[test]
    fn type_i_gap_around_pole() {
        let p = params([1.0, 1.0, 2.0], PI / 2.0);
        let window = FrequencyWindow::new(0.1, PI).unwrap();
        let scan = find_gaps(&p, &window, 1e-3).unwrap();
        let gap = scan
            .gaps
            .iter()
            .find(|g| g.omega_b < PI / 2.0 && PI / 2.0 < g.omega_t)
            .expect("gap around pi/2");
        assert_eq!(gap.gap_type, GapType::TypeI);
        assert_eq!(gap.w_inside.len(), 1);
        assert!((gap.w_inside[0] - PI / 2.0).abs() < 1e-12);
        assert_eq!(gap.omega0(), Some(gap.w_inside[0]));
    }

    #[test]
    fn type_ii_gap_above_isolated_point() {
        let p = params([1.0, 1.0, 1.0], PI / 2.0);
        let window = FrequencyWindow::new(0.1, 2.0 * PI).unwrap();
        let scan = find_gaps(&p, &window, 1e-3).unwrap();
        let gap = scan
            .gaps
            .iter()
            .find(|g| (g.omega_b - PI).abs() < 1e-9)
            .expect("gap starting at pi");
        assert_eq!(gap.gap_type, GapType::TypeII);
        assert!(scan.embedded_points.iter().any(|&w| (w - PI).abs() < 1e-12));
        assert!(scan
            .gaps
            .iter()
            .any(|g| (g.omega_t - PI).abs() < 1e-9 && g.gap_type == GapType::TypeIII));
    }

    #[test]
    fn classification_violation_is_reported() {
        let p = params([1.0, 1.0, 2.0], PI / 2.0);
        // contains the pole pi/2 and has its upper edge on sigma1
        let r = classify_gap(Interval::new(1.4, PI), &p);
        assert!(matches!(
            r,
            Err(Error::ClassificationViolation {
                edge_t: true,
                w_count: 1,
                ..
            })
        ));
    }

    #[test]
    fn sigma_points_never_inside_gaps() {
        for (a, beta) in [
            ([1.0, 1.0, 1.0], 0.2 * PI),
            ([1.0, 1.0, 2.0], 0.5 * PI),
            ([1.0, 1.4, 0.8], 1.0),
        ] {
            let p = params(a, beta);
            let window = FrequencyWindow::new(0.05, 4.0 * PI).unwrap();
            let scan = find_gaps(&p, &window, default_resolution(&p)).unwrap();
            for s in sigma_points(&p, &window).all() {
                for g in &scan.gaps {
                    assert!(!(g.omega_b < s && s < g.omega_t), "{s} inside {g:?}");
                }
                assert!(in_essential_spectrum(s, &p));
            }
        }
    }

    #[test]
    fn dispersion_identity_roots() {
        let p = LatticeParams::new([1.0, 1.0, 1.0], 0.5, 1.1).unwrap();
        let window = FrequencyWindow::new(0.0, PI).unwrap();
        let roots = dispersion_roots(1.1, 1.1, &p, &window);
        assert!(roots.iter().any(|r| (r.omega - 1.1).abs() < 1e-9));

        let p = LatticeParams::new([1.0, 1.0, 1.0], 0.5, PI / 2.0).unwrap();
        let window = FrequencyWindow::new(0.0, PI).unwrap();
        let roots = dispersion_roots(PI / 2.0, PI / 2.0, &p, &window);
        assert!(roots.iter().any(|r| (r.omega - PI / 2.0).abs() < 1e-9));
        // pi: all three sines vanish
        assert!(roots
            .iter()
            .any(|r| r.degenerate && (r.omega - PI).abs() < 1e-12));
    }
}
