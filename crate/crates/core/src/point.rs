//! Guided modes inside spectral gaps.
//!
//! A frequency `omega` in a gap is an eigenfrequency of the defect operator
//! iff `mu = 1 - F_beta(omega)`, where `1 / F_beta` is the mean of
//! `phi / (phi - f)` over the torus. Writing `phi - f = A(eta) - B cos(xi)`
//! with `B = 1 / sin(omega a1)`, the `xi` integral has the closed form
//!
//! ```text
//! (1/2pi) int cos(k xi) / (A - B cos xi) dxi = sgn(A) rho^|k| / sqrt(A^2 - B^2),
//! rho = B / (A + sgn(A) sqrt(A^2 - B^2)),
//! ```
//!
//! leaving a smooth one-dimensional integral in `eta`. For `|phi| > 1` the
//! integrand is divided through by `phi`, which makes the pole of `phi` a
//! regular point where `F_beta = 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::essential::{in_essential_spectrum_with, GapType, Interval, SpectralGap};
use crate::params::{LatticeParams, Tolerances};
use crate::quadrature::{integrate, integrate_vec, QuadOptions};
use crate::roots::{bisect_certified, sign_changes};
use crate::symbols::{checked_sin, phi_beta_with, PhiValue};

/// The `eta`-dependent part of the reduced kernel.
///
/// With `X(eta) = x0 - x1 cos(eta)` and `Y` constant, the averaged kernel is
/// `scale * sgn(X) / sqrt(X^2 - Y^2)`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    x0: f64,
    x1: f64,
    y: f64,
    scale: f64,
    // X -/+ Y at eta = 0 and eta = pi, so that the small factor near a gap
    // edge is formed without cancellation
    m0: f64,
    p0: f64,
    m_pi: f64,
    p_pi: f64,
}

impl Kernel {
    fn new(omega: f64, p: &LatticeParams, tol: &Tolerances) -> Result<Self> {
        let (s1, s2) = (
            checked_sin(omega, p.a1(), 1, tol)?,
            checked_sin(omega, p.a2(), 2, tol)?,
        );
        let cot12 = (omega * p.a1()).cos() / s1 + (omega * p.a2()).cos() / s2;
        let (x0, x1, y, scale) = match phi_beta_with(omega, p, tol) {
            PhiValue::Finite(phi) if phi.abs() <= 1.0 => (phi + cot12, 1.0 / s2, 1.0 / s1, phi),
            PhiValue::Finite(phi) => {
                let q = 1.0 / phi;
                (1.0 + q * cot12, q / s2, q / s1, 1.0)
            }
            PhiValue::Pole => (1.0, 0.0, 0.0, 1.0),
        };
        let kernel = Kernel {
            x0,
            x1,
            y,
            scale,
            m0: x0 - x1 - y,
            p0: x0 - x1 + y,
            m_pi: x0 + x1 - y,
            p_pi: x0 + x1 + y,
        };
        // X is monotone in cos(eta): checking both ends covers the torus
        let lo = kernel.x0 - kernel.x1;
        let hi = kernel.x0 + kernel.x1;
        let y = kernel.y.abs();
        if kernel.scale == 0.0 || (lo < 0.0) != (hi < 0.0) || lo.abs() <= y || hi.abs() <= y {
            return Err(Error::InsideSpectrum { omega });
        }
        Ok(kernel)
    }

    /// `(base, rho)` at `eta`.
    fn eval(&self, eta: f64) -> (f64, f64) {
        let (sh, ch) = (0.5 * eta).sin_cos();
        let up = 2.0 * self.x1 * sh * sh;
        let down = 2.0 * self.x1 * ch * ch;
        let xm = if self.m0.abs() <= self.m_pi.abs() {
            self.m0 + up
        } else {
            self.m_pi - down
        };
        let xp = if self.p0.abs() <= self.p_pi.abs() {
            self.p0 + up
        } else {
            self.p_pi - down
        };
        let x = 0.5 * (xm + xp);
        let root = (xm * xp).sqrt();
        let s = x.signum();
        (self.scale * s / root, self.y / (x + s * root))
    }
}

/// `F_beta(omega)`, the reciprocal of the torus mean of `phi / (phi - f)`.
///
/// Returns exactly `1` at poles of `phi_beta`.
pub fn f_beta(omega: f64, p: &LatticeParams) -> Result<f64> {
    f_beta_with(omega, p, &Tolerances::default(), &QuadOptions::default())
}

pub fn f_beta_with(
    omega: f64,
    p: &LatticeParams,
    tol: &Tolerances,
    opts: &QuadOptions,
) -> Result<f64> {
    let kernel = Kernel::new(omega, p, tol)?;
    if kernel.x1 == 0.0 && kernel.y == 0.0 {
        return Ok(1.0);
    }
    let (integral, _) = integrate(|eta| kernel.eval(eta).0, 0.0, std::f64::consts::PI, opts)?;
    Ok(std::f64::consts::PI / integral)
}

/// Torus mean of `phi / (phi - f(xi, eta))` by nested adaptive quadrature.
///
/// `f` must be even in both arguments; the mean is taken over `[0, pi]^2`.
pub fn torus_mean_2d<G>(phi: f64, f: G, inner: &QuadOptions, outer: &QuadOptions) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
{
    use std::f64::consts::PI;
    let mut failure = None;
    let (value, _) = integrate(
        |eta| {
            if failure.is_some() {
                return 0.0;
            }
            match integrate(|xi| phi / (phi - f(xi, eta)), 0.0, PI, inner) {
                Ok((v, _)) => v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        PI,
        outer,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(value / (PI * PI))
}

/// `F_beta(omega)` by direct two-dimensional quadrature of the defining integral.
///
/// Poles of `phi_beta` are rejected with a quadrature failure.
pub fn f_beta_2d(omega: f64, p: &LatticeParams) -> Result<f64> {
    let tol = Tolerances::default();
    let s1 = checked_sin(omega, p.a1(), 1, &tol)?;
    let s2 = checked_sin(omega, p.a2(), 2, &tol)?;
    let c1 = (omega * p.a1()).cos();
    let c2 = (omega * p.a2()).cos();
    let phi = match phi_beta_with(omega, p, &tol) {
        PhiValue::Finite(v) => v,
        PhiValue::Pole => {
            return Err(Error::QuadratureFailure {
                reason: format!("phi_beta has a pole at omega = {omega}"),
            })
        }
    };
    if in_essential_spectrum_with(omega, p, &tol) {
        return Err(Error::InsideSpectrum { omega });
    }
    let f = |xi: f64, eta: f64| (xi.cos() - c1) / s1 + (eta.cos() - c2) / s2;
    let inner = QuadOptions {
        rel_tol: 1e-12,
        ..QuadOptions::default()
    };
    let outer = QuadOptions {
        rel_tol: 1e-11,
        ..QuadOptions::default()
    };
    let mean = torus_mean_2d(phi, f, &inner, &outer)?;
    Ok(1.0 / mean)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidedMode {
    pub omega: f64,
    pub lambda: f64,
    pub f_value: f64,
    pub gap_index: usize,
    pub mu: f64,
    pub beta: f64,
    pub bracket: Interval,
    /// Finite-difference residual, once verified against the lattice equations.
    pub residual: Option<f64>,
    pub decay_rate: Option<f64>,
    /// Another root of the same gap lies within `1e-6`.
    pub near_coincident: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSearch {
    /// Grid points per search segment.
    pub grid: usize,
    /// Edge margin as a fraction of the gap width.
    pub edge_margin: f64,
    pub root_tol: f64,
    pub residual_tol: f64,
    /// Interior membership probes used to verify the gap.
    pub probes: usize,
    /// Smallest absolute distance to a gap edge probed by the geometric edge
    /// refinement below the margin; zero disables the refinement.
    pub edge_floor: f64,
    pub edge_points_per_decade: usize,
}

impl Default for ModeSearch {
    fn default() -> Self {
        Self {
            grid: 1000,
            edge_margin: 1e-6,
            root_tol: 1e-12,
            residual_tol: 1e-10,
            probes: 20,
            edge_floor: 1e-9,
            edge_points_per_decade: 8,
        }
    }
}

/// Roots of `mu - (1 - F_beta)` inside `gap`.
pub fn find_guided_modes(p: &LatticeParams, gap: &SpectralGap) -> Result<Vec<GuidedMode>> {
    find_guided_modes_with(p, gap, &ModeSearch::default())
}

pub fn find_guided_modes_with(
    p: &LatticeParams,
    gap: &SpectralGap,
    search: &ModeSearch,
) -> Result<Vec<GuidedMode>> {
    let tol = Tolerances::default();
    let width = gap.width();
    for i in 1..=search.probes {
        let probe = gap.omega_b + width * i as f64 / (search.probes + 1) as f64;
        if in_essential_spectrum_with(probe, p, &tol) {
            return Err(Error::GapUnverified {
                omega_b: gap.omega_b,
                omega_t: gap.omega_t,
                probe,
            });
        }
    }
    let mu = p.mu();
    if mu >= 1.0 {
        return Ok(Vec::new());
    }

    let delta = search.edge_margin * width;
    let mut cuts = vec![gap.omega_b + delta];
    if gap.gap_type == GapType::TypeI {
        cuts.extend(gap.w_inside.iter().copied());
    }
    cuts.push(gap.omega_t - delta);

    let opts = QuadOptions::default();
    let h = |w: f64| -> Result<f64> { Ok(mu - 1.0 + f_beta_with(w, p, &tol, &opts)?) };

    // geometric offsets from the edge floor up to the margin
    let offsets: Vec<f64> = if search.edge_floor > 0.0 && search.edge_floor < delta {
        let ratio = delta / search.edge_floor;
        let m = ((ratio.log10() * search.edge_points_per_decade as f64).ceil() as usize).max(1);
        (0..m)
            .map(|i| search.edge_floor * ratio.powf(i as f64 / m as f64))
            .collect()
    } else {
        Vec::new()
    };

    let mut modes = Vec::new();
    let last = cuts.len() - 2;
    for (s, seg) in cuts.windows(2).enumerate() {
        let (lo, hi) = (seg[0], seg[1]);
        let n = search.grid.max(2);
        let mut xs: Vec<f64> = Vec::with_capacity(n + 2 * offsets.len());
        let mut edge_zone: Vec<bool> = Vec::with_capacity(xs.capacity());
        if s == 0 {
            xs.extend(offsets.iter().map(|o| gap.omega_b + o));
            edge_zone.resize(xs.len(), true);
        }
        xs.extend((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64));
        edge_zone.resize(xs.len(), false);
        if s == last {
            xs.extend(offsets.iter().rev().map(|o| gap.omega_t - o));
            edge_zone.resize(xs.len(), true);
        }
        let evaluated: Vec<Option<f64>> = xs
            .par_iter()
            .zip(&edge_zone)
            .map(|(&w, &zone)| match h(w) {
                Ok(v) => Ok(Some(v)),
                // edges are only known to the bisection tolerance
                Err(Error::InsideSpectrum { .. }) if zone => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let (xs, hs): (Vec<f64>, Vec<f64>) = xs
            .iter()
            .zip(&evaluated)
            .filter_map(|(&w, v)| v.map(|v| (w, v)))
            .unzip();
        let n = xs.len();

        let mut roots: Vec<(f64, Interval)> = Vec::new();
        for i in sign_changes(&hs) {
            let mut failure = None;
            let root = bisect_certified(
                |w| match h(w) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                xs[i],
                xs[i + 1],
                hs[i],
                search.root_tol,
                search.residual_tol,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            roots.push((root, Interval::new(xs[i], xs[i + 1])));
        }
        for (i, &v) in hs.iter().enumerate() {
            if v == 0.0 {
                let a = xs[i.saturating_sub(1)];
                let b = xs[(i + 1).min(n - 1)];
                roots.push((xs[i], Interval::new(a, b)));
            }
        }
        for (omega, bracket) in roots {
            let f_value = f_beta_with(omega, p, &tol, &opts)?;
            modes.push(GuidedMode {
                omega,
                lambda: omega * omega,
                f_value,
                gap_index: gap.index,
                mu,
                beta: p.beta(),
                bracket,
                residual: None,
                decay_rate: None,
                near_coincident: false,
            });
        }
    }
    modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    modes.dedup_by(|b, a| b.omega == a.omega);
    for i in 1..modes.len() {
        if modes[i].omega - modes[i - 1].omega < 1e-6 {
            modes[i].near_coincident = true;
            modes[i - 1].near_coincident = true;
        }
    }
    Ok(modes)
}

/// Vertex amplitudes `u[k, l]` on the square `[-K, K]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    k: usize,
    values: Vec<f64>,
}

impl LatticeField {
    /// Field from row-major values, `k` outer and `l` inner, both running `-K..=K`.
    pub fn new(k: usize, values: Vec<f64>) -> Result<Self> {
        let n = 2 * k + 1;
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "lattice field of radius {k} needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self { k, values })
    }

    pub fn from_fn<G: FnMut(i64, i64) -> f64>(k: usize, mut g: G) -> Self {
        let r = k as i64;
        let values = (-r..=r)
            .flat_map(|i| (-r..=r).map(move |j| (i, j)))
            .map(|(i, j)| g(i, j))
            .collect();
        Self { k, values }
    }

    pub fn radius(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        2 * self.k + 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self, k: i64, l: i64) -> Option<usize> {
        let r = self.k as i64;
        if k.abs() > r || l.abs() > r {
            return None;
        }
        Some(((k + r) as usize) * self.side() + (l + r) as usize)
    }

    /// `u[k, l]`, zero outside the square.
    pub fn get(&self, k: i64, l: i64) -> f64 {
        self.index(k, l).map_or(0.0, |i| self.values[i])
    }

    pub fn center(&self) -> f64 {
        self.get(0, 0)
    }

    /// Largest deviation from evenness in each index.
    pub fn symmetry_violation(&self) -> f64 {
        let r = self.k as i64;
        let mut worst: f64 = 0.0;
        for k in -r..=r {
            for l in -r..=r {
                let u = self.get(k, l);
                worst = worst
                    .max((u - self.get(-k, l)).abs())
                    .max((u - self.get(k, -l)).abs());
            }
        }
        worst
    }

    /// Largest deviation from `u[k, l] = u[l, k]`.
    pub fn transpose_violation(&self) -> f64 {
        let r = self.k as i64;
        let mut worst: f64 = 0.0;
        for k in -r..=r {
            for l in -r..=r {
                worst = worst.max((self.get(k, l) - self.get(l, k)).abs());
            }
        }
        worst
    }

    /// Largest `|u|` on the ring `|k| + |l| = r`.
    pub fn ring_max(&self, r: usize) -> f64 {
        let r = r as i64;
        let mut m: f64 = 0.0;
        for k in -r..=r {
            let rest = r - k.abs();
            for l in [-rest, rest] {
                m = m.max(self.get(k, l).abs());
            }
        }
        m
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|u| u * u).sum()
    }

    /// Share of the energy on the square boundary `max(|k|, |l|) = K`.
    pub fn outer_ring_fraction(&self) -> f64 {
        let r = self.k as i64;
        let mut outer = 0.0;
        for k in -r..=r {
            for l in -r..=r {
                if k.abs() == r || l.abs() == r {
                    outer += self.get(k, l).powi(2);
                }
            }
        }
        outer / self.energy()
    }
}

/// Transverse mode profile on `[-K, K]^2`, normalised to `u[0, 0] = 1`.
pub fn mode_profile(mode: &GuidedMode, p: &LatticeParams, k: usize) -> Result<LatticeField> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "profile radius must be at least 1".into(),
        ));
    }
    let tol = Tolerances::default();
    let kernel = Kernel::new(mode.omega, p, &tol)?;
    let m = k + 1;
    // components: (kk, l) real parts, then (kk, l) imaginary parts
    let dim = 2 * m * m;
    let mut powers = vec![0.0; m];
    let est = integrate_vec(
        |eta, out: &mut [f64]| {
            let (base, rho) = kernel.eval(eta);
            powers[0] = base;
            for i in 1..m {
                powers[i] = powers[i - 1] * rho;
            }
            for l in 0..m {
                let (s, c) = (l as f64 * eta).sin_cos();
                for (kk, pw) in powers.iter().enumerate() {
                    out[kk * m + l] = pw * c;
                    out[m * m + kk * m + l] = -pw * s;
                }
            }
        },
        0.0,
        2.0 * std::f64::consts::PI,
        dim,
        &QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_intervals: 4000,
        },
    )?;
    let scale = (1.0 - p.mu()) / (2.0 * std::f64::consts::PI);
    let re: Vec<f64> = est.values[..m * m].iter().map(|v| v * scale).collect();
    let im_max = est.values[m * m..]
        .iter()
        .fold(0.0f64, |acc, v| acc.max((v * scale).abs()));
    if im_max > 1e-10 {
        return Err(Error::QuadratureFailure {
            reason: format!("imaginary part {im_max:e} of the inverse transform exceeds 1e-10"),
        });
    }
    let u00 = re[0];
    if (u00 - 1.0).abs() > 1e-8 {
        return Err(Error::NormalizationInconsistency { value: u00 });
    }
    Ok(LatticeField::from_fn(k, |i, j| {
        re[i.unsigned_abs() as usize * m + j.unsigned_abs() as usize] / u00
    }))
}

/// Geometric decay rate of a field: `exp` of the least-squares slope of the
/// log ring maxima over rings `2..=K`.
pub fn decay_rate(field: &LatticeField) -> Result<f64> {
    let k = field.radius();
    if k < 4 {
        return Err(Error::InvalidArgument(format!(
            "decay fit needs radius at least 4, got {k}"
        )));
    }
    let points: Vec<(f64, f64)> = (2..=k)
        .map(|r| (r as f64, field.ring_max(r)))
        .filter(|&(_, m)| m >= 1e-14)
        .map(|(r, m)| (r, m.ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::DegenerateField);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::essential::classify_gap;
    use std::f64::consts::PI;

    fn config_b(mu: f64) -> LatticeParams {
        LatticeParams::new([1.0, 1.0, 2.0], mu, PI / 2.0).unwrap()
    }

    fn type_i_gap(p: &LatticeParams) -> SpectralGap {
        classify_gap(
            Interval::new(1.375_850_953_408_474_4, 1.765_741_700_181_319_2),
            p,
        )
        .unwrap()
    }

    #[test]
    fn pole_gives_one() {
        assert_eq!(f_beta(PI / 2.0, &config_b(0.5)).unwrap(), 1.0);
    }

    #[test]
    fn inside_spectrum_is_rejected() {
        let p = config_b(0.5);
        assert!(matches!(f_beta(1.0, &p), Err(Error::InsideSpectrum { .. })));
        assert!(matches!(
            f_beta(PI, &p),
            Err(Error::SingularFrequency { axis: 1, .. })
        ));
    }

    #[test]
    fn reduction_matches_direct_quadrature() {
        let p = config_b(0.5);
        for w in [1.40, 1.45, 1.55, 1.60, 1.70] {
            let a = f_beta(w, &p).unwrap();
            let b = f_beta_2d(w, &p).unwrap();
            assert!((a - b).abs() / a.abs().max(1.0) <= 1e-8, "{w}: {a} vs {b}");
        }
    }

    #[test]
    fn constant_integrand_hook() {
        let opts = QuadOptions::default();
        let v = torus_mean_2d(0.7, |_, _| 0.0, &opts, &opts).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_modes_bracket_the_pole() {
        let p = config_b(0.5);
        let gap = type_i_gap(&p);
        let modes = find_guided_modes(&p, &gap).unwrap();
        assert_eq!(modes.len(), 2);
        assert!(modes[0].omega < PI / 2.0 && PI / 2.0 < modes[1].omega);
        for m in &modes {
            assert!((m.mu - (1.0 - m.f_value)).abs() <= 1e-9);
            assert!((m.lambda - m.omega * m.omega).abs() <= 1e-12 * m.lambda);
        }
    }

    #[test]
    fn no_modes_without_shrinking() {
        for mu in [1.0, 1.5, 3.0] {
            let p = config_b(mu);
            assert!(find_guided_modes(&p, &type_i_gap(&p)).unwrap().is_empty());
        }
    }

    #[test]
    fn unverified_gap_is_rejected() {
        let p = config_b(0.5);
        let mut gap = type_i_gap(&p);
        gap.omega_b = 1.0;
        assert!(matches!(
            find_guided_modes(&p, &gap),
            Err(Error::GapUnverified { .. })
        ));
    }

    #[test]
    fn profile_normalised_and_symmetric() {
        let p = config_b(0.5);
        let modes = find_guided_modes(&p, &type_i_gap(&p)).unwrap();
        let field = mode_profile(&modes[0], &p, 10).unwrap();
        assert_eq!(field.center(), 1.0);
        assert!(field.symmetry_violation() <= 1e-10);
        assert!(field.transpose_violation() <= 1e-10);
        assert!(decay_rate(&field).unwrap() < 1.0);
    }

    #[test]
    fn decay_rate_examples() {
        let geometric = LatticeField::from_fn(8, |k, l| 0.5f64.powi((k.abs() + l.abs()) as i32));
        assert!((decay_rate(&geometric).unwrap() - 0.5).abs() < 1e-12);
        let flat = LatticeField::from_fn(8, |_, _| 1.0);
        assert!((decay_rate(&flat).unwrap() - 1.0).abs() < 1e-12);
        let zero = LatticeField::from_fn(8, |_, _| 0.0);
        assert_eq!(decay_rate(&zero), Err(Error::DegenerateField));
        assert!(decay_rate(&LatticeField::from_fn(3, |_, _| 1.0)).is_err());
    }
}
