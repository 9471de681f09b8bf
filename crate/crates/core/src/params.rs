//! Problem parameters and frequency windows.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Unvalidated lattice description, as read from a config or the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub a: [f64; 3],
    pub mu: f64,
    pub beta: f64,
}

/// Validated lattice description.
///
/// Periods `a1, a2, a3` and the defect weight `mu` are strictly positive.
/// The quasi-momentum is folded into `[0, pi]`, since every spectral
/// quantity depends on `beta` only through `cos(beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    a: [f64; 3],
    mu: f64,
    beta: f64,
}

/// Folds a quasi-momentum into `[0, pi]` using evenness and `2 pi` periodicity.
pub fn fold_beta(beta: f64) -> f64 {
    ((beta + PI).rem_euclid(2.0 * PI) - PI).abs()
}

/// Validates `raw` and folds its quasi-momentum.
pub fn normalize_params(raw: RawParams) -> Result<LatticeParams> {
    const NAMES: [&str; 3] = ["a1", "a2", "a3"];
    for (value, name) in raw.a.iter().zip(NAMES) {
        if !value.is_finite() {
            return Err(Error::NonFinite { name });
        }
    }
    if !raw.mu.is_finite() {
        return Err(Error::NonFinite { name: "mu" });
    }
    if !raw.beta.is_finite() {
        return Err(Error::NonFinite { name: "beta" });
    }
    for (&value, name) in raw.a.iter().zip(NAMES) {
        if value <= 0.0 {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    if raw.mu <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "mu",
            value: raw.mu,
        });
    }
    Ok(LatticeParams {
        a: raw.a,
        mu: raw.mu,
        beta: fold_beta(raw.beta),
    })
}

impl LatticeParams {
    pub fn new(a: [f64; 3], mu: f64, beta: f64) -> Result<Self> {
        normalize_params(RawParams { a, mu, beta })
    }

    pub fn a1(&self) -> f64 {
        self.a[0]
    }

    pub fn a2(&self) -> f64 {
        self.a[1]
    }

    pub fn a3(&self) -> f64 {
        self.a[2]
    }

    pub fn periods(&self) -> [f64; 3] {
        self.a
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Folded quasi-momentum in `[0, pi]`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.a, mu, self.beta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.a, self.mu, beta)
    }

    /// Same lattice with the two transverse periods exchanged.
    pub fn with_swapped_transverse(&self) -> Self {
        Self {
            a: [self.a[1], self.a[0], self.a[2]],
            ..*self
        }
    }

    pub fn min_period(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            a: self.a,
            mu: self.mu,
            beta: self.beta,
        }
    }
}

/// A half-open frequency window `(lo, hi]` in units of inverse length.
///
/// `lo` may be zero; `omega = 0` itself is never part of a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyWindow {
    lo: f64,
    hi: f64,
}

impl FrequencyWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi <= lo {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Absolute slack used when deciding whether a point sits on the window ends.
    pub fn slack(&self) -> f64 {
        1e-12 * self.hi.max(1.0)
    }

    /// Membership in `(lo, hi]`, with `hi` matched up to [`Self::slack`].
    pub fn contains(&self, omega: f64) -> bool {
        omega > self.lo + self.slack() && omega <= self.hi + self.slack() && omega > 0.0
    }
}

/// Numerical thresholds shared by the symbol evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `|sin(omega a_i)|` below this is treated as an exact zero.
    pub sin_tol: f64,
    /// `|cos(omega a3) - cos(beta)|` below this makes a zero of `sin(omega a3)` removable.
    pub removable_tol: f64,
    /// Distance in omega within which a gap edge is identified with a point of sigma1 or sigma2.
    pub sigma_match_tol: f64,
    /// Bisection tolerance for band edges, in omega.
    pub edge_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sin_tol: 1e-12,
            removable_tol: 1e-9,
            sigma_match_tol: 1e-8,
            edge_tol: 1e-10,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(beta: f64) -> RawParams {
        RawParams {
            a: [1.0, 1.0, 1.0],
            mu: 0.5,
            beta,
        }
    }

    #[test]
    fn beta_folding() {
        let p = normalize_params(raw(PI / 2.0)).unwrap();
        assert_eq!(p.beta(), PI / 2.0);
        let p = normalize_params(raw(-PI / 2.0)).unwrap();
        assert!((p.beta() - PI / 2.0).abs() < 1e-15);
        let p = normalize_params(raw(3.0 * PI / 2.0)).unwrap();
        assert!((p.beta() - PI / 2.0).abs() < 1e-15);
        assert!((fold_beta(PI) - PI).abs() < 1e-15);
        assert_eq!(fold_beta(0.0), 0.0);
        assert!((fold_beta(2.0 * PI - 0.3) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut r = raw(0.0);
        r.a[1] = 0.0;
        assert!(matches!(
            normalize_params(r),
            Err(Error::NonPositiveParameter { name: "a2", .. })
        ));
        let mut r = raw(0.0);
        r.mu = -1.0;
        assert!(matches!(
            normalize_params(r),
            Err(Error::NonPositiveParameter { name: "mu", .. })
        ));
        let mut r = raw(f64::NAN);
        assert!(matches!(
            normalize_params(r),
            Err(Error::NonFinite { name: "beta" })
        ));
        r.beta = 0.0;
        r.a[2] = f64::INFINITY;
        assert!(matches!(
            normalize_params(r),
            Err(Error::NonFinite { name: "a3" })
        ));
    }

    #[test]
    fn window_validation() {
        assert!(FrequencyWindow::new(0.0, 1.0).is_ok());
        assert!(FrequencyWindow::new(1.0, 1.0).is_err());
        assert!(FrequencyWindow::new(0.0, 0.0).is_err());
        assert!(FrequencyWindow::new(-1.0, 1.0).is_err());
        let w = FrequencyWindow::new(0.0, PI).unwrap();
        assert!(w.contains(PI));
        assert!(!w.contains(0.0));
        assert!(!w.contains(PI + 1e-6));
    }
}
