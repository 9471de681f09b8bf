//! Elementary spectral functions of the graph operator and the special
//! frequency sets attached to them.
//!
//! All functions are native in the frequency `omega`; spectral values are
//! `lambda = omega^2`. Every trigonometric argument is `omega * a_i`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{FrequencyWindow, LatticeParams, Tolerances};

/// Value of the vertical-edge symbol `phi_beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiValue {
    Finite(f64),
    Pole,
}

impl PhiValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            PhiValue::Finite(v) => Some(v),
            PhiValue::Pole => None,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, PhiValue::Pole)
    }
}

/// `phi_beta(omega) = (cos(omega a3) - cos beta) / sin(omega a3)`.
///
/// At zeros of the sine where the numerator also vanishes the symbol is
/// continued by its limit, which is zero.
pub fn phi_beta(omega: f64, p: &LatticeParams) -> PhiValue {
    phi_beta_with(omega, p, &Tolerances::default())
}

pub fn phi_beta_with(omega: f64, p: &LatticeParams, tol: &Tolerances) -> PhiValue {
    let x = omega * p.a3();
    let s = x.sin();
    let num = x.cos() - p.beta().cos();
    if s.abs() < tol.sin_tol {
        if num.abs() < tol.removable_tol {
            PhiValue::Finite(0.0)
        } else {
            PhiValue::Pole
        }
    } else {
        PhiValue::Finite(num / s)
    }
}

pub(crate) fn checked_sin(omega: f64, a: f64, axis: usize, tol: &Tolerances) -> Result<f64> {
    let s = (omega * a).sin();
    if s.abs() < tol.sin_tol {
        Err(Error::SingularFrequency { omega, axis })
    } else {
        Ok(s)
    }
}

/// `f(xi, eta, omega)`, the symbol of the horizontal edges.
pub fn f_value(xi: f64, eta: f64, omega: f64, p: &LatticeParams) -> Result<f64> {
    let tol = Tolerances::default();
    let s1 = checked_sin(omega, p.a1(), 1, &tol)?;
    let s2 = checked_sin(omega, p.a2(), 2, &tol)?;
    let c1 = (omega * p.a1()).cos();
    let c2 = (omega * p.a2()).cos();
    Ok((xi.cos() - c1) / s1 + (eta.cos() - c2) / s2)
}

/// Range of `(cos t - cos x) / sin x` over `t`, i.e. the two values `tan(x/2)`
/// and `-1/tan(x/2)` in increasing order.
fn term_range(x: f64) -> (f64, f64) {
    let t = (0.5 * x).tan();
    let other = -1.0 / t;
    if t > 0.0 {
        (other, t)
    } else {
        (t, other)
    }
}

/// Closed interval `[f_min, f_max]` swept by `f(., ., omega)` over the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FRange {
    pub min: f64,
    pub max: f64,
}

impl FRange {
    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
}

pub fn f_range(omega: f64, p: &LatticeParams) -> Result<FRange> {
    f_range_with(omega, p, &Tolerances::default())
}

pub fn f_range_with(omega: f64, p: &LatticeParams, tol: &Tolerances) -> Result<FRange> {
    checked_sin(omega, p.a1(), 1, tol)?;
    checked_sin(omega, p.a2(), 2, tol)?;
    let (lo1, hi1) = term_range(omega * p.a1());
    let (lo2, hi2) = term_range(omega * p.a2());
    Ok(FRange {
        min: lo1 + lo2,
        max: hi1 + hi2,
    })
}

/// `g_beta(omega) = cot(omega a1) + cot(omega a2) + phi_beta(omega)`.
pub fn g_beta(omega: f64, p: &LatticeParams) -> Result<f64> {
    g_beta_with(omega, p, &Tolerances::default())
}

pub fn g_beta_with(omega: f64, p: &LatticeParams, tol: &Tolerances) -> Result<f64> {
    let s1 = checked_sin(omega, p.a1(), 1, tol)?;
    let s2 = checked_sin(omega, p.a2(), 2, tol)?;
    let s3 = checked_sin(omega, p.a3(), 3, tol)?;
    let c1 = (omega * p.a1()).cos();
    let c2 = (omega * p.a2()).cos();
    let c3 = (omega * p.a3()).cos();
    Ok(c1 / s1 + c2 / s2 + (c3 - p.beta().cos()) / s3)
}

/// The three families of frequencies that always belong to the spectrum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaPoints {
    /// `pi n / a1`
    pub sigma1: Vec<f64>,
    /// `pi n / a2`
    pub sigma2: Vec<f64>,
    /// `|+-beta + 2 pi n| / a3`
    pub sigma3: Vec<f64>,
}

impl SigmaPoints {
    /// Sorted union of the first two families, duplicates merged.
    pub fn sigma12(&self) -> Vec<f64> {
        merge_sorted(self.sigma1.iter().chain(&self.sigma2).copied())
    }

    pub fn all(&self) -> Vec<f64> {
        merge_sorted(
            self.sigma1
                .iter()
                .chain(&self.sigma2)
                .chain(&self.sigma3)
                .copied(),
        )
    }
}

fn merge_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * a.abs().max(1.0));
    v
}

/// Multiples `pi n / a`, `n >= 1`, inside the window.
fn multiples_in(step: f64, window: &FrequencyWindow) -> Vec<f64> {
    let first = ((window.lo() / step).floor() as i64).max(1);
    let mut out = Vec::new();
    let mut n = first;
    loop {
        let w = step * n as f64;
        if w > window.hi() + window.slack() {
            break;
        }
        if window.contains(w) {
            out.push(w);
        }
        n += 1;
    }
    out
}

pub fn sigma_points(p: &LatticeParams, window: &FrequencyWindow) -> SigmaPoints {
    let sigma1 = multiples_in(PI / p.a1(), window);
    let sigma2 = multiples_in(PI / p.a2(), window);
    let beta = p.beta();
    let n_max = ((window.hi() * p.a3() + beta) / (2.0 * PI)).ceil() as i64 + 1;
    let sigma3 = merge_sorted(
        (0..=n_max)
            .flat_map(|n| {
                let base = 2.0 * PI * n as f64;
                [(base + beta).abs(), (base - beta).abs()]
            })
            .map(|x| x / p.a3())
            .filter(|&w| window.contains(w)),
    );
    SigmaPoints {
        sigma1,
        sigma2,
        sigma3,
    }
}

/// Non-removable poles of `phi_beta` in the window.
///
/// For `beta` away from `0` and `pi` these are all `pi n / a3`; at the two
/// endpoints every other multiple is removable and only the opposite parity
/// survives.
pub fn w_points(p: &LatticeParams, window: &FrequencyWindow) -> Vec<f64> {
    w_points_with(p, window, &Tolerances::default())
}

pub fn w_points_with(p: &LatticeParams, window: &FrequencyWindow, tol: &Tolerances) -> Vec<f64> {
    let step = PI / p.a3();
    let cos_beta = p.beta().cos();
    multiples_in(step, window)
        .into_iter()
        .filter(|&w| {
            let n = (w / step).round() as i64;
            let cos_x = if n % 2 == 0 { 1.0 } else { -1.0 };
            (cos_x - cos_beta).abs() >= tol.removable_tol
        })
        .collect()
}

/// Distance from `omega` to the nearest positive multiple of `pi / a`.
pub(crate) fn distance_to_multiples(omega: f64, a: f64) -> f64 {
    let step = PI / a;
    let n = (omega / step).round().max(1.0);
    (omega - n * step).abs()
}

/// Whether `omega` is within `tol` of a point of sigma1 or sigma2.
pub fn near_sigma12(omega: f64, p: &LatticeParams, tol: f64) -> bool {
    distance_to_multiples(omega, p.a1()) <= tol || distance_to_multiples(omega, p.a2()) <= tol
}
