//! Truncated finite-difference system on `[-K, K]^2` and a near-kernel
//! detector built on it. Nothing here uses `F_beta` or the inverse transform.
//!
//! The system matrix is `L = L0 + c e0 e0^T` where `L0` is the separable
//! five-point operator with zero boundary values and `c` is the defect
//! correction at the origin. `L0` is diagonalised by discrete sine vectors,
//! so the spectrum of `L` follows from a rank-one secular equation. A dense
//! SVD of the assembled matrix is kept as a second route for small `K`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::essential::SpectralGap;
use crate::params::{LatticeParams, Tolerances};
use crate::point::LatticeField;
use crate::roots::golden_section;
use crate::symbols::{checked_sin, g_beta_with, phi_beta_with};

/// Five-point stencil of the defect lattice, truncated to `[-K, K]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSystem {
    k: usize,
    omega: f64,
    /// East/west weight `1 / sin(omega a1)`.
    pub w1: f64,
    /// North/south weight `1 / sin(omega a2)`.
    pub w2: f64,
    /// Centre weight `-2 g_beta(omega)`.
    pub center: f64,
    /// Extra centre weight at the origin, `-2 (mu - 1) phi_beta(omega)`.
    pub defect: f64,
}

impl TruncatedSystem {
    pub fn new(omega: f64, p: &LatticeParams, k: usize) -> Result<Self> {
        let tol = Tolerances::default();
        let s1 = checked_sin(omega, p.a1(), 1, &tol)?;
        let s2 = checked_sin(omega, p.a2(), 2, &tol)?;
        checked_sin(omega, p.a3(), 3, &tol)?;
        let g = g_beta_with(omega, p, &tol)?;
        let phi = phi_beta_with(omega, p, &tol)
            .finite()
            .ok_or(Error::SingularFrequency { omega, axis: 3 })?;
        Ok(Self {
            k,
            omega,
            w1: 1.0 / s1,
            w2: 1.0 / s2,
            center: -2.0 * g,
            defect: -2.0 * (p.mu() - 1.0) * phi,
        })
    }

    pub fn radius(&self) -> usize {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn side(&self) -> usize {
        2 * self.k + 1
    }

    pub fn size(&self) -> usize {
        self.side() * self.side()
    }

    fn origin(&self) -> usize {
        self.k * self.side() + self.k
    }

    /// `L u` for row-major `u` (same layout as [`LatticeField`]).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.side();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let at = |a: usize, b: usize| u[a * n + b];
                let mut v = self.center * at(i, j);
                if i > 0 {
                    v += self.w1 * at(i - 1, j);
                }
                if i + 1 < n {
                    v += self.w1 * at(i + 1, j);
                }
                if j > 0 {
                    v += self.w2 * at(i, j - 1);
                }
                if j + 1 < n {
                    v += self.w2 * at(i, j + 1);
                }
                out[i * n + j] = v;
            }
        }
        out[self.origin()] += self.defect * u[self.origin()];
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.side();
        let size = n * n;
        let mut m = DMatrix::zeros(size, size);
        for i in 0..n {
            for j in 0..n {
                let r = i * n + j;
                m[(r, r)] = self.center;
                if i > 0 {
                    m[(r, r - n)] = self.w1;
                }
                if i + 1 < n {
                    m[(r, r + n)] = self.w1;
                }
                if j > 0 {
                    m[(r, r - 1)] = self.w2;
                }
                if j + 1 < n {
                    m[(r, r + 1)] = self.w2;
                }
            }
        }
        let o = self.origin();
        m[(o, o)] += self.defect;
        m
    }

    /// Eigenvalues of the symmetric system matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let spec = self.secular();
        let mut all = spec.deflated.clone();
        let m = spec.poles.len();
        all.extend((0..m).map(|i| spec.root(i)));
        all.sort_by(f64::total_cmp);
        all
    }

    fn secular(&self) -> Secular {
        let n = self.side();
        let h = std::f64::consts::PI / (n + 1) as f64;
        let cos2: Vec<f64> = (1..=n).map(|j| 2.0 * (j as f64 * h).cos()).collect();
        // squared centre component of each sine vector: 2/(n+1) for odd j, 0 for even j
        let v2 = 2.0 / (n + 1) as f64;
        let mut deflated = Vec::new();
        let mut active = Vec::new();
        for (j, cj) in cos2.iter().enumerate() {
            for (m, cm) in cos2.iter().enumerate() {
                let d = self.w1 * cj + self.w2 * cm + self.center;
                if j % 2 == 0 && m % 2 == 0 {
                    active.push((d, v2 * v2));
                } else {
                    deflated.push(d);
                }
            }
        }
        if self.defect == 0.0 {
            deflated.extend(active.iter().map(|a| a.0));
            active.clear();
        }
        active.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = active.iter().fold(1.0f64, |s, a| s.max(a.0.abs()));
        let mut poles: Vec<(f64, f64)> = Vec::with_capacity(active.len());
        for (d, z) in active {
            match poles.last_mut() {
                Some(last) if d - last.0 <= 1e-14 * scale => {
                    last.1 += z;
                    deflated.push(d);
                }
                _ => poles.push((d, z)),
            }
        }
        Secular {
            poles,
            deflated,
            c: self.defect,
        }
    }
}

/// Rank-one update `diag(d) + c z z^T` with distinct poles `d`.
struct Secular {
    poles: Vec<(f64, f64)>,
    deflated: Vec<f64>,
    c: f64,
}

impl Secular {
    fn value(&self, lambda: f64) -> f64 {
        1.0 + self.c
            * self
                .poles
                .iter()
                .map(|(d, z)| z / (d - lambda))
                .sum::<f64>()
    }

    fn total_weight(&self) -> f64 {
        self.poles.iter().map(|p| p.1).sum()
    }

    /// Interval holding the `i`-th smallest root.
    fn interval(&self, i: usize) -> (f64, f64) {
        let m = self.poles.len();
        let reach = self.c * self.total_weight();
        if self.c > 0.0 {
            let lo = self.poles[i].0;
            let hi = if i + 1 < m {
                self.poles[i + 1].0
            } else {
                lo + reach
            };
            (lo, hi)
        } else {
            let hi = self.poles[i].0;
            let lo = if i == 0 {
                hi + reach
            } else {
                self.poles[i - 1].0
            };
            (lo, hi)
        }
    }

    fn root(&self, i: usize) -> f64 {
        let i = i.min(self.poles.len() - 1);
        let (mut lo, mut hi) = self.interval(i);
        // s rises from -inf to +inf across the interval when c > 0 and falls otherwise
        let rising = self.c > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = self.value(mid);
            if s == 0.0 {
                return mid;
            }
            let root_above = if rising { s < 0.0 } else { s > 0.0 };
            if root_above {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Smallest `|root|`: the root nearest zero sits in the interval
    /// containing zero or next to it.
    fn smallest_abs_root(&self) -> Option<f64> {
        let m = self.poles.len();
        if m == 0 || self.c == 0.0 {
            return None;
        }
        let pos = self.poles.partition_point(|p| p.0 < 0.0);
        let mut best = f64::INFINITY;
        let lo = pos.saturating_sub(2);
        let hi = (pos + 1).min(m - 1);
        for i in lo..=hi {
            best = best.min(self.root(i).abs());
        }
        Some(best)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorMethod {
    /// Exact sine-basis diagonalisation plus rank-one secular equation.
    Separable,
    /// Dense SVD of the assembled matrix.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Maximum number of unknowns `(2K+1)^2`.
    pub size_cap: usize,
    /// Maximum number of unknowns for the dense route.
    pub dense_cap: usize,
    pub method: IndicatorMethod,
    /// Refined minima above this value are not reported.
    pub dip_threshold: f64,
    /// Golden-section tolerance in omega.
    pub refine_tol: f64,
    /// Geometric grid refinement towards both gap edges down to this fraction
    /// of the gap width; zero disables it.
    pub edge_floor: f64,
    pub edge_points_per_decade: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            size_cap: 251 * 251,
            dense_cap: 41 * 41,
            method: IndicatorMethod::Separable,
            dip_threshold: 1e-3,
            refine_tol: 1e-6,
            edge_floor: 1e-8,
            edge_points_per_decade: 8,
        }
    }
}

/// Smallest singular value of the truncated system at `omega`.
pub fn smallest_singular_indicator(omega: f64, p: &LatticeParams, k: usize) -> Result<f64> {
    smallest_singular_indicator_with(omega, p, k, &OracleConfig::default())
}

pub fn smallest_singular_indicator_with(
    omega: f64,
    p: &LatticeParams,
    k: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    let sys = TruncatedSystem::new(omega, p, k)?;
    let size = sys.size();
    if size > cfg.size_cap {
        return Err(Error::SizeLimit {
            size,
            cap: cfg.size_cap,
        });
    }
    match cfg.method {
        IndicatorMethod::Separable => {
            let spec = sys.secular();
            let deflated = spec
                .deflated
                .iter()
                .fold(f64::INFINITY, |m, d| m.min(d.abs()));
            Ok(spec
                .smallest_abs_root()
                .map_or(deflated, |r| r.min(deflated)))
        }
        IndicatorMethod::Dense => {
            if size > cfg.dense_cap {
                return Err(Error::SizeLimit {
                    size,
                    cap: cfg.dense_cap,
                });
            }
            let sv = sys.to_dense().singular_values();
            Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
        }
    }
}

/// Eigenfrequencies in `gap` detected as dips of the indicator to near zero.
pub fn oracle_eigenfrequencies(
    p: &LatticeParams,
    gap: &SpectralGap,
    k: usize,
    grid: usize,
) -> Result<Vec<f64>> {
    oracle_eigenfrequencies_with(p, gap, k, grid, &OracleConfig::default())
}

pub fn oracle_eigenfrequencies_with(
    p: &LatticeParams,
    gap: &SpectralGap,
    k: usize,
    grid: usize,
    cfg: &OracleConfig,
) -> Result<Vec<f64>> {
    if grid < 100 {
        return Err(Error::InvalidArgument(format!(
            "oracle grid must have at least 100 points, got {grid}"
        )));
    }
    let size = (2 * k + 1) * (2 * k + 1);
    if size > cfg.size_cap {
        return Err(Error::SizeLimit {
            size,
            cap: cfg.size_cap,
        });
    }
    let width = gap.width();
    let mut xs: Vec<f64> = (0..grid)
        .map(|i| gap.omega_b + width * (i as f64 + 0.5) / grid as f64)
        .collect();
    if cfg.edge_floor > 0.0 && cfg.edge_points_per_decade > 0 {
        let first = 0.5 / grid as f64;
        let ratio = 10f64.powf(-1.0 / cfg.edge_points_per_decade as f64);
        let mut d = first * ratio;
        while d >= cfg.edge_floor {
            xs.push(gap.omega_b + width * d);
            xs.push(gap.omega_t - width * d);
            d *= ratio;
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
    }
    let indicator = |w: f64| -> f64 {
        match smallest_singular_indicator_with(w, p, k, cfg) {
            Ok(v) => v,
            Err(Error::SingularFrequency { .. }) => f64::INFINITY,
            Err(_) => f64::NAN,
        }
    };
    let values: Vec<f64> = xs.par_iter().map(|&w| indicator(w)).collect();
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        // surface the underlying error
        smallest_singular_indicator_with(xs[i], p, k, cfg)?;
    }

    let mut found = Vec::new();
    for i in 1..xs.len() - 1 {
        if values[i] < values[i - 1] && values[i] <= values[i + 1] {
            let (a, b) = (xs[i - 1], xs[i + 1]);
            let (w, v) = golden_section(indicator, a, b, cfg.refine_tol.min(1e-3 * (b - a)));
            if v <= cfg.dip_threshold {
                found.push(w);
            }
        }
    }
    Ok(found)
}

/// Residuals of the lattice equations at every interior node `|k|, |l| <= K-1`,
/// with the defect-corrected equation at the origin.
pub fn fd_residuals(field: &LatticeField, omega: f64, p: &LatticeParams) -> Result<LatticeField> {
    let tol = Tolerances::default();
    let s1 = checked_sin(omega, p.a1(), 1, &tol)?;
    let s2 = checked_sin(omega, p.a2(), 2, &tol)?;
    let g = g_beta_with(omega, p, &tol)?;
    let phi = phi_beta_with(omega, p, &tol)
        .finite()
        .ok_or(Error::SingularFrequency { omega, axis: 3 })?;
    let r = field.radius() as i64;
    Ok(LatticeField::from_fn(field.radius(), |k, l| {
        if k.abs() > r - 1 || l.abs() > r - 1 {
            return 0.0;
        }
        let u = |a: i64, b: i64| field.get(a, b);
        let lhs =
            (u(k + 1, l) + u(k - 1, l)) / s1 + (u(k, l + 1) + u(k, l - 1)) / s2 - 2.0 * g * u(k, l);
        if k == 0 && l == 0 {
            lhs - 2.0 * (p.mu() - 1.0) * phi * u(0, 0)
        } else {
            lhs
        }
    }))
}

/// Largest interior residual of the lattice equations for a normalised field.
pub fn fd_residual(field: &LatticeField, omega: f64, p: &LatticeParams) -> Result<f64> {
    if field.radius() < 2 {
        return Err(Error::InvalidArgument(format!(
            "residual check needs radius at least 2, got {}",
            field.radius()
        )));
    }
    if (field.center() - 1.0).abs() > 1e-8 {
        return Err(Error::NormalizationInconsistency {
            value: field.center(),
        });
    }
    let res = fd_residuals(field, omega, p)?;
    Ok(res.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Least-squares null vector of the truncated system with `u[0, 0] = 1`.
pub fn normalized_null_vector(
    omega: f64,
    p: &LatticeParams,
    k: usize,
    cfg: &OracleConfig,
) -> Result<LatticeField> {
    let sys = TruncatedSystem::new(omega, p, k)?;
    let size = sys.size();
    if size > cfg.dense_cap {
        return Err(Error::SizeLimit {
            size,
            cap: cfg.dense_cap,
        });
    }
    let a = sys.to_dense();
    let o = sys.origin();
    let rhs = -a.column(o).clone_owned();
    let reduced = a.remove_column(o);
    let sol: DVector<f64> = reduced
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut values = Vec::with_capacity(size);
    values.extend(sol.iter().take(o).copied());
    values.push(1.0);
    values.extend(sol.iter().skip(o).copied());
    LatticeField::new(k, values)
}
