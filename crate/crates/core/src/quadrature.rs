//! Adaptive 15-point Gauss-Kronrod quadrature.
//!
//! Subdivision always bisects the interval with the largest error estimate
//! (earliest interval on ties), so results are bitwise reproducible.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub values: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One G7/K15 pass on `[a, b]` for a vector-valued integrand.
///
/// `fv` is scratch space for the 15 samples, laid out node-major.
fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, fv: &mut [f64]) -> Segment
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    f(center, &mut fv[..dim]);
    for j in 0..7 {
        let dx = half * XGK[j];
        f(center - dx, &mut fv[(1 + 2 * j) * dim..(2 + 2 * j) * dim]);
        f(center + dx, &mut fv[(2 + 2 * j) * dim..(3 + 2 * j) * dim]);
    }

    let mut error: f64 = 0.0;
    let mut values = vec![0.0; dim];
    for d in 0..dim {
        let fc = fv[d];
        let mut kron = fc * WGK[7];
        let mut gauss = fc * WG[3];
        let mut res_abs = kron.abs();
        for j in 0..7 {
            let f1 = fv[(1 + 2 * j) * dim + d];
            let f2 = fv[(2 + 2 * j) * dim + d];
            kron += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kron;
        let mut res_asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            let f1 = fv[(1 + 2 * j) * dim + d];
            let f2 = fv[(2 + 2 * j) * dim + d];
            res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let e = rescale_error(
            (kron - gauss) * half,
            res_abs * half.abs(),
            res_asc * half.abs(),
        );
        error = error.max(e);
        values[d] = kron * half;
    }
    Segment {
        a,
        b,
        values,
        error,
    }
}

/// Integrates a vector-valued function over `[a, b]`.
///
/// The error control uses the largest component error against the largest
/// component magnitude.
pub fn integrate_vec<F>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    opts: &QuadOptions,
) -> Result<Estimate>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = vec![0.0; 15 * dim];
    let first = gk15(&mut f, a, b, dim, &mut buf);
    let mut segments = vec![first];
    let mut evaluations = 15;
    loop {
        let mut totals = vec![0.0; dim];
        let mut err_sum = 0.0;
        for s in &segments {
            for (t, v) in totals.iter_mut().zip(&s.values) {
                *t += v;
            }
            err_sum += s.error;
        }
        let scale = totals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !err_sum.is_finite() || !scale.is_finite() {
            return Err(Error::QuadratureFailure {
                reason: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        if err_sum <= opts.abs_tol.max(opts.rel_tol * scale) {
            return Ok(Estimate {
                values: totals,
                error: err_sum,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure {
                reason: format!(
                    "tolerance not met after {} subintervals (error {err_sum:e}, scale {scale:e})",
                    segments.len()
                ),
            });
        }
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                    if s.error > be {
                        (i, s.error)
                    } else {
                        (bi, be)
                    }
                });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(seg.a < mid && mid < seg.b) {
            return Err(Error::QuadratureFailure {
                reason: format!("subinterval collapsed near {mid}"),
            });
        }
        let left = gk15(&mut f, seg.a, mid, dim, &mut buf);
        let right = gk15(&mut f, mid, seg.b, dim, &mut buf);
        evaluations += 30;
        segments.push(left);
        segments.push(right);
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), a, b, 1, opts)?;
    Ok((est.values[0], est.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_periodic() {
        // (1/2pi) int dx / (2 - cos x) = 1/sqrt(3)
        let (v, _) = integrate(
            |x| 1.0 / (2.0 - x.cos()),
            0.0,
            2.0 * PI,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((v / (2.0 * PI) - 1.0 / 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let opts = QuadOptions {
            rel_tol: 1e-10,
            ..QuadOptions::default()
        };
        let (v, _) = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &opts).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn vector_components() {
        let est = integrate_vec(
            |x, out: &mut [f64]| {
                out[0] = x.cos();
                out[1] = x.sin();
            },
            0.0,
            PI / 2.0,
            2,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((est.values[0] - 1.0).abs() < 1e-14);
        assert!((est.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &opts);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (1.0 + x * x).ln() / (1.01 - x.cos());
        let a = integrate(f, 0.0, 3.0, &QuadOptions::default()).unwrap();
        let b = integrate(f, 0.0, 3.0, &QuadOptions::default()).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
    }
}
