//! Bracketing root finders and a golden-section minimiser.

/// Bisection on a bracket `[a, b]` with `fa`, `fb` of opposite sign.
///
/// Stops once the bracket is narrower than `tol`, or when the midpoint can no
/// longer be represented between the two ends. Returns the final bracket.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(a < b);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return (m, m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Bisection that keeps going past `tol` until `|f| <= residual_tol` or the
/// bracket is exhausted in floating point.
pub fn bisect_certified<F>(mut f: F, a: f64, b: f64, fa: f64, tol: f64, residual_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = bisect(&mut f, a, b, fa, tol);
    let mut flo = if lo == a { fa } else { f(lo) };
    loop {
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        if fm.abs() <= residual_tol || m <= lo || m >= hi {
            return m;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns `(x, f(x))` at the best point seen.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Sign changes of sampled values: indices `i` with `v[i]` and `v[i+1]` of
/// opposite strict sign.
pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].is_finite() && w[1].is_finite() && (w[0] < 0.0) != (w[1] < 0.0))
        .filter(|(_, w)| w[0] != 0.0 && w[1] != 0.0)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let (a, b) = bisect(f, 0.0, 2.0, -2.0, 1e-12);
        assert!(b - a <= 1e-12);
        assert!((a - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn certified_root_hits_residual() {
        let f = |x: f64| 1e6 * (x - 0.3);
        let r = bisect_certified(f, 0.0, 1.0, f(0.0), 1e-6, 1e-9);
        assert!(f(r).abs() <= 1e-9);
    }

    #[test]
    fn golden_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.234).abs(), 0.0, 3.0, 1e-9);
        assert!((x - 1.234).abs() < 1e-8);
        assert!(fx < 1e-8);
    }

    #[test]
    fn sign_change_indices() {
        assert_eq!(sign_changes(&[1.0, 2.0, -1.0, -3.0, 4.0]), vec![1, 3]);
        assert!(sign_changes(&[1.0, 0.0, 1.0]).is_empty());
    }
}
