//! Cumulative quadrature and scalar root bracketing shared by the solver stages.

/// Cumulative composite trapezoid of `values` sampled with uniform spacing `h`.
///
/// `out[0] = 0` and `out[i]` is the integral from the first node to node `i`.
pub fn cumulative_trapezoid(values: &[f64], h: f64, out: &mut [f64]) {
    debug_assert_eq!(values.len(), out.len());
    if out.is_empty() {
        return;
    }
    out[0] = 0.0;
    let half = 0.5 * h;
    for i in 1..values.len() {
        out[i] = out[i - 1] + half * (values[i - 1] + values[i]);
    }
}

/// Bisection on a bracketing interval. `f(lo)` and `f(hi)` must differ in sign
/// (or one of them be zero). Stops when the interval is narrower than `xtol`
/// or no further floating point progress is possible.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(f_lo.signum() != f_hi.signum(), "bisect called without a sign change");
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

/// Left-to-right scan of `f` on `points + 1` uniform nodes of `[lo, hi]`,
/// returning every sub-interval whose endpoint values change sign. An exact
/// zero at a node is reported as the degenerate interval `(x, x)`.
pub fn sign_changes<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let step = (hi - lo) / points as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        out.push((lo, lo));
    }
    for j in 1..=points {
        let x = if j == points { hi } else { lo + step * j as f64 };
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if f_prev * fx < 0.0 {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear_integrands() {
        let h = 0.1;
        let v: Vec<f64> = (0..11).map(|i| 3.0 * i as f64 * h + 1.0).collect();
        let mut out = vec![0.0; v.len()];
        cumulative_trapezoid(&v, h, &mut out);
        for (i, c) in out.iter().enumerate() {
            let x = i as f64 * h;
            assert!((c - (1.5 * x * x + x)).abs() < 1e-13);
        }
    }

    #[test]
    fn trapezoid_error_is_second_order() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let v: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
            let mut out = vec![0.0; n + 1];
            cumulative_trapezoid(&v, h, &mut out);
            (out[n] - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(64) / err(128);
        assert!((3.9..4.1).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn scan_reports_all_crossings() {
        let c = sign_changes(|x| (x - 0.25) * (x - 0.75), 0.0, 1.0, 10);
        assert_eq!(c.len(), 2);
        assert!(c[0].0 <= 0.25 && 0.25 <= c[0].1);
        assert!(c[1].0 <= 0.75 && 0.75 <= c[1].1);
    }
}
