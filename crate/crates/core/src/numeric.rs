//! Small numerical helpers shared across modules.
//!
//! Every reduction over samples goes through [`pairwise_sum_by`] so that the
//! summation tree depends only on the length of the input. Results are then
//! bitwise reproducible regardless of how the terms were produced.

const LEAF: usize = 32;

/// Sum of `term(i)` for `i in 0..n` using a fixed pairwise tree.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, term: F) -> f64 {
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= LEAF {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, n, &term)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise_sum_by(a.len(), |i| a[i] * b[i])
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise_sum_by(a.len(), |i| (a[i] - b[i]) * (a[i] - b[i])).sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Ceiling that ignores relative round-off below 1e-9, so that
/// `16f64.powf(1.25)` rounds to 32 and not 33.
pub fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxy = pairwise_sum_by(n, |i| (xs[i] - mx) * (ys[i] - my));
    let sxx = pairwise_sum_by(n, |i| (xs[i] - mx) * (xs[i] - mx));
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Tail `sum_{i>n} i^{-a}` for `a > 1`.
///
/// Returns `(estimate, lower, upper)`. The bracket comes from the integral
/// test; the estimate adds Euler-Maclaurin corrections up to the third
/// derivative, accurate to `O(n^{-a-5})`.
pub fn power_tail(a: f64, n: usize) -> (f64, f64, f64) {
    debug_assert!(a > 1.0 && n >= 1);
    let x = n as f64;
    let integral = |from: f64| from.powf(1.0 - a) / (a - 1.0);
    let upper = integral(x);
    let lower = integral(x + 1.0);
    let f = x.powf(-a);
    let estimate = upper - 0.5 * f + a * x.powf(-a - 1.0) / 12.0
        - a * (a + 1.0) * (a + 2.0) * x.powf(-a - 3.0) / 720.0;
    (estimate, lower, upper)
}

/// Riemann zeta for real `a > 1`, via a short partial sum and [`power_tail`].
pub fn zeta(a: f64) -> f64 {
    let n = 1000;
    pairwise_sum_by(n, |i| ((i + 1) as f64).powf(-a)) + power_tail(a, n).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_tol_absorbs_roundoff() {
        assert_eq!(ceil_tol(16f64.powf(1.25)), 32.0);
        assert_eq!(ceil_tol(4.000001), 5.0);
        assert_eq!(ceil_tol(21.77), 22.0);
    }

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-12);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-12);
        // mpmath: zeta(1.05) = 20.5804...
        assert!((zeta(1.05) - 20.580_844_302_036_4).abs() < 1e-9);
    }

    #[test]
    fn tail_bracket_contains_estimate() {
        for &a in &[1.05, 1.5, 2.0, 3.0] {
            for &n in &[1usize, 10, 1000] {
                let (e, lo, hi) = power_tail(a, n);
                assert!(lo <= e && e <= hi, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn ols_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| -2.0 * x + 1.0).collect();
        let (m, b) = ols(&xs, &ys).unwrap();
        assert!((m + 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pairwise_is_order_fixed() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&v).to_bits(), pairwise_sum(&v.clone()).to_bits());
    }
}
