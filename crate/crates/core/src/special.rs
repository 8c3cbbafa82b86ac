//! Log-space special functions and summation helpers.

use statrs::function::factorial::ln_factorial as statrs_ln_factorial;
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    statrs_ln_gamma(x)
}

/// `ln k!`, table-backed for small `k`.
#[inline]
pub fn ln_factorial(k: u64) -> f64 {
    statrs_ln_factorial(k)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln (a)_j` for the rising factorial `(a)_j = a (a+1) ... (a+j-1)`, `a > 0`.
pub fn ln_pochhammer(a: f64, j: u64) -> f64 {
    if j == 0 {
        return 0.0;
    }
    ln_gamma(a + j as f64) - ln_gamma(a)
}

/// `x ln x` with the continuous extension `0 ln 0 = 0`.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// slice length, so results are reproducible run to run.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `ln Σ exp(l_i)` with the max-shift.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let shifted: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    max + pairwise_sum(&shifted).ln()
}

/// Weighted mean `Σ g_i e^{l_i} / Σ e^{l_i}` computed with the max-shift.
/// Entries with `g_i = None` contribute to the denominator only.
pub fn log_weighted_mean(logs: &[f64], values: &[Option<f64>]) -> (f64, f64) {
    debug_assert_eq!(logs.len(), values.len());
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let numer: Vec<f64> = weights.iter().zip(values).map(|(w, g)| g.map_or(0.0, |g| g * w)).collect();
    let denom = pairwise_sum(&weights);
    (pairwise_sum(&numer) / denom, max + denom.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_match_products() {
        let mut acc = 0.0_f64;
        for k in 1..=30u64 {
            acc += (k as f64).ln();
            assert!((ln_factorial(k) - acc).abs() < 1e-12 * acc.max(1.0));
        }
        assert_eq!(ln_factorial(0), 0.0);
    }

    #[test]
    fn binomial_and_pochhammer() {
        assert!((ln_binomial(10, 3).exp() - 120.0).abs() < 1e-9);
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
        // (3)_4 = 3*4*5*6 = 360
        assert!((ln_pochhammer(3.0, 4).exp() - 360.0).abs() < 1e-9);
        assert_eq!(ln_pochhammer(2.5, 0), 0.0);
    }

    #[test]
    fn log_sum_exp_handles_large_offsets() {
        let l = [1000.0, 1000.0 + 2f64.ln()];
        assert!((log_sum_exp(&l) - (1000.0 + 3f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn pairwise_sum_is_accurate() {
        let v = vec![0.1; 10_000];
        assert!((pairwise_sum(&v) - 1000.0).abs() < 1e-10);
    }
}
