//! Binomial(N, x/N) against Poisson(x), with the first-order correction removed.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::fit::grid_slope;
use crate::error::{Error, Result};
use crate::special::ln_factorial;

/// `C(N,k) (x/N)^k (1 - x/N)^{N-k}`, written as `x^k/k! Π_{i<k}(1 - i/N) (1 - x/N)^{N-k}`.
pub fn binomial_pmf_scaled(n: u32, x: f64, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    let falling: f64 = (0..k).map(|i| (1.0 - i as f64 / nf).ln()).sum();
    (k as f64 * x.ln() - ln_factorial(k as u64) + falling + (nf - k as f64) * (-x / nf).ln_1p()).exp()
}

/// `e^{-x} x^k / k!`.
pub fn poisson_pmf(x: f64, k: u32) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * x.ln() - x - ln_factorial(k as u64)).exp()
}

/// The `1/N` coefficient of the binomial-minus-Poisson pmf: `Pois(k) (k - (k - x)^2) / 2`.
pub fn first_order_pmf_correction(x: f64, k: u32) -> f64 {
    let kf = k as f64;
    poisson_pmf(x, k) * (kf - (kf - x).powi(2)) / 2.0
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonRow {
    #[serde(rename = "N")]
    pub n: u32,
    /// `sup_k |binomial - Poisson|`.
    pub sup_residual: f64,
    pub argmax_k: u32,
    /// `sup_k |binomial - Poisson - a_k/N|` with the fitted `a_k`.
    pub sup_corrected: f64,
    /// Signed `binomial - Poisson` for `k = 0..=k_max`.
    pub differences: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonReport {
    pub x: f64,
    pub k_max: u32,
    pub rows: Vec<PoissonRow>,
    /// Fitted first-order coefficients `a_k`, `k = 0..=k_max`.
    pub first_order: Vec<f64>,
    pub slope: Option<f64>,
    pub corrected_slope: Option<f64>,
}

/// Per-`N` sup residuals over `k <= k_max` and their decay rates.
pub fn poisson_refinement(x: f64, k_max: u32, n_grid: &[u32]) -> Result<PoissonReport> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("Poisson refinement needs x >= 0, got {x}")));
    }
    if n_grid.len() < 4 || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::invalid("N grid must be positive, strictly increasing, with at least 4 points"));
    }
    let diffs: Vec<Vec<f64>> = (0..=k_max)
        .map(|k| n_grid.iter().map(|&n| binomial_pmf_scaled(n, x, k) - poisson_pmf(x, k)).collect())
        .collect();
    // a_k from least squares of d_k(N) on 1/N … 1/N^5, scaled by N_min
    let h0 = 1.0 / n_grid[0] as f64;
    let design = DMatrix::from_fn(n_grid.len(), 5.min(n_grid.len() - 1), |i, j| {
        (1.0 / n_grid[i] as f64 / h0).powi(j as i32 + 1)
    });
    let svd = design.svd(true, true);
    let first_order: Vec<f64> = diffs
        .iter()
        .map(|d| {
            let beta = svd.solve(&DVector::from_column_slice(d), 1e-15).expect("SVD solve");
            Ok(beta[0] / h0)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<PoissonRow> = n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let (argmax_k, sup_residual) = diffs
                .iter()
                .enumerate()
                .map(|(k, d)| (k as u32, d[i].abs()))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let sup_corrected =
                diffs.iter().zip(&first_order).map(|(d, a)| (d[i] - a / n as f64).abs()).fold(0.0, f64::max);
            PoissonRow { n, sup_residual, argmax_k, sup_corrected, differences: diffs.iter().map(|d| d[i]).collect() }
        })
        .collect();
    let sup: Vec<f64> = rows.iter().map(|r| r.sup_residual).collect();
    let corr: Vec<f64> = rows.iter().map(|r| r.sup_corrected).collect();
    Ok(PoissonReport {
        x,
        k_max,
        slope: grid_slope(n_grid, &sup, 1e-300),
        corrected_slope: grid_slope(n_grid, &corr, 1e-300),
        rows,
        first_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::default_grid;

    #[test]
    fn spot_value() {
        let d = (binomial_pmf_scaled(10, 1.0, 0) - poisson_pmf(1.0, 0)).abs();
        assert!((d - (0.36787944117144233 - 0.3486784401)).abs() < 1e-12);
        assert!((binomial_pmf_scaled(10, 1.0, 0) - 0.9f64.powi(10)).abs() < 1e-15);
    }

    #[test]
    fn pmfs_sum_to_one() {
        let s: f64 = (0..=40).map(|k| binomial_pmf_scaled(40, 2.5, k)).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rates_and_fitted_correction() {
        let r = poisson_refinement(1.0, 12, &default_grid()).unwrap();
        assert!((r.slope.unwrap() + 1.0).abs() < 0.1);
        assert!((r.corrected_slope.unwrap() + 2.0).abs() < 0.2);
        for k in 0..=12 {
            let (a, b) = (r.first_order[k as usize], first_order_pmf_correction(1.0, k));
            assert!((a - b).abs() < 1e-7, "{k} {a} {b}");
        }
    }

    #[test]
    fn zero_intensity_is_exact() {
        let r = poisson_refinement(0.0, 5, &default_grid()).unwrap();
        assert!(r.rows.iter().all(|row| row.sup_residual == 0.0));
        assert!(r.slope.is_none());
    }
}
