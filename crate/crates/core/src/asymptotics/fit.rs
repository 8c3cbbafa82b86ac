use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Condition number above which a fit carries a warning.
pub const CONDITION_WARNING: f64 = 1e10;

/// Least-squares fit of `S_N = c_0 + c_1/N + … + c_p/N^p` with diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticFit {
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<u32>,
    pub values: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Log-log slope of `|S_N - c_0 - c_1/N|`; `None` when that remainder is at roundoff level.
    pub residual_slope: Option<f64>,
    pub r_squared: f64,
    /// Condition number of the scaled design matrix.
    pub condition: f64,
    pub warnings: Vec<String>,
}

impl AsymptoticFit {
    pub fn c0(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn c1(&self) -> f64 {
        self.coefficients.get(1).copied().unwrap_or(0.0)
    }

    /// `S_N` predicted by the fitted polynomial in `1/N`.
    pub fn predict(&self, n: f64) -> f64 {
        self.coefficients.iter().enumerate().map(|(k, c)| c / n.powi(k as i32)).sum()
    }

    /// `|S_N - c_0 - c_1/N|` on the grid.
    pub fn remainders(&self) -> Vec<f64> {
        self.n_grid.iter().zip(&self.values).map(|(&n, v)| (v - self.c0() - self.c1() / n as f64).abs()).collect()
    }
}

/// Default geometric grid `{32, 48, 64, 96, …, 2048}`.
pub fn default_grid() -> Vec<u32> {
    geometric_grid(32, 2048)
}

/// `{a 2^k, 1.5 a 2^k}` between `lo` and `hi` (both included when on the grid).
pub fn geometric_grid(lo: u32, hi: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut v = lo.max(1);
    while v <= hi {
        out.push(v);
        let half = v + v / 2;
        if v / 2 * 2 == v && half <= hi && half > v {
            out.push(half);
        }
        v *= 2;
    }
    out
}

/// Powers of two from `lo` to `hi`.
pub fn doubling_grid(lo: u32, hi: u32) -> Vec<u32> {
    std::iter::successors(Some(lo.max(1)), |v| Some(v * 2)).take_while(|v| *v <= hi).collect()
}

fn check_grid(n_grid: &[u32], values: &[f64], min_len: usize) -> Result<()> {
    if n_grid.len() != values.len() {
        return Err(Error::invalid("N grid and values differ in length"));
    }
    if n_grid.len() < min_len {
        return Err(Error::invalid(format!("fit needs at least {min_len} grid points, got {}", n_grid.len())));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid.first() == Some(&0) {
        return Err(Error::invalid("N grid must be positive and strictly increasing"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalInstability("non-finite value in fit data".into()));
    }
    Ok(())
}

/// Least squares `y ≈ X beta` by SVD; returns `(beta, (X^T X)^{-1} diagonal, condition)`.
fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, Vec<f64>, f64)> {
    let svd = x.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let beta =
        svd.solve(y, smax * 1e-15).map_err(|e| Error::NumericalInstability(format!("least squares failed: {e}")))?;
    let v = svd.v_t.as_ref().expect("V requested").transpose();
    let p = x.ncols();
    let diag = (0..p).map(|k| (0..p).map(|i| (v[(k, i)] / s[i]).powi(2)).sum()).collect();
    Ok((beta, diag, condition))
}

/// Fits `c_0 + c_1/N + … + c_p/N^p` on `1/N` scaled by `1/N_min`.
pub fn fit_inverse_powers(n_grid: &[u32], values: &[f64], p: usize) -> Result<AsymptoticFit> {
    check_grid(n_grid, values, 4.max(p + 2))?;
    let h_max = 1.0 / n_grid[0] as f64;
    let rows = n_grid.len();
    let x = DMatrix::from_fn(rows, p + 1, |i, k| (1.0 / n_grid[i] as f64 / h_max).powi(k as i32));
    let y = DVector::from_column_slice(values);
    let (beta, diag, condition) = least_squares(&x, &y)?;
    let resid = &y - &x * &beta;
    let rss = resid.norm_squared();
    let mean = values.iter().sum::<f64>() / rows as f64;
    let tss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let dof = rows - (p + 1);
    let sigma2 = if dof > 0 { rss / dof as f64 } else { 0.0 };
    let coefficients: Vec<f64> = (0..=p).map(|k| beta[k] / h_max.powi(k as i32)).collect();
    let stderr: Vec<f64> = (0..=p).map(|k| (sigma2 * diag[k]).sqrt() / h_max.powi(k as i32)).collect();
    let mut warnings = Vec::new();
    if condition > CONDITION_WARNING {
        warnings.push(format!("ill-conditioned fit: condition number {condition:.3e}"));
    }
    let mut fit = AsymptoticFit {
        n_grid: n_grid.to_vec(),
        values: values.to_vec(),
        coefficients,
        stderr,
        residual_slope: None,
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
        condition,
        warnings,
    };
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let rem = fit.remainders();
    let keep: Vec<(f64, f64)> =
        n_grid.iter().zip(&rem).filter(|(_, r)| **r > 1e-13 * scale).map(|(&n, &r)| (n as f64, r)).collect();
    if keep.len() >= 3 {
        let (ns, rs): (Vec<f64>, Vec<f64>) = keep.into_iter().unzip();
        fit.residual_slope = Some(loglog_slope(&ns, &rs)?);
    }
    Ok(fit)
}

/// Bare coefficients `c_0..c_p` of the `1/N` polynomial; needs only `p + 1` points.
pub fn fit_coefficients(n_grid: &[u32], values: &[f64], p: usize) -> Result<Vec<f64>> {
    check_grid(n_grid, values, p + 1)?;
    let h_max = 1.0 / n_grid[0] as f64;
    let x = DMatrix::from_fn(n_grid.len(), p + 1, |i, k| (1.0 / n_grid[i] as f64 / h_max).powi(k as i32));
    let (beta, _, _) = least_squares(&x, &DVector::from_column_slice(values))?;
    Ok((0..=p).map(|k| beta[k] / h_max.powi(k as i32)).collect())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("slope fit needs at least two matched points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::NumericalInstability("log-log slope needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Slope over a grid of `N` with a positivity filter; `None` if fewer than 3 points survive.
pub fn grid_slope(n_grid: &[u32], values: &[f64], floor: f64) -> Option<f64> {
    let (ns, vs): (Vec<f64>, Vec<f64>) =
        n_grid.iter().zip(values).filter(|(_, v)| v.abs() > floor).map(|(&n, v)| (n as f64, v.abs())).unzip();
    (ns.len() >= 3).then(|| loglog_slope(&ns, &vs).ok()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        assert_eq!(default_grid(), vec![32, 48, 64, 96, 128, 192, 256, 384, 512, 768, 1024, 1536, 2048]);
        assert_eq!(doubling_grid(8, 64), vec![8, 16, 32, 64]);
    }

    #[test]
    fn recovers_polynomial_in_inverse_n() {
        let grid = default_grid();
        let vals: Vec<f64> = grid.iter().map(|&n| 2.0 - 3.0 / n as f64 + 5.0 / (n as f64).powi(2)).collect();
        let fit = fit_inverse_powers(&grid, &vals, 3).unwrap();
        assert!((fit.c0() - 2.0).abs() < 1e-12);
        assert!((fit.c1() + 3.0).abs() < 1e-8);
        let slope = fit.residual_slope.unwrap();
        assert!((slope + 2.0).abs() < 1e-3, "{slope}");
        assert!(fit.r_squared > 0.999_999);
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn exact_quadratic_data_has_no_slope() {
        let grid = default_grid();
        let vals: Vec<f64> = grid.iter().map(|&n| 1.0 + 1.0 / n as f64).collect();
        let fit = fit_inverse_powers(&grid, &vals, 3).unwrap();
        assert!(fit.residual_slope.is_none());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(fit_inverse_powers(&[4, 8, 16], &[1.0; 3], 1).is_err());
        assert!(fit_inverse_powers(&[4, 8, 8, 16], &[1.0; 4], 1).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
    }
}
