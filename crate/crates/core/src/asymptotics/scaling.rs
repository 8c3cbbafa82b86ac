//! Corner and wall scaling limits toward the Bargmann–Fock/Szasz operator.

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_inverse_powers, grid_slope, AsymptoticFit};
use crate::error::{Error, Result};
use crate::lattice::{
    generalized_lattice_mean, szasz_lattice_sum, ClosedFormNorms, NormSource, TestFunction, TruncationPolicy,
};
use crate::quadrature::{QuadratureNorms, QuadratureSpec};
use crate::toric::{smooth_remainder, ToricModel};

fn with_norms<T>(model: &ToricModel, body: impl FnOnce(&dyn NormSource) -> Result<T>) -> Result<T> {
    if model.closed_form_log_kernel_diag(model.min_power().max(2)).is_some() {
        body(&ClosedFormNorms(model))
    } else {
        body(&QuadratureNorms::new(model.clone(), QuadratureSpec::default()))
    }
}

fn check_corner(model: &ToricModel, f: &TestFunction, x: &[f64]) -> Result<()> {
    if !model.polytope().is_vertex_normalized() {
        return Err(Error::domain(format!("model '{}' has no vertex normalized at the origin", model.name())));
    }
    if f.arity() != model.dimension() || x.len() != model.dimension() {
        return Err(Error::invalid("function arity, point and model dimension must agree"));
    }
    Ok(())
}

/// `(D_{1/N} S_{h^N} D_{1/N}^{-1}) f (x)`: the operator applied to `f(N ·)` at `x/N`.
pub fn corner_scaled_operator(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n: u32,
    policy: &TruncationPolicy,
) -> Result<f64> {
    check_corner(model, f, x)?;
    let nf = n as f64;
    let y: Vec<f64> = x.iter().map(|v| v / nf).collect();
    with_norms(model, |norms| {
        let g = |a: &[i64]| f.eval(&a.iter().map(|&k| k as f64).collect::<Vec<_>>());
        Ok(generalized_lattice_mean(model, n, &y, policy, norms, &g)?.value)
    })
}

/// `S_{h_BF^1}(f)(x) = e^{-|x|} Σ_α f(α) x^α / α!`.
pub fn szasz_unit(f: &TestFunction, x: &[f64], policy: &TruncationPolicy) -> Result<f64> {
    Ok(szasz_lattice_sum(1, x, policy, &|a| f.eval(&a.iter().map(|&k| k as f64).collect::<Vec<_>>()))?.value)
}

/// The literal first-order corner coefficient
/// `½ Σ_ij a_ij(x) S_BF^1(f_ij)(x)` with `a = M(x)^2 ∇²h(0)`, `M = diag(x)`.
pub fn corner_b1_formula(model: &ToricModel, f: &TestFunction, x: &[f64], policy: &TruncationPolicy) -> Result<f64> {
    check_corner(model, f, x)?;
    let m = model.dimension();
    let reference = model.reference_point();
    let hess_h = smooth_remainder(model, &reference)?.hessian_at_vertex;
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let a_ij = x[i] * x[i] * hess_h[(i, j)];
            if a_ij == 0.0 {
                continue;
            }
            let mut counts = vec![0usize; m];
            counts[i] += 1;
            counts[j] += 1;
            let fij = |a: &[i64]| {
                let t: Vec<f64> = a.iter().map(|&k| k as f64).collect();
                f.derivative(&counts, &t).unwrap_or(f64::NAN)
            };
            total += 0.5 * a_ij * szasz_lattice_sum(1, x, policy, &fij)?.value;
        }
    }
    Ok(total)
}

/// Fitted corner expansion next to the literal `b_1` formula.
#[derive(Debug, Clone, Serialize)]
pub struct CornerReport {
    pub model: String,
    pub function: String,
    pub x: Vec<f64>,
    pub fit: AsymptoticFit,
    /// `S_BF^1(f)(x)`, the predicted limit.
    pub limit: f64,
    pub c0_abs_error: f64,
    pub b1_formula: f64,
    pub c1_fitted: f64,
    /// Whether `c_1` and the formula have the same sign (zero counts as agreeing with zero).
    pub sign_agrees: bool,
    /// `| |c_1| - |b_1| | / |b_1|`.
    pub magnitude_rel_gap: f64,
    /// The magnitude comparison is a verdict only for quadratic `f`.
    pub quadratic: bool,
}

pub fn corner_values(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<Vec<f64>> {
    n_grid.par_iter().map(|&n| corner_scaled_operator(model, f, x, n, policy)).collect()
}

pub fn corner_b1_fit(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<CornerReport> {
    let values = corner_values(model, f, x, n_grid, policy)?;
    let fit = fit_inverse_powers(n_grid, &values, 3.min(n_grid.len().saturating_sub(2)).max(1))?;
    let limit = szasz_unit(f, x, policy)?;
    let b1 = corner_b1_formula(model, f, x, policy)?;
    let c1 = fit.c1();
    let tiny = 1e-9 * limit.abs().max(1.0);
    let sign = |v: f64| {
        if v.abs() <= tiny {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    Ok(CornerReport {
        model: model.name().to_string(),
        function: f.tag().to_string(),
        x: x.to_vec(),
        limit,
        c0_abs_error: (fit.c0() - limit).abs(),
        b1_formula: b1,
        c1_fitted: c1,
        sign_agrees: sign(c1) == sign(b1),
        magnitude_rel_gap: if b1.abs() > tiny { (c1.abs() - b1.abs()).abs() / b1.abs() } else { c1.abs() },
        quadratic: f.is_quadratic(),
        fit,
    })
}

/// Distances `|corner_N - S_BF^1 f|` and their log-log slope.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<u32>,
    pub values: Vec<f64>,
    pub limit: f64,
    pub distances: Vec<f64>,
    pub slope: Option<f64>,
}

pub fn corner_convergence(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<ConvergenceReport> {
    let values = corner_values(model, f, x, n_grid, policy)?;
    let limit = szasz_unit(f, x, policy)?;
    Ok(convergence(n_grid, values, limit))
}

fn convergence(n_grid: &[u32], values: Vec<f64>, limit: f64) -> ConvergenceReport {
    let distances: Vec<f64> = values.iter().map(|v| (v - limit).abs()).collect();
    let slope = grid_slope(n_grid, &distances, 1e-14 * limit.abs().max(1e-300));
    ConvergenceReport { n_grid: n_grid.to_vec(), values, limit, distances, slope }
}

/// Wall scaling on a product model: the first `x_dilated.len()` coordinates
/// are dilated by `1/N`, the rest are kept.
pub fn wall_scaled_operator(
    model: &ToricModel,
    f: &TestFunction,
    x_dilated: &[f64],
    x_kept: &[f64],
    n: u32,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let k = x_dilated.len();
    if k == 0 || k + x_kept.len() != model.dimension() || f.arity() != model.dimension() {
        return Err(Error::invalid("wall scaling needs dilated + kept coordinates matching the model dimension"));
    }
    let nf = n as f64;
    let y: Vec<f64> = x_dilated.iter().map(|v| v / nf).chain(x_kept.iter().copied()).collect();
    with_norms(model, |norms| {
        let g = |a: &[i64]| {
            let t: Vec<f64> =
                a.iter().enumerate().map(|(j, &v)| if j < k { v as f64 } else { v as f64 / nf }).collect();
            f.eval(&t)
        };
        Ok(generalized_lattice_mean(model, n, &y, policy, norms, &g)?.value)
    })
}

/// `S_BF^1(f_{x''})(x')` where `f_{x''}` freezes the kept coordinates.
pub fn wall_limit(f: &TestFunction, x_dilated: &[f64], x_kept: &[f64], policy: &TruncationPolicy) -> Result<f64> {
    let g = |a: &[i64]| {
        let t: Vec<f64> = a.iter().map(|&v| v as f64).chain(x_kept.iter().copied()).collect();
        f.eval(&t)
    };
    Ok(szasz_lattice_sum(1, x_dilated, policy, &g)?.value)
}

pub fn wall_convergence(
    model: &ToricModel,
    f: &TestFunction,
    x_dilated: &[f64],
    x_kept: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<ConvergenceReport> {
    let values: Vec<f64> = n_grid
        .par_iter()
        .map(|&n| wall_scaled_operator(model, f, x_dilated, x_kept, n, policy))
        .collect::<Result<_>>()?;
    let limit = wall_limit(f, x_dilated, x_kept, policy)?;
    Ok(convergence(n_grid, values, limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(s: &str, m: usize) -> TestFunction {
        TestFunction::from_spec(s, m).unwrap()
    }

    #[test]
    fn fubini_study_corner_moments() {
        let fs = ToricModel::fubini_study(1);
        let p = TruncationPolicy::default();
        let v = corner_scaled_operator(&fs, &tf("t", 1), &[1.0], 10, &p).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        let v = corner_scaled_operator(&fs, &tf("t^2", 1), &[1.0], 10, &p).unwrap();
        assert!((v - 1.9).abs() < 1e-13);
    }

    #[test]
    fn bargmann_fock_is_a_fixed_point() {
        let bf = ToricModel::bargmann_fock(1);
        let p = TruncationPolicy::default();
        let f = tf("smooth-bump:2:2", 1);
        let limit = szasz_unit(&f, &[1.3], &p).unwrap();
        for n in [1, 7, 300] {
            let v = corner_scaled_operator(&bf, &f, &[1.3], n, &p).unwrap();
            assert!((v - limit).abs() < 1e-12);
        }
        assert_eq!(corner_b1_formula(&bf, &tf("t^2", 1), &[1.3], &p).unwrap(), 0.0);
    }

    #[test]
    fn b1_formula_magnitude() {
        let p = TruncationPolicy::default();
        let x = 0.7;
        let fs = corner_b1_formula(&ToricModel::fubini_study(1), &tf("t^2", 1), &[x], &p).unwrap();
        assert!((fs - x * x).abs() < 1e-6, "{fs}");
        let ball = corner_b1_formula(&ToricModel::bergman_ball(1), &tf("t^2", 1), &[x], &p).unwrap();
        assert!((ball + x * x).abs() < 1e-6, "{ball}");
    }

    #[test]
    fn wall_linear_in_dilated_axis_is_exact() {
        let m = ToricModel::from_name("product:fubini-study-cp1xfubini-study-cp1").unwrap();
        let p = TruncationPolicy::default();
        for n in [8, 64] {
            let v = wall_scaled_operator(&m, &tf("s", 2), &[0.6], &[0.3], n, &p).unwrap();
            assert!((v - 0.6).abs() < 1e-13);
            let v = wall_scaled_operator(&m, &tf("t", 2), &[0.6], &[0.3], n, &p).unwrap();
            assert!((v - 0.3).abs() < 1e-13);
        }
    }
}
