use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_inverse_powers, AsymptoticFit};
use crate::error::{Error, Result};
use crate::lattice::{generalized_operator, TestFunction, TruncationPolicy};
use crate::toric::{resolve_rho, ToricModel};

/// `S_N(f)(x)` for every `N` of the grid (evaluated in parallel, returned in grid order).
pub fn operator_values(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<Vec<f64>> {
    n_grid.par_iter().map(|&n| Ok(generalized_operator(model, f, n, x, policy)?.value)).collect()
}

fn fit_order(len: usize) -> usize {
    3.min(len.saturating_sub(2)).max(1)
}

/// Fits `S_N(f)(x) = c_0 + c_1/N + …` over the grid.
pub fn voronovskaya_extract(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<AsymptoticFit> {
    let values = operator_values(model, f, x, n_grid, policy)?;
    fit_inverse_powers(n_grid, &values, fit_order(n_grid.len()))
}

/// `½ Σ_ij H_phi(x)_ij f_ij(x)` with `H_phi` taken at `rho(x)`.
pub fn voronovskaya_theory(model: &ToricModel, f: &TestFunction, x: &[f64]) -> Result<f64> {
    if f.arity() != model.dimension() {
        return Err(Error::invalid("test function arity differs from model dimension"));
    }
    let rho = resolve_rho(model, x)?;
    let h = model.hess_phi(&rho)?;
    let fh = f.hessian(x)?;
    Ok(0.5 * h.component_mul(&fh).sum())
}

/// Which hypotheses of the expansion theorem an experiment ran under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisRegime {
    /// `f` has compact support, as the theorem assumes.
    CompactSupport,
    /// Polynomial or otherwise unbounded-support `f`, admitted for exact moment oracles.
    MomentOracle,
}

impl HypothesisRegime {
    pub fn of(f: &TestFunction) -> Self {
        if f.has_compact_support() {
            HypothesisRegime::CompactSupport
        } else {
            HypothesisRegime::MomentOracle
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronovskayaReport {
    pub model: String,
    pub function: String,
    pub x: Vec<f64>,
    pub regime: HypothesisRegime,
    pub fit: AsymptoticFit,
    pub f_x: f64,
    /// `|c_0 - f(x)| / max(|f(x)|, 1e-300)`.
    pub c0_rel_error: f64,
    pub theory_c1: f64,
    pub quadratic: bool,
    /// `|c_1 - theory| / |theory|`; compared only for quadratic `f`.
    pub c1_rel_diff: f64,
}

impl VoronovskayaReport {
    /// Pass/fail at the given tolerances; `None` on the `c_1` part when `f` is not quadratic.
    pub fn verdict(&self, c0_tol: f64, c1_tol: f64) -> (bool, Option<bool>) {
        (self.c0_rel_error <= c0_tol, self.quadratic.then_some(self.c1_rel_diff <= c1_tol))
    }
}

pub fn voronovskaya_report(
    model: &ToricModel,
    f: &TestFunction,
    x: &[f64],
    n_grid: &[u32],
    policy: &TruncationPolicy,
) -> Result<VoronovskayaReport> {
    let fit = voronovskaya_extract(model, f, x, n_grid, policy)?;
    let f_x = f.eval(x);
    let theory_c1 = voronovskaya_theory(model, f, x)?;
    Ok(VoronovskayaReport {
        model: model.name().to_string(),
        function: f.tag().to_string(),
        x: x.to_vec(),
        regime: HypothesisRegime::of(f),
        c0_rel_error: (fit.c0() - f_x).abs() / f_x.abs().max(1e-300),
        c1_rel_diff: (fit.c1() - theory_c1).abs() / theory_c1.abs().max(1e-300),
        quadratic: f.is_quadratic(),
        fit,
        f_x,
        theory_c1,
    })
}
