use serde::Serialize;

use super::norms::{QuadratureNorms, QuadratureSpec};
use crate::asymptotics::fit_coefficients;
use crate::error::{Error, Result};
use crate::lattice::{generalized_lattice_mean, NormSource, TruncationPolicy};
use crate::toric::ToricModel;

/// Bergman kernel on the diagonal as the sum `Σ_α |z^α|² e^{-N phi} / ||z^α||²`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelDiag {
    pub model: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub x: Vec<f64>,
    #[serde(rename = "B")]
    pub b: f64,
    pub log_b: f64,
    /// Cumulative sums over the shells `|α| = shells[i]`, in increasing order.
    pub shells: Vec<i64>,
    pub partial_sums: Vec<f64>,
    /// Value of the series in closed form, when known.
    pub closed_form: Option<f64>,
    /// Value quoted in the literature when it differs from the series (the ball).
    pub stated: Option<f64>,
    pub tail_bound: f64,
    pub norm_source: String,
}

impl KernelDiag {
    /// `|B - closed_form| / closed_form`.
    pub fn closed_form_rel_error(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.b - c).abs() / c)
    }
}

/// Kernel diagonal with the norms from `norms`.
pub fn kernel_diag_with(
    model: &ToricModel,
    n: u32,
    x: &[f64],
    norms: &dyn NormSource,
    policy: &TruncationPolicy,
) -> Result<KernelDiag> {
    let r = generalized_lattice_mean(model, n, x, policy, norms, &|_| 1.0)?;
    let max = r.table.entries.iter().map(|e| e.log_weight).fold(f64::NEG_INFINITY, f64::max);
    let mut shells: Vec<(i64, f64)> = Vec::new();
    let mut sorted: Vec<(i64, f64)> =
        r.table.entries.iter().map(|e| (e.alpha.iter().sum::<i64>(), (e.log_weight - max).exp())).collect();
    sorted.sort_by_key(|(s, _)| *s);
    for (s, w) in sorted {
        match shells.last_mut() {
            Some((last, acc)) if *last == s => *acc += w,
            _ => shells.push((s, w)),
        }
    }
    let scale = max.exp();
    let mut acc = 0.0;
    let partial_sums = shells
        .iter()
        .map(|(_, w)| {
            acc += w;
            acc * scale
        })
        .collect();
    let closed_form = model.closed_form_log_kernel_diag(n).map(f64::exp);
    let stated = model.stated_log_kernel_diag(n).map(f64::exp).filter(|s| Some(*s) != closed_form);
    Ok(KernelDiag {
        model: model.name().to_string(),
        n,
        x: x.to_vec(),
        b: r.table.header.normalizer,
        log_b: r.table.header.log_normalizer,
        shells: shells.iter().map(|(s, _)| *s).collect(),
        partial_sums,
        closed_form,
        stated,
        tail_bound: r.table.header.tail_bound,
        norm_source: r.table.header.norm_source,
    })
}

/// Kernel diagonal with quadrature norms.
pub fn kernel_diag(model: &ToricModel, n: u32, x: &[f64], spec: &QuadratureSpec) -> Result<KernelDiag> {
    let norms = QuadratureNorms::new(model.clone(), spec.clone());
    kernel_diag_with(model, n, x, &norms, &TruncationPolicy::default())
}

/// `B(N) / N^m` over a list of `N`, with the fitted `1/N` coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct TyzRatio {
    #[serde(rename = "N")]
    pub n: Vec<u32>,
    pub ratio: Vec<f64>,
    pub a0: f64,
    pub a1: f64,
}

pub fn tyz_ratio(model: &ToricModel, n_list: &[u32], x: &[f64], norms: &dyn NormSource) -> Result<TyzRatio> {
    if n_list.len() < 2 {
        return Err(Error::invalid("ratio fit needs at least two values of N"));
    }
    let m = model.dimension() as i32;
    let ratio: Vec<f64> = n_list
        .iter()
        .map(|&n| {
            let k = kernel_diag_with(model, n, x, norms, &TruncationPolicy::default())?;
            Ok((k.log_b - m as f64 * (n as f64).ln()).exp())
        })
        .collect::<Result<_>>()?;
    let c = fit_coefficients(n_list, &ratio, (n_list.len() - 1).min(3))?;
    Ok(TyzRatio { n: n_list.to_vec(), ratio, a0: c[0], a1: c[1] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let spec = QuadratureSpec::default();
        let bf = kernel_diag(&ToricModel::bargmann_fock(1), 12, &[0.7], &spec).unwrap();
        assert!((bf.b - 12.0).abs() < 1e-8 * 12.0);
        let fs = kernel_diag(&ToricModel::fubini_study(1), 9, &[0.3], &spec).unwrap();
        assert!((fs.b - 10.0).abs() < 1e-8 * 10.0);
        assert_eq!(fs.partial_sums.len(), 10);
        assert!((fs.partial_sums.last().unwrap() - fs.b).abs() < 1e-12 * fs.b);
        let ball = kernel_diag(&ToricModel::bergman_ball(1), 9, &[2.0], &spec).unwrap();
        assert!((ball.b - 8.0).abs() < 1e-8 * 8.0);
        assert!((ball.stated.unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn ratio_examples() {
        let spec = QuadratureSpec::default();
        let fs = ToricModel::fubini_study(1);
        let q = QuadratureNorms::new(fs.clone(), spec.clone());
        let r = tyz_ratio(&fs, &[8, 16, 32], &[0.4], &q).unwrap();
        assert!((r.a1 - 1.0).abs() < 1e-6);
        let ball = ToricModel::bergman_ball(1);
        let q = QuadratureNorms::new(ball.clone(), spec);
        let r = tyz_ratio(&ball, &[8, 16, 32], &[0.4], &q).unwrap();
        assert!((r.a1 + 1.0).abs() < 1e-6);
    }
}
