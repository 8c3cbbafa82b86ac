//! Classical Szasz, Bernstein and negative-binomial (disk) operators.

use serde::{Deserialize, Serialize};

use super::function::TestFunction;
use super::truncation::{LatticeProblem, TruncationPolicy, Window};
use super::weighted_sums;
use crate::error::{Error, Result};
use crate::special::{ln_binomial, ln_factorial, ln_pochhammer};

/// Result of a truncated operator evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorValue {
    pub value: f64,
    /// Neglected weight relative to the captured weight (times `sup|f|` bounds the error).
    pub tail_bound: f64,
    pub truncation_radius: u64,
    pub window: Window,
    pub terms: usize,
}

/// How the disk (negative-binomial) operator is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DiskNormalization {
    /// Divide by the kernel sum: the weights form a probability distribution.
    #[default]
    KernelSum,
    /// Keep the literal `(N-1)/(N+1)` prefactor.
    PaperPrefactor,
}

fn check_arity(f: &TestFunction, m: usize) -> Result<()> {
    if f.arity() != m {
        return Err(Error::invalid(format!("test function has arity {}, point has dimension {m}", f.arity())));
    }
    Ok(())
}

fn scaled(a: &[i64], n: u32) -> Vec<f64> {
    a.iter().map(|&k| k as f64 / n as f64).collect()
}

/// Unnormalized sum `Σ g(α) e^{lw(α)}` over a window found by `problem`.
pub(crate) fn absolute_sum(
    problem: &LatticeProblem<'_>,
    center: &[f64],
    policy: &TruncationPolicy,
    g: &(dyn Fn(&[i64]) -> f64 + Sync),
) -> Result<OperatorValue> {
    let ws = problem.run(center, policy)?;
    let (numer, _denom, max) = weighted_sums(&ws.points, &ws.logs, g);
    Ok(OperatorValue {
        value: numer * max.exp(),
        tail_bound: ws.tail_bound,
        truncation_radius: ws.window.radius(&ws.mode),
        terms: ws.points.len(),
        window: ws.window,
    })
}

/// Classical Szasz–Mirakyan operator `e^{-N|x|} Σ_α f(α/N) (Nx)^α / α!` (tensor product).
pub fn szasz_classical(f: &TestFunction, n: u32, x: &[f64], policy: &TruncationPolicy) -> Result<OperatorValue> {
    check_arity(f, x.len())?;
    szasz_lattice_sum(n, x, policy, &|a| f.eval(&scaled(a, n)))
}

/// Classical Szasz sum with the summand given on lattice points: `e^{-N|x|} Σ_α g(α) (Nx)^α / α!`.
pub fn szasz_lattice_sum(
    n: u32,
    x: &[f64],
    policy: &TruncationPolicy,
    g: &(dyn Fn(&[i64]) -> f64 + Sync),
) -> Result<OperatorValue> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if let Some((j, v)) = x.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::domain(format!("Szasz operator needs x_{} > 0, got {v}", j + 1)));
    }
    let nf = n as f64;
    let lam: Vec<f64> = x.iter().map(|v| nf * v).collect();
    let lw = |a: &[i64]| -> Result<f64> {
        Ok(a.iter().zip(&lam).map(|(&k, l)| k as f64 * l.ln() - l - ln_factorial(k as u64)).sum())
    };
    let inside = |_: &[i64]| true;
    let problem = LatticeProblem { bounds: vec![(Some(0), None); x.len()], inside: &inside, log_weight: &lw };
    absolute_sum(&problem, &lam, policy, g)
}

/// Bernstein operator `Σ_k C(N,k) f(k/N) x^k (1-x)^{N-k}`, tensorized over axes. Exact.
pub fn bernstein(f: &TestFunction, n: u32, x: &[f64]) -> Result<f64> {
    check_arity(f, x.len())?;
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if let Some((j, v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::domain(format!("Bernstein operator needs 0 <= x_{} <= 1, got {v}", j + 1)));
    }
    let term = |k: i64, xj: f64| -> f64 {
        let a = if k == 0 { 0.0 } else { k as f64 * xj.ln() };
        let b = if k == n as i64 { 0.0 } else { (n as i64 - k) as f64 * (-xj).ln_1p() };
        ln_binomial(n as u64, k as u64) + a + b
    };
    let lw = |a: &[i64]| -> Result<f64> { Ok(a.iter().zip(x).map(|(&k, &xj)| term(k, xj)).sum()) };
    let inside = |_: &[i64]| true;
    let problem = LatticeProblem { bounds: vec![(Some(0), Some(n as i64)); x.len()], inside: &inside, log_weight: &lw };
    let policy = TruncationPolicy::fixed_radius(n as u64).with_max_terms(usize::MAX);
    let center: Vec<f64> = x.iter().map(|v| v * n as f64).collect();
    Ok(absolute_sum(&problem, &center, &policy, &|a| f.eval(&scaled(a, n)))?.value)
}

/// Disk operator `(1+x)^{-N} Σ_j (N)_j f(j/N) (x/(1+x))^j / j!`.
pub fn pascal_disk(
    f: &TestFunction,
    n: u32,
    x: f64,
    policy: &TruncationPolicy,
    normalization: DiskNormalization,
) -> Result<OperatorValue> {
    check_arity(f, 1)?;
    if n < 2 {
        return Err(Error::invalid(format!("disk operator needs N >= 2, got {n}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("disk operator needs x > 0, got {x}")));
    }
    let nf = n as f64;
    let log_q = x.ln() - x.ln_1p();
    let log_p = -x.ln_1p();
    let lw = |a: &[i64]| -> Result<f64> {
        let j = a[0] as u64;
        Ok(ln_pochhammer(nf, j) - ln_factorial(j) + nf * log_p + j as f64 * log_q)
    };
    let inside = |_: &[i64]| true;
    let problem = LatticeProblem { bounds: vec![(Some(0), None)], inside: &inside, log_weight: &lw };
    let mut out = absolute_sum(&problem, &[nf * x], policy, &|a| f.eval(&scaled(a, n)))?;
    if normalization == DiskNormalization::PaperPrefactor {
        out.value *= (nf - 1.0) / (nf + 1.0);
    }
    Ok(out)
}
