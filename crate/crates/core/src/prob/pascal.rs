//! The two readings of the Pascal-distribution expectation, set against the disk operator.

use serde::Serialize;

use super::dist::{expectation, LatticeDistribution};
use crate::asymptotics::grid_slope;
use crate::error::{Error, Result};
use crate::lattice::{pascal_disk, DiskNormalization, TestFunction, TruncationPolicy};

/// Names of the four (reading, normalization) pairings, in the order used by the distance vectors.
pub const PAIRINGS: [&str; 4] =
    ["trials/kernel-sum", "trials/paper-prefactor", "reindexed/kernel-sum", "reindexed/paper-prefactor"];

#[derive(Debug, Clone, Serialize)]
pub struct PascalCheck {
    #[serde(rename = "N")]
    pub n: u32,
    pub x: f64,
    /// `E f(T/N)`, `T` the number of trials up to the `N`-th success (support `j >= N`).
    pub trials: f64,
    /// `E f(Y/N)`, `Y` the number of failures (support `j >= 0`).
    pub reindexed: f64,
    pub kernel_sum: f64,
    pub paper_prefactor: f64,
    /// `|reading - operator|` in the order of [`PAIRINGS`].
    pub distances: [f64; 4],
}

/// Both readings at one `N`, with `p = 1/(1+x)`.
pub fn pascal_theorem_check(f: &TestFunction, n: u32, x: f64, eps: f64) -> Result<PascalCheck> {
    if n < 2 || !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("Pascal check needs N >= 2 and x > 0, got N = {n}, x = {x}")));
    }
    if f.arity() != 1 {
        return Err(Error::invalid("Pascal check needs a one-variable function"));
    }
    let p = 1.0 / (1.0 + x);
    let nf = n as f64;
    let g = |j: u64| f.eval(&[j as f64 / nf]);
    let trials = expectation(&LatticeDistribution::pascal_trials(n, p)?, &g, eps)?.value;
    let reindexed = expectation(&LatticeDistribution::negbinomial_failures(n, p)?, &g, eps)?.value;
    let policy = TruncationPolicy::tail_bound(eps);
    let kernel_sum = pascal_disk(f, n, x, &policy, DiskNormalization::KernelSum)?.value;
    let paper_prefactor = pascal_disk(f, n, x, &policy, DiskNormalization::PaperPrefactor)?.value;
    let distances = [
        (trials - kernel_sum).abs(),
        (trials - paper_prefactor).abs(),
        (reindexed - kernel_sum).abs(),
        (reindexed - paper_prefactor).abs(),
    ];
    Ok(PascalCheck { n, x, trials, reindexed, kernel_sum, paper_prefactor, distances })
}

/// Decay of the four distances over a grid of `N`.
#[derive(Debug, Clone, Serialize)]
pub struct PascalDecay {
    pub rows: Vec<PascalCheck>,
    pub pairings: [&'static str; 4],
    /// Log-log slope per pairing; `None` when the distance is at roundoff on the grid.
    pub slopes: [Option<f64>; 4],
    /// Pairings whose slope lies within `-1 ± slope_tol`.
    pub first_order: Vec<&'static str>,
}

impl PascalDecay {
    pub fn passes(&self) -> bool {
        !self.first_order.is_empty()
    }
}

pub fn pascal_decay(f: &TestFunction, x: f64, n_grid: &[u32], eps: f64, slope_tol: f64) -> Result<PascalDecay> {
    let rows: Vec<PascalCheck> = n_grid.iter().map(|&n| pascal_theorem_check(f, n, x, eps)).collect::<Result<_>>()?;
    let mut slopes = [None; 4];
    for (k, s) in slopes.iter_mut().enumerate() {
        let d: Vec<f64> = rows.iter().map(|r| r.distances[k]).collect();
        let scale = rows.iter().map(|r| r.kernel_sum.abs()).fold(1e-300, f64::max);
        *s = grid_slope(n_grid, &d, 1e-12 * scale);
    }
    let first_order = PAIRINGS
        .iter()
        .zip(&slopes)
        .filter(|(_, s)| s.is_some_and(|v| (v + 1.0).abs() <= slope_tol))
        .map(|(name, _)| *name)
        .collect();
    Ok(PascalDecay { rows, pairings: PAIRINGS, slopes, first_order })
}
