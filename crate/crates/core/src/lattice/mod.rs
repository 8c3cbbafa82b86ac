//! Lattice-sum operators: classical Szasz, Bernstein, the disk operator and
//! the generalized Szasz operator of a toric model.
//!
//! All weights are handled as logarithms and summed with a max-shift and
//! pairwise reduction, so the results do not depend on thread scheduling.

mod classical;
mod function;
mod generalized;
mod truncation;

use rayon::prelude::*;

pub use classical::{bernstein, pascal_disk, szasz_classical, szasz_lattice_sum, DiskNormalization, OperatorValue};
pub use function::{TestFunction, MAX_DERIVATIVE_ORDER};
pub use generalized::{
    generalized_lattice_mean, generalized_operator, generalized_operator_with, generalized_weight,
    kahler_side_log_term, renormalize_to_stated, ClosedFormNorms, GeneralizedValue, LatticeWeightTable, NormSource,
    ScaledNorms, TableHeader, WeightEntry,
};
pub use truncation::{TruncationMode, TruncationPolicy, Window};

use crate::special::pairwise_sum;

/// `(Σ g e^{l - max}, Σ e^{l - max}, max)`.
pub(crate) fn weighted_sums(points: &[Vec<i64>], logs: &[f64], g: &(dyn Fn(&[i64]) -> f64 + Sync)) -> (f64, f64, f64) {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let gw: Vec<f64> = if points.len() >= 4096 {
        points.par_iter().zip(w.par_iter()).map(|(a, w)| weighted(g(a), *w)).collect()
    } else {
        points.iter().zip(&w).map(|(a, w)| weighted(g(a), *w)).collect()
    };
    (pairwise_sum(&gw), pairwise_sum(&w), max)
}

// zero weight times anything (even a non-finite value outside support) is zero
fn weighted(g: f64, w: f64) -> f64 {
    if w == 0.0 || g == 0.0 {
        0.0
    } else {
        g * w
    }
}
