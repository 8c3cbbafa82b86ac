//! Probabilistic readings of the classical operators: binomial (Bernstein),
//! Poisson (Szasz) and negative binomial / Pascal (disk).

mod dist;
mod pascal;
mod sampling;

pub use dist::{expectation, Expectation, LatticeDistribution, MAX_TERMS};
pub use pascal::{pascal_decay, pascal_theorem_check, PascalCheck, PascalDecay, PAIRINGS};
pub use sampling::{
    monte_carlo_check, monte_carlo_expectation, sample, total_variation, MonteCarloReport, CHUNK, RNG_NAME,
};
