//! Generalized Szasz analytic functions on toric Kähler models.
//!
//! The crate evaluates the normalized lattice sums
//!
//! ```text
//! S_N(f)(x) = (1 / B_N(z, z)) * sum_{alpha in NP ∩ Z^m} f(alpha / N)
//!             * exp(N (u(x) + <alpha/N - x, grad u(x)>)) / ||z^alpha||^2_{h^N}
//! ```
//!
//! for toric Kähler models, together with everything needed to build and check
//! them: Legendre duality between Kähler and symplectic potentials, monomial
//! norms by quadrature, Bergman kernel diagonals, the classical Szasz,
//! Bernstein and negative-binomial operators, asymptotic coefficient
//! extraction, corner/wall scaling limits, and the probabilistic readings
//! (binomial, Poisson, Pascal).
//!
//! Module map:
//!
//! - [`toric`]: models, polytopes, moment maps, Legendre inversion.
//! - [`lattice`]: test functions, truncation, classical and generalized operators.
//! - [`quadrature`]: Gauss–Legendre rules, monomial norms, kernel diagonals.
//! - [`asymptotics`]: coefficient fits, Voronovskaya, corner/wall scaling, Poisson refinement.
//! - [`prob`]: lattice distributions, expectations, sampling, the Pascal check.
//! - [`report`] and [`cli`]: experiment configs, JSON/CSV output, the command-line front end.

pub mod asymptotics;
pub mod cli;

pub mod error;
pub mod expr;
pub mod lattice;
pub mod prob;

pub mod quadrature;
pub mod report;

pub mod special;
pub mod toric;

pub use error::{Error, Result};
pub use lattice::{generalized_operator, LatticeWeightTable, TestFunction, TruncationPolicy};
pub use toric::ToricModel;

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
