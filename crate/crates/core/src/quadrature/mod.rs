//! Monomial norms `||z^α||²_{h^N}` by Gauss–Legendre quadrature and the
//! Bergman kernel diagonal as a lattice sum of those norms.

mod gauss;
mod kernel;
mod norms;

pub use gauss::GaussLegendre;
pub use kernel::{kernel_diag, kernel_diag_with, tyz_ratio, KernelDiag, TyzRatio};
pub use norms::{csv_err, monomial_norm, NormEntry, NormTable, QuadratureNorms, QuadratureSpec, WindowSpec};
