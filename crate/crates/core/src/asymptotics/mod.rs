//! Empirical checks of the asymptotic laws: coefficient extraction for the
//! `1/N` expansion, corner and wall scaling limits, and the refined Poisson
//! limit.

mod fit;
mod poisson;
mod scaling;
mod voronovskaya;

pub use fit::{
    default_grid, doubling_grid, fit_coefficients, fit_inverse_powers, geometric_grid, grid_slope, loglog_slope,
    AsymptoticFit, CONDITION_WARNING,
};
pub use poisson::{
    binomial_pmf_scaled, first_order_pmf_correction, poisson_pmf, poisson_refinement, PoissonReport, PoissonRow,
};
pub use scaling::{
    corner_b1_fit, corner_b1_formula, corner_convergence, corner_scaled_operator, corner_values, szasz_unit,
    wall_convergence, wall_limit, wall_scaled_operator, ConvergenceReport, CornerReport,
};
pub use voronovskaya::{
    operator_values, voronovskaya_extract, voronovskaya_report, voronovskaya_theory, HypothesisRegime,
    VoronovskayaReport,
};
