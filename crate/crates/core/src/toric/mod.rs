//! Toric Kähler models and the Legendre duality engine.
//!
//! A model is described by its Kähler potential `phi(rho)` in logarithmic
//! coordinates `|z_j|^2 = exp(rho_j)`. The moment map `x = grad phi(rho)` sends the
//! open orbit onto the interior of the moment polytope `P`, and the symplectic
//! potential `u(x) = <x, rho> - phi(rho)` is the Legendre dual.
//!
//! Built-in families: Bargmann–Fock (`C^m`), Fubini–Study (`CP^m`), the
//! Bergman ball, and products of these. Custom models supply `phi` as an
//! expression (see [`crate::expr`]) together with facet data.

mod duality;
mod model;
mod polytope;

pub use duality::{
    dual_rho, hessians, legendre_invert, numerical_hess_u, smooth_remainder, symplectic_potential, DualPoint,
    SmoothRemainder, NEWTON_MAX_ITER, NEWTON_TOL, VERTEX_DELTAS,
};
pub(crate) use model::Family;
pub use model::{CustomModelDoc, RhoDomain, ToricModel, BUILTIN_NAMES};
pub use polytope::{canonical_potential, Facet, Polytope};

use crate::error::Result;

/// Moment map `grad_rho phi(rho)`.
pub fn moment_map(model: &ToricModel, rho: &[f64]) -> Result<Vec<f64>> {
    model.moment_map(rho)
}

/// `rho(x)` from the closed form when the model has one, Newton otherwise.
pub fn resolve_rho(model: &ToricModel, x: &[f64]) -> Result<Vec<f64>> {
    model.polytope().check_interior(x)?;
    match model.closed_rho(x) {
        Some(rho) => Ok(rho),
        None => dual_rho(model, x),
    }
}
