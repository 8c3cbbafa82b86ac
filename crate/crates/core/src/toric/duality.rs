//! Legendre duality between the Kähler potential `phi(rho)` and the
//! symplectic potential `u(x)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::model::ToricModel;
use crate::error::{Error, Result};

/// Residual tolerance on `|grad phi(rho) - x|_inf`, relative to `max(1, |x|_inf)`.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 100;

/// A matched pair `x = grad phi(rho)`, `rho = grad u(x)` with the data that
/// lives on it.
#[derive(Debug, Clone, Serialize)]
pub struct DualPoint {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    /// `u(x) = <x, rho> - phi(rho)`.
    pub u_value: f64,
    /// `grad u(x)`; identical to `rho`.
    pub grad_u: Vec<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub hessian_g: DMatrix<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub hessian_h: DMatrix<f64>,
    pub iterations: usize,
    pub residual: f64,
}

pub(crate) fn ser_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Solves `grad phi(rho) = x` by damped Newton with step halving.
fn newton_rho(model: &ToricModel, x: &[f64], init: Option<&[f64]>) -> Result<(Vec<f64>, usize, f64)> {
    let m = model.dimension();
    let scale = inf_norm(x).max(1.0);
    let tol = NEWTON_TOL * scale;
    let mut rho: Vec<f64> = match init {
        Some(r) if r.len() == m && model.check_rho(r).is_ok() => r.to_vec(),
        _ => model.initial_rho(x),
    };
    model.check_rho(&rho)?;
    let residual =
        |rho: &[f64]| -> Vec<f64> { model.grad_phi_unchecked(rho).iter().zip(x).map(|(g, xi)| g - xi).collect() };
    let mut f = residual(&rho);
    let mut fnorm = inf_norm(&f);
    let mut polished = false;
    for iter in 0..NEWTON_MAX_ITER {
        if fnorm <= tol {
            if polished || fnorm == 0.0 {
                return Ok((rho, iter, fnorm));
            }
            polished = true;
        }
        let h = model.hess_phi_unchecked(&rho);
        let rhs = DVector::from_iterator(m, f.iter().map(|v| -v));
        let step = h
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NumericalInstability(format!("singular Hessian at rho = {rho:?}")))?;
        // Armijo on the convex merit psi(rho) = phi(rho) - <x, rho>; near roundoff
        // psi stops resolving progress, so a residual decrease is accepted there.
        let psi = |r: &[f64]| model.phi(r).map(|p| p - r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>());
        let psi0 = psi(&rho)?;
        let slope: f64 = f.iter().zip(step.iter()).map(|(a, b)| a * b).sum();
        let near = fnorm <= 1e-6 * scale;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = rho.iter().zip(step.iter()).map(|(r, s)| r + t * s).collect();
            if model.check_rho(&trial).is_ok() {
                let ft = residual(&trial);
                let nt = inf_norm(&ft);
                let armijo = matches!(psi(&trial), Ok(v) if v <= psi0 + 1e-4 * t * slope);
                let ok = if near { nt < fnorm || (polished && nt <= fnorm) } else { armijo };
                if nt.is_finite() && ok {
                    rho = trial;
                    f = ft;
                    fnorm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            if fnorm <= tol {
                return Ok((rho, iter, fnorm));
            }
            return Err(Error::Convergence { iterations: iter, residual: fnorm });
        }
    }
    if fnorm <= tol {
        return Ok((rho, NEWTON_MAX_ITER, fnorm));
    }
    Err(Error::Convergence { iterations: NEWTON_MAX_ITER, residual: fnorm })
}

/// Inverts the moment map at an interior point `x`.
pub fn legendre_invert(model: &ToricModel, x: &[f64], init: Option<&[f64]>) -> Result<DualPoint> {
    model.polytope().check_interior(x)?;
    let (rho, iterations, residual) = newton_rho(model, x, init)?;
    let phi = model.phi(&rho)?;
    let u_value = x.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>() - phi;
    let (hessian_g, hessian_h) = hessians_at(model, x, &rho)?;
    Ok(DualPoint { x: x.to_vec(), grad_u: rho.clone(), rho, u_value, hessian_g, hessian_h, iterations, residual })
}

/// `rho(x)` only, skipping the Hessians.
pub fn dual_rho(model: &ToricModel, x: &[f64]) -> Result<Vec<f64>> {
    model.polytope().check_interior(x)?;
    Ok(newton_rho(model, x, None)?.0)
}

/// Symplectic potential by Legendre transform: `<x, rho(x)> - phi(rho(x))`.
pub fn symplectic_potential(model: &ToricModel, x: &[f64]) -> Result<f64> {
    let rho = dual_rho(model, x)?;
    Ok(x.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>() - model.phi(&rho)?)
}

/// `(G(x), H(rho(x)))`: Hessians of `u` and of `phi` at a dual pair.
pub fn hessians(model: &ToricModel, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let rho = dual_rho(model, x)?;
    hessians_at(model, x, &rho)
}

fn hessians_at(model: &ToricModel, x: &[f64], rho: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let h = model.hess_phi(rho)?;
    let g = match model.closed_hess_u(x) {
        Some(g) => g,
        None => numerical_hess_u(model, x)?,
    };
    for (name, mat) in [("G", &g), ("H", &h)] {
        if mat.iter().any(|v| !v.is_finite()) || mat.clone().cholesky().is_none() {
            return Err(Error::NumericalInstability(format!("{name} is not positive definite at x = {x:?}")));
        }
    }
    Ok((g, h))
}

/// `Hess u(x)` by central differences of `grad u = rho(x)` with step
/// `1e-5 max(1, |x_j|)` and one Richardson refinement.
pub fn numerical_hess_u(model: &ToricModel, x: &[f64]) -> Result<DMatrix<f64>> {
    let m = model.dimension();
    let poly = model.polytope();
    let center_rho = dual_rho(model, x)?;
    // keep the stencil well inside P
    let room = poly
        .facets()
        .iter()
        .map(|f| f.slack(x) / f.normal.iter().map(|v| (v * v) as f64).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);
    let mut g = DMatrix::zeros(m, m);
    for j in 0..m {
        let h = (1e-5 * x[j].abs().max(1.0)).min(0.25 * room);
        let diff = |h: f64| -> Result<Vec<f64>> {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let rp = newton_rho(model, &xp, Some(&center_rho))?.0;
            let rm = newton_rho(model, &xm, Some(&center_rho))?.0;
            Ok(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let coarse = diff(h)?;
        let fine = diff(h / 2.0)?;
        for i in 0..m {
            g[(i, j)] = (4.0 * fine[i] - coarse[i]) / 3.0;
        }
    }
    Ok((&g + g.transpose()) * 0.5)
}

/// The smooth part `h` in `u(x) = sum_j x_j log x_j + h(x)` near the vertex
/// at the origin.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothRemainder {
    /// `h(x)` at the requested point.
    pub value: f64,
    /// One-sided limit of `grad h` at the vertex.
    pub gradient_at_vertex: Vec<f64>,
    /// One-sided limit of `Hess h` at the vertex.
    #[serde(serialize_with = "ser_matrix")]
    pub hessian_at_vertex: DMatrix<f64>,
}

/// Richardson step sizes for the one-sided vertex limits.
pub const VERTEX_DELTAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Evaluates `h(x) = u(x) - sum x_j log x_j` and the vertex limits of its
/// gradient and Hessian.
///
/// `grad h(y) = rho(y) - log y - 1` is available from Legendre inversion, so the
/// Hessian column `i` is the forward difference of `grad h` on the stencil
/// `{delta*1, delta*1 + delta*e_i}`, extrapolated to `delta -> 0` over
/// [`VERTEX_DELTAS`] (two Richardson levels, error terms `O(delta)` and `O(delta^2)`).
pub fn smooth_remainder(model: &ToricModel, x: &[f64]) -> Result<SmoothRemainder> {
    let poly = model.polytope();
    if !poly.is_vertex_normalized() {
        return Err(Error::domain(format!(
            "model '{}' does not have a vertex at the origin bounded by the coordinate hyperplanes",
            model.name()
        )));
    }
    let m = model.dimension();
    let u = symplectic_potential(model, x)?;
    let value = u - x.iter().map(|v| v * v.ln()).sum::<f64>();

    let grad_h = |y: &[f64]| -> Result<Vec<f64>> {
        if !poly.contains_interior(y) {
            return Err(Error::domain(format!("vertex stencil point {y:?} leaves the polytope")));
        }
        let rho = dual_rho(model, y)?;
        Ok(rho.iter().zip(y).map(|(r, yi)| r - yi.ln() - 1.0).collect())
    };

    let richardson = |d: [f64; 3]| -> f64 {
        // D(delta) = L + a delta + b delta^2 with deltas halving
        let r1 = 2.0 * d[1] - d[0];
        let r2 = 2.0 * d[2] - d[1];
        (4.0 * r2 - r1) / 3.0
    };

    let mut grad_samples = vec![[0.0; 3]; m];
    let mut hess_samples = vec![vec![[0.0; 3]; m]; m];
    for (k, &delta) in VERTEX_DELTAS.iter().enumerate() {
        let base = vec![delta; m];
        let g0 = grad_h(&base)?;
        for j in 0..m {
            grad_samples[j][k] = g0[j];
        }
        for i in 0..m {
            let mut y = base.clone();
            y[i] += delta;
            let gi = grad_h(&y)?;
            for j in 0..m {
                hess_samples[j][i][k] = (gi[j] - g0[j]) / delta;
            }
        }
    }
    let gradient_at_vertex: Vec<f64> = grad_samples.iter().map(|s| richardson(*s)).collect();
    let raw = DMatrix::from_fn(m, m, |i, j| richardson(hess_samples[i][j]));
    let hessian_at_vertex = (&raw + raw.transpose()) * 0.5;
    Ok(SmoothRemainder { value, gradient_at_vertex, hessian_at_vertex })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn legendre_examples() {
        let bf = ToricModel::bargmann_fock(1);
        let p = legendre_invert(&bf, &[2.0], None).unwrap();
        assert!(close(p.rho[0], 2f64.ln(), 1e-14));
        assert!(close(p.u_value, 2.0 * 2f64.ln() - 2.0, 1e-14));

        let fs = ToricModel::fubini_study(1);
        assert!(close(legendre_invert(&fs, &[0.5], None).unwrap().u_value, -(2f64.ln()), 1e-14));

        let ball = ToricModel::bergman_ball(1);
        assert!(close(legendre_invert(&ball, &[1.0], None).unwrap().u_value, -2.0 * 2f64.ln(), 1e-14));
    }

    #[test]
    fn newton_from_poor_start_converges() {
        let ball = ToricModel::bergman_ball(1);
        // start far away; damping must keep rho inside sum exp(rho) < 1
        let p = legendre_invert(&ball, &[40.0], Some(&[-20.0])).unwrap();
        assert!(close(p.rho[0], (40.0f64 / 41.0).ln(), 1e-12));
        let fs = ToricModel::fubini_study(2);
        let p = legendre_invert(&fs, &[0.1, 0.7], Some(&[5.0, -5.0])).unwrap();
        assert!(close(p.rho[0], (0.1f64 / 0.2).ln(), 1e-12));
    }

    #[test]
    fn boundary_points_are_domain_errors() {
        let fs = ToricModel::fubini_study(1);
        assert!(matches!(legendre_invert(&fs, &[1.0], None), Err(Error::Domain(_))));
        assert!(matches!(legendre_invert(&fs, &[0.0], None), Err(Error::Domain(_))));
        let bf = ToricModel::bargmann_fock(2);
        assert!(matches!(symplectic_potential(&bf, &[1.0, -0.1]), Err(Error::Domain(_))));
    }

    #[test]
    fn symplectic_potential_examples() {
        assert!(close(symplectic_potential(&ToricModel::bargmann_fock(1), &[1.0]).unwrap(), -1.0, 1e-14));
        assert!(close(
            symplectic_potential(&ToricModel::fubini_study(1), &[0.5]).unwrap(),
            -std::f64::consts::LN_2,
            1e-12
        ));
        let tiny = symplectic_potential(&ToricModel::bergman_ball(1), &[1e-10]).unwrap();
        assert!(tiny.abs() < 1e-8);
    }

    #[test]
    fn hessian_examples() {
        let (g, h) = hessians(&ToricModel::bargmann_fock(1), &[2.0]).unwrap();
        assert!(close(g[(0, 0)], 0.5, 1e-14) && close(h[(0, 0)], 2.0, 1e-12));
        let (_, h) = hessians(&ToricModel::fubini_study(1), &[0.25]).unwrap();
        assert!(close(h[(0, 0)], 0.1875, 1e-14));
        let (_, h) = hessians(&ToricModel::bergman_ball(1), &[1.0]).unwrap();
        assert!(close(h[(0, 0)], 2.0, 1e-12));
    }

    #[test]
    fn numerical_g_matches_closed_form() {
        for (model, x) in [
            (ToricModel::fubini_study(2), vec![0.2, 0.5]),
            (ToricModel::bergman_ball(1), vec![0.7]),
            (ToricModel::bargmann_fock(1), vec![3.0]),
        ] {
            let num = numerical_hess_u(&model, &x).unwrap();
            let closed = model.closed_hess_u(&x).unwrap();
            let rel = (&num - &closed).abs().max() / closed.abs().max();
            assert!(rel < 1e-8, "{}: {rel}", model.name());
        }
    }

    #[test]
    fn smooth_remainder_examples() {
        let fs = smooth_remainder(&ToricModel::fubini_study(1), &[0.3]).unwrap();
        assert!(close(fs.value, 0.7 * 0.7f64.ln(), 1e-12));
        assert!(close(fs.hessian_at_vertex[(0, 0)], 1.0, 1e-6));
        let bf = smooth_remainder(&ToricModel::bargmann_fock(2), &[0.3, 0.4]).unwrap();
        assert!(close(bf.value, -0.7, 1e-12));
        assert!(bf.hessian_at_vertex.abs().max() < 1e-8);
        let ball = smooth_remainder(&ToricModel::bergman_ball(1), &[0.3]).unwrap();
        assert!(close(ball.value, -1.3 * 1.3f64.ln(), 1e-12));
        assert!(close(ball.hessian_at_vertex[(0, 0)], -1.0, 1e-6));
        assert!(close(ball.gradient_at_vertex[0], -1.0, 1e-6));
    }
}
