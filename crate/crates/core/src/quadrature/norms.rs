use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gauss::GaussLegendre;
use crate::error::{Error, Result};
use crate::lattice::NormSource;
use crate::special::pairwise_sum;
use crate::toric::{dual_rho, Family, RhoDomain, ToricModel};

/// Integration window in the unconstrained coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WindowSpec {
    /// Laplace window around the integrand mode, doubled until stable.
    #[default]
    Auto,
    /// Fixed per-axis interval.
    Explicit(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per axis on the base window (16-node panels).
    pub nodes_per_axis: usize,
    pub window: WindowSpec,
    pub rel_tol: f64,
    /// Global measure constant; `None` fixes it from the `alpha = 0` closed form
    /// when one exists and uses 1 otherwise.
    pub calibration_constant: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes_per_axis: 64, window: WindowSpec::Auto, rel_tol: 1e-10, calibration_constant: None }
    }
}

const PANEL_ORDER: usize = 16;
const BASE_C: f64 = 6.0;
const MAX_C: f64 = 192.0;

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < PANEL_ORDER || self.nodes_per_axis % PANEL_ORDER != 0 {
            return Err(Error::invalid(format!("nodes_per_axis must be a positive multiple of {PANEL_ORDER}")));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol must lie in (0, 1)"));
        }
        if let Some(c) = self.calibration_constant {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::invalid("calibration constant must be positive"));
            }
        }
        Ok(())
    }
}

/// `log ||z^α||²` with its estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub log_norm: f64,
    pub rel_error: f64,
}

impl NormEntry {
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    /// Absolute error estimate in norm units.
    pub fn est_error(&self) -> f64 {
        self.rel_error * self.norm()
    }
}

/// `log(1 + Σ e^{v_j})`.
fn softplus_sum(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(0.0f64, f64::max);
    mx + ((-mx).exp() + v.iter().map(|x| (x - mx).exp()).sum::<f64>()).ln()
}

/// Log-integrand of `∫ e^{<α,ρ>} e^{-N phi(ρ)} det H(ρ) dρ` in a coordinate `ξ`
/// ranging over all of `R^m` (`ρ = ξ`, or `ρ_j = ξ_j - log(1 + Σ e^ξ)` when the
/// ρ-domain is `Σ e^ρ < 1`, with the Jacobian included).
struct Integrand<'a> {
    model: &'a ToricModel,
    alpha: Vec<f64>,
    n: f64,
    kind: Shape,
}

#[derive(Clone, Copy, PartialEq)]
enum Shape {
    BargmannFock,
    FubiniStudy,
    Ball,
    CustomAll,
    CustomSimplex,
}

impl<'a> Integrand<'a> {
    fn new(model: &'a ToricModel, alpha: &[i64], n: u32) -> Self {
        let kind = match model.family() {
            Family::BargmannFock => Shape::BargmannFock,
            Family::FubiniStudy => Shape::FubiniStudy,
            Family::Ball => Shape::Ball,
            Family::Custom(RhoDomain::All) => Shape::CustomAll,
            Family::Custom(RhoDomain::SimplexExp) => Shape::CustomSimplex,
            Family::Product => unreachable!("products are integrated factorwise"),
        };
        Integrand { model, alpha: alpha.iter().map(|&a| a as f64).collect(), n: n as f64, kind }
    }

    fn m(&self) -> usize {
        self.alpha.len()
    }

    fn abs_alpha(&self) -> f64 {
        self.alpha.iter().sum()
    }

    fn eval(&self, xi: &[f64]) -> f64 {
        let lin1: f64 = self.alpha.iter().zip(xi).map(|(a, x)| (a + 1.0) * x).sum();
        let m = self.m() as f64;
        match self.kind {
            Shape::BargmannFock => lin1 - self.n * xi.iter().map(|x| x.exp()).sum::<f64>(),
            Shape::FubiniStudy => lin1 - (self.n + m + 1.0) * softplus_sum(xi),
            Shape::Ball => lin1 - (self.n + self.abs_alpha()) * softplus_sum(xi),
            Shape::CustomAll => {
                let lin: f64 = self.alpha.iter().zip(xi).map(|(a, x)| a * x).sum();
                lin - self.n * self.model.phi_unchecked(xi) + self.model.log_det_hess_unchecked(xi)
            }
            Shape::CustomSimplex => {
                let sp = softplus_sum(xi);
                let rho: Vec<f64> = xi.iter().map(|x| x - sp).collect();
                let lin: f64 = self.alpha.iter().zip(&rho).map(|(a, r)| a * r).sum();
                lin - self.n * self.model.phi_unchecked(&rho) + self.model.log_det_hess_unchecked(&rho) - sp
            }
        }
    }

    /// Exact mode and Hessian for the built-in shapes.
    fn closed_mode(&self) -> Option<Result<(Vec<f64>, DMatrix<f64>)>> {
        let m = self.m();
        let y_mode = |k: f64| -> Result<(Vec<f64>, DMatrix<f64>)> {
            let y: Vec<f64> = self.alpha.iter().map(|a| (a + 1.0) / k).collect();
            let ys: f64 = y.iter().sum();
            if ys >= 1.0 {
                return Err(self.divergence("integrand has no interior maximum"));
            }
            let xi = y.iter().map(|v| (v / (1.0 - ys)).ln()).collect();
            let h = DMatrix::from_fn(m, m, |i, j| -k * (if i == j { y[i] } else { 0.0 } - y[i] * y[j]));
            Ok((xi, h))
        };
        match self.kind {
            Shape::BargmannFock => {
                let xi = self.alpha.iter().map(|a| ((a + 1.0) / self.n).ln()).collect();
                let h = DMatrix::from_fn(m, m, |i, j| if i == j { -(self.alpha[i] + 1.0) } else { 0.0 });
                Some(Ok((xi, h)))
            }
            Shape::FubiniStudy => Some(y_mode(self.n + m as f64 + 1.0)),
            Shape::Ball => Some(y_mode(self.n + self.abs_alpha())),
            _ => None,
        }
    }

    fn divergence(&self, detail: &str) -> Error {
        Error::Divergence { alpha: self.alpha.iter().map(|&a| a as i64).collect(), detail: detail.to_string() }
    }

    fn fd_hessian(&self, xi: &[f64], h: f64) -> DMatrix<f64> {
        let m = self.m();
        let f0 = self.eval(xi);
        let mut out = DMatrix::zeros(m, m);
        let shifted = |d: &[(usize, f64)]| {
            let mut p = xi.to_vec();
            for &(j, s) in d {
                p[j] += s;
            }
            self.eval(&p)
        };
        for i in 0..m {
            out[(i, i)] = (shifted(&[(i, h)]) - 2.0 * f0 + shifted(&[(i, -h)])) / (h * h);
            for j in 0..i {
                let v = (shifted(&[(i, h), (j, h)]) - shifted(&[(i, h), (j, -h)]) - shifted(&[(i, -h), (j, h)])
                    + shifted(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    fn fd_gradient(&self, xi: &[f64], h: f64) -> Vec<f64> {
        (0..self.m())
            .map(|j| {
                let mut p = xi.to_vec();
                p[j] += h;
                let fp = self.eval(&p);
                p[j] -= 2.0 * h;
                (fp - self.eval(&p)) / (2.0 * h)
            })
            .collect()
    }

    /// Newton ascent with finite-difference derivatives, for custom models.
    fn numeric_mode(&self, n: u32) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let nf = n as f64;
        // start from rho(x0) with x0 pulled slightly from alpha/N toward an interior point
        let reference = self.model.reference_point();
        let lam = 1.0 / (nf + 2.0);
        let x0: Vec<f64> = self.alpha.iter().zip(&reference).map(|(a, r)| (1.0 - lam) * a / nf + lam * r).collect();
        let rho0 = dual_rho(self.model, &x0).unwrap_or_else(|_| self.model.initial_rho(&x0));
        let mut xi = match self.kind {
            Shape::CustomSimplex => {
                let t: f64 = rho0.iter().map(|r| r.exp()).sum();
                rho0.iter().map(|r| r - (-t).ln_1p()).collect()
            }
            _ => rho0,
        };
        let mut f = self.eval(&xi);
        if !f.is_finite() {
            return Err(self.divergence("integrand is not finite at the starting point"));
        }
        for _ in 0..200 {
            let g = self.fd_gradient(&xi, 1e-5);
            let h = self.fd_hessian(&xi, 1e-3);
            let neg = -h.clone();
            let gv = DVector::from_vec(g.clone());
            let step: Vec<f64> = match neg.clone().cholesky() {
                Some(ch) => ch.solve(&gv).iter().copied().collect(),
                None => {
                    let scale = neg.diagonal().iter().map(|v| v.abs()).fold(1.0, f64::max);
                    g.iter().map(|v| v / scale).collect()
                }
            };
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..50 {
                let trial: Vec<f64> = xi.iter().zip(&step).map(|(a, s)| a + t * s).collect();
                let ft = self.eval(&trial);
                if ft.is_finite() && ft >= f {
                    xi = trial;
                    f = ft;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if xi.iter().any(|v| v.abs() > 700.0) {
                return Err(self.divergence("integrand mode escapes to infinity"));
            }
            let size = step.iter().fold(0.0f64, |a, s| a.max((t * s).abs()));
            if !moved || size < 1e-9 {
                let h = self.fd_hessian(&xi, 1e-3);
                return Ok((xi, h));
            }
        }
        Err(Error::Convergence { iterations: 200, residual: f64::NAN })
    }
}

fn integrate_box(integrand: &Integrand<'_>, axes: &[Vec<(f64, f64)>], shift: f64) -> f64 {
    let m = axes.len();
    let inner = |first: &(f64, f64)| -> f64 {
        let mut idx = vec![0usize; m.saturating_sub(1)];
        let mut terms = Vec::new();
        let mut point = vec![first.0; m];
        loop {
            let mut w = first.1;
            for (k, &i) in idx.iter().enumerate() {
                point[k + 1] = axes[k + 1][i].0;
                w *= axes[k + 1][i].1;
            }
            let v = integrand.eval(&point) - shift;
            terms.push(if v.is_finite() || v == f64::INFINITY { w * v.exp() } else { 0.0 });
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return pairwise_sum(&terms);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k + 1].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    };
    let slices: Vec<f64> =
        if m >= 2 { axes[0].par_iter().map(inner).collect() } else { axes[0].iter().map(inner).collect() };
    pairwise_sum(&slices)
}

/// Raw (uncalibrated) `log ∫` for a non-product model.
fn raw_log_integral(model: &ToricModel, alpha: &[i64], n: u32, spec: &QuadratureSpec) -> Result<NormEntry> {
    let integrand = Integrand::new(model, alpha, n);
    let m = integrand.m();
    let rule = GaussLegendre::new(PANEL_ORDER);
    let base_panels = spec.nodes_per_axis / PANEL_ORDER;

    if let WindowSpec::Explicit(bounds) = &spec.window {
        if bounds.len() != m {
            return Err(Error::invalid("explicit window needs one interval per axis"));
        }
        let center: Vec<f64> = bounds.iter().map(|(a, b)| 0.5 * (a + b)).collect();
        let shift = integrand.eval(&center);
        let run = |panels: usize| {
            let axes: Vec<Vec<(f64, f64)>> = bounds.iter().map(|&(a, b)| rule.composite(a, b, panels)).collect();
            integrate_box(&integrand, &axes, shift)
        };
        let fine = run(base_panels);
        let coarse = run(base_panels.div_ceil(2));
        return finish(&integrand, shift, fine, coarse);
    }

    let (mode, hess) = match integrand.closed_mode() {
        Some(r) => r?,
        None => integrand.numeric_mode(n)?,
    };
    let peak = integrand.eval(&mode);
    if !peak.is_finite() {
        return Err(integrand.divergence("integrand is not finite at its mode"));
    }
    let cov = (-hess)
        .try_inverse()
        .filter(|c| c.diagonal().iter().all(|v| *v > 0.0 && v.is_finite()))
        .ok_or_else(|| integrand.divergence("integrand mode is degenerate"))?;
    let sigma: Vec<f64> = cov.diagonal().iter().map(|v| v.sqrt()).collect();

    // one-sided scales: distance at which the log-integrand drops by 18 (= 6^2/2), over 6
    let mut side = vec![[0.0f64; 2]; m];
    for j in 0..m {
        for (k, dir) in [(0usize, -1.0f64), (1, 1.0)] {
            let mut p = mode.clone();
            let step = 0.5 * sigma[j];
            let mut dist = 0.0;
            let mut steps = 0;
            loop {
                dist += step;
                p[j] = mode[j] + dir * dist;
                let v = integrand.eval(&p);
                if !(v > peak - 18.0) {
                    break;
                }
                steps += 1;
                if steps > 4000 {
                    return Err(integrand.divergence("integrand does not decay away from its mode"));
                }
            }
            side[j][k] = (dist / BASE_C).max(sigma[j]);
        }
    }

    let run = |c: f64| -> f64 {
        let panels = ((c / BASE_C) as usize * base_panels).div_ceil(2).max(1);
        let axes: Vec<Vec<(f64, f64)>> = (0..m)
            .map(|j| {
                let mut nodes = rule.composite(mode[j] - c * side[j][0], mode[j], panels);
                nodes.extend(rule.composite(mode[j], mode[j] + c * side[j][1], panels));
                nodes
            })
            .collect();
        integrate_box(&integrand, &axes, peak)
    };
    let mut c = BASE_C;
    let mut prev = run(c);
    while c < MAX_C {
        c *= 2.0;
        let cur = run(c);
        if ((cur - prev) / cur).abs() <= spec.rel_tol {
            return finish(&integrand, peak, cur, prev);
        }
        prev = cur;
    }
    Err(integrand.divergence(&format!("window doubling up to c = {MAX_C} did not stabilize")))
}

fn finish(integrand: &Integrand<'_>, shift: f64, fine: f64, coarse: f64) -> Result<NormEntry> {
    if !(fine > 0.0 && fine.is_finite()) {
        return Err(integrand.divergence("integral is not a positive finite number"));
    }
    Ok(NormEntry { log_norm: shift + fine.ln(), rel_error: ((fine - coarse) / fine).abs() })
}

fn check_alpha(model: &ToricModel, alpha: &[i64], n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if alpha.len() != model.dimension() || !model.polytope().contains_lattice(alpha, n) {
        return Err(Error::domain(format!("alpha = {alpha:?} is not in N P for N = {n}")));
    }
    if model.dimension() > 3 && !model.is_product() {
        return Err(Error::invalid("quadrature is limited to dimension <= 3 (products are integrated factorwise)"));
    }
    Ok(())
}

/// `log` of the measure constant for one non-product model.
fn log_calibration(model: &ToricModel, n: u32, spec: &QuadratureSpec) -> Result<f64> {
    if let Some(c) = spec.calibration_constant {
        return Ok(c.ln());
    }
    let zero = vec![0i64; model.dimension()];
    match model.closed_form_log_norm(&zero, n) {
        Some(exact) => Ok(exact - raw_log_integral(model, &zero, n, spec)?.log_norm),
        None => Ok(0.0),
    }
}

/// Calibrated `log ||z^α||²_{h^N}` by quadrature.
pub fn monomial_norm(model: &ToricModel, n: u32, alpha: &[i64], spec: &QuadratureSpec) -> Result<NormEntry> {
    QuadratureNorms::new(model.clone(), spec.clone()).entry(alpha, n)
}

/// Quadrature norms with per-`(α, N)` and per-`N` calibration caches.
pub struct QuadratureNorms {
    model: ToricModel,
    spec: QuadratureSpec,
    cache: Mutex<HashMap<(Vec<i64>, u32), NormEntry>>,
    calibration: Mutex<HashMap<(usize, u32), f64>>,
}

impl QuadratureNorms {
    pub fn new(model: ToricModel, spec: QuadratureSpec) -> Self {
        QuadratureNorms { model, spec, cache: Mutex::new(HashMap::new()), calibration: Mutex::new(HashMap::new()) }
    }

    pub fn model(&self) -> &ToricModel {
        &self.model
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    fn factor_calibration(&self, index: usize, factor: &ToricModel, n: u32) -> Result<f64> {
        if let Some(v) = self.calibration.lock().expect("calibration cache").get(&(index, n)) {
            return Ok(*v);
        }
        let v = log_calibration(factor, n, &self.spec)?;
        self.calibration.lock().expect("calibration cache").insert((index, n), v);
        Ok(v)
    }

    /// Norm and error estimate, computed once and cached.
    pub fn entry(&self, alpha: &[i64], n: u32) -> Result<NormEntry> {
        self.spec.validate()?;
        check_alpha(&self.model, alpha, n)?;
        let key = (alpha.to_vec(), n);
        if let Some(e) = self.cache.lock().expect("norm cache").get(&key) {
            return Ok(*e);
        }
        let single = [self.model.clone()];
        let factors: &[ToricModel] = if self.model.is_product() { self.model.factors() } else { &single };
        let mut total = NormEntry { log_norm: 0.0, rel_error: 0.0 };
        let mut off = 0;
        for (i, f) in factors.iter().enumerate() {
            let k = f.dimension();
            let a = &alpha[off..off + k];
            let raw = raw_log_integral(f, a, n, &self.spec)?;
            total.log_norm += raw.log_norm + self.factor_calibration(i, f, n)?;
            total.rel_error += raw.rel_error;
            off += k;
        }
        self.cache.lock().expect("norm cache").insert(key, total);
        Ok(total)
    }

    /// Calibration constants in use for `N` (one per factor).
    pub fn calibration_constants(&self, n: u32) -> Result<Vec<f64>> {
        let single = [self.model.clone()];
        let factors: &[ToricModel] = if self.model.is_product() { self.model.factors() } else { &single };
        factors.iter().enumerate().map(|(i, f)| Ok(self.factor_calibration(i, f, n)?.exp())).collect()
    }
}

impl NormSource for QuadratureNorms {
    fn log_norm(&self, alpha: &[i64], n: u32) -> Result<f64> {
        Ok(self.entry(alpha, n)?.log_norm)
    }
    fn label(&self) -> String {
        format!("quadrature(nodes_per_axis={}, rel_tol={:e})", self.spec.nodes_per_axis, self.spec.rel_tol)
    }
}

/// Norms of a set of multi-indices at one `N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormTable {
    pub model: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub spec: QuadratureSpec,
    pub entries: BTreeMap<Vec<i64>, NormEntry>,
}

impl NormTable {
    /// Integrates every `α` in parallel.
    pub fn build(model: &ToricModel, n: u32, alphas: &[Vec<i64>], spec: &QuadratureSpec) -> Result<Self> {
        let norms = QuadratureNorms::new(model.clone(), spec.clone());
        // settle the calibration before fanning out
        norms.calibration_constants(n)?;
        let entries: Vec<(Vec<i64>, NormEntry)> =
            alphas.par_iter().map(|a| Ok((a.clone(), norms.entry(a, n)?))).collect::<Result<_>>()?;
        Ok(NormTable { model: model.name().to_string(), n, spec: spec.clone(), entries: entries.into_iter().collect() })
    }

    /// All `α ∈ N P ∩ Z^m` with `|α| <= max_abs` (nonnegative coordinates).
    pub fn lattice_points(model: &ToricModel, n: u32, max_abs: i64) -> Vec<Vec<i64>> {
        let m = model.dimension();
        let poly = model.polytope();
        let mut out = Vec::new();
        let mut cur = vec![0i64; m];
        fn rec(j: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>, ok: &dyn Fn(&[i64]) -> bool) {
            if j == cur.len() {
                if ok(cur) {
                    out.push(cur.clone());
                }
                return;
            }
            for v in 0..=left {
                cur[j] = v;
                rec(j + 1, left - v, cur, out, ok);
            }
            cur[j] = 0;
        }
        rec(0, max_abs, &mut cur, &mut out, &|a| poly.contains_lattice(a, n));
        out
    }

    /// Largest `rel_error` in the table.
    pub fn max_rel_error(&self) -> f64 {
        self.entries.values().map(|e| e.rel_error).fold(0.0, f64::max)
    }

    /// `# {json header}` then `alpha_1,…,alpha_m,log_norm,est_error` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::json!({ "model": self.model, "N": self.n, "spec": self.spec });
        writeln!(w, "# {header}")?;
        let m = self.entries.keys().next().map_or(0, |a| a.len());
        let mut csv = csv::Writer::from_writer(w);
        let mut cols: Vec<String> = (1..=m).map(|j| format!("alpha_{j}")).collect();
        cols.extend(["log_norm".into(), "est_error".into()]);
        csv.write_record(&cols).map_err(csv_err)?;
        for (a, e) in &self.entries {
            let mut row: Vec<String> = a.iter().map(|v| v.to_string()).collect();
            row.push(format!("{:e}", e.log_norm));
            row.push(format!("{:e}", e.est_error()));
            csv.write_record(&row).map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    }
}

pub fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("CSV: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn spec_examples() {
        let bf = ToricModel::bargmann_fock(1);
        let e = monomial_norm(&bf, 1, &[0], &spec()).unwrap();
        assert!(e.log_norm.abs() < 1e-10);
        let ball = ToricModel::bergman_ball(1);
        let e = monomial_norm(&ball, 3, &[1], &spec()).unwrap();
        assert!((e.norm() - 1.0 / 6.0).abs() < 1e-10);
        let fs = ToricModel::fubini_study(1);
        let e = monomial_norm(&fs, 2, &[1], &spec()).unwrap();
        assert!((e.norm() - 1.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn calibration_is_trivial_for_builtins() {
        for m in [ToricModel::bargmann_fock(1), ToricModel::fubini_study(1), ToricModel::bergman_ball(1)] {
            let q = QuadratureNorms::new(m, spec());
            let c = q.calibration_constants(5).unwrap();
            assert!((c[0] - 1.0).abs() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn uncalibrated_quadrature_matches_beta_integral() {
        let fs = ToricModel::fubini_study(2);
        let s = QuadratureSpec { calibration_constant: Some(1.0), ..spec() };
        let e = monomial_norm(&fs, 4, &[1, 2], &s).unwrap();
        let exact = fs.closed_form_log_norm(&[1, 2], 4).unwrap();
        assert!((e.log_norm - exact).abs() < 1e-10, "{} vs {exact}", e.log_norm);
    }

    #[test]
    fn ball_divergence_is_reported() {
        let ball = ToricModel::bergman_ball(1);
        let err = monomial_norm(&ball, 1, &[0], &spec()).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err:?}");
    }

    #[test]
    fn out_of_polytope_alpha_rejected() {
        let fs = ToricModel::fubini_study(1);
        assert!(matches!(monomial_norm(&fs, 2, &[3], &spec()), Err(Error::Domain(_))));
    }

    #[test]
    fn table_and_csv() {
        let fs = ToricModel::fubini_study(1);
        let alphas = NormTable::lattice_points(&fs, 4, 10);
        assert_eq!(alphas.len(), 5);
        let t = NormTable::build(&fs, 4, &alphas, &spec()).unwrap();
        assert!(t.max_rel_error() <= 1e-10);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# {"));
        assert_eq!(text.lines().count(), 7);
    }
}
