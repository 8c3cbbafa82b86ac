use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::polytope::{Facet, Polytope};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::special::{ln_factorial, ln_gamma, xlogx};

/// Admissible region for the logarithmic coordinate `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoDomain {
    /// All of `R^m`.
    All,
    /// `sum_j exp(rho_j) < 1` (the unit ball in `|z|^2` coordinates).
    SimplexExp,
}

impl RhoDomain {
    fn check(self, rho: &[f64]) -> Result<()> {
        if let Some(j) = rho.iter().position(|r| !r.is_finite()) {
            return Err(Error::domain(format!("rho[{j}] = {} is not finite", rho[j])));
        }
        match self {
            RhoDomain::All => Ok(()),
            RhoDomain::SimplexExp => {
                let s: f64 = rho.iter().map(|r| r.exp()).sum();
                if s < 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("rho = {rho:?} violates sum exp(rho_j) < 1 (sum = {s})")))
                }
            }
        }
    }
}

/// User-supplied model: a Kähler potential in the expression grammar.
/// Gradient and Hessian are obtained by symbolic differentiation of `phi`.
#[derive(Debug, Clone)]
pub struct CustomModel {
    dimension: usize,
    source: String,
    phi: Expr,
    grad: Vec<Expr>,
    hess: Vec<Vec<Expr>>,
    domain: RhoDomain,
}

/// JSON document accepted by [`ToricModel::from_json`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CustomModelDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub dimension: usize,
    pub phi: String,
    #[serde(default = "default_domain")]
    pub rho_domain: RhoDomain,
    pub facets: Vec<Facet>,
}

fn default_domain() -> RhoDomain {
    RhoDomain::All
}

#[derive(Debug, Clone)]
enum Kind {
    BargmannFock,
    FubiniStudy,
    BergmanBall,
    Product(Vec<ToricModel>),
    Custom(Box<CustomModel>),
}

/// Coarse view of a model's construction, for code that specializes on it.
pub(crate) enum Family {
    BargmannFock,
    FubiniStudy,
    Ball,
    Product,
    Custom(RhoDomain),
}

/// A toric Kähler model: potential `phi(rho)`, its moment polytope, and the
/// closed forms that are known for the built-in families.
#[derive(Debug, Clone)]
pub struct ToricModel {
    name: String,
    dimension: usize,
    polytope: Polytope,
    kind: Kind,
}

/// Names accepted by [`ToricModel::from_name`] (plus `product:<a>x<b>`).
pub const BUILTIN_NAMES: &[&str] =
    &["bargmann-fock", "fubini-study-cp1", "bergman-ball-1", "product:fubini-study-cp1xfubini-study-cp1"];

impl ToricModel {
    /// `C^m` with the Euclidean potential `phi = sum exp(rho_j)`.
    pub fn bargmann_fock(m: usize) -> Self {
        let name = if m == 1 { "bargmann-fock".to_string() } else { format!("bargmann-fock-{m}") };
        ToricModel { name, dimension: m, polytope: Polytope::orthant(m), kind: Kind::BargmannFock }
    }

    /// `CP^m` with `phi = log(1 + sum exp(rho_j))`.
    pub fn fubini_study(m: usize) -> Self {
        ToricModel {
            name: format!("fubini-study-cp{m}"),
            dimension: m,
            polytope: Polytope::simplex(m),
            kind: Kind::FubiniStudy,
        }
    }

    /// Unit ball `B^m` with `phi = -log(1 - sum exp(rho_j))`.
    pub fn bergman_ball(m: usize) -> Self {
        ToricModel {
            name: format!("bergman-ball-{m}"),
            dimension: m,
            polytope: Polytope::orthant(m),
            kind: Kind::BergmanBall,
        }
    }

    pub fn product(factors: Vec<ToricModel>) -> Self {
        let mut flat = Vec::new();
        for f in factors {
            match f.kind {
                Kind::Product(inner) => flat.extend(inner),
                _ => flat.push(f),
            }
        }
        let name = format!("product:{}", flat.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("x"));
        let polys: Vec<&Polytope> = flat.iter().map(|f| &f.polytope).collect();
        let polytope = Polytope::product(&polys);
        let dimension = polytope.dimension();
        ToricModel { name, dimension, polytope, kind: Kind::Product(flat) }
    }

    /// Registry lookup. Accepts `bargmann-fock[-m]`, `fubini-study-cp<m>`,
    /// `bergman-ball-<m>` and `product:<a>x<b>[x<c>...]`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("product:") {
            let parts: Vec<&str> = rest.split('x').collect();
            if parts.len() < 2 {
                return Err(Error::invalid(format!("product model '{name}' needs at least two factors")));
            }
            let factors = parts.iter().map(|p| Self::from_name(p)).collect::<Result<Vec<_>>>()?;
            return Ok(Self::product(factors));
        }
        let dim = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .ok()
                .filter(|&m| (1..=16).contains(&m))
                .ok_or_else(|| Error::invalid(format!("bad dimension in model name '{name}'")))
        };
        if name == "bargmann-fock" {
            return Ok(Self::bargmann_fock(1));
        }
        if let Some(m) = name.strip_prefix("bargmann-fock-") {
            return Ok(Self::bargmann_fock(dim(m)?));
        }
        if let Some(m) = name.strip_prefix("fubini-study-cp") {
            return Ok(Self::fubini_study(dim(m)?));
        }
        if let Some(m) = name.strip_prefix("bergman-ball-") {
            return Ok(Self::bergman_ball(dim(m)?));
        }
        Err(Error::invalid(format!("unknown model '{name}' (known: {})", BUILTIN_NAMES.join(", "))))
    }

    /// Builds a custom model from its JSON description.
    pub fn from_json(doc: &str) -> Result<Self> {
        let doc: CustomModelDoc = serde_json::from_str(doc)?;
        Self::custom(doc)
    }

    pub fn custom(doc: CustomModelDoc) -> Result<Self> {
        let m = doc.dimension;
        if m == 0 || m > 3 {
            return Err(Error::invalid("custom models support dimension 1..=3"));
        }
        let names = rho_variable_names(m);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let phi = Expr::parse(&doc.phi, &refs)?;
        let phi = rename_aliases(phi, m);
        let grad: Vec<Expr> = (0..m).map(|j| phi.diff(j)).collect();
        let hess: Vec<Vec<Expr>> = (0..m).map(|i| (0..m).map(|j| grad[i].diff(j)).collect()).collect();
        let polytope = Polytope::new(m, doc.facets)?;
        let model = ToricModel {
            name: doc.name.unwrap_or_else(|| format!("custom:{}", doc.phi)),
            dimension: m,
            polytope,
            kind: Kind::Custom(Box::new(CustomModel {
                dimension: m,
                source: doc.phi,
                phi,
                grad,
                hess,
                domain: doc.rho_domain,
            })),
        };
        model.spot_check()?;
        Ok(model)
    }

    /// Sampled checks of strict convexity and of the moment map landing in
    /// the polytope interior.
    fn spot_check(&self) -> Result<()> {
        for rho in self.sample_rhos() {
            let h = self.hess_phi(&rho)?;
            if h.clone().cholesky().is_none() {
                return Err(Error::invalid(format!(
                    "phi is not strictly convex at rho = {rho:?} (Hessian not positive definite)"
                )));
            }
            let x = self.moment_map(&rho)?;
            if !self.polytope.contains_interior(&x) {
                return Err(Error::invalid(format!(
                    "moment map sends rho = {rho:?} to {x:?}, outside the polytope interior"
                )));
            }
        }
        Ok(())
    }

    fn sample_rhos(&self) -> Vec<Vec<f64>> {
        let m = self.dimension;
        let levels: Vec<f64> = match self.rho_domain_kind() {
            Some(RhoDomain::SimplexExp) => [0.05, 0.3, 0.8].iter().map(|s| (s / m as f64).ln()).collect(),
            _ => vec![-2.0, -0.5, 0.0, 0.7, 2.0],
        };
        let mut out = Vec::new();
        for (i, &a) in levels.iter().enumerate() {
            let mut rho = vec![a; m];
            if m > 1 {
                rho[0] = levels[(i + 1) % levels.len()];
            }
            out.push(rho);
        }
        out
    }

    fn rho_domain_kind(&self) -> Option<RhoDomain> {
        match &self.kind {
            Kind::BargmannFock | Kind::FubiniStudy => Some(RhoDomain::All),
            Kind::BergmanBall => Some(RhoDomain::SimplexExp),
            Kind::Custom(c) => Some(c.domain),
            Kind::Product(_) => None,
        }
    }

    /// Domain of `rho` for non-product models; `None` for products (each
    /// factor carries its own).
    pub fn rho_domain(&self) -> Option<RhoDomain> {
        self.rho_domain_kind()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    /// Factors of a product model (a single-element slice otherwise).
    pub fn factors(&self) -> &[ToricModel] {
        match &self.kind {
            Kind::Product(f) => f,
            _ => std::slice::from_ref(self),
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self.kind, Kind::Product(_))
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, Kind::Custom(_))
    }

    /// Phi source text for custom models.
    pub fn custom_source(&self) -> Option<&str> {
        match &self.kind {
            Kind::Custom(c) => Some(&c.source),
            _ => None,
        }
    }

    pub fn check_rho(&self, rho: &[f64]) -> Result<()> {
        if rho.len() != self.dimension {
            return Err(Error::domain(format!("rho has length {}, model dimension is {}", rho.len(), self.dimension)));
        }
        match &self.kind {
            Kind::Product(fs) => {
                let mut off = 0;
                for f in fs {
                    f.check_rho(&rho[off..off + f.dimension])?;
                    off += f.dimension;
                }
                Ok(())
            }
            _ => self.rho_domain_kind().expect("non-product").check(rho),
        }
    }

    /// Kähler potential `phi(rho)`.
    pub fn phi(&self, rho: &[f64]) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(self.phi_unchecked(rho))
    }

    pub(crate) fn phi_unchecked(&self, rho: &[f64]) -> f64 {
        match &self.kind {
            Kind::BargmannFock => rho.iter().map(|r| r.exp()).sum(),
            Kind::FubiniStudy => rho.iter().map(|r| r.exp()).sum::<f64>().ln_1p(),
            Kind::BergmanBall => -(-rho.iter().map(|r| r.exp()).sum::<f64>()).ln_1p(),
            Kind::Product(fs) => {
                let mut off = 0;
                fs.iter()
                    .map(|f| {
                        let v = f.phi_unchecked(&rho[off..off + f.dimension]);
                        off += f.dimension;
                        v
                    })
                    .sum()
            }
            Kind::Custom(c) => c.phi.eval(rho),
        }
    }

    /// Moment map `x = grad_rho phi(rho)`.
    pub fn moment_map(&self, rho: &[f64]) -> Result<Vec<f64>> {
        self.check_rho(rho)?;
        Ok(self.grad_phi_unchecked(rho))
    }

    pub(crate) fn grad_phi_unchecked(&self, rho: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::BargmannFock => rho.iter().map(|r| r.exp()).collect(),
            Kind::FubiniStudy => {
                let t: Vec<f64> = rho.iter().map(|r| r.exp()).collect();
                let denom = 1.0 + t.iter().sum::<f64>();
                t.iter().map(|tj| tj / denom).collect()
            }
            Kind::BergmanBall => {
                let t: Vec<f64> = rho.iter().map(|r| r.exp()).collect();
                let denom = -(t.iter().sum::<f64>() - 1.0);
                t.iter().map(|tj| tj / denom).collect()
            }
            Kind::Product(fs) => {
                let mut out = Vec::with_capacity(self.dimension);
                let mut off = 0;
                for f in fs {
                    out.extend(f.grad_phi_unchecked(&rho[off..off + f.dimension]));
                    off += f.dimension;
                }
                out
            }
            Kind::Custom(c) => c.grad.iter().map(|g| g.eval(rho)).collect(),
        }
    }

    /// Hessian `H_phi(rho)` in logarithmic coordinates.
    pub fn hess_phi(&self, rho: &[f64]) -> Result<DMatrix<f64>> {
        self.check_rho(rho)?;
        Ok(self.hess_phi_unchecked(rho))
    }

    pub(crate) fn hess_phi_unchecked(&self, rho: &[f64]) -> DMatrix<f64> {
        let m = self.dimension;
        match &self.kind {
            Kind::BargmannFock => DMatrix::from_fn(m, m, |i, j| if i == j { rho[i].exp() } else { 0.0 }),
            Kind::FubiniStudy | Kind::BergmanBall => {
                let t: Vec<f64> = rho.iter().map(|r| r.exp()).collect();
                let s: f64 = t.iter().sum();
                // FS: t_i d_ij/(1+T) - t_i t_j/(1+T)^2; ball: t_i d_ij/(1-T) + t_i t_j/(1-T)^2
                let (d, sign) = if matches!(self.kind, Kind::FubiniStudy) { (1.0 + s, -1.0) } else { (1.0 - s, 1.0) };
                DMatrix::from_fn(m, m, |i, j| {
                    let diag = if i == j { t[i] / d } else { 0.0 };
                    diag + sign * t[i] * t[j] / (d * d)
                })
            }
            Kind::Product(fs) => {
                let mut h = DMatrix::zeros(m, m);
                let mut off = 0;
                for f in fs {
                    let k = f.dimension;
                    h.view_mut((off, off), (k, k)).copy_from(&f.hess_phi_unchecked(&rho[off..off + k]));
                    off += k;
                }
                h
            }
            Kind::Custom(c) => DMatrix::from_fn(m, m, |i, j| c.hess[i][j].eval(rho)),
        }
    }

    /// `log det H_phi(rho)`, analytic for the built-in families.
    pub fn log_det_hess_phi(&self, rho: &[f64]) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(self.log_det_hess_unchecked(rho))
    }

    pub(crate) fn log_det_hess_unchecked(&self, rho: &[f64]) -> f64 {
        let m = self.dimension as f64;
        match &self.kind {
            Kind::BargmannFock => rho.iter().sum(),
            Kind::FubiniStudy => {
                let s: f64 = rho.iter().map(|r| r.exp()).sum();
                rho.iter().sum::<f64>() - (m + 1.0) * s.ln_1p()
            }
            Kind::BergmanBall => {
                let s: f64 = rho.iter().map(|r| r.exp()).sum();
                rho.iter().sum::<f64>() - (m + 1.0) * (-s).ln_1p()
            }
            Kind::Product(fs) => {
                let mut off = 0;
                fs.iter()
                    .map(|f| {
                        let v = f.log_det_hess_unchecked(&rho[off..off + f.dimension]);
                        off += f.dimension;
                        v
                    })
                    .sum()
            }
            Kind::Custom(c) => {
                let h = DMatrix::from_fn(c.dimension, c.dimension, |i, j| c.hess[i][j].eval(rho));
                h.determinant().ln()
            }
        }
    }

    /// Closed-form symplectic potential `u(x)` where known.
    pub fn closed_symplectic_potential(&self, x: &[f64]) -> Option<f64> {
        let s: f64 = x.iter().sum();
        let base: f64 = x.iter().copied().map(xlogx).sum();
        match &self.kind {
            Kind::BargmannFock => Some(base - s),
            Kind::FubiniStudy => Some(base + xlogx(1.0 - s)),
            Kind::BergmanBall => Some(base - xlogx(1.0 + s)),
            Kind::Product(fs) => {
                let mut off = 0;
                let mut total = 0.0;
                for f in fs {
                    total += f.closed_symplectic_potential(&x[off..off + f.dimension])?;
                    off += f.dimension;
                }
                Some(total)
            }
            Kind::Custom(_) => None,
        }
    }

    /// Closed-form `grad u(x)`, which equals the dual coordinate `rho(x)`.
    pub fn closed_rho(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s: f64 = x.iter().sum();
        match &self.kind {
            Kind::BargmannFock => Some(x.iter().map(|v| v.ln()).collect()),
            Kind::FubiniStudy => Some(x.iter().map(|v| v.ln() - (1.0 - s).ln()).collect()),
            Kind::BergmanBall => Some(x.iter().map(|v| v.ln() - s.ln_1p()).collect()),
            Kind::Product(fs) => {
                let mut out = Vec::with_capacity(self.dimension);
                let mut off = 0;
                for f in fs {
                    out.extend(f.closed_rho(&x[off..off + f.dimension])?);
                    off += f.dimension;
                }
                Some(out)
            }
            Kind::Custom(_) => None,
        }
    }

    /// Closed-form `G_phi(x) = Hess_x u(x)`.
    pub fn closed_hess_u(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let m = self.dimension;
        let s: f64 = x.iter().sum();
        let diag = |i: usize, j: usize| if i == j { 1.0 / x[i] } else { 0.0 };
        match &self.kind {
            Kind::BargmannFock => Some(DMatrix::from_fn(m, m, diag)),
            Kind::FubiniStudy => Some(DMatrix::from_fn(m, m, |i, j| diag(i, j) + 1.0 / (1.0 - s))),
            Kind::BergmanBall => Some(DMatrix::from_fn(m, m, |i, j| diag(i, j) - 1.0 / (1.0 + s))),
            Kind::Product(fs) => {
                let mut g = DMatrix::zeros(m, m);
                let mut off = 0;
                for f in fs {
                    let k = f.dimension;
                    g.view_mut((off, off), (k, k)).copy_from(&f.closed_hess_u(&x[off..off + k])?);
                    off += k;
                }
                Some(g)
            }
            Kind::Custom(_) => None,
        }
    }

    /// Starting point for Legendre inversion: the exact inverse for built-ins,
    /// the origin for custom models.
    pub fn initial_rho(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Custom(c) => match c.domain {
                RhoDomain::All => vec![0.0; self.dimension],
                RhoDomain::SimplexExp => vec![(0.5 / self.dimension as f64).ln(); self.dimension],
            },
            Kind::Product(fs) => {
                let mut out = Vec::with_capacity(self.dimension);
                let mut off = 0;
                for f in fs {
                    out.extend(f.initial_rho(&x[off..off + f.dimension]));
                    off += f.dimension;
                }
                out
            }
            _ => self.closed_rho(x).expect("built-in models have closed-form rho"),
        }
    }

    /// Smallest tensor power for which every monomial norm is finite.
    pub fn min_power(&self) -> u32 {
        match &self.kind {
            Kind::BergmanBall => self.dimension as u32 + 1,
            Kind::Product(fs) => fs.iter().map(|f| f.min_power()).max().unwrap_or(1),
            _ => 1,
        }
    }

    /// Closed-form `log ||z^alpha||^2_{h^N}` (torus volume factor omitted).
    pub fn closed_form_log_norm(&self, alpha: &[i64], n: u32) -> Option<f64> {
        if alpha.len() != self.dimension || alpha.iter().any(|&a| a < 0) || !self.polytope.contains_lattice(alpha, n) {
            return None;
        }
        let nf = n as f64;
        let m = self.dimension as f64;
        let abs: i64 = alpha.iter().sum();
        let fact: f64 = alpha.iter().map(|&a| ln_factorial(a as u64)).sum();
        match &self.kind {
            Kind::BargmannFock => Some(fact - (m + abs as f64) * nf.ln()),
            Kind::FubiniStudy => {
                Some(fact + ln_factorial((n as i64 - abs) as u64) - ln_factorial(n as u64 + self.dimension as u64))
            }
            Kind::BergmanBall => {
                if n < self.min_power() {
                    return None;
                }
                Some(fact + ln_gamma(nf - m) - ln_gamma(nf + abs as f64))
            }
            Kind::Product(fs) => {
                let mut off = 0;
                let mut total = 0.0;
                for f in fs {
                    total += f.closed_form_log_norm(&alpha[off..off + f.dimension], n)?;
                    off += f.dimension;
                }
                Some(total)
            }
            Kind::Custom(_) => None,
        }
    }

    /// Closed-form `log B_{h^N}(z, z)` as the sum of the monomial series,
    /// i.e. the value the lattice sum converges to.
    pub fn closed_form_log_kernel_diag(&self, n: u32) -> Option<f64> {
        let nf = n as f64;
        let m = self.dimension as f64;
        match &self.kind {
            Kind::BargmannFock => Some(m * nf.ln()),
            Kind::FubiniStudy => Some(ln_factorial(n as u64 + self.dimension as u64) - ln_factorial(n as u64)),
            Kind::BergmanBall => (n >= self.min_power()).then(|| ln_gamma(nf) - ln_gamma(nf - m)),
            Kind::Product(fs) => fs.iter().map(|f| f.closed_form_log_kernel_diag(n)).sum(),
            Kind::Custom(_) => None,
        }
    }

    /// The diagonal kernel value quoted for the ball in the literature,
    /// `(N+m)!/N!`. For the other families it coincides with the series sum.
    pub fn stated_log_kernel_diag(&self, n: u32) -> Option<f64> {
        match &self.kind {
            Kind::BergmanBall => Some(ln_factorial(n as u64 + self.dimension as u64) - ln_factorial(n as u64)),
            Kind::Product(fs) => fs.iter().map(|f| f.stated_log_kernel_diag(n)).sum(),
            _ => self.closed_form_log_kernel_diag(n),
        }
    }

    /// A convenient interior point.
    pub fn reference_point(&self) -> Vec<f64> {
        match &self.kind {
            Kind::BargmannFock | Kind::BergmanBall => vec![1.0; self.dimension],
            Kind::FubiniStudy => vec![1.0 / (self.dimension as f64 + 1.0); self.dimension],
            Kind::Product(fs) => fs.iter().flat_map(|f| f.reference_point()).collect(),
            Kind::Custom(_) => {
                let rho = self.initial_rho(&[]);
                self.grad_phi_unchecked(&rho)
            }
        }
    }

    pub(crate) fn family(&self) -> Family {
        match &self.kind {
            Kind::BargmannFock => Family::BargmannFock,
            Kind::FubiniStudy => Family::FubiniStudy,
            Kind::BergmanBall => Family::Ball,
            Kind::Product(_) => Family::Product,
            Kind::Custom(c) => Family::Custom(c.domain),
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.kind, Kind::BergmanBall)
    }

    pub fn is_bargmann_fock(&self) -> bool {
        match &self.kind {
            Kind::BargmannFock => true,
            Kind::Product(fs) => fs.iter().all(|f| f.is_bargmann_fock()),
            _ => false,
        }
    }
}

fn rho_variable_names(m: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=m).map(|j| format!("r{j}")).collect();
    names.extend((1..=m).map(|j| format!("rho{j}")));
    if m == 1 {
        names.push("r".into());
        names.push("rho".into());
    }
    names
}

/// Folds the alias variables (`rho<j>`, `r`, `rho`) onto indices `0..m`.
fn rename_aliases(e: Expr, m: usize) -> Expr {
    let fix = |i: usize| {
        if i < m {
            i
        } else if i < 2 * m {
            i - m
        } else {
            0
        }
    };
    fn walk(e: Expr, fix: &dyn Fn(usize) -> usize) -> Expr {
        match e {
            Expr::Var(i) => Expr::Var(fix(i)),
            Expr::Const(c) => Expr::Const(c),
            Expr::Neg(a) => Expr::Neg(Box::new(walk(*a, fix))),
            Expr::Call(f, a) => Expr::Call(f, Box::new(walk(*a, fix))),
            Expr::Add(a, b) => Expr::Add(Box::new(walk(*a, fix)), Box::new(walk(*b, fix))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(walk(*a, fix)), Box::new(walk(*b, fix))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(walk(*a, fix)), Box::new(walk(*b, fix))),
            Expr::Div(a, b) => Expr::Div(Box::new(walk(*a, fix)), Box::new(walk(*b, fix))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(walk(*a, fix)), Box::new(walk(*b, fix))),
        }
    }
    walk(e, &fix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        for name in BUILTIN_NAMES {
            let m = ToricModel::from_name(name).unwrap();
            assert_eq!(m.name(), *name);
        }
        assert!(ToricModel::from_name("fubini-study-cp0").is_err());
        assert!(ToricModel::from_name("nope").is_err());
        let p = ToricModel::from_name("product:bargmann-fockxbergman-ball-1").unwrap();
        assert_eq!(p.dimension(), 2);
        assert_eq!(p.min_power(), 2);
    }

    #[test]
    fn moment_map_examples() {
        let bf = ToricModel::bargmann_fock(1);
        assert!((bf.moment_map(&[0.25f64.ln()]).unwrap()[0] - 0.25).abs() < 1e-15);
        let ball = ToricModel::bergman_ball(1);
        assert!((ball.moment_map(&[0.5f64.ln()]).unwrap()[0] - 1.0).abs() < 1e-15);
        let fs = ToricModel::fubini_study(1);
        assert!((fs.moment_map(&[0.0]).unwrap()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ball_domain_is_enforced() {
        let ball = ToricModel::bergman_ball(1);
        let err = ball.moment_map(&[0.1]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(err.to_string().contains("sum exp(rho_j) < 1"));
        let ball2 = ToricModel::bergman_ball(2);
        assert!(ball2.phi(&[0.6f64.ln(), 0.5f64.ln()]).is_err());
        assert!(ball2.phi(&[0.4f64.ln(), 0.5f64.ln()]).is_ok());
    }

    #[test]
    fn closed_hessians_are_inverse() {
        for model in [ToricModel::fubini_study(2), ToricModel::bergman_ball(2), ToricModel::bargmann_fock(2)] {
            let x = [0.2, 0.3];
            let rho = model.closed_rho(&x).unwrap();
            let h = model.hess_phi(&rho).unwrap();
            let g = model.closed_hess_u(&x).unwrap();
            let prod = &h * &g;
            assert!((prod - DMatrix::identity(2, 2)).abs().max() < 1e-13, "{}", model.name());
            let ld = model.log_det_hess_phi(&rho).unwrap();
            assert!((ld - h.determinant().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_model_from_json() {
        let doc = r#"{ "dimension": 1, "phi": "log(1 + exp(r1))",
                       "facets": [ {"normal": [1], "offset": 0}, {"normal": [-1], "offset": -1} ] }"#;
        let m = ToricModel::from_json(doc).unwrap();
        assert!(m.is_custom());
        assert!((m.moment_map(&[0.0]).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((m.hess_phi(&[0.0]).unwrap()[(0, 0)] - 0.25).abs() < 1e-15);
        assert!(!m.polytope().is_unbounded());
    }

    #[test]
    fn custom_model_rejects_non_convex_phi() {
        let doc = r#"{ "dimension": 1, "phi": "-r^2",
                       "facets": [ {"normal": [1], "offset": 0} ] }"#;
        assert!(ToricModel::from_json(doc).is_err());
        // convex but moment map leaves the declared polytope
        let doc = r#"{ "dimension": 1, "phi": "r^2",
                       "facets": [ {"normal": [1], "offset": 0} ] }"#;
        assert!(ToricModel::from_json(doc).unwrap_err().to_string().contains("outside"));
    }

    #[test]
    fn kernel_closed_forms() {
        let n = 7;
        assert!((ToricModel::bargmann_fock(1).closed_form_log_kernel_diag(n).unwrap().exp() - 7.0).abs() < 1e-12);
        assert!((ToricModel::fubini_study(1).closed_form_log_kernel_diag(n).unwrap().exp() - 8.0).abs() < 1e-12);
        let ball = ToricModel::bergman_ball(1);
        assert!((ball.closed_form_log_kernel_diag(n).unwrap().exp() - 6.0).abs() < 1e-12);
        assert!((ball.stated_log_kernel_diag(n).unwrap().exp() - 8.0).abs() < 1e-12);
        assert!(ball.closed_form_log_kernel_diag(1).is_none());
    }
}
