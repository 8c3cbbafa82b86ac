use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Highest derivative order carried by a [`TestFunction`].
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// A smooth test function with symbolic derivatives up to order 4 and an
/// optional compact support box.
///
/// Outside the open support box both the value and every derivative are 0.
#[derive(Clone)]
pub struct TestFunction {
    arity: usize,
    tag: String,
    expr: Expr,
    derivatives: BTreeMap<Vec<usize>, Expr>,
    support: Option<Vec<(f64, f64)>>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("arity", &self.arity)
            .field("tag", &self.tag)
            .field("support", &self.support)
            .finish()
    }
}

/// Variable names accepted in test-function expressions of a given arity.
/// Every listed name maps onto coordinate `index % arity` of its group.
fn variable_groups(arity: usize) -> Vec<Vec<String>> {
    let mut groups =
        vec![(1..=arity).map(|j| format!("t{j}")).collect::<Vec<_>>(), (1..=arity).map(|j| format!("x{j}")).collect()];
    match arity {
        1 => {
            groups.push(vec!["t".into()]);
            groups.push(vec!["x".into()]);
            groups.push(vec!["s".into()]);
        }
        2 => groups.push(vec!["s".into(), "t".into()]),
        _ => {}
    }
    groups
}

fn parse_in_arity(src: &str, arity: usize) -> Result<Expr> {
    let groups = variable_groups(arity);
    let flat: Vec<&str> = groups.iter().flatten().map(String::as_str).collect();
    let index: Vec<usize> = groups.iter().flat_map(|g| (0..g.len()).collect::<Vec<_>>()).collect();
    let e = Expr::parse(src, &flat)?;
    Ok(remap(e, &index))
}

fn remap(e: Expr, index: &[usize]) -> Expr {
    match e {
        Expr::Var(i) => Expr::Var(index[i]),
        Expr::Const(c) => Expr::Const(c),
        Expr::Neg(a) => Expr::Neg(Box::new(remap(*a, index))),
        Expr::Call(f, a) => Expr::Call(f, Box::new(remap(*a, index))),
        Expr::Add(a, b) => Expr::Add(Box::new(remap(*a, index)), Box::new(remap(*b, index))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(remap(*a, index)), Box::new(remap(*b, index))),
        Expr::Mul(a, b) => Expr::Mul(Box::new(remap(*a, index)), Box::new(remap(*b, index))),
        Expr::Div(a, b) => Expr::Div(Box::new(remap(*a, index)), Box::new(remap(*b, index))),
        Expr::Pow(a, b) => Expr::Pow(Box::new(remap(*a, index)), Box::new(remap(*b, index))),
    }
}

/// All multi-indices (as per-variable counts) of total order `1..=max`.
fn multi_indices(arity: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; arity];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            if cur.iter().sum::<usize>() > 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            rec(pos + 1, left - k, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, max, &mut current, &mut out);
    out.sort_by_key(|c| c.iter().sum::<usize>());
    out
}

impl TestFunction {
    /// Builds a test function from expression text. Variables: `t`/`x`/`s` in
    /// one dimension; `s, t` or `t1, t2` / `x1, x2` in two; `t1..tm` or `x1..xm` in general.
    pub fn from_expression(src: &str, arity: usize, support: Option<Vec<(f64, f64)>>) -> Result<Self> {
        Self::build(src.to_string(), parse_in_arity(src, arity)?, arity, support)
    }

    fn build(tag: String, expr: Expr, arity: usize, support: Option<Vec<(f64, f64)>>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("test function arity must be positive"));
        }
        if expr.arity() > arity {
            return Err(Error::invalid(format!("expression uses {} variables, arity is {arity}", expr.arity())));
        }
        if let Some(s) = &support {
            if s.len() != arity || s.iter().any(|(lo, hi)| !(lo < hi)) {
                return Err(Error::invalid("support box must have one increasing interval per coordinate"));
            }
        }
        let mut derivatives: BTreeMap<Vec<usize>, Expr> = BTreeMap::new();
        for idx in multi_indices(arity, MAX_DERIVATIVE_ORDER) {
            // differentiate the already-computed lower derivative
            let j = idx.iter().position(|&k| k > 0).expect("nonzero multi-index");
            let mut lower = idx.clone();
            lower[j] -= 1;
            let base = if lower.iter().all(|&k| k == 0) { expr.clone() } else { derivatives[&lower].clone() };
            derivatives.insert(idx, base.diff(j));
        }
        let f = TestFunction { arity, tag, expr, derivatives, support };
        f.self_check()?;
        Ok(f)
    }

    /// Compares every symbolic derivative with a central difference of the
    /// next-lower derivative at a few sample points.
    fn self_check(&self) -> Result<()> {
        for point in self.sample_points() {
            for (idx, d) in &self.derivatives {
                let j = idx.iter().position(|&k| k > 0).unwrap();
                let mut lower = idx.clone();
                lower[j] -= 1;
                let lower_expr = if lower.iter().all(|&k| k == 0) { &self.expr } else { &self.derivatives[&lower] };
                let h = 1e-4 * point[j].abs().max(1.0);
                let mut p = point.clone();
                p[j] += h;
                let fp = lower_expr.eval(&p);
                p[j] -= 2.0 * h;
                let fm = lower_expr.eval(&p);
                let fd = (fp - fm) / (2.0 * h);
                let exact = d.eval(&point);
                let scale = exact.abs().max(lower_expr.eval(&point).abs()).max(1.0);
                if !(fd.is_finite() && exact.is_finite()) {
                    continue;
                }
                if (fd - exact).abs() > 1e-5 * scale {
                    return Err(Error::NumericalInstability(format!(
                        "derivative {idx:?} of '{}' disagrees with finite differences at {point:?}: {exact} vs {fd}",
                        self.tag
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample_points(&self) -> Vec<Vec<f64>> {
        let axis: Vec<Vec<f64>> = (0..self.arity)
            .map(|j| match &self.support {
                Some(s) => {
                    let (lo, hi) = s[j];
                    let c = 0.5 * (lo + hi);
                    let w = 0.5 * (hi - lo);
                    vec![c - 0.37 * w, c + 0.21 * w]
                }
                None => vec![0.37, 1.21],
            })
            .collect();
        (0..2).map(|k| axis.iter().map(|a| a[k]).collect()).collect()
    }

    /// `c` (any arity).
    pub fn constant(c: f64, arity: usize) -> Self {
        Self::build(format!("{c}"), Expr::Const(c), arity, None).expect("constants are valid")
    }

    /// `t^k` in one dimension, `sum_j t_j^k` otherwise.
    pub fn monomial(k: u32, arity: usize) -> Self {
        let terms: Vec<String> = (1..=arity).map(|j| format!("t{j}^{k}")).collect();
        let e = parse_in_arity(&terms.join(" + "), arity).expect("monomial parses");
        Self::build(format!("monomial-{k}"), e, arity, None).expect("monomials are valid")
    }

    /// `exp(-|t - c|^2 / (2 w^2))`.
    pub fn gaussian_bump(center: f64, width: f64, arity: usize) -> Result<Self> {
        let terms: Vec<String> = (1..=arity).map(|j| format!("(t{j} - ({center}))^2")).collect();
        let src = format!("exp(-({}) / (2 * ({width})^2))", terms.join(" + "));
        Self::build(format!("gaussian-bump:{center}:{width}"), parse_in_arity(&src, arity)?, arity, None)
    }

    /// Product of `((1 + cos(pi s)) / 2)^3` windows, `s = (t_j - c)/w`, supported on `[c-w, c+w]^m`.
    pub fn cosine_window(center: f64, half_width: f64, arity: usize) -> Result<Self> {
        let factors: Vec<String> =
            (1..=arity).map(|j| format!("((1 + cos(pi * (t{j} - ({center})) / ({half_width}))) / 2)^3")).collect();
        let support = vec![(center - half_width, center + half_width); arity];
        Self::build(
            format!("cosine-window:{center}:{half_width}"),
            parse_in_arity(&factors.join(" * "), arity)?,
            arity,
            Some(support),
        )
    }

    /// `C^∞` bump: product of `exp(1 - 1/(1 - s^2))`, `s = (t_j - c)/w`, supported on `[c-w, c+w]^m`.
    pub fn smooth_bump(center: f64, half_width: f64, arity: usize) -> Result<Self> {
        let factors: Vec<String> =
            (1..=arity).map(|j| format!("exp(1 - 1 / (1 - ((t{j} - ({center})) / ({half_width}))^2))")).collect();
        let support = vec![(center - half_width, center + half_width); arity];
        Self::build(
            format!("smooth-bump:{center}:{half_width}"),
            parse_in_arity(&factors.join(" * "), arity)?,
            arity,
            Some(support),
        )
    }

    /// Parses a function spec: a tag (`monomial-<k>`, `gaussian-bump[:c:w]`,
    /// `cosine-window[:c:w]`, `smooth-bump[:c:w]`) or an expression.
    pub fn from_spec(spec: &str, arity: usize) -> Result<Self> {
        let spec = spec.trim();
        let params = |rest: &str, defaults: (f64, f64)| -> Result<(f64, f64)> {
            if rest.is_empty() {
                return Ok(defaults);
            }
            let parts: Vec<&str> = rest.trim_start_matches(':').split(':').collect();
            if parts.len() != 2 {
                return Err(Error::invalid(format!("expected '<tag>:<center>:<width>', got '{spec}'")));
            }
            let p = |s: &str| s.parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{s}' in '{spec}'")));
            Ok((p(parts[0])?, p(parts[1])?))
        };
        if let Some(k) = spec.strip_prefix("monomial-") {
            let k: u32 = k.parse().map_err(|_| Error::invalid(format!("bad monomial degree in '{spec}'")))?;
            return Ok(Self::monomial(k, arity));
        }
        if let Some(rest) = spec.strip_prefix("gaussian-bump") {
            let (c, w) = params(rest, (1.0, 0.5))?;
            return Self::gaussian_bump(c, w, arity);
        }
        if let Some(rest) = spec.strip_prefix("cosine-window") {
            let (c, w) = params(rest, (1.0, 1.0))?;
            return Self::cosine_window(c, w, arity);
        }
        if let Some(rest) = spec.strip_prefix("smooth-bump") {
            let (c, w) = params(rest, (1.0, 1.0))?;
            return Self::smooth_bump(c, w, arity);
        }
        Self::from_expression(spec, arity, None)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn support(&self) -> Option<&[(f64, f64)]> {
        self.support.as_deref()
    }

    pub fn has_compact_support(&self) -> bool {
        self.support.is_some()
    }

    /// Whether `x` lies in the open support box (always true without one).
    pub fn in_support(&self, x: &[f64]) -> bool {
        match &self.support {
            None => true,
            Some(s) => s.iter().zip(x).all(|((lo, hi), v)| v > lo && v < hi),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if !self.in_support(x) {
            return 0.0;
        }
        self.expr.eval(x)
    }

    /// Mixed partial derivative; `counts[j]` derivatives in coordinate `j`.
    pub fn derivative(&self, counts: &[usize], x: &[f64]) -> Result<f64> {
        let e = self.derivative_expr(counts)?;
        if !self.in_support(x) {
            return Ok(0.0);
        }
        Ok(e.eval(x))
    }

    fn derivative_expr(&self, counts: &[usize]) -> Result<&Expr> {
        if counts.len() != self.arity {
            return Err(Error::invalid(format!("multi-index {counts:?} does not match arity {}", self.arity)));
        }
        if counts.iter().all(|&k| k == 0) {
            return Ok(&self.expr);
        }
        self.derivatives.get(counts).ok_or_else(|| {
            Error::invalid(format!("derivative order {} exceeds {MAX_DERIVATIVE_ORDER}", counts.iter().sum::<usize>()))
        })
    }

    /// Second partial `f_ij` as a function in its own right (derivatives up
    /// to order 2 remain available on it).
    pub fn derivative_function(&self, counts: &[usize]) -> Result<TestFunction> {
        let e = self.derivative_expr(counts)?.clone();
        let tag = format!("d{counts:?}[{}]", self.tag);
        Self::build(tag, e, self.arity, self.support.clone())
    }

    /// Hessian `(f_ij(x))`.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.arity;
        let mut h = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut c = vec![0; m];
                c[i] += 1;
                c[j] += 1;
                h[(i, j)] = self.derivative(&c, x)?;
            }
        }
        Ok(h)
    }

    /// True when every third derivative vanishes identically (symbolically,
    /// or numerically at a spread of points).
    pub fn is_quadratic(&self) -> bool {
        if self.support.is_some() {
            return false;
        }
        let probes: Vec<Vec<f64>> =
            [0.13, 0.9, 2.7, 11.0].iter().map(|&v| (0..self.arity).map(|j| v + 0.31 * j as f64).collect()).collect();
        self.derivatives
            .iter()
            .filter(|(idx, _)| idx.iter().sum::<usize>() == 3)
            .all(|(_, e)| e.is_zero() || probes.iter().all(|p| e.eval(p) == 0.0))
    }
}
