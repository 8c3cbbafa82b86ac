//! The generalized Szasz operator of a toric model.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::function::TestFunction;
use super::truncation::{LatticeProblem, TruncationPolicy};
use super::weighted_sums;
use crate::error::{Error, Result};
use crate::quadrature::{csv_err, QuadratureNorms, QuadratureSpec};
use crate::toric::{resolve_rho, ToricModel};

/// Supplies `log ||z^α||²_{h^N}`.
pub trait NormSource: Send + Sync {
    fn log_norm(&self, alpha: &[i64], n: u32) -> Result<f64>;
    fn label(&self) -> String;
}

impl<T: NormSource + ?Sized> NormSource for &T {
    fn log_norm(&self, alpha: &[i64], n: u32) -> Result<f64> {
        (**self).log_norm(alpha, n)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// Norms from the model's closed form.
pub struct ClosedFormNorms<'a>(pub &'a ToricModel);

impl NormSource for ClosedFormNorms<'_> {
    fn log_norm(&self, alpha: &[i64], n: u32) -> Result<f64> {
        self.0.closed_form_log_norm(alpha, n).ok_or_else(|| {
            Error::Dependency(format!(
                "no closed-form norm for alpha = {alpha:?}, N = {n} in model '{}'",
                self.0.name()
            ))
        })
    }
    fn label(&self) -> String {
        "closed-form".into()
    }
}

/// Every norm of `inner` multiplied by `exp(log_scale)`.
pub struct ScaledNorms<S> {
    pub inner: S,
    pub log_scale: f64,
}

impl<S: NormSource> NormSource for ScaledNorms<S> {
    fn log_norm(&self, alpha: &[i64], n: u32) -> Result<f64> {
        Ok(self.inner.log_norm(alpha, n)? + self.log_scale)
    }
    fn label(&self) -> String {
        format!("{}*exp({})", self.inner.label(), self.log_scale)
    }
}

/// Data of the symplectic side at `x`, computed once per evaluation.
struct Frame {
    rho: Vec<f64>,
    u: f64,
    x: Vec<f64>,
}

impl Frame {
    fn new(model: &ToricModel, x: &[f64]) -> Result<Self> {
        if x.len() != model.dimension() {
            return Err(Error::invalid(format!("point has dimension {}, model has {}", x.len(), model.dimension())));
        }
        let rho = resolve_rho(model, x)?;
        let u = match model.closed_symplectic_potential(x) {
            Some(u) => u,
            None => x.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>() - model.phi(&rho)?,
        };
        Ok(Frame { rho, u, x: x.to_vec() })
    }

    /// `N(u + <α/N - x, grad u>)`.
    fn exponent(&self, alpha: &[i64], n: u32) -> f64 {
        let nf = n as f64;
        let lin: f64 = alpha.iter().zip(&self.x).zip(&self.rho).map(|((&a, x), r)| (a as f64 / nf - x) * r).sum();
        nf * (self.u + lin)
    }
}

fn check_alpha(model: &ToricModel, alpha: &[i64], n: u32) -> Result<()> {
    if alpha.len() != model.dimension() || !model.polytope().contains_lattice(alpha, n) {
        return Err(Error::domain(format!("alpha = {alpha:?} is not in N P for N = {n}")));
    }
    Ok(())
}

/// `log` of the generalized weight `e^{N(u + <α/N - x, grad u>)} / ||z^α||²`.
pub fn generalized_weight(model: &ToricModel, n: u32, x: &[f64], alpha: &[i64], norms: &dyn NormSource) -> Result<f64> {
    check_alpha(model, alpha, n)?;
    let frame = Frame::new(model, x)?;
    Ok(frame.exponent(alpha, n) - norms.log_norm(alpha, n)?)
}

/// `log(|z^α|² e^{-N phi})` at `rho = rho(x)`; equals the exponent in
/// [`generalized_weight`] by Legendre duality.
pub fn kahler_side_log_term(model: &ToricModel, n: u32, x: &[f64], alpha: &[i64]) -> Result<f64> {
    let rho = resolve_rho(model, x)?;
    let dot: f64 = alpha.iter().zip(&rho).map(|(&a, r)| a as f64 * r).sum();
    Ok(dot - n as f64 * model.phi(&rho)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub alpha: Vec<i64>,
    pub log_weight: f64,
}

/// Header of a [`LatticeWeightTable`] as written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableHeader {
    #[serde(rename = "N")]
    pub n: u32,
    pub x: Vec<f64>,
    pub model: String,
    /// Kernel diagonal sum `B = Σ exp(log_weight)`.
    pub normalizer: f64,
    pub log_normalizer: f64,
    pub truncation_radius: u64,
    pub tail_bound: f64,
    pub norm_source: String,
}

/// The lattice terms of one generalized-operator evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeWeightTable {
    #[serde(flatten)]
    pub header: TableHeader,
    pub entries: Vec<WeightEntry>,
}

impl LatticeWeightTable {
    pub fn n(&self) -> u32 {
        self.header.n
    }

    pub fn normalizer(&self) -> f64 {
        self.header.normalizer
    }

    /// `|Σ exp(log_weight) / B - 1|`, recomputed from the entries.
    pub fn partition_of_unity_residual(&self) -> f64 {
        let logs: Vec<f64> = self.entries.iter().map(|e| e.log_weight).collect();
        let lse = crate::special::log_sum_exp(&logs);
        ((lse - self.header.log_normalizer).exp() - 1.0).abs()
    }

    /// Normalized mean of `g` over the entries.
    pub fn mean(&self, g: impl Fn(&[i64]) -> f64 + Sync) -> f64 {
        let points: Vec<Vec<i64>> = self.entries.iter().map(|e| e.alpha.clone()).collect();
        let logs: Vec<f64> = self.entries.iter().map(|e| e.log_weight).collect();
        let (numer, denom, _) = weighted_sums(&points, &logs, &g);
        numer / denom
    }

    /// Writes `# {json header}` then `alpha_1,…,alpha_m,log_weight` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.header)?)?;
        let m = self.header.x.len();
        let mut csv = csv::Writer::from_writer(w);
        let cols: Vec<String> = (1..=m).map(|j| format!("alpha_{j}")).chain(["log_weight".to_string()]).collect();
        csv.write_record(&cols).map_err(csv_err)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.alpha.iter().map(|v| v.to_string()).collect();
            row.push(format!("{:e}", e.log_weight));
            csv.write_record(&row).map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<Self> {
        let bad = |msg: &str| Error::invalid(format!("weight table CSV: {msg}"));
        let mut first = String::new();
        r.read_line(&mut first)?;
        let json = first.trim_end().strip_prefix("# ").ok_or_else(|| bad("missing '# ' header"))?;
        let header: TableHeader = serde_json::from_str(json)?;
        let m = header.x.len();
        let mut entries = Vec::new();
        for record in csv::Reader::from_reader(r).records() {
            let record = record.map_err(csv_err)?;
            if record.len() != m + 1 {
                return Err(bad(&format!("expected {} fields, got {}", m + 1, record.len())));
            }
            let alpha = (0..m)
                .map(|j| record[j].trim().parse::<i64>().map_err(|_| bad(&format!("bad index '{}'", &record[j]))))
                .collect::<Result<Vec<_>>>()?;
            let log_weight =
                record[m].trim().parse::<f64>().map_err(|_| bad(&format!("bad weight '{}'", &record[m])))?;
            entries.push(WeightEntry { alpha, log_weight });
        }
        Ok(LatticeWeightTable { header, entries })
    }
}

/// Operator value together with the lattice terms it came from.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedValue {
    pub value: f64,
    pub table: LatticeWeightTable,
}

/// Normalized lattice mean `Σ g(α) w(α) / Σ w(α)` with generalized weights.
pub fn generalized_lattice_mean(
    model: &ToricModel,
    n: u32,
    x: &[f64],
    policy: &TruncationPolicy,
    norms: &dyn NormSource,
    g: &(dyn Fn(&[i64]) -> f64 + Sync),
) -> Result<GeneralizedValue> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if n < model.min_power() {
        return Err(Error::domain(format!(
            "model '{}' needs N >= {} for finite norms, got {n}",
            model.name(),
            model.min_power()
        )));
    }
    let frame = Frame::new(model, x)?;
    let poly = model.polytope();
    let inside = |a: &[i64]| poly.contains_lattice(a, n);
    let lw = |a: &[i64]| -> Result<f64> { Ok(frame.exponent(a, n) - norms.log_norm(a, n)?) };
    let problem = LatticeProblem { bounds: poly.lattice_axis_bounds(n), inside: &inside, log_weight: &lw };
    let center: Vec<f64> = x.iter().map(|v| v * n as f64).collect();
    let ws = problem.run(&center, policy)?;
    let (numer, denom, max) = weighted_sums(&ws.points, &ws.logs, g);
    let log_normalizer = max + denom.ln();
    let entries =
        ws.points.iter().zip(&ws.logs).map(|(a, &l)| WeightEntry { alpha: a.clone(), log_weight: l }).collect();
    let header = TableHeader {
        n,
        x: x.to_vec(),
        model: model.name().to_string(),
        normalizer: log_normalizer.exp(),
        log_normalizer,
        truncation_radius: ws.window.radius(&ws.mode),
        tail_bound: ws.tail_bound,
        norm_source: norms.label(),
    };
    Ok(GeneralizedValue { value: numer / denom, table: LatticeWeightTable { header, entries } })
}

/// Generalized operator with an explicit norm source.
pub fn generalized_operator_with(
    model: &ToricModel,
    f: &TestFunction,
    n: u32,
    x: &[f64],
    policy: &TruncationPolicy,
    norms: &dyn NormSource,
) -> Result<GeneralizedValue> {
    if f.arity() != model.dimension() {
        return Err(Error::invalid(format!(
            "test function has arity {}, model dimension is {}",
            f.arity(),
            model.dimension()
        )));
    }
    let nf = n as f64;
    generalized_lattice_mean(model, n, x, policy, norms, &|a: &[i64]| {
        let t: Vec<f64> = a.iter().map(|&k| k as f64 / nf).collect();
        f.eval(&t)
    })
}

/// `S_N(f)(x)`: closed-form norms when the model has them, quadrature otherwise.
pub fn generalized_operator(
    model: &ToricModel,
    f: &TestFunction,
    n: u32,
    x: &[f64],
    policy: &TruncationPolicy,
) -> Result<GeneralizedValue> {
    if model.closed_form_log_kernel_diag(n).is_some() {
        generalized_operator_with(model, f, n, x, policy, &ClosedFormNorms(model))
    } else {
        let norms = QuadratureNorms::new(model.clone(), QuadratureSpec::default());
        generalized_operator_with(model, f, n, x, policy, &norms)
    }
}

/// The operator value re-divided by the model's stated kernel diagonal
/// (`(N+m)!/N!` for the ball) instead of the computed kernel sum.
pub fn renormalize_to_stated(model: &ToricModel, result: &GeneralizedValue) -> Option<f64> {
    let stated = model.stated_log_kernel_diag(result.table.n())?;
    Some(result.value * (result.table.header.log_normalizer - stated).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{bernstein, szasz_classical};

    #[test]
    fn bargmann_fock_unit_weight() {
        let bf = ToricModel::bargmann_fock(1);
        let lw = generalized_weight(&bf, 1, &[1.0], &[0], &ClosedFormNorms(&bf)).unwrap();
        assert!((lw + 1.0).abs() < 1e-15);
    }

    #[test]
    fn fubini_study_weight_is_binomial_times_kernel() {
        let fs = ToricModel::fubini_study(1);
        let lw = generalized_weight(&fs, 4, &[0.5], &[2], &ClosedFormNorms(&fs)).unwrap();
        let expect = 6.0 * 0.5f64.powi(4) * 5.0;
        assert!((lw.exp() - expect).abs() < 1e-13);
        assert!(generalized_weight(&fs, 4, &[0.5], &[5], &ClosedFormNorms(&fs)).is_err());
    }

    #[test]
    fn matches_classical_operators() {
        let p = TruncationPolicy::default();
        let f = TestFunction::from_spec("t^3 - t + 2", 1).unwrap();
        let bf = ToricModel::bargmann_fock(1);
        let fs = ToricModel::fubini_study(1);
        for (n, x) in [(5u32, 0.3), (40, 1.7), (300, 0.9)] {
            let g = generalized_operator(&bf, &f, n, &[x], &p).unwrap().value;
            let c = szasz_classical(&f, n, &[x], &p).unwrap().value;
            assert!((g - c).abs() < 1e-10 * c.abs().max(1.0), "{n} {x}: {g} vs {c}");
        }
        for (n, x) in [(5u32, 0.3), (40, 0.7), (300, 0.05)] {
            let g = generalized_operator(&fs, &f, n, &[x], &p).unwrap().value;
            let b = bernstein(&f, n, &[x]).unwrap();
            assert!((g - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn partition_of_unity_and_kernel() {
        let p = TruncationPolicy::default();
        let one = TestFunction::constant(1.0, 1);
        let ball = ToricModel::bergman_ball(1);
        let r = generalized_operator(&ball, &one, 12, &[0.6], &p).unwrap();
        assert_eq!(r.value, 1.0);
        assert!((r.table.normalizer() - 11.0).abs() < 1e-10);
        assert!(r.table.partition_of_unity_residual() < 1e-12);
        assert!(generalized_operator(&ball, &one, 1, &[0.6], &p).is_err());
        let lit = generalized_operator(&ball, &one, 3, &[1.0], &p).unwrap();
        assert!((renormalize_to_stated(&ball, &lit).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let fs = ToricModel::fubini_study(2);
        let f = TestFunction::from_spec("s*t", 2).unwrap();
        let r = generalized_operator(&fs, &f, 6, &[0.2, 0.3], &TruncationPolicy::default()).unwrap();
        let mut buf = Vec::new();
        r.table.write_csv(&mut buf).unwrap();
        let back = LatticeWeightTable::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, r.table);
        assert_eq!(back.entries.len(), 28);
    }
}
