use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_factorial, ln_gamma, pairwise_sum};

/// Hard cap on the number of pmf terms an expectation may touch.
pub const MAX_TERMS: u64 = 50_000_000;

/// Integer-valued distributions behind the classical operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LatticeDistribution {
    /// `C(N, j) p^j (1-p)^{N-j}`, `0 <= j <= N`.
    Binomial { n: u32, p: f64 },
    /// `e^{-λ} λ^j / j!`.
    Poisson { lambda: f64 },
    /// Failures before the `N`-th success: `(N)_j / j! p^N q^j`, `j >= 0`.
    NegbinomialFailures { n: u32, p: f64 },
    /// Trials up to the `N`-th success: `C(j-1, N-1) p^N q^{j-N}`, `j >= N`.
    PascalTrials { n: u32, p: f64 },
}

impl LatticeDistribution {
    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        Self::Binomial { n, p }.validated()
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::Poisson { lambda }.validated()
    }

    pub fn negbinomial_failures(n: u32, p: f64) -> Result<Self> {
        Self::NegbinomialFailures { n, p }.validated()
    }

    pub fn pascal_trials(n: u32, p: f64) -> Result<Self> {
        Self::PascalTrials { n, p }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Binomial { p, .. } if !(0.0..=1.0).contains(&p) => {
                Err(Error::domain(format!("binomial needs 0 <= p <= 1, got {p}")))
            }
            Self::Poisson { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => {
                Err(Error::domain(format!("Poisson needs a finite λ >= 0, got {lambda}")))
            }
            Self::NegbinomialFailures { n, p } | Self::PascalTrials { n, p } if n == 0 || !(p > 0.0 && p <= 1.0) => {
                Err(Error::domain(format!("negative binomial needs N >= 1 and 0 < p <= 1, got N = {n}, p = {p}")))
            }
            d => Ok(d),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Binomial { .. } => "binomial",
            Self::Poisson { .. } => "poisson",
            Self::NegbinomialFailures { .. } => "negbinomial-failures",
            Self::PascalTrials { .. } => "pascal-trials",
        }
    }

    /// Smallest support point and, for finite support, the largest.
    pub fn support(&self) -> (u64, Option<u64>) {
        match *self {
            Self::Binomial { n, .. } => (0, Some(n as u64)),
            Self::Poisson { .. } | Self::NegbinomialFailures { .. } => (0, None),
            Self::PascalTrials { n, .. } => (n as u64, None),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Binomial { n, p } => n as f64 * p,
            Self::Poisson { lambda } => lambda,
            Self::NegbinomialFailures { n, p } => n as f64 * (1.0 - p) / p,
            Self::PascalTrials { n, p } => n as f64 / p,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Binomial { n, p } => n as f64 * p * (1.0 - p),
            Self::Poisson { lambda } => lambda,
            Self::NegbinomialFailures { n, p } | Self::PascalTrials { n, p } => n as f64 * (1.0 - p) / (p * p),
        }
    }

    /// `log pmf(j)`; `-inf` off the support.
    pub fn ln_pmf(&self, j: u64) -> f64 {
        let (lo, hi) = self.support();
        if j < lo || hi.is_some_and(|h| j > h) {
            return f64::NEG_INFINITY;
        }
        let jf = j as f64;
        let term = |k: f64, lp: f64| if k == 0.0 { 0.0 } else { k * lp };
        match *self {
            Self::Binomial { n, p } => {
                let n = n as u64;
                ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j)
                    + term(jf, p.ln())
                    + term((n - j) as f64, (-p).ln_1p())
            }
            Self::Poisson { lambda } => term(jf, lambda.ln()) - lambda - ln_factorial(j),
            Self::NegbinomialFailures { n, p } => nb_ln_pmf(n, p, j),
            Self::PascalTrials { n, p } => nb_ln_pmf(n, p, j - n as u64),
        }
    }

    pub fn pmf(&self, j: u64) -> f64 {
        self.ln_pmf(j).exp()
    }

    /// A most likely support point.
    pub fn mode(&self) -> u64 {
        let (lo, hi) = self.support();
        let m = match *self {
            Self::Binomial { n, p } => ((n as f64 + 1.0) * p).floor(),
            Self::Poisson { lambda } => lambda.floor(),
            Self::NegbinomialFailures { n, p } => ((n as f64 - 1.0) * (1.0 - p) / p).floor().max(0.0),
            Self::PascalTrials { n, p } => n as f64 + ((n as f64 - 1.0) * (1.0 - p) / p).floor().max(0.0),
        } as u64;
        hi.map_or(m, |h| m.min(h)).max(lo)
    }

    /// Support window `[lo, hi]` whose complement carries at most `eps` of the mass,
    /// with the rigorous bound on that complement.
    ///
    /// All four families are log-concave, so successive pmf ratios decrease away from
    /// the mode and a geometric series with the current ratio bounds each tail.
    pub fn truncated_support(&self, eps: f64) -> Result<(u64, u64, f64)> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid(format!("truncation ε must lie in (0, 1), got {eps}")));
        }
        let (lo_s, hi_s) = self.support();
        let mode = self.mode();
        let side = eps / 2.0;
        let mut tail = 0.0;

        let mut hi = mode;
        loop {
            if hi_s.is_some_and(|h| hi >= h) {
                break;
            }
            let r = (self.ln_pmf(hi + 1) - self.ln_pmf(hi)).exp();
            let next = (self.ln_pmf(hi + 1)).exp();
            if next == 0.0 {
                break;
            }
            if r < 1.0 && hi > mode && next / (1.0 - r) <= side {
                tail += next / (1.0 - r);
                break;
            }
            hi += 1;
            if hi - mode > MAX_TERMS {
                return Err(Error::Resource { needed: (hi - mode) as usize, max_terms: MAX_TERMS as usize });
            }
        }
        let mut lo = mode;
        while lo > lo_s {
            let r = (self.ln_pmf(lo - 1) - self.ln_pmf(lo)).exp();
            let prev = self.ln_pmf(lo - 1).exp();
            if prev == 0.0 {
                break;
            }
            // finite left tail: lo - lo_s terms each at most prev
            let bound = if r < 1.0 { prev / (1.0 - r) } else { prev * (lo - lo_s) as f64 };
            if lo < mode && bound <= side {
                tail += bound;
                break;
            }
            lo -= 1;
        }
        Ok((lo, hi, tail))
    }
}

fn nb_ln_pmf(n: u32, p: f64, j: u64) -> f64 {
    let (nf, jf) = (n as f64, j as f64);
    let tail = if j == 0 { 0.0 } else { jf * (-p).ln_1p() };
    ln_gamma(nf + jf) - ln_gamma(nf) - ln_factorial(j) + nf * p.ln() + tail
}

/// Truncated expectation `Σ_j g(j) pmf(j)` with its tail bound `ε_tail · sup|g|`.
#[derive(Debug, Clone, Serialize)]
pub struct Expectation {
    pub value: f64,
    /// Probability mass outside `[lo, hi]` (bounded, not estimated).
    pub tail_mass: f64,
    /// `tail_mass · sup |g|` over the window, a bound on the truncation error for bounded `g`.
    pub tail_bound: f64,
    pub lo: u64,
    pub hi: u64,
}

pub fn expectation(dist: &LatticeDistribution, g: &dyn Fn(u64) -> f64, eps: f64) -> Result<Expectation> {
    let (lo, hi, tail_mass) = dist.truncated_support(eps)?;
    let terms: Vec<f64> = (lo..=hi)
        .map(|j| {
            let v = g(j);
            if v == 0.0 {
                0.0
            } else {
                v * dist.pmf(j)
            }
        })
        .collect();
    let sup = (lo..=hi).map(|j| g(j).abs()).fold(0.0, f64::max);
    Ok(Expectation { value: pairwise_sum(&terms), tail_mass, tail_bound: tail_mass * sup, lo, hi })
}
