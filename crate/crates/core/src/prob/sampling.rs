//! Reproducible sampling. Draws come from ChaCha8 streams: the seed fixes the key
//! and every block of `CHUNK` draws uses its own stream id, so results do not
//! depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use super::dist::{expectation, LatticeDistribution};
use crate::error::{Error, Result};

/// Draws per independent stream.
pub const CHUNK: usize = 1 << 16;

/// Name of the generator recorded in reports.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), stream = chunk index";

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw<R: Rng>(dist: &LatticeDistribution, rng: &mut R) -> u64 {
    match *dist {
        LatticeDistribution::Binomial { n, p } => Binomial::new(n as u64, p).expect("validated").sample(rng),
        LatticeDistribution::Poisson { lambda } => poisson_draw(lambda, rng),
        LatticeDistribution::NegbinomialFailures { n, p } => nb_draw(n, p, rng),
        LatticeDistribution::PascalTrials { n, p } => n as u64 + nb_draw(n, p, rng),
    }
}

fn poisson_draw<R: Rng>(lambda: f64, rng: &mut R) -> u64 {
    if lambda == 0.0 {
        return 0;
    }
    let v: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
    v as u64
}

/// Poisson–gamma mixture: `λ ~ Gamma(N, q/p)`, `X | λ ~ Poisson(λ)`.
fn nb_draw<R: Rng>(n: u32, p: f64, rng: &mut R) -> u64 {
    if p == 1.0 {
        return 0;
    }
    let lambda = Gamma::new(n as f64, (1.0 - p) / p).expect("positive shape").sample(rng);
    poisson_draw(lambda, rng)
}

fn check(dist: &LatticeDistribution, count: usize) -> Result<()> {
    dist.validated()?;
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    Ok(())
}

/// `count` reproducible draws.
pub fn sample(dist: &LatticeDistribution, count: usize, seed: u64) -> Result<Vec<u64>> {
    check(dist, count)?;
    let chunks = count.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(move |_| draw(dist, &mut rng))
        })
        .collect())
}

/// Sample mean of `g(X)` with `stderr = sd / sqrt(count)`.
pub fn monte_carlo_expectation(
    dist: &LatticeDistribution,
    g: &(dyn Fn(u64) -> f64 + Sync),
    count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check(dist, count)?;
    let chunks = count.div_ceil(CHUNK);
    // per-chunk (n, mean, M2), merged pairwise
    let stats: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..len {
                let v = g(draw(dist, &mut rng));
                let d = v - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v - mean);
            }
            (len as f64, mean, m2)
        })
        .collect();
    let (n, mean, m2) = stats.into_iter().fold((0.0, 0.0, 0.0), |(na, ma, sa), (nb, mb, sb)| {
        let n = na + nb;
        let d = mb - ma;
        (n, ma + d * nb / n, sa + sb + d * d * na * nb / n)
    });
    let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
    Ok((mean, (var / n).sqrt()))
}

/// One Monte Carlo cross-check against the exact truncated expectation.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub kind: &'static str,
    pub params: LatticeDistribution,
    pub count: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub mean: f64,
    pub stderr: f64,
    pub exact: f64,
    #[serde(rename = "z-score")]
    pub z_score: f64,
}

pub fn monte_carlo_check(
    dist: &LatticeDistribution,
    g: &(dyn Fn(u64) -> f64 + Sync),
    count: usize,
    seed: u64,
    eps: f64,
) -> Result<MonteCarloReport> {
    let (mean, stderr) = monte_carlo_expectation(dist, g, count, seed)?;
    let exact = expectation(dist, g, eps)?.value;
    let z_score = if stderr > 0.0 {
        (mean - exact) / stderr
    } else if mean == exact {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MonteCarloReport { kind: dist.kind(), params: *dist, count, seed, rng: RNG_NAME, mean, stderr, exact, z_score })
}

/// Total-variation distance between the empirical pmf of `samples` and the exact pmf.
pub fn total_variation(dist: &LatticeDistribution, samples: &[u64]) -> f64 {
    let hi = samples.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; hi as usize + 1];
    for &s in samples {
        counts[s as usize] += 1;
    }
    let n = samples.len() as f64;
    let seen: f64 = counts.iter().enumerate().map(|(j, &c)| (c as f64 / n - dist.pmf(j as u64)).abs()).sum();
    let mass_seen: f64 = (0..=hi).map(|j| dist.pmf(j)).sum();
    0.5 * (seen + (1.0 - mass_seen).max(0.0))
}
