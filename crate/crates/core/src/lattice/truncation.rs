use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::pairwise_sum;

/// How the infinite lattice sum is cut to a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum TruncationMode {
    /// Grow the window around the mode until the bounded tail mass is below epsilon.
    TailBound,
    /// Fixed half-width around the mode on every axis.
    FixedRadius { radius: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    #[serde(flatten)]
    pub mode: TruncationMode,
    /// Bound on the neglected fraction of the total weight.
    pub epsilon: f64,
    /// Safety cap on the number of lattice points in a window.
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { mode: TruncationMode::TailBound, epsilon: 1e-14, max_terms: 20_000_000 }
    }
}

impl TruncationPolicy {
    pub fn tail_bound(epsilon: f64) -> Self {
        TruncationPolicy { epsilon, ..Default::default() }
    }

    pub fn fixed_radius(radius: u64) -> Self {
        TruncationPolicy { mode: TruncationMode::FixedRadius { radius }, ..Default::default() }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!("truncation epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms must be positive"));
        }
        Ok(())
    }
}

/// Product window `[lo_j, hi_j]` of lattice points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn size(&self) -> u128 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1).max(0) as u128).product()
    }

    /// Largest per-axis half-width measured from `center`.
    pub fn radius(&self, center: &[i64]) -> u64 {
        self.lo.iter().zip(&self.hi).zip(center).map(|((l, h), c)| (c - l).max(h - c).max(0) as u64).max().unwrap_or(0)
    }

    fn points(&self) -> Vec<Vec<i64>> {
        let m = self.lo.len();
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut cur = self.lo.clone();
        loop {
            out.push(cur.clone());
            let mut j = m;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if cur[j] < self.hi[j] {
                    cur[j] += 1;
                    break;
                }
                cur[j] = self.lo[j];
            }
        }
    }
}

/// Lattice points of a window with their log-weights.
#[derive(Debug, Clone)]
pub(crate) struct WindowSum {
    pub points: Vec<Vec<i64>>,
    pub logs: Vec<f64>,
    pub window: Window,
    pub mode: Vec<i64>,
    /// Upper bound on (neglected weight) / (captured weight).
    pub tail_bound: f64,
}

/// Lattice description shared by every operator: per-axis integer bounds,
/// a membership test and a log-weight oracle.
pub(crate) struct LatticeProblem<'a> {
    pub bounds: Vec<(Option<i64>, Option<i64>)>,
    pub inside: &'a (dyn Fn(&[i64]) -> bool + Sync),
    pub log_weight: &'a (dyn Fn(&[i64]) -> Result<f64> + Sync),
}

const PARALLEL_THRESHOLD: usize = 4096;

impl LatticeProblem<'_> {
    fn admissible(&self, a: &[i64]) -> bool {
        a.iter().zip(&self.bounds).all(|(v, (lo, hi))| lo.is_none_or(|l| *v >= l) && hi.is_none_or(|h| *v <= h))
            && (self.inside)(a)
    }

    fn lw(&self, a: &[i64]) -> Result<Option<f64>> {
        if !self.admissible(a) {
            return Ok(None);
        }
        let v = (self.log_weight)(a)?;
        Ok((v > f64::NEG_INFINITY).then_some(v))
    }

    fn start(&self, center: &[f64]) -> Result<Vec<i64>> {
        let clamp = |v: f64, j: usize| {
            let mut k = v as i64;
            if let Some(l) = self.bounds[j].0 {
                k = k.max(l);
            }
            if let Some(h) = self.bounds[j].1 {
                k = k.min(h);
            }
            k
        };
        for round in [f64::round, f64::floor, f64::ceil] {
            let a: Vec<i64> = center.iter().enumerate().map(|(j, &c)| clamp(round(c), j)).collect();
            if self.lw(&a)?.is_some() {
                return Ok(a);
            }
        }
        Err(Error::domain(format!("no admissible lattice point near {center:?}")))
    }

    /// Coordinate ascent to the discrete mode of the weight.
    fn mode(&self, center: &[f64]) -> Result<(Vec<i64>, f64)> {
        let mut a = self.start(center)?;
        let mut best = self.lw(&a)?.expect("start point is admissible");
        for _ in 0..1000 {
            let mut moved = false;
            for j in 0..a.len() {
                for dir in [1i64, -1] {
                    loop {
                        a[j] += dir;
                        match self.lw(&a)? {
                            Some(v) if v > best => {
                                best = v;
                                moved = true;
                            }
                            _ => {
                                a[j] -= dir;
                                break;
                            }
                        }
                    }
                }
            }
            if !moved {
                return Ok((a, best));
            }
        }
        Err(Error::Convergence { iterations: 1000, residual: f64::NAN })
    }

    /// Walks from the mode along one axis until the geometric tail bound,
    /// relative to the mode weight, drops below `target`.
    fn axis_extent(&self, mode: &[i64], lw_mode: f64, j: usize, dir: i64, target: f64, cap: usize) -> Result<i64> {
        let mut a = mode.to_vec();
        let mut lw_k = lw_mode;
        for _ in 0..cap {
            a[j] += dir;
            let Some(lw_next) = self.lw(&a)? else {
                return Ok(a[j] - dir);
            };
            let r = (lw_next - lw_k).exp();
            if r < 1.0 && (lw_next - lw_mode).exp() / (1.0 - r) <= target {
                return Ok(a[j] - dir);
            }
            lw_k = lw_next;
        }
        Err(Error::Resource { needed: cap + 1, max_terms: cap })
    }

    fn evaluate(&self, window: &Window) -> Result<(Vec<Vec<i64>>, Vec<f64>)> {
        let pts = window.points();
        let eval = |a: &Vec<i64>| -> Result<Option<(Vec<i64>, f64)>> { Ok(self.lw(a)?.map(|v| (a.clone(), v))) };
        let evaluated: Vec<Option<(Vec<i64>, f64)>> = if pts.len() >= PARALLEL_THRESHOLD {
            pts.par_iter().map(eval).collect::<Result<_>>()?
        } else {
            pts.iter().map(eval).collect::<Result<_>>()?
        };
        Ok(evaluated.into_iter().flatten().unzip())
    }

    /// Geometric tail bound through every open face of the window, as a
    /// fraction of the captured weight. Returns per-(axis, side) shares.
    fn face_tails(&self, window: &Window, points: &[Vec<i64>], logs: &[f64]) -> Result<(f64, Vec<[f64; 2]>)> {
        let m = window.lo.len();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total = pairwise_sum(&logs.iter().map(|l| (l - max).exp()).collect::<Vec<_>>());
        let mut shares = vec![[0.0f64; 2]; m];
        for (a, &l) in points.iter().zip(logs) {
            for j in 0..m {
                for (side, edge, dir) in [(0usize, window.lo[j], -1i64), (1, window.hi[j], 1)] {
                    if a[j] != edge {
                        continue;
                    }
                    let mut b = a.clone();
                    b[j] += dir;
                    if let Some(lb) = self.lw(&b)? {
                        let r = (lb - l).exp();
                        let t = if r < 1.0 { (lb - max).exp() / (1.0 - r) } else { f64::INFINITY };
                        shares[j][side] += t / total;
                    }
                }
            }
        }
        let sum = shares.iter().map(|s| s[0] + s[1]).sum();
        Ok((sum, shares))
    }

    pub fn run(&self, center: &[f64], policy: &TruncationPolicy) -> Result<WindowSum> {
        policy.validate()?;
        let m = center.len();
        let (mode, lw_mode) = self.mode(center)?;
        let mut window = match policy.mode {
            TruncationMode::FixedRadius { radius } => {
                let r = radius as i64;
                let clip = |j: usize, v: i64| {
                    let (lo, hi) = self.bounds[j];
                    v.max(lo.unwrap_or(i64::MIN)).min(hi.unwrap_or(i64::MAX))
                };
                Window {
                    lo: (0..m).map(|j| clip(j, mode[j] - r)).collect(),
                    hi: (0..m).map(|j| clip(j, mode[j] + r)).collect(),
                }
            }
            TruncationMode::TailBound => {
                let target = policy.epsilon / (4.0 * m as f64);
                let mut lo = Vec::with_capacity(m);
                let mut hi = Vec::with_capacity(m);
                for j in 0..m {
                    lo.push(self.axis_extent(&mode, lw_mode, j, -1, target, policy.max_terms)?);
                    hi.push(self.axis_extent(&mode, lw_mode, j, 1, target, policy.max_terms)?);
                }
                Window { lo, hi }
            }
        };
        for _ in 0..16 {
            let size = window.size();
            if size > policy.max_terms as u128 {
                return Err(Error::Resource {
                    needed: size.min(usize::MAX as u128) as usize,
                    max_terms: policy.max_terms,
                });
            }
            let (points, logs) = self.evaluate(&window)?;
            if points.is_empty() {
                return Err(Error::domain("truncation window contains no admissible lattice point"));
            }
            let (tail, shares) = self.face_tails(&window, &points, &logs)?;
            let fixed = matches!(policy.mode, TruncationMode::FixedRadius { .. });
            if fixed || tail <= policy.epsilon {
                return Ok(WindowSum { points, logs, window, mode, tail_bound: tail });
            }
            // widen the sides carrying too much tail
            let share_target = policy.epsilon / (2.0 * m as f64);
            for j in 0..m {
                let width = (window.hi[j] - window.lo[j]).max(1);
                if shares[j][0] > share_target {
                    window.lo[j] -= width;
                    if let Some(l) = self.bounds[j].0 {
                        window.lo[j] = window.lo[j].max(l);
                    }
                }
                if shares[j][1] > share_target {
                    window.hi[j] += width;
                    if let Some(h) = self.bounds[j].1 {
                        window.hi[j] = window.hi[j].min(h);
                    }
                }
            }
        }
        Err(Error::NumericalInstability("truncation window did not reach the tail bound".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_factorial;

    #[test]
    fn poisson_window_captures_mass() {
        let lam = 50.0f64;
        let lw = move |a: &[i64]| Ok(a[0] as f64 * lam.ln() - lam - ln_factorial(a[0] as u64));
        let inside = |_: &[i64]| true;
        let p = LatticeProblem { bounds: vec![(Some(0), None)], inside: &inside, log_weight: &lw };
        let s = p.run(&[lam], &TruncationPolicy::default()).unwrap();
        let mass: f64 = pairwise_sum(&s.logs.iter().map(|l| l.exp()).collect::<Vec<_>>());
        assert!((mass - 1.0).abs() < 1e-13);
        assert!(s.tail_bound <= 1e-14);
        assert_eq!(s.mode, vec![50]);
        assert!(s.window.lo[0] > 0 && s.window.hi[0] < 200);
    }

    #[test]
    fn fixed_radius_and_cap() {
        let lw = |a: &[i64]| Ok(-(a[0] as f64 - 10.0).powi(2) - (a[1] as f64 - 10.0).powi(2));
        let inside = |_: &[i64]| true;
        let p = LatticeProblem { bounds: vec![(Some(0), None); 2], inside: &inside, log_weight: &lw };
        let s = p.run(&[10.0, 10.0], &TruncationPolicy::fixed_radius(3)).unwrap();
        assert_eq!(s.points.len(), 49);
        assert_eq!(s.window.radius(&s.mode), 3);
        let err = p.run(&[10.0, 10.0], &TruncationPolicy::fixed_radius(3).with_max_terms(10)).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }
}
