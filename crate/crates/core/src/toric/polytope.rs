use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::xlogx;

/// One facet inequality `<x, normal> >= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: f64,
}

impl Facet {
    /// Affine defining function `l(x) = <x, v> - lambda`.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(&v, &xi)| v as f64 * xi).sum::<f64>() - self.offset
    }
}

/// Moment polyhedral set cut out by primitive inward facet normals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polytope {
    dimension: usize,
    facets: Vec<Facet>,
    is_unbounded: bool,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Polytope {
    pub fn new(dimension: usize, facets: Vec<Facet>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("polytope dimension must be positive"));
        }
        for (r, f) in facets.iter().enumerate() {
            if f.normal.len() != dimension {
                return Err(Error::invalid(format!(
                    "facet {r} normal has length {}, expected {dimension}",
                    f.normal.len()
                )));
            }
            let g = f.normal.iter().fold(0, |g, &v| gcd(g, v));
            if g != 1 {
                return Err(Error::invalid(format!("facet {r} normal {:?} is not primitive (gcd {g})", f.normal)));
            }
            if !f.offset.is_finite() {
                return Err(Error::invalid(format!("facet {r} offset is not finite")));
            }
        }
        let is_unbounded = recession_cone_nonzero(dimension, &facets);
        Ok(Polytope { dimension, facets, is_unbounded })
    }

    /// The orthant `x_j >= 0`.
    pub fn orthant(m: usize) -> Self {
        let facets = (0..m).map(|j| Facet { normal: unit(m, j, 1), offset: 0.0 }).collect();
        Polytope { dimension: m, facets, is_unbounded: true }
    }

    /// The standard simplex `x_j >= 0`, `sum x_j <= 1`.
    pub fn simplex(m: usize) -> Self {
        let mut facets: Vec<Facet> = (0..m).map(|j| Facet { normal: unit(m, j, 1), offset: 0.0 }).collect();
        facets.push(Facet { normal: vec![-1; m], offset: -1.0 });
        Polytope { dimension: m, facets, is_unbounded: false }
    }

    /// Cartesian product, facets lifted block-wise.
    pub fn product(parts: &[&Polytope]) -> Self {
        let dimension: usize = parts.iter().map(|p| p.dimension).sum();
        let mut facets = Vec::new();
        let mut shift = 0;
        for p in parts {
            for f in &p.facets {
                let mut normal = vec![0; dimension];
                normal[shift..shift + p.dimension].copy_from_slice(&f.normal);
                facets.push(Facet { normal, offset: f.offset });
            }
            shift += p.dimension;
        }
        Polytope { dimension, facets, is_unbounded: parts.iter().any(|p| p.is_unbounded) }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_unbounded(&self) -> bool {
        self.is_unbounded
    }

    /// Values `l_r(x)` of all facet functions.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.facets.iter().map(|f| f.slack(x)).collect()
    }

    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && self.facets.iter().all(|f| f.slack(x) > 0.0)
    }

    /// Errors with the first violated facet when `x` is not strictly inside.
    pub fn check_interior(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::domain(format!(
                "point has dimension {}, polytope has dimension {}",
                x.len(),
                self.dimension
            )));
        }
        if let Some(bad) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("coordinate {bad} is not finite")));
        }
        for (r, f) in self.facets.iter().enumerate() {
            let s = f.slack(x);
            if s <= 0.0 {
                return Err(Error::domain(format!(
                    "x = {x:?} violates facet {r} (<x, {:?}> >= {}): slack {s:e}",
                    f.normal, f.offset
                )));
            }
        }
        Ok(())
    }

    /// Whether the lattice point `alpha` lies in `N P`.
    pub fn contains_lattice(&self, alpha: &[i64], n: u32) -> bool {
        let n = n as f64;
        self.facets.iter().all(|f| {
            let dot: i64 = f.normal.iter().zip(alpha).map(|(v, a)| v * a).sum();
            dot as f64 >= n * f.offset - 1e-9
        })
    }

    /// Integer bounds on each coordinate of `N P ∩ Z^m` implied by the facets
    /// with a single nonzero normal entry. `None` marks an unbounded side.
    pub fn lattice_axis_bounds(&self, n: u32) -> Vec<(Option<i64>, Option<i64>)> {
        let mut bounds = vec![(None, None); self.dimension];
        for f in &self.facets {
            let nz: Vec<usize> = (0..self.dimension).filter(|&j| f.normal[j] != 0).collect();
            if nz.len() != 1 {
                continue;
            }
            let j = nz[0];
            let v = f.normal[j] as f64;
            let limit = n as f64 * f.offset / v;
            if v > 0.0 {
                let lo = (limit - 1e-9).ceil() as i64;
                bounds[j].0 = Some(bounds[j].0.map_or(lo, |b: i64| b.max(lo)));
            } else {
                let hi = (limit + 1e-9).floor() as i64;
                bounds[j].1 = Some(bounds[j].1.map_or(hi, |b: i64| b.min(hi)));
            }
        }
        // Bounded polytopes may still leave an axis open in the table above
        // (e.g. simplex-type facets): close it with the simplex-type facet.
        for f in &self.facets {
            if f.normal.iter().all(|&v| v <= 0) && f.normal.iter().filter(|&&v| v != 0).count() > 1 {
                for j in 0..self.dimension {
                    if f.normal[j] < 0 && bounds[j].0 == Some(0) && bounds[j].1.is_none() {
                        // all other coordinates nonnegative: x_j <= -offset / |v_j|
                        let others_nonneg = (0..self.dimension)
                            .filter(|&k| k != j && f.normal[k] != 0)
                            .all(|k| bounds[k].0.is_some_and(|b| b >= 0));
                        if others_nonneg {
                            let hi = (n as f64 * -f.offset / (-f.normal[j]) as f64 + 1e-9).floor() as i64;
                            bounds[j].1 = Some(hi);
                        }
                    }
                }
            }
        }
        bounds
    }

    /// True when the origin is a vertex whose incident facets are exactly the
    /// coordinate hyperplanes `x_j = 0`.
    pub fn is_vertex_normalized(&self) -> bool {
        (0..self.dimension)
            .all(|j| self.facets.iter().any(|f| f.offset == 0.0 && f.normal == unit(self.dimension, j, 1)))
            && self.facets.iter().filter(|f| f.offset == 0.0).count() == self.dimension
    }
}

fn unit(m: usize, j: usize, v: i64) -> Vec<i64> {
    let mut e = vec![0; m];
    e[j] = v;
    e
}

/// Whether `{d : <d, v_r> >= 0 for all r}` contains a nonzero vector. Exact
/// when the facet normals span the space: candidate extreme rays are the null
/// directions of each (m-1)-subset of normals.
fn recession_cone_nonzero(m: usize, facets: &[Facet]) -> bool {
    let normals: Vec<Vec<f64>> = facets.iter().map(|f| f.normal.iter().map(|&v| v as f64).collect()).collect();
    if normals.is_empty() {
        return true;
    }
    let full = DMatrix::from_fn(normals.len(), m, |i, j| normals[i][j]);
    if full.rank(1e-9) < m {
        return true;
    }
    let in_cone = |d: &[f64]| normals.iter().all(|v| v.iter().zip(d).map(|(a, b)| a * b).sum::<f64>() >= -1e-12);
    if m == 1 {
        return in_cone(&[1.0]) || in_cone(&[-1.0]);
    }
    let mut subset: Vec<usize> = (0..m - 1).collect();
    let k = m - 1;
    loop {
        let a = DMatrix::from_fn(k, m, |i, j| normals[subset[i]][j]);
        if a.rank(1e-9) == k {
            // Null vector from the SVD of the square padding.
            let mut padded = DMatrix::zeros(m, m);
            padded.rows_mut(0, k).copy_from(&a);
            let svd = padded.svd(false, true);
            if let Some(vt) = svd.v_t {
                let (idx, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| {
                    if s < acc.1 {
                        (i, s)
                    } else {
                        acc
                    }
                });
                let d: Vec<f64> = vt.row(idx).iter().copied().collect();
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                if in_cone(&d) || in_cone(&neg) {
                    return true;
                }
            }
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if subset[i] < normals.len() - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Canonical symplectic potential `u_0(x) = sum_r l_r(x) log l_r(x)`.
pub fn canonical_potential(polytope: &Polytope, x: &[f64]) -> Result<f64> {
    polytope.check_interior(x)?;
    Ok(polytope.slacks(x).into_iter().map(xlogx).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        let o = Polytope::orthant(2);
        assert!(o.is_unbounded());
        assert!(o.contains_interior(&[1.0, 2.0]));
        assert!(!o.contains_interior(&[0.0, 2.0]));
        let s = Polytope::simplex(1);
        assert!(!s.is_unbounded());
        assert!(s.contains_interior(&[0.5]));
        assert!(!s.contains_interior(&[1.0]));
        assert!(o.is_vertex_normalized() && s.is_vertex_normalized());
    }

    #[test]
    fn unboundedness_is_derived_from_facets() {
        let square = Polytope::new(
            2,
            vec![
                Facet { normal: vec![1, 0], offset: 0.0 },
                Facet { normal: vec![0, 1], offset: 0.0 },
                Facet { normal: vec![-1, 0], offset: -1.0 },
                Facet { normal: vec![0, -1], offset: -1.0 },
            ],
        )
        .unwrap();
        assert!(!square.is_unbounded());
        let strip = Polytope::new(
            2,
            vec![Facet { normal: vec![1, 0], offset: 0.0 }, Facet { normal: vec![-1, 0], offset: -1.0 }],
        )
        .unwrap();
        assert!(strip.is_unbounded());
        let tri = Polytope::new(
            3,
            vec![
                Facet { normal: vec![1, 0, 0], offset: 0.0 },
                Facet { normal: vec![0, 1, 0], offset: 0.0 },
                Facet { normal: vec![0, 0, 1], offset: 0.0 },
                Facet { normal: vec![-1, -1, -1], offset: -1.0 },
            ],
        )
        .unwrap();
        assert!(!tri.is_unbounded());
        let orth3 = Polytope::new(3, Polytope::orthant(3).facets().to_vec()).unwrap();
        assert!(orth3.is_unbounded());
    }

    #[test]
    fn non_primitive_normal_rejected() {
        let err = Polytope::new(1, vec![Facet { normal: vec![2], offset: 0.0 }]).unwrap_err();
        assert!(err.to_string().contains("primitive"));
    }

    #[test]
    fn canonical_potential_examples() {
        assert_eq!(canonical_potential(&Polytope::orthant(2), &[1.0, 1.0]).unwrap(), 0.0);
        let cp1 = canonical_potential(&Polytope::simplex(1), &[0.5]).unwrap();
        assert!((cp1 + 2f64.ln()).abs() < 1e-15);
        let e = std::f64::consts::E;
        assert!((canonical_potential(&Polytope::orthant(1), &[e]).unwrap() - e).abs() < 1e-15);
        let err = canonical_potential(&Polytope::simplex(1), &[1.2]).unwrap_err();
        assert!(err.to_string().contains("facet 1"));
    }

    #[test]
    fn lattice_bounds_and_membership() {
        let s = Polytope::simplex(2);
        assert_eq!(s.lattice_axis_bounds(4), vec![(Some(0), Some(4)), (Some(0), Some(4))]);
        assert!(s.contains_lattice(&[1, 3], 4));
        assert!(!s.contains_lattice(&[2, 3], 4));
        let o = Polytope::orthant(1);
        assert_eq!(o.lattice_axis_bounds(7), vec![(Some(0), None)]);
        let p = Polytope::product(&[&Polytope::simplex(1), &Polytope::orthant(1)]);
        assert_eq!(p.lattice_axis_bounds(3), vec![(Some(0), Some(3)), (Some(0), None)]);
    }
}
