//! Double-description method for pointed polyhedral cones.
//!
//! Given integer rows `w_1..w_m` spanning `R^d`, computes the extreme rays of
//! `{y : w_i · y ≥ 0 for all i}` together with the rows each ray is tight on.
//! Arithmetic is exact in `i128`; overflow is reported rather than wrapped.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bitset(Vec<u64>);

impl Bitset {
    pub fn new(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64).max(1)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| b & !a == 0)
    }
}

/// Extreme rays of a pointed cone given by inequalities.
#[derive(Debug, Clone)]
pub struct ConeRays {
    /// Primitive integer generators of the extreme rays.
    pub rays: Vec<Vec<i64>>,
    /// For each ray, the indices of the input rows it is tight on.
    pub tight: Vec<Vec<usize>>,
}

fn dot(a: &[i128], b: &[i128]) -> Result<i128> {
    let mut s: i128 = 0;
    for (x, y) in a.iter().zip(b) {
        s = x
            .checked_mul(*y)
            .and_then(|p| s.checked_add(p))
            .ok_or(Error::Overflow)?;
    }
    Ok(s)
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn to_i128(v: &[BigInt]) -> Result<Vec<i128>> {
    v.iter().map(|x| x.to_i128().ok_or(Error::Overflow)).collect()
}

/// Extreme rays of `{y : rows · y ≥ 0}`. The rows must span the ambient space
/// (the cone is then pointed).
pub fn extreme_rays(rows: &[Vec<i64>], dim: usize) -> Result<ConeRays> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Invalid("dd: row length differs from the dimension".into()));
    }
    // Normalize rows: drop zero rows, make primitive, deduplicate.
    let mut work: Vec<Vec<i128>> = Vec::new();
    for r in rows {
        if r.iter().all(|&x| x == 0) {
            continue;
        }
        let mut v: Vec<i128> = r.iter().map(|&x| x as i128).collect();
        primitive(&mut v);
        if !work.contains(&v) {
            work.push(v);
        }
    }
    let m = work.len();

    // Greedy basis of linearly independent rows.
    let mut basis: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<i64>> = Vec::new();
    for (i, r) in work.iter().enumerate() {
        if basis.len() == dim {
            break;
        }
        let mut trial = basis_rows.clone();
        trial.push(r.iter().map(|&x| x as i64).collect());
        if linalg::rank(&trial) == trial.len() {
            basis.push(i);
            basis_rows = trial;
        }
    }
    if basis.len() < dim {
        return Err(Error::Invalid("dd: inequalities do not define a pointed cone".into()));
    }

    // Initial simplicial cone: columns of the inverse of the basis matrix.
    let bmat = linalg::to_rational_matrix(&basis_rows);
    let mut rays: Vec<Vec<i128>> = Vec::new();
    let mut zeros: Vec<Bitset> = Vec::new();
    for j in 0..dim {
        let e: Vec<Rational> = (0..dim)
            .map(|i| Rational::from_integer(BigInt::from((i == j) as i64)))
            .collect();
        let x = linalg::solve(&bmat, &e).expect("basis is nonsingular");
        rays.push(to_i128(&linalg::primitive_integer(&x))?);
        let mut z = Bitset::new(m);
        for (k, &b) in basis.iter().enumerate() {
            if k != j {
                z.insert(b);
            }
        }
        zeros.push(z);
    }

    let in_basis: Vec<bool> = (0..m).map(|i| basis.contains(&i)).collect();
    for (h, row) in work.iter().enumerate() {
        if in_basis[h] {
            continue;
        }
        let signs: Vec<i128> = rays.iter().map(|r| dot(row, r)).collect::<Result<_>>()?;
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| signs[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| signs[i] < 0).collect();
        if neg.is_empty() {
            for (i, z) in zeros.iter_mut().enumerate() {
                if signs[i] == 0 {
                    z.insert(h);
                }
            }
            continue;
        }
        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for i in 0..rays.len() {
            if signs[i] >= 0 {
                let mut z = zeros[i].clone();
                if signs[i] == 0 {
                    z.insert(h);
                }
                new_rays.push(rays[i].clone());
                new_zeros.push(z);
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = zeros[p].and(&zeros[n]);
                if common.count() + 2 < dim {
                    continue;
                }
                let blocked = (0..rays.len())
                    .any(|r| r != p && r != n && zeros[r].is_superset(&common));
                if blocked {
                    continue;
                }
                let sp = signs[p];
                let sn = signs[n];
                let mut w = Vec::with_capacity(dim);
                for k in 0..dim {
                    let a = sp.checked_mul(rays[n][k]).ok_or(Error::Overflow)?;
                    let b = sn.checked_mul(rays[p][k]).ok_or(Error::Overflow)?;
                    w.push(a.checked_sub(b).ok_or(Error::Overflow)?);
                }
                primitive(&mut w);
                let mut z = common;
                z.insert(h);
                new_rays.push(w);
                new_zeros.push(z);
            }
        }
        rays = new_rays;
        zeros = new_zeros;
    }

    // Report tightness against the caller's original rows.
    let mut out_rays = Vec::with_capacity(rays.len());
    let mut tight = Vec::with_capacity(rays.len());
    for r in &rays {
        let ints: Vec<i64> = r
            .iter()
            .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow))
            .collect::<Result<_>>()?;
        let t: Vec<usize> = rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().zip(&ints).map(|(a, b)| (*a as i128) * (*b as i128)).sum::<i128>().is_zero())
            .map(|(i, _)| i)
            .collect();
        out_rays.push(ints);
        tight.push(t);
    }
    Ok(ConeRays { rays: out_rays, tight })
}

/// Facet normals (inward, primitive) of the cone generated by `generators`,
/// which must span `R^dim`.
pub fn cone_facets(generators: &[Vec<i64>], dim: usize) -> Result<ConeRays> {
    extreme_rays(generators, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        v.sort();
        v
    }

    #[test]
    fn orthant_has_unit_rays() {
        let rows = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let r = extreme_rays(&rows, 3).unwrap();
        assert_eq!(sorted(r.rays), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn square_pyramid_cone() {
        // Cone over the square [-1,1]^2 at height 1.
        let gens = vec![vec![1, 1, 1], vec![1, -1, 1], vec![-1, 1, 1], vec![-1, -1, 1]];
        let f = cone_facets(&gens, 3).unwrap();
        assert_eq!(
            sorted(f.rays),
            vec![vec![-1, 0, 1], vec![0, -1, 1], vec![0, 1, 1], vec![1, 0, 1]]
        );
        for t in f.tight {
            assert_eq!(t.len(), 2);
        }
    }

    #[test]
    fn redundant_rows_are_ignored() {
        let rows = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 0], vec![0, 0]];
        let r = extreme_rays(&rows, 2).unwrap();
        assert_eq!(sorted(r.rays), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn rejects_non_pointed_input() {
        assert!(extreme_rays(&[vec![1, 0]], 2).is_err());
    }
}
