//! Small exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn to_rational_matrix(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
        .collect()
}

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rref(&mut to_rational_matrix(rows)).len()
}

pub fn rank_rational(rows: &Matrix) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rref(&mut rows.clone()).len()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 { -d } else { d }
}

/// Basis of the right null space {x : M x = 0}.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    if a.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| Rational::from_integer(BigInt::from((i == j) as i64))).collect())
            .collect();
    }
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::from_integer(BigInt::from(1));
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves the square system M x = b; `None` when M is singular.
pub fn solve(m: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.iter().map(|r| r[n].clone()).collect())
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |acc, &x| acc.gcd(&x))
}

/// Divides by the gcd of the entries (no-op for the zero vector).
pub fn make_primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_slice(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Signature test of a symmetric rational matrix via LDLᵀ with symmetric
/// pivoting. Returns `Some(+1)` for positive semidefinite, `Some(-1)` for
/// negative semidefinite (the zero matrix reports `+1`), `None` otherwise.
pub fn semidefinite_sign(m: &Matrix) -> Option<i8> {
    if is_psd(m) {
        return Some(1);
    }
    let neg: Matrix = m.iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect();
    if is_psd(&neg) {
        return Some(-1);
    }
    None
}

fn is_psd(m: &Matrix) -> bool {
    let mut a = m.clone();
    let n = a.len();
    let mut alive: Vec<bool> = vec![true; n];
    for _ in 0..n {
        // Pick the largest remaining positive diagonal entry.
        let mut best: Option<usize> = None;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            if a[i][i].is_negative() {
                return false;
            }
            if a[i][i].is_positive() && best.is_none_or(|b| a[i][i] > a[b][b]) {
                best = Some(i);
            }
        }
        let Some(k) = best else {
            // All remaining diagonal entries are zero: PSD iff the rest is zero.
            for i in 0..n {
                for j in 0..n {
                    if alive[i] && alive[j] && !a[i][j].is_zero() {
                        return false;
                    }
                }
            }
            return true;
        };
        alive[k] = false;
        let pivot = a[k][k].clone();
        for i in 0..n {
            if !alive[i] || a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !alive[j] {
                    continue;
                }
                let delta = &a[i][k] * &a[k][j] / &pivot;
                a[i][j] -= delta;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rank_and_det() {
        assert_eq!(rank(&[vec![1, 1], vec![2, 2]]), 1);
        assert_eq!(rank(&[vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
        assert_eq!(det(&[vec![2, 1], vec![1, 1]]), BigInt::from(1));
        assert_eq!(det(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]]), BigInt::from(-3));
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), BigInt::from(0));
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let m = to_rational_matrix(&[vec![1, 1, 0]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot: Rational = v[0].clone() + v[1].clone();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn semidefinite_signs() {
        let psd = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        assert_eq!(semidefinite_sign(&psd), Some(1));
        let indef = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
        assert_eq!(semidefinite_sign(&indef), None);
        let nsd = vec![vec![int(-2), int(0)], vec![int(0), int(0)]];
        assert_eq!(semidefinite_sign(&nsd), Some(-1));
        let zero_diag = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(semidefinite_sign(&zero_diag), None);
    }

    #[test]
    fn solves_square_systems() {
        let m = to_rational_matrix(&[vec![2, 1], vec![1, 3]]);
        let x = solve(&m, &[int(3), int(4)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        assert!(solve(&to_rational_matrix(&[vec![1, 1], vec![1, 1]]), &[int(1), int(2)]).is_none());
    }
}
