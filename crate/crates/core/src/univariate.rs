//! Univariate polynomials over Q: gcd, square-free part, Sturm root counts.

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

/// Coefficients in ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rational::int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        Self(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Divides out the largest power of the variable.
    pub fn strip_zero_roots(&self) -> Self {
        let k = self.0.iter().take_while(|c| c.is_zero()).count();
        Self::new(self.0[k..].to_vec())
    }

    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let len = seq.len();
            if seq[len - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[len - 2].div_rem(&seq[len - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(Self(r.0.iter().map(|c| -c.clone()).collect()));
        }
        seq
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let sf = self.square_free();
        if sf.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = sf.sturm_sequence();
        let changes = |signs: Vec<i8>| {
            let nz: Vec<i8> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_pos: Vec<i8> = seq.iter().map(|p| sign(&p.leading())).collect();
        let at_neg: Vec<i8> = seq
            .iter()
            .map(|p| {
                let s = sign(&p.leading());
                if p.degree().unwrap_or(0) % 2 == 1 { -s } else { s }
            })
            .collect();
        changes(at_neg) - changes(at_pos)
    }

    /// A real root located by bisection, with the exact value when it is a
    /// rational root of a linear square-free part.
    pub fn some_real_root(&self) -> Option<(f64, Option<Rational>)> {
        let sf = self.square_free();
        match sf.degree() {
            None | Some(0) => return None,
            Some(1) => {
                let r = -sf.0[0].clone() / &sf.0[1];
                return Some((rational::to_f64(&r), Some(r)));
            }
            _ => {}
        }
        if sf.count_real_roots() == 0 {
            return None;
        }
        // Cauchy bound on the root magnitudes.
        let lead = sf.leading().abs();
        let bound = 1.0 + sf.0.iter().map(|c| rational::to_f64(&(c.abs() / &lead))).fold(0.0, f64::max);
        // Scan for a sign change of the square-free part (roots are simple).
        let steps = 4096;
        let mut prev_x = -bound;
        let mut prev = sf.eval_f64(prev_x);
        for i in 1..=steps {
            let x = -bound + 2.0 * bound * i as f64 / steps as f64;
            let v = sf.eval_f64(x);
            if prev == 0.0 {
                return Some((prev_x, exact_if_root(&sf, prev_x)));
            }
            if prev.signum() != v.signum() {
                let (mut lo, mut hi) = (prev_x, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if sf.eval_f64(mid).signum() == sf.eval_f64(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                return Some((root, exact_if_root(&sf, root)));
            }
            prev_x = x;
            prev = v;
        }
        None
    }
}

fn exact_if_root(p: &UPoly, x: f64) -> Option<Rational> {
    let r = rational::approximate(x, 1000)?;
    p.eval(&r).is_zero().then_some(r)
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl From<Vec<i64>> for UPoly {
    fn from(v: Vec<i64>) -> Self {
        Self::new(v.into_iter().map(rational::int).collect())
    }
}

impl UPoly {
    pub fn one() -> Self {
        Self(vec![Rational::one()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn gcd_of_square() {
        let p = UPoly::from(vec![1, -2, 1]);
        let g = p.gcd(&p.derivative());
        assert_eq!(g, UPoly::from(vec![-1, 1]));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(UPoly::from(vec![1, 0, 1]).count_real_roots(), 0);
        assert_eq!(UPoly::from(vec![-1, 0, 1]).count_real_roots(), 2);
        // (x - 1)^2 (x + 2)
        assert_eq!(UPoly::from(vec![2, -3, 0, 1]).count_real_roots(), 2);
        assert_eq!(UPoly::from(vec![-2, 0, 0, 1]).count_real_roots(), 1);
        assert_eq!(UPoly::from(vec![5]).count_real_roots(), 0);
    }

    #[test]
    fn roots_are_located() {
        let (x, exact) = UPoly::from(vec![-1, 1]).some_real_root().unwrap();
        assert_eq!(x, 1.0);
        assert_eq!(exact, Some(int(1)));
        let (x, exact) = UPoly::from(vec![-2, 0, 1]).some_real_root().unwrap();
        assert!((x.abs() - 2f64.sqrt()).abs() < 1e-12);
        assert!(exact.is_none());
        // (2x - 1)(x^2 + 1)
        let (x, exact) = UPoly::from(vec![-1, 2, -1, 2]).some_real_root().unwrap();
        assert!((x - 0.5).abs() < 1e-12);
        assert_eq!(exact, Some(rational::ratio(1, 2)));
    }

    #[test]
    fn strips_zero_roots() {
        assert_eq!(UPoly::from(vec![0, 0, 3, 1]).strip_zero_roots(), UPoly::from(vec![3, 1]));
    }
}
