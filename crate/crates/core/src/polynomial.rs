//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Exponent vector α ∈ Z₊ⁿ. The ordering is plain lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(components: Vec<i64>) -> Result<Self> {
        if components.iter().any(|&c| c < 0) {
            return Err(Error::Invalid(format!(
                "exact-core: exponent vector {components:?} has a negative entry"
            )));
        }
        Ok(Self(components))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, a: &[i64]) -> i64 {
        self.0.iter().zip(a).map(|(x, y)| x * y).sum()
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|c| c % 2 == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Graded-lex comparison: total degree first, then lex.
    pub fn grlex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

/// Polynomial in a fixed number of variables. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(ExponentVector::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn monomial(exponent: ExponentVector, c: Rational) -> Self {
        let mut p = Self::zero(exponent.dim());
        p.add_term(exponent, c);
        p
    }

    /// Coordinate function x_{i+1}.
    pub fn variable(dim: usize, i: usize) -> Self {
        Self::monomial(ExponentVector::unit(dim, i), Rational::one())
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor for tests and examples; panics on bad input.
    pub fn from_int_terms(dim: usize, terms: &[(&[i64], i64)]) -> Self {
        Self::from_terms(
            dim,
            terms
                .iter()
                .map(|(e, c)| (ExponentVector::new(e.to_vec()).unwrap(), rational::int(*c))),
        )
        .unwrap()
    }

    pub fn add_term(&mut self, exponent: ExponentVector, c: Rational) {
        debug_assert_eq!(exponent.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn term_map(&self) -> &BTreeMap<ExponentVector, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, exponent: &ExponentVector) -> Rational {
        self.terms.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&ExponentVector::zero(self.dim))
    }

    /// The Taylor support: exponents with nonzero coefficient.
    pub fn taylor_support(&self) -> BTreeSet<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&ExponentVector) -> bool) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial x^shift.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.add(shift), c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.dim);
        for _ in 0..k {
            out = out.try_mul(self).expect("same dimension");
        }
        out
    }

    /// Partial derivative with respect to x_{i+1}.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e[i];
            if k == 0 {
                continue;
            }
            let mut v = e.as_slice().to_vec();
            v[i] -= 1;
            out.add_term(ExponentVector(v), c * rational::int(k));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in x.iter().zip(e.as_slice()) {
                if k > 0 {
                    term *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            total += term;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut term = rational::to_f64(c);
                for (xi, &k) in x.iter().zip(e.as_slice()) {
                    if k > 0 {
                        term *= xi.powi(k as i32);
                    }
                }
                term
            })
            .sum()
    }

    /// True when every exponent has only even entries.
    pub fn all_exponents_even(&self) -> bool {
        self.terms.keys().all(|e| e.is_even())
    }

    /// Returns `Some(+1|-1)` when all coefficients share one sign.
    pub fn coefficient_sign(&self) -> Option<i8> {
        let mut sign = None;
        for c in self.terms.values() {
            let s = if c.is_positive() { 1 } else { -1 };
            match sign {
                None => sign = Some(s),
                Some(t) if t != s => return None,
                _ => {}
            }
        }
        sign
    }

    /// Terms in printing order: graded lex, descending.
    pub fn terms_grlex_desc(&self) -> Vec<(&ExponentVector, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &ExponentVector, coeff: &Rational) -> fmt::Result {
    let is_const = e.degree() == 0;
    let mut first = true;
    if !coeff.is_one() || is_const {
        write!(f, "{coeff}")?;
        first = false;
    }
    for (i, &k) in e.as_slice().iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if k > 1 {
            write!(f, "^{k}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms_grlex_desc().into_iter().enumerate() {
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write_monomial(f, e, &c.abs())?;
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_in_grlex_descending_order() {
        let p = Polynomial::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], -2), (&[0, 2], 1), (&[0, 0], 3)]);
        assert_eq!(p.to_string(), "x1^2 - 2*x1*x2 + x2^2 + 3");
        let q = Polynomial::from_int_terms(3, &[(&[0, 0, 1], -1)]);
        assert_eq!(q.to_string(), "-x3");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn like_terms_cancel() {
        let p = Polynomial::from_int_terms(1, &[(&[1], 2), (&[1], -2)]);
        assert!(p.is_zero());
    }

    #[test]
    fn derivative_and_eval() {
        let p = Polynomial::from_int_terms(2, &[(&[3, 1], 2), (&[0, 2], 1)]);
        let d = p.derivative(0);
        assert_eq!(d.to_string(), "6*x1^2*x2");
        let v = p.eval(&[rational::int(2), rational::int(3)]).unwrap();
        assert_eq!(v, rational::int(57));
        assert!((p.eval_f64(&[2.0, 3.0]) - 57.0).abs() < 1e-12);
    }

    #[test]
    fn support_of_example_phase() {
        let f = Polynomial::from_int_terms(2, &[(&[5, 0], 1), (&[6, 0], 1), (&[0, 5], 1)]);
        let s: Vec<_> = f.taylor_support().into_iter().map(|e| e.into_vec()).collect();
        assert_eq!(s, vec![vec![0, 5], vec![5, 0], vec![6, 0]]);
        assert!(Polynomial::zero(2).taylor_support().is_empty());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = Polynomial::one(2);
        let q = Polynomial::one(3);
        assert!(matches!(p.try_add(&q), Err(Error::DimensionMismatch { .. })));
    }
}
