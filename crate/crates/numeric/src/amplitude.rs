//! Amplitudes: polynomials extended by the flat atoms `exp(-1/xI^2)`.
//!
//! ```text
//! expr    := sign? product (('+'|'-') product)*
//! product := power ('*' power)*
//! power   := primary ('^' NAT)?
//! primary := INT ('/' POSINT)? | 'x' INDEX | 'exp(-1/x' INDEX '^2)' | '(' expr ')'
//! ```
//!
//! Expressions are expanded into sums of `c·x^α·Π exp(−κᵢ/xᵢ²)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use oscindex_core::rational::{self, Rational};
use oscindex_core::{Error, ExponentVector, Polynomial, Result};

/// `(α, κ)`: monomial exponent and flat-atom multiplicities.
type Key = (Vec<i64>, Vec<i64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplitudeExpr {
    dim: usize,
    terms: BTreeMap<Key, Rational>,
    text: String,
}

pub fn parse_amplitude(text: &str, dim: usize) -> Result<AmplitudeExpr> {
    if dim == 0 {
        return Err(Error::Invalid("amplitude: dimension must be positive".into()));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    let terms = p.expr()?;
    if p.peek().is_some() {
        return p.error("unexpected character");
    }
    Ok(AmplitudeExpr { dim, terms, text: text.trim().to_string() })
}

impl AmplitudeExpr {
    pub fn from_polynomial(p: &Polynomial) -> Self {
        let n = p.dim();
        let terms = p.terms().map(|(e, c)| ((e.as_slice().to_vec(), vec![0; n]), c.clone())).collect();
        Self { dim: n, terms, text: p.to_string() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_flat_atoms(&self) -> bool {
        self.terms.keys().any(|(_, k)| k.iter().any(|&x| x > 0))
    }

    /// The terms without flat atoms.
    pub fn polynomial_part(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for ((e, k), c) in &self.terms {
            if k.iter().all(|&x| x == 0) {
                out.add_term(ExponentVector::new(e.clone()).expect("nonnegative"), c.clone());
            }
        }
        out
    }

    /// Terms as `(α, κ, c)`: `c·x^α·Π exp(−κᵢ/xᵢ²)`, each a product of
    /// univariate factors.
    pub fn factored_terms(&self) -> Vec<(&[i64], &[i64], f64)> {
        self.terms.iter().map(|((e, k), c)| (e.as_slice(), k.as_slice(), rational::to_f64(c))).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|((e, k), c)| {
                let mut v = rational::to_f64(c);
                for i in 0..self.dim {
                    if k[i] > 0 {
                        if x[i] == 0.0 {
                            return 0.0;
                        }
                        v *= (-(k[i] as f64) / (x[i] * x[i])).exp();
                    }
                    v *= x[i].powi(e[i] as i32);
                }
                v
            })
            .sum()
    }

    /// `(sign, ln|φ|)` at the point with coordinates `signs[i]·exp(logs[i])`.
    pub fn eval_log(&self, logs: &[f64], signs: &[f64]) -> (f64, f64) {
        let mut parts: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len());
        for ((e, k), c) in &self.terms {
            let cf = rational::to_f64(c);
            let mut sign = cf.signum();
            let mut log = cf.abs().ln();
            for i in 0..self.dim {
                log += e[i] as f64 * logs[i];
                if k[i] > 0 {
                    log -= k[i] as f64 * (-2.0 * logs[i]).exp();
                }
                if e[i] % 2 == 1 {
                    sign *= signs[i];
                }
            }
            if log > f64::NEG_INFINITY {
                parts.push((sign, log));
            }
        }
        let top = parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return (0.0, f64::NEG_INFINITY);
        }
        let sum: f64 = parts.iter().map(|(s, l)| s * (l - top).exp()).sum();
        if sum == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (sum.signum(), top + sum.abs().ln())
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

type Terms = BTreeMap<Key, Rational>;

fn add_into(acc: &mut Terms, key: Key, c: Rational) {
    let entry = acc.entry(key.clone()).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        acc.remove(&key);
    }
}

fn mul(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for ((ea, ka), ca) in a {
        for ((eb, kb), cb) in b {
            let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let k = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            add_into(&mut out, (e, k), ca * cb);
        }
    }
    out
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("expected '{}'", c as char))
        }
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").parse().expect("digits"))
    }

    fn constant(&self, c: Rational) -> Terms {
        let mut t = Terms::new();
        add_into(&mut t, (vec![0; self.dim], vec![0; self.dim]), c);
        t
    }

    fn expr(&mut self) -> Result<Terms> {
        let mut out = Terms::new();
        let mut sign = Rational::one();
        match self.peek() {
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return self.error("empty expression"),
            _ => {}
        }
        loop {
            for (k, c) in self.product()? {
                add_into(&mut out, k, c * &sign);
            }
            match self.peek() {
                Some(b'+') => sign = Rational::one(),
                Some(b'-') => sign = -Rational::one(),
                _ => return Ok(out),
            }
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<Terms> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = mul(&acc, &self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Terms> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let k = self.nat()?.to_u32().filter(|&k| k <= 64);
        let Some(k) = k else { return self.error("exponent too large") };
        let mut out = self.constant(Rational::one());
        for _ in 0..k {
            out = mul(&out, &base);
        }
        Ok(out)
    }

    fn index(&mut self) -> Result<usize> {
        let at = self.pos;
        let i = self.nat()?.to_usize().unwrap_or(0);
        if i == 0 || i > self.dim {
            self.pos = at;
            return Err(Error::VariableOutOfRange { index: i, dimension: self.dim });
        }
        Ok(i - 1)
    }

    fn literal(&mut self, word: &str) -> Result<()> {
        for &b in word.as_bytes() {
            self.expect(b)?;
        }
        Ok(())
    }

    fn primary(&mut self) -> Result<Terms> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let i = self.index()?;
                let mut e = vec![0; self.dim];
                e[i] = 1;
                let mut t = Terms::new();
                add_into(&mut t, (e, vec![0; self.dim]), Rational::one());
                Ok(t)
            }
            Some(b'e') => {
                self.literal("exp(-1/x")?;
                let i = self.index()?;
                self.literal("^2)")?;
                let mut k = vec![0; self.dim];
                k[i] = 1;
                let mut t = Terms::new();
                add_into(&mut t, (vec![0; self.dim], k), Rational::one());
                Ok(t)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.nat()?;
                let mut value = Rational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.nat()?;
                    if den.is_zero() {
                        return self.error("zero denominator");
                    }
                    value /= Rational::from_integer(den);
                }
                Ok(self.constant(value))
            }
            Some(b'-') => {
                self.pos += 1;
                let inner = self.power()?;
                Ok(inner.into_iter().map(|(k, c)| (k, -c)).collect())
            }
            _ => self.error("expected a number, variable, flat atom or '('"),
        }
    }
}
