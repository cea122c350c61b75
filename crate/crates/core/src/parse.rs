//! Text grammar for polynomials.
//!
//! ```text
//! poly   := sign? term (('+'|'-') term)*
//! term   := coeff ('*' factor)* | factor ('*' factor)*
//! factor := 'x' INDEX ('^' NAT)?
//! coeff  := INT | INT '/' POSINT
//! ```
//!
//! Whitespace is ignored. Variable indices start at 1.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::Rational;

pub fn parse_polynomial(text: &str, dimension: usize) -> Result<Polynomial> {
    if dimension == 0 {
        return Err(Error::Invalid("parse: dimension must be positive".into()));
    }
    let mut parser = Parser { src: text.as_bytes(), pos: 0, dim: dimension };
    parser.poly()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
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

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn digits(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            Some(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
        }
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.dim);
        let mut sign = Rational::one();
        match self.peek() {
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return self.error("empty input"),
            _ => {}
        }
        loop {
            let (e, c) = self.term()?;
            out.add_term(e, c * &sign);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign = Rational::one();
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -Rational::one();
                    self.pos += 1;
                }
                Some(ch) => return self.error(format!("unexpected character {:?}", ch as char)),
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(ExponentVector, Rational)> {
        let mut exps = vec![0i64; self.dim];
        let mut coeff = Rational::one();
        match self.peek() {
            Some(b'x') => self.factor(&mut exps)?,
            Some(ch) if ch.is_ascii_digit() => coeff = self.coeff()?,
            Some(ch) => return self.error(format!("expected a term, found {:?}", ch as char)),
            None => return self.error("expected a term, found end of input"),
        }
        while self.peek() == Some(b'*') {
            self.pos += 1;
            match self.peek() {
                Some(b'x') => self.factor(&mut exps)?,
                _ => return self.error("expected a factor 'x<index>' after '*'"),
            }
        }
        Ok((ExponentVector::new(exps).expect("nonnegative"), coeff))
    }

    fn coeff(&mut self) -> Result<Rational> {
        let num: BigInt = self.digits().expect("caller checked digit").parse().expect("digits");
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let Some(den) = self.digits() else {
                return self.error("expected a positive denominator");
            };
            let den: BigInt = den.parse().expect("digits");
            if den.is_zero() || !den.is_positive() {
                return self.error("denominator must be positive");
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::from_integer(num))
    }

    fn factor(&mut self, exps: &mut [i64]) -> Result<()> {
        self.pos += 1; // 'x'
        let Some(idx) = self.digits() else {
            return self.error("expected a variable index after 'x'");
        };
        let index: usize = match idx.parse() {
            Ok(i) => i,
            Err(_) => return self.error("variable index too large"),
        };
        if index == 0 || index > self.dim {
            return Err(Error::VariableOutOfRange { index, dimension: self.dim });
        }
        let mut power = 1i64;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(Error::NegativeExponent { position: self.pos });
            }
            let Some(k) = self.digits() else {
                return self.error("expected an exponent after '^'");
            };
            power = match k.parse() {
                Ok(k) => k,
                Err(_) => return self.error("exponent too large"),
            };
        }
        exps[index - 1] = exps[index - 1]
            .checked_add(power)
            .ok_or(Error::Overflow)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn parses_example_phase() {
        let p = parse_polynomial("x1^5 + x1^6 + x2^5", 2).unwrap();
        assert_eq!(p.len(), 3);
        for e in [[5, 0], [6, 0], [0, 5]] {
            assert_eq!(p.coefficient(&ev(&e)), int(1));
        }
    }

    #[test]
    fn parses_zero() {
        assert!(parse_polynomial("0", 2).unwrap().is_zero());
    }

    #[test]
    fn collects_square() {
        let p = parse_polynomial("x1^2 - 2*x1*x2 + x2^2", 2).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.coefficient(&ev(&[2, 0])), int(1));
        assert_eq!(p.coefficient(&ev(&[1, 1])), int(-2));
        assert_eq!(p.coefficient(&ev(&[0, 2])), int(1));
    }

    #[test]
    fn parses_fractions_and_repeated_factors() {
        let p = parse_polynomial("3/2*x1^2*x2 - x3", 3).unwrap();
        assert_eq!(p.coefficient(&ev(&[2, 1, 0])), ratio(3, 2));
        assert_eq!(p.coefficient(&ev(&[0, 0, 1])), int(-1));
        let q = parse_polynomial("x1*x1 - x1^2 + -x2", 2);
        assert!(q.is_err(), "double sign is not in the grammar");
        let r = parse_polynomial("-x1*x1 + x1^2", 2).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_polynomial("x3", 2),
            Err(Error::VariableOutOfRange { index: 3, dimension: 2 })
        ));
        assert!(matches!(parse_polynomial("x0", 2), Err(Error::VariableOutOfRange { .. })));
        assert!(matches!(parse_polynomial("x1^-2", 2), Err(Error::NegativeExponent { .. })));
        assert!(matches!(parse_polynomial("x1 + ", 2), Err(Error::Syntax { position: 5, .. })));
        assert!(matches!(parse_polynomial("2/0*x1", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x1 x2", 2), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse_polynomial("", 2), Err(Error::Syntax { .. })));
    }

    #[test]
    fn keeps_explicit_dimension() {
        let p = parse_polynomial("x1^4", 2).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.coefficient(&ev(&[4, 0])), int(1));
    }
}
