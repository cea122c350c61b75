//! Sufficient conditions for a polynomial to keep one sign near the origin.
//!
//! Positive answers come from exact certificates (sign of `p(0)`, even
//! monomials of one sign, a semidefinite Gram matrix in monomials). Negative
//! answers come from exact witness points along monomial curves `t^w·x₀`,
//! `t → 0`, found by sampling face polynomials. Everything else is Unknown.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg;
use crate::polyhedron::NewtonPolyhedron;
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::{self, Rational};

pub const SAMPLE_SEED: u64 = 0x5eed_0001;
pub const RANDOM_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignStatus {
    Nonnegative,
    Nonpositive,
    Indefinite,
    Unknown,
}

impl SignStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Nonnegative => "Nonnegative",
            Self::Nonpositive => "Nonpositive",
            Self::Indefinite => "Indefinite",
            Self::Unknown => "Unknown",
        }
    }

    pub fn is_definite(&self) -> bool {
        matches!(self, Self::Nonnegative | Self::Nonpositive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SignCertificate {
    pub status: SignStatus,
    /// Which rule decided the status.
    pub method: String,
    /// For Indefinite: a point with `p < 0`.
    #[serde(with = "opt_point", skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Rational>>,
    /// For Indefinite: a point with `p > 0`.
    #[serde(with = "opt_point", skip_serializing_if = "Option::is_none")]
    pub positive_witness: Option<Vec<Rational>>,
}

mod opt_point {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(p) => s.collect_seq(p.iter().map(|x| x.to_string())),
            None => s.serialize_none(),
        }
    }
}

impl SignCertificate {
    fn decided(status: SignStatus, method: &str) -> Self {
        Self { status, method: method.into(), witness: None, positive_witness: None }
    }
}

fn sign_status(s: i8) -> SignStatus {
    if s > 0 { SignStatus::Nonnegative } else { SignStatus::Nonpositive }
}

/// Certifies the sign of `p` on a small neighborhood of the origin.
/// `even_shortcut` enables the quick all-even-monomials test before the Gram
/// test.
pub fn sign_certificate(p: &Polynomial, even_shortcut: bool) -> SignCertificate {
    if p.is_zero() {
        return SignCertificate::decided(SignStatus::Nonnegative, "zero");
    }
    if even_shortcut && p.all_exponents_even() {
        if let Some(s) = p.coefficient_sign() {
            return SignCertificate::decided(sign_status(s), "even-monomials");
        }
    }
    if let Some(s) = gram_sign(p) {
        return SignCertificate::decided(sign_status(s), "gram");
    }
    let c0 = p.constant_term();
    if !c0.is_zero() {
        let s = if c0.is_positive() { 1 } else { -1 };
        return SignCertificate::decided(sign_status(s), "constant-term");
    }
    if let Some((neg, pos)) = find_sign_change(p) {
        return SignCertificate {
            status: SignStatus::Indefinite,
            method: "sampling".into(),
            witness: Some(neg),
            positive_witness: Some(pos),
        };
    }
    SignCertificate::decided(SignStatus::Unknown, "none")
}

/// Writes `p = m(x)ᵀ Q m(x)` with `m` the square roots of the even terms and
/// each other term assigned to the first pair producing it. Returns the sign
/// when `Q` is semidefinite.
fn gram_sign(p: &Polynomial) -> Option<i8> {
    let basis: Vec<ExponentVector> = p
        .terms()
        .filter(|(e, _)| e.is_even())
        .map(|(e, _)| ExponentVector::new(e.as_slice().iter().map(|x| x / 2).collect()).expect("nonnegative"))
        .collect();
    let k = basis.len();
    if k == 0 {
        return None;
    }
    let mut q = vec![vec![Rational::zero(); k]; k];
    for (e, c) in p.terms() {
        if e.is_even() {
            let half: Vec<i64> = e.as_slice().iter().map(|x| x / 2).collect();
            let i = basis.iter().position(|b| b.as_slice() == half.as_slice()).expect("basis element");
            q[i][i] += c;
            continue;
        }
        let pair = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .find(|&(i, j)| basis[i].add(&basis[j]) == *e)?;
        let half = c / rational::int(2);
        q[pair.0][pair.1] += &half;
        q[pair.1][pair.0] += half;
    }
    linalg::semidefinite_sign(&q)
}

fn sign_of(value: &Rational) -> i8 {
    if value.is_positive() {
        1
    } else if value.is_negative() {
        -1
    } else {
        0
    }
}

/// Moves `x0` along `t^w·x0`, `t = 2^{-k}`, until `p` has the sign `target`.
fn curve_witness(p: &Polynomial, x0: &[Rational], w: &[i64], target: i8) -> Option<Vec<Rational>> {
    for k in 0..64u32 {
        let point: Vec<Rational> = x0
            .iter()
            .zip(w)
            .map(|(x, &wi)| {
                let scale = Rational::new(BigInt::from(1), BigInt::from(2).pow(k * wi as u32));
                x * scale
            })
            .collect();
        if sign_of(&p.eval(&point).expect("dimension")) == target {
            return Some(point);
        }
    }
    None
}

fn sample_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
    let mags = [rational::int(1), rational::ratio(1, 2), rational::int(2)];
    let mut points = Vec::new();
    let mag_count = 3usize.pow(n as u32);
    for mi in 0..mag_count {
        let mut code = mi;
        let mag: Vec<&Rational> = (0..n)
            .map(|_| {
                let m = &mags[code % 3];
                code /= 3;
                m
            })
            .collect();
        for signs in 0..(1usize << n) {
            points.push(
                (0..n)
                    .map(|i| if signs >> (n - 1 - i) & 1 == 1 { -mag[i].clone() } else { mag[i].clone() })
                    .collect(),
            );
        }
    }
    for _ in 0..RANDOM_SAMPLES {
        points.push(
            (0..n)
                .map(|_| {
                    let mut num: i64 = rng.random_range(-1000..=1000);
                    if num == 0 {
                        num = 1;
                    }
                    rational::ratio(num, 1000)
                })
                .collect(),
        );
    }
    points
}

/// Samples the face polynomials of the compact faces of `Γ₊(p)` looking for
/// points of both signs, then slides them towards the origin.
fn find_sign_change(p: &Polynomial) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let poly = NewtonPolyhedron::from_polynomial(p).ok()?;
    let n = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let points = sample_points(n, &mut rng);
    let mut neg: Option<Vec<Rational>> = None;
    let mut pos: Option<Vec<Rational>> = None;
    for face in poly.newton_diagram() {
        let pg = poly.restrict_to_face(p, face).ok()?;
        let mut w = vec![0i64; n];
        for &k in &face.active {
            for (wi, a) in w.iter_mut().zip(&poly.facets()[k].normal) {
                *wi += a;
            }
        }
        for x0 in &points {
            if neg.is_some() && pos.is_some() {
                break;
            }
            let xf: Vec<f64> = x0.iter().map(rational::to_f64).collect();
            let approx = pg.eval_f64(&xf);
            let want = if approx < 0.0 && neg.is_none() {
                -1
            } else if approx > 0.0 && pos.is_none() {
                1
            } else {
                continue;
            };
            if sign_of(&pg.eval(x0).expect("dimension")) != want {
                continue;
            }
            if let Some(point) = curve_witness(p, x0, &w, want) {
                if want < 0 {
                    neg = Some(point);
                } else {
                    pos = Some(point);
                }
            }
        }
        if neg.is_some() && pos.is_some() {
            break;
        }
    }
    Some((neg?, pos?))
}
