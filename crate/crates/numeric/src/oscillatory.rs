//! `I(τ) = ∫ e^{iτf} φ χ dx` for `n ≤ 2` by box-adaptive Gauss–Legendre:
//! boxes are halved until the phase varies by at most one period across
//! each of them, then integrated with a 20-point tensor rule.
//!
//! When `f` is a sum of univariate polynomials and `χ` is a product, the
//! integral is assembled from one-dimensional integrals instead, which
//! reaches much larger `τ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use oscindex_core::rational;
use oscindex_core::Polynomial;
use rayon::prelude::*;

use crate::amplitude::AmplitudeExpr;
use crate::cutoff::{CutoffConfig, CutoffShape};
use crate::quadrature::gl20;
use crate::{NumericError, NumericResult};

/// Largest `τ` at which the two-dimensional quadrature is calibrated.
pub const TAU_MAX: f64 = 65536.0;
/// Largest `τ` when the integral factors into one-dimensional ones.
pub const TAU_MAX_SEPARABLE: f64 = 4194304.0;
const MAX_BOXES: usize = 4_000_000;

/// A polynomial with `f64` coefficients and interval bounds on boxes.
#[derive(Debug, Clone)]
pub struct FPoly {
    terms: Vec<(Vec<i32>, f64)>,
}

fn pow_interval(a: f64, b: f64, k: i32) -> (f64, f64) {
    if k == 0 {
        return (1.0, 1.0);
    }
    let (pa, pb) = (a.powi(k), b.powi(k));
    if k % 2 == 0 && a < 0.0 && b > 0.0 {
        (0.0, pa.max(pb))
    } else {
        (pa.min(pb), pa.max(pb))
    }
}

impl FPoly {
    pub fn new(p: &Polynomial) -> Self {
        Self {
            terms: p
                .terms()
                .map(|(e, c)| (e.as_slice().iter().map(|&x| x as i32).collect(), rational::to_f64(c)))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| acc * xi.powi(k)))
            .sum()
    }

    /// An upper bound of `|p|` on the box.
    pub fn abs_bound(&self, lo: &[f64], hi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = c.abs();
                for ((&k, &a), &b) in e.iter().zip(lo).zip(hi) {
                    let (l, u) = pow_interval(a, b, k);
                    m *= l.abs().max(u.abs());
                }
                m
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryOptions {
    /// Periods of the phase allowed per box (smaller is finer).
    pub periods_per_box: f64,
    /// Use the one-dimensional factorisation when it applies.
    pub factor: bool,
}

impl Default for OscillatoryOptions {
    fn default() -> Self {
        Self { periods_per_box: 1.0, factor: true }
    }
}

pub fn evaluate_oscillatory(
    f: &Polynomial,
    phi: &AmplitudeExpr,
    chi: &CutoffConfig,
    tau: f64,
) -> NumericResult<Complex64> {
    Ok(evaluate_oscillatory_multi(f, std::slice::from_ref(phi), chi, tau, &OscillatoryOptions::default())?[0])
}

/// Upper end of the calibrated `τ` range for this phase and cutoff.
pub fn tau_limit(f: &Polynomial, chi: &CutoffConfig) -> f64 {
    if separable_parts(f, chi).is_some() { TAU_MAX_SEPARABLE } else { TAU_MAX }
}

/// Univariate pieces `(power, coefficient)` of `f`, one list per variable,
/// when every term involves at most one variable and `χ` factors.
fn separable_parts(f: &Polynomial, chi: &CutoffConfig) -> Option<Vec<Vec<(i32, f64)>>> {
    let n = f.dim();
    if n > 1 && chi.shape != CutoffShape::Product {
        return None;
    }
    let mut parts = vec![Vec::new(); n];
    for (e, c) in f.terms() {
        let e = e.as_slice();
        let mut nonzero = (0..n).filter(|&i| e[i] != 0);
        let i = nonzero.next().unwrap_or(0);
        if nonzero.next().is_some() {
            return None;
        }
        parts[i].push((e[i] as i32, rational::to_f64(c)));
    }
    Some(parts)
}

fn separable_integral(
    parts: &[Vec<(i32, f64)>],
    phis: &[AmplitudeExpr],
    chi: &CutoffConfig,
    tau: f64,
    options: &OscillatoryOptions,
) -> NumericResult<Vec<Complex64>> {
    // Distinct univariate factors `x^α exp(−κ/x²)` per coordinate.
    let mut keys: Vec<BTreeMap<(i64, i64), usize>> = vec![BTreeMap::new(); parts.len()];
    for phi in phis {
        for (e, k, _) in phi.factored_terms() {
            for i in 0..parts.len() {
                let next = keys[i].len();
                keys[i].entry((e[i], k[i])).or_insert(next);
            }
        }
    }
    let mut values = Vec::with_capacity(parts.len());
    for (g, k) in parts.iter().zip(&keys) {
        let mut factors = vec![(0, 0); k.len()];
        for (&key, &slot) in k {
            factors[slot] = key;
        }
        values.push(line_integrals(g, &factors, chi, tau, options)?);
    }
    Ok(phis
        .iter()
        .map(|phi| {
            phi.factored_terms()
                .into_iter()
                .map(|(e, k, c)| {
                    (0..parts.len()).fold(Complex64::new(c, 0.0), |acc, i| acc * values[i][keys[i][&(e[i], k[i])]])
                })
                .sum()
        })
        .collect())
}

fn upoly(g: &[(i32, f64)], x: f64) -> f64 {
    g.iter().map(|&(k, c)| c * x.powi(k)).sum()
}

/// Bound on `|g′|` over `[a, b]`.
fn upoly_slope_bound(g: &[(i32, f64)], a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    g.iter().filter(|t| t.0 > 0).map(|&(k, c)| (c * k as f64).abs() * m.powi(k - 1)).sum()
}

/// `∫ e^{iτg(x)} x^α e^{−κ/x²} ψ(x) dx` for each factor `(α, κ)`, where `ψ`
/// is the one-dimensional cutoff profile.
fn line_integrals(
    g: &[(i32, f64)],
    factors: &[(i64, i64)],
    chi: &CutoffConfig,
    tau: f64,
    options: &OscillatoryOptions,
) -> NumericResult<Vec<Complex64>> {
    let line = CutoffConfig { shape: CutoffShape::Product, ..*chi };
    let transition = (chi.big_r - chi.r) / 4.0;
    let coarse = chi.big_r / 2.0;
    let limit = 2.0 * std::f64::consts::PI * options.periods_per_box;
    let (nodes, weights) = gl20();
    let mut out = vec![Complex64::new(0.0, 0.0); factors.len()];
    let mut stack = vec![(-chi.big_r, chi.big_r)];
    let mut boxes = 0usize;
    while let Some((a, b)) = stack.pop() {
        if line.is_zero_on(&[a], &[b]) {
            continue;
        }
        boxes += 1;
        if boxes > MAX_BOXES {
            return Err(NumericError::Invalid(format!("quadrature exceeded {MAX_BOXES} intervals at tau = {tau}")));
        }
        let plateau = line.is_one_on(&[a], &[b]);
        let w = b - a;
        let max_width = if plateau { coarse } else { transition };
        if w > max_width || tau * w * upoly_slope_bound(g, a, b) > limit {
            let mid = 0.5 * (a + b);
            stack.push((mid, b));
            stack.push((a, mid));
            continue;
        }
        let (half, centre) = (0.5 * w, 0.5 * (a + b));
        for (&t, &wt) in nodes.iter().zip(weights) {
            let x = centre + half * t;
            let c = if plateau { 1.0 } else { line.profile(x) };
            if c == 0.0 {
                continue;
            }
            let e = Complex64::from_polar(half * wt * c, tau * upoly(g, x));
            for (o, &(alpha, kappa)) in out.iter_mut().zip(factors) {
                let mut v = x.powi(alpha as i32);
                if kappa > 0 {
                    v *= if x == 0.0 { 0.0 } else { (-(kappa as f64) / (x * x)).exp() };
                }
                *o += e * v;
            }
        }
    }
    Ok(out)
}

/// One quadrature pass shared by several amplitudes.
pub fn evaluate_oscillatory_multi(
    f: &Polynomial,
    phis: &[AmplitudeExpr],
    chi: &CutoffConfig,
    tau: f64,
    options: &OscillatoryOptions,
) -> NumericResult<Vec<Complex64>> {
    let n = f.dim();
    if n > 2 {
        return Err(NumericError::DimensionTooLarge(n));
    }
    if let Some(p) = phis.iter().find(|p| p.dim() != n) {
        return Err(NumericError::Invalid(format!("amplitude has dimension {}, phase {n}", p.dim())));
    }
    let parts = separable_parts(f, chi).filter(|_| options.factor);
    let limit = if parts.is_some() { TAU_MAX_SEPARABLE } else { TAU_MAX };
    if !(1.0..=limit).contains(&tau) {
        return Err(NumericError::TauOutOfRange { tau, limit });
    }
    if let Some(parts) = parts {
        return separable_integral(&parts, phis, chi, tau, options);
    }
    let fp = FPoly::new(f);
    let grads: Vec<FPoly> = (0..n).map(|i| FPoly::new(&f.derivative(i))).collect();
    let transition = (chi.big_r - chi.r) / 4.0;
    let coarse = chi.big_r / 2.0;
    let limit = 2.0 * std::f64::consts::PI * options.periods_per_box;
    let (nodes, weights) = gl20();

    let mut out = vec![Complex64::new(0.0, 0.0); phis.len()];
    let mut stack: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![-chi.big_r; n], vec![chi.big_r; n])];
    let mut boxes = 0usize;
    let mut point = vec![0.0; n];
    while let Some((lo, hi)) = stack.pop() {
        if chi.is_zero_on(&lo, &hi) {
            continue;
        }
        boxes += 1;
        if boxes > MAX_BOXES {
            return Err(NumericError::Invalid(format!("quadrature exceeded {MAX_BOXES} boxes at tau = {tau}")));
        }
        let plateau = chi.is_one_on(&lo, &hi);
        let max_width = if plateau { coarse } else { transition };
        // Score each axis by its phase variation, or force a split when the
        // box is wider than the cutoff allows.
        let mut split: Option<usize> = None;
        let mut worst = limit;
        for i in 0..n {
            let w = hi[i] - lo[i];
            let variation = tau * w * grads[i].abs_bound(&lo, &hi);
            let score = if w > max_width { f64::INFINITY } else { variation };
            if score > worst {
                worst = score;
                split = Some(i);
            }
        }
        if let Some(i) = split {
            let mid = 0.5 * (lo[i] + hi[i]);
            let (mut hi_a, mut lo_b) = (hi.clone(), lo.clone());
            hi_a[i] = mid;
            lo_b[i] = mid;
            stack.push((lo_b, hi));
            stack.push((lo, hi_a));
            continue;
        }
        let half: Vec<f64> = (0..n).map(|i| 0.5 * (hi[i] - lo[i])).collect();
        let centre: Vec<f64> = (0..n).map(|i| 0.5 * (hi[i] + lo[i])).collect();
        let jac: f64 = half.iter().product();
        let total = nodes.len().pow(n as u32);
        let mut acc = vec![Complex64::new(0.0, 0.0); phis.len()];
        for idx in 0..total {
            let mut code = idx;
            let mut w = jac;
            for i in 0..n {
                let k = code % nodes.len();
                code /= nodes.len();
                point[i] = centre[i] + half[i] * nodes[k];
                w *= weights[k];
            }
            let c = if plateau { 1.0 } else { chi.eval(&point) };
            if c == 0.0 {
                continue;
            }
            let e = Complex64::from_polar(w * c, tau * fp.eval(&point));
            for (a, phi) in acc.iter_mut().zip(phis) {
                *a += e * phi.eval(&point);
            }
        }
        for (o, a) in out.iter_mut().zip(acc) {
            *o += a;
        }
    }
    Ok(out)
}

/// `I(τ)` over a grid, evaluated in parallel and returned in grid order.
pub fn oscillatory_samples(
    f: &Polynomial,
    phis: &[AmplitudeExpr],
    chi: &CutoffConfig,
    taus: &[f64],
    options: &OscillatoryOptions,
) -> NumericResult<Vec<Vec<Complex64>>> {
    taus.par_iter().map(|&t| evaluate_oscillatory_multi(f, phis, chi, t, options)).collect()
}
