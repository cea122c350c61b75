//! `Z(s) = ∫ |f|^s φ χ dx`, split into `Z₊` and `Z₋` by the sign of `f`,
//! evaluated in the toric charts of a unimodular fan, and fits of its
//! leading pole.
//!
//! Each maximal cone with rays `a¹, …, aⁿ` and each sign pattern `ε` give
//! the chart `xᵢ = εᵢ R Π_j y_j^{a^j_i}` on `(0, 1]ⁿ`; these pieces tile
//! the box `[−R, R]ⁿ`. There `f = y^l f_σ(y)` and the integrand becomes
//! `|f_σ|^s Π y_j^{s l_j + ⟨a^j, 𝟙⟩ − 1} φ χ`, integrated by iterated
//! tanh-sinh with breakpoints at the real zeros of `f_σ`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use oscindex_core::fan::{pair_resolution_fan, Fan};
use oscindex_core::poles::candidate_poles_general;
use oscindex_core::rational::{self, Rational};
use oscindex_core::{NewtonPolyhedron, Polynomial};
use rayon::prelude::*;
use serde::Serialize;

use crate::amplitude::AmplitudeExpr;
use crate::cutoff::{CutoffConfig, CutoffShape};
use crate::quadrature::{tanh_sinh, TsNode};
use crate::{NumericError, NumericResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub s: f64,
    /// `∫_{f>0} |f|^s φ χ`.
    pub plus: f64,
    /// `∫_{f<0} |f|^s φ χ`.
    pub minus: f64,
}

impl ZetaValue {
    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ZetaFit {
    pub lambda_hat: f64,
    pub rho_hat: usize,
    /// Coefficient of `(s + λ)^{−ρ}`, at the candidate `λ` when one is given.
    pub residue_hat: f64,
    /// Residuals of the free-`λ` fit for `ρ = 1, 2, …`.
    pub residuals: Vec<f64>,
    pub s_grid: Vec<f64>,
}

/// Newton polyhedra and chart fan; amplitudes with flat atoms are treated
/// like `φ = 1`, whose candidate poles bound theirs.
fn chart_data(f: &Polynomial, phi: &AmplitudeExpr) -> NumericResult<(NewtonPolyhedron, NewtonPolyhedron, Fan)> {
    let n = f.dim();
    let pf = NewtonPolyhedron::from_polynomial(f)?;
    let poly = phi.polynomial_part();
    let reference = if phi.has_flat_atoms() || poly.is_zero() { Polynomial::one(n) } else { poly };
    let pphi = NewtonPolyhedron::from_polynomial(&reference)?;
    let fan = pair_resolution_fan(&pf, &pphi)?;
    Ok((pf, pphi, fan))
}

fn zeta_rule() -> &'static [TsNode] {
    static RULE: OnceLock<Vec<TsNode>> = OnceLock::new();
    RULE.get_or_init(|| tanh_sinh(1.0 / 8.0, 6.5))
}

/// `f_σ` for one chart and sign pattern: `(exponents in y, coefficient)`.
struct Chart {
    rays: Vec<Vec<i64>>,
    /// `ln Rᵢ`: the charts tile `Π [−Rᵢ, Rᵢ]`.
    log_scale: Vec<f64>,
    l: Vec<f64>,
    ones: Vec<f64>,
    signs: Vec<f64>,
    terms: Vec<(Vec<i64>, f64)>,
}

fn charts_with_scale(f: &Polynomial, fan: &Fan, scale: &[f64]) -> Vec<Chart> {
    let n = f.dim();
    let mut out = Vec::new();
    for ids in fan.max_cone_ids() {
        let rays: Vec<Vec<i64>> = ids.iter().map(|&i| fan.rays()[i].clone()).collect();
        let dot = |a: &[i64], e: &[i64]| a.iter().zip(e).map(|(x, y)| x * y).sum::<i64>();
        let l: Vec<i64> = rays.iter().map(|a| f.terms().map(|(e, _)| dot(a, e.as_slice())).min().unwrap_or(0)).collect();
        for pattern in 0..(1u32 << n) {
            let signs: Vec<f64> = (0..n).map(|i| if pattern >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let terms = f
                .terms()
                .map(|(e, c)| {
                    let e = e.as_slice();
                    let y: Vec<i64> = rays.iter().zip(&l).map(|(a, lj)| dot(a, e) - lj).collect();
                    let sign: f64 = (0..n).filter(|&i| e[i] % 2 == 1).map(|i| signs[i]).product();
                    let size: f64 = (0..n).map(|i| scale[i].powi(e[i] as i32)).product();
                    (y, sign * rational::to_f64(c) * size)
                })
                .collect();
            out.push(Chart {
                rays: rays.clone(),
                log_scale: scale.iter().map(|v| v.ln()).collect(),
                l: l.iter().map(|&v| v as f64).collect(),
                ones: rays.iter().map(|a| a.iter().sum::<i64>() as f64).collect(),
                signs,
                terms,
            });
        }
    }
    out
}

/// Distance from `{0, 1}` of the nearest zero of `f_σ` on the edges of the
/// unit square (or at the end of the unit interval when `n = 1`).
fn edge_clearance(chart: &Chart) -> f64 {
    if chart.rays.len() == 1 {
        return 1.0;
    }
    let mut worst = 1.0f64;
    for fixed in [0.0, 1.0] {
        let (a, b) = (coefficients_in_last(chart, &[fixed]), coefficients_in_first(chart, fixed));
        for r in real_roots_in(&a, -0.5, 1.5).into_iter().chain(real_roots_in(&b, -0.5, 1.5)) {
            worst = worst.min(r.abs()).min((1.0 - r).abs());
        }
    }
    worst
}

/// Charts of `fan` covering `[−R, R]ⁿ`. The box is stretched slightly along
/// some axes when a zero of `f_σ` would otherwise sit on a chart boundary,
/// where the tiling cannot separate it from the exceptional divisor.
fn charts(f: &Polynomial, fan: &Fan, big_r: f64) -> Vec<Chart> {
    const STRETCH: [[f64; 2]; 6] = [[1.0, 1.0], [1.0, 1.125], [1.125, 1.0], [1.0, 1.25], [1.25, 1.0], [1.0625, 1.1875]];
    let n = f.dim();
    let mut best: Option<(f64, Vec<Chart>)> = None;
    for stretch in STRETCH.iter().take(if n == 1 { 1 } else { STRETCH.len() }) {
        let scale: Vec<f64> = (0..n).map(|i| big_r * stretch[i]).collect();
        let cs = charts_with_scale(f, fan, &scale);
        let clearance = cs.iter().map(edge_clearance).fold(1.0, f64::min);
        if clearance >= 1e-3 {
            return cs;
        }
        if best.as_ref().is_none_or(|b| clearance > b.0) {
            best = Some((clearance, cs));
        }
    }
    best.expect("at least one stretch").1
}

/// Coefficients, by power of the last variable, of `f_σ` with the other
/// variables fixed.
fn coefficients_in_last(chart: &Chart, fixed: &[f64]) -> Vec<f64> {
    let n = chart.rays.len();
    let deg = chart.terms.iter().map(|(e, _)| e[n - 1]).max().unwrap_or(0) as usize;
    let mut c = vec![0.0; deg + 1];
    for (e, coef) in &chart.terms {
        let v = fixed.iter().zip(e).fold(*coef, |acc, (y, &k)| acc * y.powi(k as i32));
        c[e[n - 1] as usize] += v;
    }
    c
}

/// Coefficients, by power of the first variable, of `f_σ` with the second
/// fixed at `y2` (two-dimensional charts).
fn coefficients_in_first(chart: &Chart, y2: f64) -> Vec<f64> {
    let deg = chart.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0) as usize;
    let mut c = vec![0.0; deg + 1];
    for (e, coef) in &chart.terms {
        c[e[0] as usize] += coef * y2.powi(e[1] as i32);
    }
    c
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// Real zeros in `(0, 1)` of the polynomial with coefficients `c`.
fn unit_roots(c: &[f64]) -> Vec<f64> {
    // Zeros within rounding of an end cannot be separated from it.
    real_roots_in(c, 0.0, 1.0).into_iter().filter(|&x| x > 1e-12 && x < 1.0 - 1e-12).collect()
}

/// Real zeros in `[lo, hi]`.
fn real_roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut c: Vec<f64> = c.iter().map(|v| v / scale).collect();
    while c.len() > 1 && c.last().is_some_and(|v| v.abs() < 1e-300) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let companion = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let dc: Vec<f64> = (1..=deg).map(|k| k as f64 * c[k]).collect();
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..30 {
                let d = horner(&dc, x);
                if d == 0.0 {
                    break;
                }
                let step = horner(&c, x) / d;
                x -= step;
                if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                    break;
                }
            }
            x
        })
        .filter(|&x| x >= lo && x <= hi && horner(&c, x).abs() <= 1e-9 * c.iter().map(|v| v.abs()).sum::<f64>())
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    roots
}

/// Quotient of `c` by `(y − r)`.
fn deflate(c: &[f64], r: f64) -> Vec<f64> {
    let deg = c.len() - 1;
    let mut q = vec![0.0; deg];
    let mut carry = 0.0;
    for k in (1..=deg).rev() {
        carry = c[k] + carry * r;
        q[k - 1] = carry;
    }
    q
}

/// One tanh-sinh node mapped to `[a, b]`: point, `ln(y − a)`, `ln(b − y)`,
/// and log weight.
fn node(a: f64, b: f64, nd: &TsNode) -> (f64, f64, f64, f64) {
    let w = b - a;
    let lw = w.ln();
    let y = if nd.u <= 0.5 { a + w * nd.u } else { b - w * nd.log_1mu.exp() };
    (y, lw + nd.log_u, lw + nd.log_1mu, lw + nd.log_weight)
}

/// Running sums `(plus, minus)`, one entry per `s`.
struct Accumulator {
    s: Vec<f64>,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl Accumulator {
    fn new(s: &[f64]) -> Self {
        Self { s: s.to_vec(), plus: vec![0.0; s.len()], minus: vec![0.0; s.len()] }
    }

    /// Adds `sign_phi · exp(base + s·slope)` to the side given by `sign_f`.
    fn add(&mut self, sign_f: f64, sign_phi: f64, base: f64, slope: f64) {
        let side = if sign_f > 0.0 { &mut self.plus } else { &mut self.minus };
        for (acc, s) in side.iter_mut().zip(&self.s) {
            *acc += sign_phi * (base + s * slope).exp();
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.plus.iter_mut().zip(&other.plus) {
            *a += b;
        }
        for (a, b) in self.minus.iter_mut().zip(&other.minus) {
            *a += b;
        }
    }
}

/// `ln|x|` (radial) or `ln|x_i|` (product, one entry per coordinate) as
/// seen from the chart, for the given `ln y`.
fn log_norms(chart: &Chart, chi: &CutoffConfig, logs_y: &[f64]) -> Vec<f64> {
    let n = chart.rays.len();
    let lx: Vec<f64> =
        (0..n).map(|i| chart.log_scale[i] + (0..n).map(|k| chart.rays[k][i] as f64 * logs_y[k]).sum::<f64>()).collect();
    match chi.shape {
        CutoffShape::Product => lx,
        CutoffShape::Radial => {
            let top = lx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            vec![top + 0.5 * lx.iter().map(|v| (2.0 * (v - top)).exp()).sum::<f64>().ln()]
        }
    }
}

/// Values `t ∈ (0, 1)` of one chart variable at which the cutoff changes
/// regime (`|x| = r` or `R`), with every other `ln y` fixed as in `logs_y`.
/// Each norm is nondecreasing in every `y`, so bisection in `ln t` applies.
fn cutoff_levels(chart: &Chart, chi: &CutoffConfig, logs_y: &[f64], var: usize) -> Vec<f64> {
    let norms = |lt: f64| {
        let mut l = logs_y.to_vec();
        l[var] = lt;
        log_norms(chart, chi, &l)
    };
    let (lo_t, hi_t) = (-745.0, 0.0);
    let (at_lo, at_hi) = (norms(lo_t), norms(hi_t));
    let mut out = Vec::new();
    for level in [chi.r.ln(), chi.big_r.ln()] {
        for k in 0..at_lo.len() {
            if !(at_lo[k] < level && at_hi[k] > level) {
                continue;
            }
            let (mut a, mut b) = (lo_t, hi_t);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if norms(m)[k] < level { a = m } else { b = m }
                if b - a < 1e-15 {
                    break;
                }
            }
            let t = (0.5 * (a + b)).exp();
            if t > 0.0 && t < 1.0 {
                out.push(t);
            }
        }
    }
    out
}

/// Integrates the last chart variable over `(0, 1)` with the earlier ones
/// fixed at `fixed` (logs `fixed_logs`), adding `outer_log` to every term.
fn integrate_last(
    chart: &Chart,
    phi: &AmplitudeExpr,
    chi: &CutoffConfig,
    fixed: &[f64],
    fixed_logs: &[f64],
    outer_log: f64,
    acc: &mut Accumulator,
) {
    let n = chart.rays.len();
    let rule = zeta_rule();
    let c = coefficients_in_last(chart, fixed);
    let roots = unit_roots(&c);
    let j = n - 1;
    let mut logs_y = fixed_logs.to_vec();
    logs_y.push(0.0);
    let levels = cutoff_levels(chart, chi, &logs_y, j);
    let log_jacobian: f64 = chart.log_scale.iter().sum();
    let mut cuts = vec![0.0];
    cuts.extend(&roots);
    cuts.extend(&levels);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut logs_x = vec![0.0; n];
    let mut x = vec![0.0; n];
    let (l_fixed, one_fixed): (f64, f64) = (0..j).fold((0.0, 0.0), |(a, b), k| {
        (a + chart.l[k] * fixed_logs[k], b + (chart.ones[k] - 1.0) * fixed_logs[k])
    });
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let is_root = |v: f64| roots.contains(&v);
        let (left_root, right_root) = (is_root(a), is_root(b));
        let mut q = c.clone();
        if left_root {
            q = deflate(&q, a);
        }
        if right_root {
            q = deflate(&q, b);
        }
        let sign_f = horner(&c, 0.5 * (a + b)).signum();
        for nd in rule {
            let (y, la, lb, lw) = node(a, b, nd);
            let ly = if a == 0.0 { la } else { y.ln() };
            let mut lf = horner(&q, y).abs().ln();
            if left_root {
                lf += la;
            }
            if right_root {
                lf += lb;
            }
            if !lf.is_finite() {
                continue;
            }
            logs_y[j] = ly;
            for i in 0..n {
                logs_x[i] = chart.log_scale[i] + (0..n).map(|k| chart.rays[k][i] as f64 * logs_y[k]).sum::<f64>();
                x[i] = chart.signs[i] * logs_x[i].exp();
            }
            let cut = chi.eval(&x);
            if cut == 0.0 {
                continue;
            }
            let (sign_phi, lphi) = phi.eval_log(&logs_x, &chart.signs);
            if sign_phi == 0.0 {
                continue;
            }
            let base = outer_log + lw + one_fixed + (chart.ones[j] - 1.0) * ly + lphi + cut.ln() + log_jacobian;
            let slope = lf + l_fixed + chart.l[j] * ly;
            acc.add(sign_f, sign_phi, base, slope);
        }
    }
}

/// Breakpoints in `(0, 1)` for the first variable of a two-dimensional
/// chart: zeros of `f_σ` on the edges `y₂ = 0, 1`, places where the number
/// of zeros in `y₂` changes, and where cutoff level sets leave the square.
fn outer_cuts(chart: &Chart, chi: &CutoffConfig) -> Vec<f64> {
    let edge = |y2: f64| unit_roots(&coefficients_in_first(chart, y2));
    let mut cuts: BTreeSet<u64> = BTreeSet::new();
    let mut push = |v: f64| {
        cuts.insert(v.to_bits());
    };
    edge(0.0).into_iter().chain(edge(1.0)).for_each(&mut push);
    // Where the cutoff's level sets meet the edges y₂ = 1 and y₂ → 0.
    for l2 in [0.0, -745.0] {
        cutoff_levels(chart, chi, &[0.0, l2], 0).into_iter().for_each(&mut push);
    }
    let count = |y1: f64| unit_roots(&coefficients_in_last(chart, &[y1])).len();
    const SCAN: usize = 256;
    let grid: Vec<f64> = (1..SCAN).map(|k| k as f64 / SCAN as f64).collect();
    let counts: Vec<usize> = grid.iter().map(|&y| count(y)).collect();
    for k in 1..grid.len() {
        if counts[k] != counts[k - 1] {
            let (mut lo, mut hi) = (grid[k - 1], grid[k]);
            let c_lo = counts[k - 1];
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if count(mid) == c_lo { lo = mid } else { hi = mid }
            }
            push(0.5 * (lo + hi));
        }
    }
    let mut out: Vec<f64> = cuts.into_iter().map(f64::from_bits).filter(|&v| v > 0.0 && v < 1.0).collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

fn chart_integral(chart: &Chart, phi: &AmplitudeExpr, chi: &CutoffConfig, s: &[f64]) -> Accumulator {
    let mut acc = Accumulator::new(s);
    match chart.rays.len() {
        1 => integrate_last(chart, phi, chi, &[], &[], 0.0, &mut acc),
        _ => {
            let mut cuts = vec![0.0];
            cuts.extend(outer_cuts(chart, chi));
            cuts.push(1.0);
            for seg in cuts.windows(2) {
                for nd in zeta_rule() {
                    let (y1, la, _, lw) = node(seg[0], seg[1], nd);
                    let ly1 = if seg[0] == 0.0 { la } else { y1.ln() };
                    integrate_last(chart, phi, chi, &[y1], &[ly1], lw, &mut acc);
                }
            }
        }
    }
    acc
}

/// `Z₊(s)` and `Z₋(s)` at each `s`; every `s` must exceed the leading
/// candidate pole.
pub fn evaluate_zeta(f: &Polynomial, phi: &AmplitudeExpr, chi: &CutoffConfig, s: &[f64]) -> NumericResult<Vec<ZetaValue>> {
    let n = f.dim();
    if n > 2 {
        return Err(NumericError::DimensionTooLarge(n));
    }
    if phi.dim() != n {
        return Err(NumericError::Invalid(format!("amplitude has dimension {}, phase {n}", phi.dim())));
    }
    let (pf, pphi, fan) = chart_data(f, phi)?;
    let pole = rational::to_f64(&candidate_poles_general(&pf, &pphi, &fan, 0)?.leading);
    if let Some(&bad) = s.iter().find(|&&v| !(v > pole)) {
        return Err(NumericError::BelowPole { s: bad, pole });
    }
    let parts: Vec<Accumulator> =
        charts(f, &fan, chi.big_r).par_iter().map(|c| chart_integral(c, phi, chi, s)).collect();
    let mut total = Accumulator::new(s);
    for p in &parts {
        total.merge(p);
    }
    Ok((0..s.len()).map(|k| ZetaValue { s: s[k], plus: total.plus[k], minus: total.minus[k] }).collect())
}

/// Points `s = −λ + δ` for `δ` geometric between `lo` and `hi`.
pub fn zeta_grid(lambda: f64, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| -lambda + lo * (hi / lo).powf(k as f64 / (count - 1) as f64)).collect()
}

/// Least squares of `Z(s) ≈ B/(s+λ)^ρ + [lower Laurent terms] + c₀ + c₁(s+λ) +
/// c₂(s+λ)² + Σ_k (poles at the `nearby` locations)`: `(B, rms)`. The lower
/// Laurent terms are present only when `full` is set.
fn laurent_fit(samples: &[(f64, f64)], lambda: f64, rho: usize, full: bool, nearby: &[(f64, usize)]) -> Option<(f64, f64)> {
    let mut columns: Vec<Box<dyn Fn(f64) -> f64>> = vec![Box::new(move |d: f64| d.powi(-(rho as i32)))];
    if full {
        for k in 1..rho {
            columns.push(Box::new(move |d: f64| d.powi(-(k as i32))));
        }
    }
    for k in 0..3 {
        columns.push(Box::new(move |d: f64| d.powi(k)));
    }
    for &(mu, order) in nearby {
        for k in 1..=order {
            columns.push(Box::new(move |d: f64| (d - lambda + mu).powi(-(k as i32))));
        }
    }
    if samples.len() <= columns.len() {
        return None;
    }
    // Rows are scaled by (s+λ)^ρ so that the singular column does not dominate.
    let deltas: Vec<f64> = samples.iter().map(|p| p.0 + lambda).collect();
    if deltas.iter().any(|&d| d <= 0.0) {
        return None;
    }
    let a = DMatrix::from_fn(samples.len(), columns.len(), |i, j| columns[j](deltas[i]) * deltas[i].powi(rho as i32));
    let b = DVector::from_iterator(samples.len(), samples.iter().zip(&deltas).map(|(p, d)| p.1 * d.powi(rho as i32)));
    let x = a.clone().svd(true, true).solve(&b, 1e-15).ok()?;
    let r = &a * &x - &b;
    Some((x[0], (r.norm_squared() / samples.len() as f64).sqrt()))
}

/// Candidate poles of `Z` as positive `λ`: the leading one with its order
/// bound, and the next few, which the fits model explicitly.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PoleModel {
    #[serde(with = "rational::as_string")]
    pub lambda: Rational,
    pub rho: usize,
    pub nearby: Vec<(f64, usize)>,
}

/// Poles within this distance of the leading one enter the fits.
const NEARBY_WINDOW: f64 = 0.5;

pub fn pole_model(f: &Polynomial, phi: &AmplitudeExpr) -> NumericResult<PoleModel> {
    let (pf, pphi, fan) = chart_data(f, phi)?;
    let c = candidate_poles_general(&pf, &pphi, &fan, 10)?;
    let lead = rational::to_f64(&c.leading);
    let nearby = c
        .candidates
        .iter()
        .filter(|p| p.location != c.leading)
        .map(|p| (-rational::to_f64(&p.location), p.max_order))
        .filter(|&(mu, _)| mu + lead < NEARBY_WINDOW)
        .collect();
    Ok(PoleModel { lambda: -c.leading, rho: c.leading_order, nearby })
}

/// Fits the leading pole of `Z` from samples `(s, Z(s))` to its right.
/// `λ` is searched freely on `(−s_min, −s_min + width)` for every
/// `ρ ≤ max_rho`, and `ρ̂` is the order with the smaller residual. The
/// residue is then regressed at `candidate` when given, else at `λ̂`.
pub fn fit_pole(samples: &[(f64, f64)], max_rho: usize, candidate: Option<f64>, nearby: &[(f64, usize)]) -> NumericResult<ZetaFit> {
    if samples.len() < 8 {
        return Err(NumericError::InsufficientSamples { needed: 8, found: samples.len() });
    }
    let s_min = samples.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let s_max = samples.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let width = s_max - s_min;
    let mut results = Vec::new();
    for rho in 1..=max_rho.max(1) {
        let cost = |l: f64| laurent_fit(samples, l, rho, false, nearby).map_or(f64::INFINITY, |r| r.1);
        let (lo0, hi0) = (-s_min + 1e-6 * width, -s_min + width);
        let steps = 200;
        let h = (hi0 - lo0) / steps as f64;
        let best = (0..=steps)
            .map(|k| lo0 + h * k as f64)
            .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
            .expect("nonempty");
        let (mut lo, mut hi) = ((best - h).max(lo0), (best + h).min(hi0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if cost(m1) < cost(m2) { hi = m2 } else { lo = m1 }
        }
        let lambda = 0.5 * (lo + hi);
        results.push((lambda, cost(lambda)));
    }
    let best = (0..results.len()).min_by(|&a, &b| results[a].1.total_cmp(&results[b].1)).expect("nonempty");
    let (lambda, _) = results[best];
    let rho = best + 1;
    let at = candidate.unwrap_or(lambda);
    let (residue, _) =
        laurent_fit(samples, at, rho, true, nearby).ok_or_else(|| NumericError::Invalid("pole fit failed".into()))?;
    Ok(ZetaFit {
        lambda_hat: lambda,
        rho_hat: rho,
        residue_hat: residue,
        residuals: results.iter().map(|r| r.1).collect(),
        s_grid: samples.iter().map(|p| p.0).collect(),
    })
}

/// The coefficients of `(s + λ)^{−ρ}` in `Z₊` and `Z₋` at a fixed `λ`.
pub fn side_residues(values: &[ZetaValue], lambda: f64, rho: usize, nearby: &[(f64, usize)]) -> NumericResult<(f64, f64)> {
    let fit = |pick: fn(&ZetaValue) -> f64| {
        let pts: Vec<(f64, f64)> = values.iter().map(|v| (v.s, pick(v))).collect();
        laurent_fit(&pts, lambda, rho, true, nearby)
            .map(|r| r.0)
            .ok_or_else(|| NumericError::Invalid("residue fit failed".into()))
    };
    Ok((fit(|v| v.plus)?, fit(|v| v.minus)?))
}

/// Leading oscillatory coefficient predicted from the zeta residues.
pub fn predicted_coefficient(lambda: &Rational, rho: usize, plus: f64, minus: f64) -> NumericResult<Complex64> {
    let m = oscindex_core::poles::mellin_transfer(lambda, rho, Complex64::new(plus, 0.0), Complex64::new(minus, 0.0))?;
    Ok(m.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::parse_amplitude;
    use oscindex_core::parse_polynomial;

    #[test]
    fn roots_in_unit_interval() {
        // (y − 0.25)(y − 0.5)(y + 2)
        let c = [0.25, -1.375, 1.25, 1.0];
        let r = unit_roots(&c);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.25).abs() < 1e-14 && (r[1] - 0.5).abs() < 1e-14);
        let q = deflate(&c, 0.5);
        assert!((horner(&q, 0.3) * (0.3 - 0.5) - horner(&c, 0.3)).abs() < 1e-14);
        assert!(unit_roots(&[1.0, 0.0, 1.0]).is_empty());
    }

    #[test]
    fn one_dimensional_closed_form() {
        // With χ ≡ 1 on [−r, r]: Z(s) = 2 r^{2s+1}/(2s+1) + a part analytic at −1/2.
        let f = parse_polynomial("x1^2", 1).unwrap();
        let one = parse_amplitude("1", 1).unwrap();
        let chi = CutoffConfig::default();
        let s = [-0.3, 0.0, 0.7];
        let z = evaluate_zeta(&f, &one, &chi, &s).unwrap();
        // s = 0 gives ∫χ = r + R, since ψ(r + u) + ψ(R − u) = 1.
        assert!((z[1].total() - 0.75).abs() < 1e-9, "{}", z[1].total());
        assert!(z.iter().all(|v| v.minus == 0.0));
        let grid = zeta_grid(0.5, 0.01, 0.1, 10);
        let values = evaluate_zeta(&f, &one, &chi, &grid).unwrap();
        let fit = fit_pole(&values.iter().map(|v| (v.s, v.total())).collect::<Vec<_>>(), 1, Some(0.5), &[]).unwrap();
        assert!((fit.lambda_hat - 0.5).abs() < 1e-4, "{}", fit.lambda_hat);
        assert_eq!(fit.rho_hat, 1);
        // Residue of 2r^{2s+1}/(2s+1) at −1/2 is 1.
        assert!((fit.residue_hat - 1.0).abs() < 1e-5, "{}", fit.residue_hat);
    }

    #[test]
    fn rejects_points_past_the_pole() {
        let f = parse_polynomial("x1^2 + x2^4", 2).unwrap();
        let one = parse_amplitude("1", 2).unwrap();
        let err = evaluate_zeta(&f, &one, &CutoffConfig::default(), &[-0.8]).unwrap_err();
        assert!(matches!(err, NumericError::BelowPole { .. }));
    }

    #[test]
    fn indefinite_phase_splits_sides() {
        // x1² − x2² is antisymmetric under swapping the variables.
        let f = parse_polynomial("x1^2 - x2^2", 2).unwrap();
        let one = parse_amplitude("1", 2).unwrap();
        let z = evaluate_zeta(&f, &one, &CutoffConfig::default(), &[0.0, 1.0]).unwrap();
        assert!((z[0].plus - z[0].minus).abs() < 1e-8, "{:?}", z[0]);
        assert!((z[0].total() - 0.75 * 0.75).abs() < 1e-8, "{}", z[0].total());
        assert!((z[1].plus - z[1].minus).abs() < 1e-8);
    }

    #[test]
    fn quintic_residues_follow_the_quadratic_form() {
        // Residue of Z at −4/5 is 2(A + tB) with A, B from the line integrals.
        let c = crate::example2::example2_coefficients();
        let f = parse_polynomial("x1^5 + x1^6 + x2^5", 2).unwrap();
        let chi = CutoffConfig::default();
        for (t, amp) in [(0.0, "x1^2 + x2^2"), (3.0, "x1^2 + 3*x1*x2 + x2^2")] {
            let phi = parse_amplitude(amp, 2).unwrap();
            let model = pole_model(&f, &phi).unwrap();
            assert_eq!(model.lambda, Rational::new(4.into(), 5.into()));
            let grid = zeta_grid(0.8, 0.01, 0.1, 12);
            let v = evaluate_zeta(&f, &phi, &chi, &grid).unwrap();
            let samples: Vec<(f64, f64)> = v.iter().map(|z| (z.s, z.total())).collect();
            let fit = fit_pole(&samples, 2, Some(0.8), &model.nearby).unwrap();
            assert_eq!(fit.rho_hat, 1);
            assert!((fit.lambda_hat - 0.8).abs() < 1e-3, "{}", fit.lambda_hat);
            let expect = 2.0 * (c.a + t * c.b);
            assert!((fit.residue_hat - expect).abs() < 1e-2, "t = {t}: {} vs {expect}", fit.residue_hat);
        }
    }
}
