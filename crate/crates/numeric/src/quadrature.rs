//! Fixed rules: Gauss–Legendre nodes and a tanh-sinh rule whose nodes carry
//! their distances to both endpoints in logarithmic form.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton's method on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub const GL_ORDER: usize = 20;

/// The 20-point rule, computed once.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// A tanh-sinh node on `(0, 1)`: `u`, `ln u`, `ln(1 − u)` and the weight
/// `du/dt · h`.
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    pub u: f64,
    pub log_u: f64,
    pub log_1mu: f64,
    pub weight: f64,
    /// `ln(weight)`, finite even where `weight` underflows.
    pub log_weight: f64,
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 30.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() }
}

/// Tanh-sinh nodes `u = 1/(1 + e^{−π sinh t})` for `t = kh`, `|t| ≤ t_max`.
pub fn tanh_sinh(h: f64, t_max: f64) -> Vec<TsNode> {
    let k_max = (t_max / h).floor() as i64;
    (-k_max..=k_max)
        .map(|k| {
            let t = k as f64 * h;
            let z = PI * t.sinh();
            let log_u = -softplus(-z);
            let log_1mu = -softplus(z);
            // du/dt = π cosh t · u (1 − u)
            let log_weight = (PI * t.cosh() * h).ln() + log_u + log_1mu;
            TsNode { u: log_u.exp(), log_u, log_1mu, weight: log_weight.exp(), log_weight }
        })
        .collect()
}

/// Default tanh-sinh rule: step 1/16, `|t| ≤ 6.5`.
pub fn ts_default() -> &'static [TsNode] {
    static RULE: OnceLock<Vec<TsNode>> = OnceLock::new();
    RULE.get_or_init(|| tanh_sinh(1.0 / 16.0, 6.5))
}

/// `∫_a^b g` by tanh-sinh, where `g` receives the point together with the
/// logarithms of its distances to `a` and to `b`.
pub fn integrate_ts(a: f64, b: f64, rule: &[TsNode], mut g: impl FnMut(f64, f64, f64) -> f64) -> f64 {
    let w = b - a;
    let lw = w.ln();
    rule.iter()
        .map(|nd| {
            let x = if nd.u <= 0.5 { a + w * nd.u } else { b - w * nd.log_1mu.exp() };
            if nd.weight == 0.0 {
                return 0.0;
            }
            let v = g(x, lw + nd.log_u, lw + nd.log_1mu);
            if v == 0.0 { 0.0 } else { v * nd.weight * w }
        })
        .sum()
}

/// Like [`integrate_ts`] for integrands given as `(sign, ln|g|)`, so that
/// endpoint singularities never overflow.
pub fn integrate_ts_log(a: f64, b: f64, rule: &[TsNode], mut g: impl FnMut(f64, f64, f64) -> (f64, f64)) -> f64 {
    let w = b - a;
    let lw = w.ln();
    rule.iter()
        .map(|nd| {
            let x = if nd.u <= 0.5 { a + w * nd.u } else { b - w * nd.log_1mu.exp() };
            let (sign, log) = g(x, lw + nd.log_u, lw + nd.log_1mu);
            if sign == 0.0 { 0.0 } else { sign * (log + nd.log_weight + lw).exp() }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m - 2.0 / 39.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(5);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn ts_handles_endpoint_singularities() {
        let rule = ts_default();
        // ∫_0^1 u^{-0.9} du = 10
        let v = integrate_ts_log(0.0, 1.0, rule, |_, la, _| (1.0, -0.9 * la));
        assert!((v - 10.0).abs() < 1e-8, "{v}");
        // ∫_{-1}^{2} |x - 2|^{-1/2} dx = 2√3
        let v = integrate_ts_log(-1.0, 2.0, rule, |_, _, lb| (1.0, -0.5 * lb));
        assert!((v - 2.0 * 3f64.sqrt()).abs() < 1e-10, "{v}");
        let v = integrate_ts(0.0, PI, rule, |x, _, _| x.sin());
        assert!((v - 2.0).abs() < 1e-13);
    }
}
