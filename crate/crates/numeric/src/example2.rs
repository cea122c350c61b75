//! The coefficients `A = (1/5)∫|u⁵+1|^{−4/5}(u²+1)du` and
//! `B = (1/5)∫|u⁵+1|^{−4/5}u du` of the leading term of
//! `∫ e^{iτ(x1⁵+x1⁶+x2⁵)}(x1² + t·x1x2 + x2²)χ dx`, with `t₀ = −A/B`.

use serde::Serialize;

use crate::quadrature::{integrate_ts_log, ts_default};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Example2Coefficients {
    pub a: f64,
    pub b: f64,
    pub t0: f64,
}

fn signed_log(v: f64) -> (f64, f64) {
    if v == 0.0 { (0.0, f64::NEG_INFINITY) } else { (v.signum(), v.abs().ln()) }
}

/// `∫_{−∞}^{∞} |u⁵+1|^{−4/5} g(u) du` for `g(u) = u^k`, split at `±1` and
/// folded onto `(0, 1]` by `u = ±1/w` on the tails.
fn moment(k: i32) -> f64 {
    let rule = ts_default();
    // (−1, 1): u⁵ + 1 = (u + 1)(u⁴ − u³ + u² − u + 1).
    let middle = integrate_ts_log(-1.0, 1.0, rule, |u, log_da, _| {
        let q = u.powi(4) - u.powi(3) + u * u - u + 1.0;
        let (s, l) = signed_log(u.powi(k));
        (s, l - 0.8 * (log_da + q.ln()))
    });
    // (−∞, −1]: u = −1/w gives (−1)^k w^{2−k} (1 − w⁵)^{−4/5}.
    let left = integrate_ts_log(0.0, 1.0, rule, |w, _, log_db| {
        let q = 1.0 + w + w * w + w.powi(3) + w.powi(4);
        let (s, l) = signed_log((-1.0f64).powi(k) * w.powi(2 - k));
        (s, l - 0.8 * (log_db + q.ln()))
    });
    // [1, ∞): u = 1/w gives w^{2−k} (1 + w⁵)^{−4/5}.
    let right = integrate_ts_log(0.0, 1.0, rule, |w, _, _| {
        let (s, l) = signed_log(w.powi(2 - k));
        (s, l - 0.8 * (1.0 + w.powi(5)).ln())
    });
    middle + left + right
}

pub fn example2_coefficients() -> Example2Coefficients {
    let a = (moment(2) + moment(0)) / 5.0;
    let b = moment(1) / 5.0;
    assert!(a > 0.0, "A must be positive");
    assert!(b < 0.0, "B must be negative");
    Example2Coefficients { a, b, t0: -a / b }
}
