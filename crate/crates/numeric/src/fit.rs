//! Fits of `I(τ) ≈ C τ^β (log τ)^{η−1}` to sampled values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use oscindex_core::poles::complex_pair;
use serde::Serialize;

use crate::{NumericError, NumericResult};

/// Samples with `|I|` below this are treated as quadrature noise.
pub const NOISE_FLOOR: f64 = 1e-12;
pub const MIN_SAMPLES: usize = 8;
/// Residuals within this factor make the choice of `η` unreliable.
const ETA_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub tau: f64,
    #[serde(serialize_with = "complex_pair")]
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AsymptoticFit {
    pub beta_hat: f64,
    /// Standard error of `β̂` from the line fit.
    pub beta_stderr: f64,
    pub eta_hat: usize,
    #[serde(serialize_with = "complex_pair")]
    pub c_hat: Complex64,
    /// RMS residual of `log|I|` for the chosen `η`.
    pub residual: f64,
    /// Residual for every `η` tried, starting at `η = 1`.
    pub residuals: Vec<f64>,
    pub eta_confident: bool,
    pub tau_range: (f64, f64),
    /// Tail samples below the noise floor, left out of the fit.
    pub dropped: usize,
    pub samples: Vec<Sample>,
}

/// `(β, c, rms, stderr of β)` of the least-squares line `y = β x + c`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let beta = sxy / sxx;
    let c = my - beta * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - beta * a - c).powi(2)).sum();
    let stderr = if n > 2.0 { (ss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (beta, c, (ss / n).sqrt(), stderr)
}

/// Fits the leading exponent and log-power on the upper half of the
/// `τ` grid, trying `η = 1..=max_eta`.
pub fn fit_asymptotics(samples: &[Sample], max_eta: usize) -> NumericResult<AsymptoticFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(NumericError::InsufficientSamples { needed: MIN_SAMPLES, found: samples.len() });
    }
    if let Some(s) = samples.iter().find(|s| !(s.tau > 1.0)) {
        return Err(NumericError::Invalid(format!("fit needs tau > 1, got {}", s.tau)));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let tail = &sorted[sorted.len() / 2..];
    let kept: Vec<Sample> = tail.iter().copied().filter(|s| s.value.norm() > NOISE_FLOOR).collect();
    if kept.is_empty() {
        return Err(NumericError::Vanishing);
    }
    if kept.len() < 3 {
        return Err(NumericError::InsufficientSamples { needed: 3, found: kept.len() });
    }
    let lt: Vec<f64> = kept.iter().map(|s| s.tau.ln()).collect();
    let llt: Vec<f64> = lt.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = kept.iter().map(|s| s.value.norm().ln()).collect();

    let fits: Vec<(f64, f64, f64)> = (1..=max_eta.max(1))
        .map(|eta| {
            let shifted: Vec<f64> = y.iter().zip(&llt).map(|(v, ll)| v - (eta - 1) as f64 * ll).collect();
            let (beta, _, rms, stderr) = line_fit(&lt, &shifted);
            (beta, rms, stderr)
        })
        .collect();
    let best = (0..fits.len()).min_by(|&a, &b| fits[a].1.total_cmp(&fits[b].1)).expect("at least one eta");
    let confident = fits.iter().enumerate().all(|(i, f)| i == best || f.1 > ETA_MARGIN * fits[best].1);
    let (beta, rms, stderr) = fits[best];
    let eta = best + 1;
    let last = kept.last().expect("nonempty");
    let scale = last.tau.powf(beta) * last.tau.ln().powi(eta as i32 - 1);
    Ok(AsymptoticFit {
        beta_hat: beta,
        beta_stderr: stderr,
        eta_hat: eta,
        c_hat: last.value / scale,
        residual: rms,
        residuals: fits.iter().map(|f| f.1).collect(),
        eta_confident: confident,
        tau_range: (tail[0].tau, tail[tail.len() - 1].tau),
        dropped: tail.len() - kept.len(),
        samples: sorted,
    })
}

/// Complex least-squares coefficients `c_j` of `I(τ) ≈ Σ c_j τ^{β_j} (log τ)^{η_j−1}`
/// for known exponents, using every sample.
pub fn fit_coefficients(samples: &[Sample], terms: &[(f64, usize)]) -> NumericResult<Vec<Complex64>> {
    if samples.len() < terms.len() {
        return Err(NumericError::InsufficientSamples { needed: terms.len(), found: samples.len() });
    }
    let tau_max = samples.iter().map(|s| s.tau).fold(f64::NEG_INFINITY, f64::max);
    // Columns are normalised to one at τ_max for conditioning.
    let basis = |tau: f64, (beta, eta): (f64, usize)| {
        let k = eta as i32 - 1;
        (tau / tau_max).powf(beta) * (tau.ln() / tau_max.ln()).powi(k)
    };
    let a = DMatrix::from_fn(samples.len(), terms.len(), |i, j| basis(samples[i].tau, terms[j]));
    let svd = a.svd(true, true);
    let solve = |rhs: DVector<f64>| {
        svd.solve(&rhs, 1e-14).map_err(|e| NumericError::Invalid(format!("least squares failed: {e}")))
    };
    let re = solve(DVector::from_iterator(samples.len(), samples.iter().map(|s| s.value.re)))?;
    let im = solve(DVector::from_iterator(samples.len(), samples.iter().map(|s| s.value.im)))?;
    Ok(terms
        .iter()
        .enumerate()
        .map(|(j, &(beta, eta))| {
            let unit = tau_max.powf(beta) * tau_max.ln().powi(eta as i32 - 1);
            Complex64::new(re[j], im[j]) / unit
        })
        .collect())
}

/// Geometric grid `2^lo, 2^{lo+step}, …, 2^hi`.
pub fn geometric_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| (lo + k as f64 * step).exp2()).collect()
}
