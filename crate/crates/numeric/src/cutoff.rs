//! Smooth cutoffs `χ` equal to one on a plateau and zero outside radius `R`.

use serde::Serialize;

use crate::{NumericError, NumericResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutoffShape {
    /// `χ(x) = Π ψ(|xᵢ|)`.
    Product,
    /// `χ(x) = ψ(|x|)`.
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffConfig {
    pub shape: CutoffShape,
    /// Plateau radius: `χ ≡ 1` inside.
    pub r: f64,
    /// Support radius: `χ ≡ 0` outside.
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl Default for CutoffConfig {
    fn default() -> Self {
        Self { shape: CutoffShape::Product, r: 0.25, big_r: 0.5 }
    }
}

/// `e^{−1/x}` for `x > 0`, else 0.
fn flat(x: f64) -> f64 {
    if x > 0.0 { (-1.0 / x).exp() } else { 0.0 }
}

impl CutoffConfig {
    pub fn new(shape: CutoffShape, r: f64, big_r: f64) -> NumericResult<Self> {
        if !(r > 0.0 && r < big_r && big_r.is_finite()) {
            return Err(NumericError::Invalid(format!("cutoff needs 0 < r < R, got r = {r}, R = {big_r}")));
        }
        Ok(Self { shape, r, big_r })
    }

    pub fn radial(r: f64, big_r: f64) -> NumericResult<Self> {
        Self::new(CutoffShape::Radial, r, big_r)
    }

    /// One-dimensional profile: 1 on `[0, r]`, 0 on `[R, ∞)`, and the
    /// smooth step `h(1−s)/(h(1−s)+h(s))`, `h(x) = e^{−1/x}`, in between.
    pub fn profile(&self, u: f64) -> f64 {
        let u = u.abs();
        if u <= self.r {
            return 1.0;
        }
        if u >= self.big_r {
            return 0.0;
        }
        let s = (u - self.r) / (self.big_r - self.r);
        let (a, b) = (flat(1.0 - s), flat(s));
        a / (a + b)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.shape {
            CutoffShape::Product => x.iter().map(|&xi| self.profile(xi)).product(),
            CutoffShape::Radial => self.profile(x.iter().map(|v| v * v).sum::<f64>().sqrt()),
        }
    }

    /// True when `χ ≡ 1` on the box.
    pub fn is_one_on(&self, lo: &[f64], hi: &[f64]) -> bool {
        let far: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs())).collect();
        match self.shape {
            CutoffShape::Product => far.iter().all(|&v| v <= self.r),
            CutoffShape::Radial => far.iter().map(|v| v * v).sum::<f64>().sqrt() <= self.r,
        }
    }

    /// True when `χ ≡ 0` on the box.
    pub fn is_zero_on(&self, lo: &[f64], hi: &[f64]) -> bool {
        let near: Vec<f64> = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| if *a <= 0.0 && *b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) })
            .collect();
        match self.shape {
            CutoffShape::Product => near.iter().any(|&v| v >= self.big_r),
            CutoffShape::Radial => near.iter().map(|v| v * v).sum::<f64>().sqrt() >= self.big_r,
        }
    }
}
