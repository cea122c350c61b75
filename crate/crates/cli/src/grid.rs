//! Parsing of the `--cutoff` and `--tau-grid` flag values.

use crate::Failure;

/// `"r,R"` as two positive reals.
pub fn parse_cutoff(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Input(format!("--cutoff expects \"r,R\", got {text:?}"));
    let (r, big_r) = text.split_once(',').ok_or_else(bad)?;
    let r: f64 = r.trim().parse().map_err(|_| bad())?;
    let big_r: f64 = big_r.trim().parse().map_err(|_| bad())?;
    Ok((r, big_r))
}

/// `"2^a..2^b"` as the exponent pair `(a, b)`.
pub fn parse_tau_grid(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Input(format!("--tau-grid expects \"2^a..2^b\", got {text:?}"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let exponent = |s: &str| -> Result<f64, Failure> {
        let e = s.trim().strip_prefix("2^").ok_or_else(bad)?;
        e.trim().parse::<f64>().map_err(|_| bad())
    };
    let (a, b) = (exponent(lo)?, exponent(hi)?);
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(bad());
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags() {
        assert_eq!(parse_cutoff("0.25, 0.5").unwrap(), (0.25, 0.5));
        assert!(parse_cutoff("0.25").is_err());
        assert_eq!(parse_tau_grid("2^5..2^14").unwrap(), (5.0, 14.0));
        assert_eq!(parse_tau_grid("2^12.5..2^16").unwrap(), (12.5, 16.0));
        assert!(parse_tau_grid("32..1024").is_err());
        assert!(parse_tau_grid("2^9..2^3").is_err());
    }
}
