//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness.

#[path = "../../core/tests/props/mod.rs"]
mod props;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use oscindex_core::fan;
use oscindex_core::pair::{self, PairOptions};
use oscindex_core::poles::{self, Claim, HypothesisStatus, VerdictReport};
use oscindex_core::rational::{int, ratio, Rational};
use oscindex_core::{parse_polynomial, NewtonPolyhedron, Polynomial};
use oscindex_numeric::example2::example2_coefficients;
use oscindex_numeric::fit::{fit_asymptotics, fit_coefficients, geometric_grid, Sample};
use oscindex_numeric::oscillatory::{evaluate_oscillatory, oscillatory_samples, OscillatoryOptions};
use oscindex_numeric::{parse_amplitude, CutoffConfig, NumericError};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const QUINTIC: &str = "x1^5 + x1^6 + x2^5";

fn quintic_amplitude(t: i64) -> String {
    format!("x1^2 + {t}*x1*x2 + x2^2")
}

fn options() -> PairOptions {
    PairOptions { even_shortcut: true, ..Default::default() }
}

fn poly(text: &str, n: usize) -> Result<Polynomial, String> {
    parse_polynomial(text, n).map_err(|e| e.to_string())
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("took {:.2} s, limit {limit} s", elapsed.as_secs_f64()))
    }
}

fn leading_candidate(f: &Polynomial, phi: &Polynomial) -> Result<Rational, String> {
    let pf = NewtonPolyhedron::from_polynomial(f).map_err(|e| e.to_string())?;
    let pphi = NewtonPolyhedron::from_polynomial(phi).map_err(|e| e.to_string())?;
    let fan = fan::pair_resolution_fan(&pf, &pphi).map_err(|e| e.to_string())?;
    let g = poles::candidate_poles_general(&pf, &pphi, &fan, poles::DEFAULT_NU_MAX).map_err(|e| e.to_string())?;
    g.candidates.iter().map(|c| c.location.clone()).max().ok_or_else(|| "no candidates".into())
}

fn quintic_invariants() -> Outcome {
    let start = Instant::now();
    let f = poly(QUINTIC, 2)?;
    for t in [0, 1, 2, 3] {
        let phi = poly(&quintic_amplitude(t), 2)?;
        let a = pair::analyze_pair(&f, &phi, &options()).map_err(|e| e.to_string())?;
        ensure!(a.d == ratio(5, 4), "t = {t}: d = {}", a.d);
        ensure!(a.m == 1, "t = {t}: m = {}", a.m);
        ensure!(a.order_bound == 1, "t = {t}: order bound {}", a.order_bound);
        let lead = leading_candidate(&f, &phi)?;
        ensure!(lead == ratio(-4, 5), "t = {t}: leading candidate {lead}");
        ensure!(a.essential.len() == 1, "t = {t}: {} essential faces", a.essential.len());
        let edge = &a.essential[0];
        let mut corners: Vec<Vec<i64>> = edge.vertices.iter().map(|v| v.as_slice().to_vec()).collect();
        corners.sort();
        ensure!(edge.compact && edge.dim == 1 && corners == [vec![0, 2], vec![2, 0]], "t = {t}: essential face {edge:?}");
        ensure!(a.phi_gamma0 == phi, "t = {t}: essential part {}", a.phi_gamma0);
    }
    within(start.elapsed(), 1.0)?;
    Ok("d = 5/4, m = 1, leading -4/5, order bound 1, essential face is the whole edge".into())
}

fn pathology_invariants() -> Outcome {
    let start = Instant::now();
    let f = poly("x1^4", 2)?;
    let phi = poly("x1^2*x2^2", 2)?;
    let a = pair::analyze_pair(&f, &phi, &options()).map_err(|e| e.to_string())?;
    ensure!(a.d == ratio(4, 3), "d = {}", a.d);
    ensure!(a.m == 1, "m = {}", a.m);
    let lead = leading_candidate(&f, &phi)?;
    ensure!(lead == ratio(-3, 4), "largest candidate {lead}");
    within(start.elapsed(), 1.0)?;
    Ok("d = 4/3, m = 1, candidates start at -3/4".into())
}

fn status(v: &VerdictReport, id: &str) -> Option<HypothesisStatus> {
    v.hypotheses.iter().find(|h| h.id == id).map(|h| h.status)
}

fn verdict_suite() -> Outcome {
    let start = Instant::now();
    let f = poly(QUINTIC, 2)?;
    for t in [0, 1, 2, 3] {
        let phi = poly(&quintic_amplitude(t), 2)?;
        let v = poles::oscillation_verdict(&f, &phi, &options()).map_err(|e| e.to_string())?;
        if t < 3 {
            ensure!(v.claim == Claim::ExactIndexAndMultiplicity, "t = {t}: {:?}", v.claim);
            ensure!(v.beta == Some(ratio(-4, 5)) && v.eta == Some(1), "t = {t}: beta {:?}, eta {:?}", v.beta, v.eta);
        } else {
            ensure!(v.claim == Claim::UpperBoundOnly, "t = 3: {:?}", v.claim);
            for id in ["essential-terms-even-one-sign", "phase-convenient-and-essential-part-sign-definite"] {
                ensure!(status(&v, id) == Some(HypothesisStatus::Fails), "t = 3: {id} is {:?}", status(&v, id));
            }
        }
    }
    within(start.elapsed(), 5.0)?;
    Ok("t = 0, 1, 2 exact with beta -4/5, eta 1; t = 3 upper bound only".into())
}

fn samples_of(f: &Polynomial, amps: &[&str], chi: &CutoffConfig, taus: &[f64]) -> Result<Vec<Vec<Sample>>, String> {
    let n = f.dim();
    let phis = amps.iter().map(|a| parse_amplitude(a, n)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let values = oscillatory_samples(f, &phis, chi, taus, &OscillatoryOptions::default()).map_err(|e| e.to_string())?;
    Ok((0..amps.len())
        .map(|k| taus.iter().zip(&values).map(|(&tau, v)| Sample { tau, value: v[k] }).collect())
        .collect())
}

fn parity_table() -> Outcome {
    let grid = geometric_grid(8.0, 17.0, 0.5);
    let chi = CutoffConfig::default();
    let mut notes = Vec::new();
    for (q, p) in [(2i64, 0i64), (2, 1), (3, 0), (3, 2), (4, 2), (5, 3)] {
        let f = poly(&format!("x1^{q}"), 1)?;
        let amp = format!("x1^{p}");
        let v = poles::oscillation_verdict(&f, &poly(&amp, 1)?, &options()).map_err(|e| e.to_string())?;
        let (_, nonzero) = poles::one_dim_reference(q, p, &int(1), &int(1)).map_err(|e| e.to_string())?;
        let exact = v.claim == Claim::ExactIndexAndMultiplicity;
        ensure!(exact == nonzero, "({q},{p}): claim {:?} but leading coefficient nonzero = {nonzero}", v.claim);
        let s = samples_of(&f, &[&amp], &chi, &grid)?.remove(0);
        let target = -((p + 1) as f64) / q as f64;
        let beta = match fit_asymptotics(&s, 1) {
            Ok(fit) => fit.beta_hat,
            Err(NumericError::Vanishing) => f64::NEG_INFINITY,
            Err(e) => return Err(format!("({q},{p}): {e}")),
        };
        if nonzero {
            ensure!((beta - target).abs() <= 0.05, "({q},{p}): beta_hat {beta} vs {target}");
        } else {
            ensure!(beta < target + 0.1, "({q},{p}): beta_hat {beta} not below {}", target + 0.1);
        }
        notes.push(format!("({q},{p}) {beta:.3}"));
    }
    Ok(notes.join(", "))
}

fn fresnel() -> Outcome {
    let f = poly("x1^2", 1)?;
    let one = parse_amplitude("1", 1).map_err(|e| e.to_string())?;
    let chi = CutoffConfig::default();
    let mut worst: f64 = 0.0;
    for k in 8..=14 {
        let tau = 2f64.powi(k);
        let i = evaluate_oscillatory(&f, &one, &chi, tau).map_err(|e| e.to_string())?;
        let exact = Complex64::from_polar((std::f64::consts::PI / tau).sqrt(), std::f64::consts::FRAC_PI_4);
        let scaled = (i - exact).norm() * tau.sqrt();
        ensure!(scaled <= 1e-3, "tau = 2^{k}: sqrt(tau)|I - exact| = {scaled:e}");
        worst = worst.max(scaled);
    }
    Ok(format!("worst sqrt(tau)|I - exact| = {worst:.2e}"))
}

const GAMMA_FOUR_FIFTHS: f64 = 1.164229713725303;

fn coefficient_law() -> Outcome {
    let c = example2_coefficients();
    ensure!(c.a > 0.0 && c.b < 0.0, "A = {}, B = {}", c.a, c.b);
    let f = poly(QUINTIC, 2)?;
    let grid = geometric_grid(15.0, 22.0, 0.5);
    // I(τ) is linear in t, so two quadratures give every amplitude.
    let basis = samples_of(&f, &["x1^2 + x2^2", "x1*x2"], &CutoffConfig::default(), &grid)?;
    let terms: Vec<(f64, usize)> = (0..5).map(|j| (-(4 + j) as f64 / 5.0, 1)).collect();
    let fitted = |t: f64| -> Result<Complex64, String> {
        let s: Vec<Sample> =
            basis[0].iter().zip(&basis[1]).map(|(a, b)| Sample { tau: a.tau, value: a.value + t * b.value }).collect();
        Ok(fit_coefficients(&s, &terms).map_err(|e| e.to_string())?[0])
    };
    let ratios = [-1.0, 0.0, 1.0, 2.0]
        .into_iter()
        .map(|t| Ok(fitted(t)? / (c.a + t * c.b)))
        .collect::<Result<Vec<Complex64>, String>>()?;
    let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    for r in &ratios {
        ensure!((r - mean).norm() <= 0.1 * mean.norm(), "ratios {ratios:?} not proportional");
    }
    // Stationary phase on the edge predicts the factor 2Γ(4/5)cos(2π/5).
    let predicted = 2.0 * GAMMA_FOUR_FIFTHS * (0.4 * std::f64::consts::PI).cos();
    ensure!((mean - predicted).norm() <= 0.1 * predicted, "ratio {mean} vs {predicted}");
    // The fitted coefficient crosses zero along the direction it has at t = 0.
    let direction = fitted(0.0)?;
    let along = |t: f64| -> Result<f64, String> { Ok((fitted(t)? * direction.conj()).re) };
    let (mut lo, mut hi) = (0.0, 10.0);
    ensure!(along(lo)? > 0.0 && along(hi)? < 0.0, "no sign change on [0, 10]");
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if along(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_hat = 0.5 * (lo + hi);
    ensure!((t_hat - c.t0).abs() <= 0.05, "zero at t = {t_hat}, expected {}", c.t0);
    Ok(format!("A = {:.6}, B = {:.6}, ratio {:.4} vs {predicted:.4}, zero at t = {t_hat:.4} vs {:.4}", c.a, c.b, mean.norm(), c.t0))
}

fn pathology_fit() -> Outcome {
    let f = poly("x1^4", 2)?;
    let chi = CutoffConfig::radial(0.5, 1.0).map_err(|e| e.to_string())?;
    let s = samples_of(&f, &["x1^2*x2^2 + exp(-1/x2^2)"], &chi, &geometric_grid(5.0, 16.0, 1.0))?.remove(0);
    let fit = fit_asymptotics(&s, 2).map_err(|e| e.to_string())?;
    ensure!((fit.beta_hat + 0.25).abs() <= 0.05, "beta_hat = {}", fit.beta_hat);
    Ok(format!("beta_hat = {:.4}, above -3/4", fit.beta_hat))
}

const PROPERTY_CASES: u32 = 256;

fn check<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| match e {
        TestError::Fail(why, value) => format!("{name}: {why} for {value:?}"),
        TestError::Abort(why) => format!("{name}: aborted, {why}"),
    })
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let any = any::<u64>;
    check("hull", (props::dim(), any()), |(n, s)| props::hull_matches_brute_force(n, s))?;
    check("distance", (props::dim(), any(), any()), |(n, a, b)| props::distance_matches_bisection(n, a, b))?;
    check("monomial", (props::dim().prop_flat_map(|n| props::phase(n, 5)), any()), |(f, s)| {
        props::monomial_identities(f, s)
    })?;
    check("product", (1usize..=3, any(), any(), 1i64..=3), |(n, a, b, t)| {
        props::distance_product_is_at_least_one(n, a, b, t)
    })?;
    check("fans", props::dim().prop_flat_map(|n| props::phase(n, 4)), props::unimodular_fans)?;
    check("pullbacks", props::dim().prop_flat_map(|n| props::phase(n, 4)), props::pullbacks_divide_exactly)?;
    within(start.elapsed(), 60.0)?;
    Ok(format!("6 suites x {PROPERTY_CASES} cases in {:.1} s", start.elapsed().as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("quintic example invariants", quintic_invariants),
        ("flat amplitude example invariants", pathology_invariants),
        ("verdict suite", verdict_suite),
        ("one-dimensional parity table", parity_table),
        ("Fresnel oracle", fresnel),
        ("quintic coefficient law", coefficient_law),
        ("flat amplitude exponent", pathology_fit),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS {} {name} ({secs:.1} s): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1} s): {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
