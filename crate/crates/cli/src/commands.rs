//! One function per subcommand, each returning the report and summary.

use oscindex_core::fan::{self, Fan, PullbackData};
use oscindex_core::nondegeneracy::NondegeneracyOptions;
use oscindex_core::pair::{self, PairOptions};
use oscindex_core::poles::{self, Claim, GeneralCandidates, Progression, VerdictReport};
use oscindex_core::rational::{self, Rational};
use oscindex_core::{parse_polynomial, Face, NewtonPolyhedron, Polynomial};
use oscindex_numeric::fit::{fit_asymptotics, geometric_grid, AsymptoticFit, Sample};
use oscindex_numeric::oscillatory::{oscillatory_samples, OscillatoryOptions};
use oscindex_numeric::{parse_amplitude, AmplitudeExpr, CutoffConfig, CutoffShape};
use serde::Serialize;

use crate::grid::{parse_cutoff, parse_tau_grid};
use crate::{Common, Failure, Numeric, Outcome, Shape};

pub const SCHEMA_VERSION: u32 = 1;
/// Agreement required between a fitted and a certified exponent.
pub const BETA_TOLERANCE: f64 = 0.05;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Input {
    dim: usize,
    phase: String,
    amp: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    input: Input,
    result: T,
}

/// Parsed inputs shared by every subcommand.
struct Parsed {
    f: Polynomial,
    amp: AmplitudeExpr,
    input: Input,
}

impl Parsed {
    fn new(c: &Common) -> Result<Self, Failure> {
        let f = parse_polynomial(&c.phase, c.dim)?;
        let amp = parse_amplitude(&c.amp, c.dim)?;
        let input = Input { dim: c.dim, phase: f.to_string(), amp: amp.text().to_string() };
        Ok(Self { f, amp, input })
    }

    /// The polynomial part of the amplitude, which the exact pipeline uses.
    fn phi(&self) -> Result<Polynomial, Failure> {
        let phi = self.amp.polynomial_part();
        if phi.is_zero() {
            return Err(Failure::Input("amplitude has no polynomial part for the exact pipeline".into()));
        }
        Ok(phi)
    }

    fn pf(&self) -> Result<NewtonPolyhedron, Failure> {
        Ok(NewtonPolyhedron::from_polynomial(&self.f)?)
    }

    fn report<T: Serialize>(self, command: &str, result: T) -> Result<String, Failure> {
        let r = Report { schema_version: SCHEMA_VERSION, command, input: self.input, result };
        serde_json::to_string_pretty(&r).map_err(|e| Failure::Runtime(e.into()))
    }
}

fn options(c: &Common) -> PairOptions {
    PairOptions { even_shortcut: true, nondegeneracy: NondegeneracyOptions { seed: c.seed, ..Default::default() } }
}

fn done(json: String, summary: String) -> Result<Outcome, Failure> {
    Ok(Outcome { json, summary, inconclusive: false })
}

fn vertex_list(p: &NewtonPolyhedron) -> String {
    let v: Vec<String> = p
        .vertices()
        .iter()
        .map(|v| format!("({})", v.as_slice().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    v.join(" ")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PolyhedronResult<'a> {
    polyhedron: &'a NewtonPolyhedron,
    convenient: bool,
    newton_diagram: Vec<&'a Face>,
    /// `d_f = d(f, 1)`, when `f(0) = 0`.
    #[serde(with = "rational::as_opt_string")]
    phase_distance: Option<Rational>,
}

pub fn polyhedron(c: &Common) -> Result<Outcome, Failure> {
    let p = Parsed::new(c)?;
    let pf = p.pf()?;
    let d = pair::phase_distance(&pf).ok();
    let summary = format!(
        "vertices {}; {} facets; convenient: {}; d_f = {}",
        vertex_list(&pf),
        pf.facets().len(),
        pf.is_convenient(),
        d.as_ref().map_or("undefined".into(), |d| d.to_string())
    );
    let result = PolyhedronResult { polyhedron: &pf, convenient: pf.is_convenient(), newton_diagram: pf.newton_diagram(), phase_distance: d };
    let json = Parsed::new(c)?.report("polyhedron", result)?;
    done(json, summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WithAmplitude<T: Serialize> {
    #[serde(flatten)]
    inner: T,
    /// Flat atoms were dropped for the exact pipeline.
    flat_atoms_ignored: bool,
}

pub fn pair(c: &Common) -> Result<Outcome, Failure> {
    let p = Parsed::new(c)?;
    let a = pair::analyze_pair(&p.f, &p.phi()?, &options(c))?;
    let summary = format!(
        "d = {}, m = {}, order bound {}, phi_Gamma0 = {} ({}), nondegenerate: {}",
        a.d,
        a.m,
        a.order_bound,
        a.phi_gamma0,
        a.sign_phi_gamma0.status.as_str(),
        a.nondegeneracy.status.as_str()
    );
    let flat = p.amp.has_flat_atoms();
    done(p.report("pair", WithAmplitude { inner: &a, flat_atoms_ignored: flat })?, summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FanResult {
    phase_fan: Fan,
    amplitude_fan: Fan,
    common_refinement: Fan,
    simplicial: bool,
    unimodular: bool,
    unimodular_refinement: Fan,
}

pub fn fan(c: &Common) -> Result<Outcome, Failure> {
    let p = Parsed::new(c)?;
    let pf = p.pf()?;
    let pphi = NewtonPolyhedron::from_polynomial(&p.phi()?)?;
    let phase_fan = fan::normal_fan(&pf)?;
    let amplitude_fan = fan::normal_fan(&pphi)?;
    let common_refinement = fan::common_refinement(&phase_fan, &amplitude_fan)?;
    let unimodular_refinement = fan::pair_resolution_fan(&pf, &pphi)?;
    let summary = format!(
        "refinement: {} rays, {} maximal cones; unimodular refinement: {} rays, {} maximal cones",
        common_refinement.rays().len(),
        common_refinement.max_cone_ids().len(),
        unimodular_refinement.rays().len(),
        unimodular_refinement.max_cone_ids().len()
    );
    let result = FanResult {
        simplicial: common_refinement.is_simplicial(),
        unimodular: common_refinement.is_unimodular(),
        phase_fan,
        amplitude_fan,
        common_refinement,
        unimodular_refinement,
    };
    done(p.report("fan", result)?, summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Chart {
    #[serde(flatten)]
    data: PullbackData,
    f_sigma: String,
    phi_sigma: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResolveResult {
    fan: Fan,
    charts: Vec<Chart>,
}

pub fn resolve(c: &Common) -> Result<Outcome, Failure> {
    let p = Parsed::new(c)?;
    let phi = p.phi()?;
    let pf = p.pf()?;
    let pphi = NewtonPolyhedron::from_polynomial(&phi)?;
    let fan = fan::pair_resolution_fan(&pf, &pphi)?;
    let charts = fan
        .max_cones()
        .iter()
        .map(|sigma| {
            let data = fan::pullback(&p.f, &pf, Some((&phi, &pphi)), sigma, true)?;
            let show = |q: &Option<Polynomial>| q.as_ref().map(|q| q.to_string()).unwrap_or_default();
            Ok(Chart { f_sigma: show(&data.f_sigma), phi_sigma: show(&data.phi_sigma), data })
        })
        .collect::<Result<Vec<_>, oscindex_core::Error>>()?;
    let vanishing = charts.iter().filter(|c| c.data.f_sigma_constant == rational::int(0)).count();
    let summary = format!(
        "{} charts over {} rays; {} with f_sigma(0) = 0",
        charts.len(),
        fan.rays().len(),
        vanishing
    );
    done(p.report("resolve", ResolveResult { fan, charts })?, summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PolesResult {
    nu_max: i64,
    #[serde(flatten)]
    candidates: GeneralCandidates,
    progressions: Vec<Progression>,
}

pub fn poles(c: &Common) -> Result<Outcome, Failure> {
    if c.nu_max < 0 {
        return Err(Failure::Input("--nu-max must be nonnegative".into()));
    }
    let p = Parsed::new(c)?;
    let pf = p.pf()?;
    let pphi = NewtonPolyhedron::from_polynomial(&p.phi()?)?;
    let fan = fan::pair_resolution_fan(&pf, &pphi)?;
    let candidates = poles::candidate_poles_general(&pf, &pphi, &fan, c.nu_max)?;
    let progressions = poles::progressions(&pf, &pphi, &fan);
    let summary = format!(
        "{} candidates; leading {} of order <= {}",
        candidates.candidates.len(),
        candidates.leading,
        candidates.leading_order
    );
    done(p.report("poles", PolesResult { nu_max: c.nu_max, candidates, progressions })?, summary)
}

fn verdict_summary(v: &VerdictReport) -> String {
    let failed: Vec<&str> = v
        .hypotheses
        .iter()
        .filter(|h| h.status != poles::HypothesisStatus::Holds)
        .map(|h| h.id.as_str())
        .collect();
    format!(
        "{:?}: d = {}, m = {}, beta {}, eta {}; not holding: [{}]",
        v.claim,
        v.d_newton,
        v.m,
        v.beta.as_ref().map_or_else(|| format!("<= {}", v.leading_candidate), |b| format!("= {b}")),
        v.eta.map_or("?".into(), |e| e.to_string()),
        failed.join(", ")
    )
}

pub fn verdict(c: &Common) -> Result<Outcome, Failure> {
    let p = Parsed::new(c)?;
    let v = poles::oscillation_verdict(&p.f, &p.phi()?, &options(c))?;
    let summary = verdict_summary(&v);
    let inconclusive = v.claim == Claim::Inconclusive;
    let flat = p.amp.has_flat_atoms();
    let json = p.report("verdict", WithAmplitude { inner: &v, flat_atoms_ignored: flat })?;
    Ok(Outcome { json, summary, inconclusive })
}

pub fn symmetry(c: &Common) -> Result<Outcome, Failure> {
    let p = Parsed::new(c)?;
    let s = poles::symmetry_check(&p.f, &p.phi()?, &options(c))?;
    let summary = format!(
        "d1 = {}, d2 = {}, product = {}, proportional: {}, applicable: {:?}",
        s.d1, s.d2, s.distance_product, s.proportional, s.applicable
    );
    done(p.report("symmetry", s)?, summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TauGrid {
    log2_min: f64,
    log2_max: f64,
    log2_step: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Consistency {
    expected_beta: f64,
    tolerance: f64,
    agrees: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NumericResult {
    cutoff: CutoffConfig,
    tau_grid: TauGrid,
    /// Present only when the fit failed; the fit carries its samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<Sample>>,
    fit: Option<AsymptoticFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit_error: Option<String>,
    /// Verdict for the polynomial part of the amplitude.
    verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict_error: Option<String>,
    flat_atoms_ignored: bool,
    /// Fitted against certified exponent, when the verdict certifies one.
    #[serde(skip_serializing_if = "Option::is_none")]
    consistency: Option<Consistency>,
}

pub fn verify_numeric(args: &Numeric) -> Result<Outcome, Failure> {
    let c = &args.common;
    let p = Parsed::new(c)?;
    let (r, big_r) = parse_cutoff(&args.cutoff)?;
    let shape = match args.shape {
        Shape::Product => CutoffShape::Product,
        Shape::Radial => CutoffShape::Radial,
    };
    let chi = CutoffConfig::new(shape, r, big_r).map_err(|e| Failure::Input(e.to_string()))?;
    let (lo, hi) = parse_tau_grid(&args.tau_grid)?;
    if !(args.tau_step > 0.0) {
        return Err(Failure::Input("--tau-step must be positive".into()));
    }
    let taus = geometric_grid(lo, hi, args.tau_step);
    let values = oscillatory_samples(&p.f, std::slice::from_ref(&p.amp), &chi, &taus, &OscillatoryOptions::default())?;
    let samples: Vec<Sample> = taus.iter().zip(values).map(|(&tau, v)| Sample { tau, value: v[0] }).collect();
    if let Some(path) = &args.csv {
        write_csv(path, &samples)?;
    }
    let (fit, fit_error) = match fit_asymptotics(&samples, args.max_eta.unwrap_or(c.dim)) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (verdict, verdict_error) = match p.phi().and_then(|phi| Ok(poles::oscillation_verdict(&p.f, &phi, &options(c))?)) {
        Ok(v) => (Some(v), None),
        Err(Failure::Input(e)) => (None, Some(e)),
        Err(e) => return Err(e),
    };
    let consistency = match (&fit, &verdict) {
        (Some(fit), Some(v)) if v.claim == Claim::ExactIndexAndMultiplicity => v.beta.as_ref().map(|b| {
            let expected_beta = rational::to_f64(b);
            Consistency { expected_beta, tolerance: BETA_TOLERANCE, agrees: (fit.beta_hat - expected_beta).abs() <= BETA_TOLERANCE }
        }),
        _ => None,
    };
    let summary = match &fit {
        Some(fit) => format!(
            "betaHat = {:.4}, etaHat = {}{}, on tau in [{}, {}]{}",
            fit.beta_hat,
            fit.eta_hat,
            if fit.eta_confident { "" } else { " (low confidence)" },
            fit.tau_range.0,
            fit.tau_range.1,
            verdict.as_ref().map_or(String::new(), |v| format!("; {}", verdict_summary(v)))
        ),
        None => format!("no fit: {}", fit_error.as_deref().unwrap_or("")),
    };
    let inconclusive = verdict.as_ref().is_some_and(|v| v.claim == Claim::Inconclusive);
    let result = NumericResult {
        cutoff: chi,
        tau_grid: TauGrid { log2_min: lo, log2_max: hi, log2_step: args.tau_step },
        samples: fit.is_none().then_some(samples),
        fit,
        fit_error,
        verdict,
        verdict_error,
        flat_atoms_ignored: p.amp.has_flat_atoms(),
        consistency,
    };
    Ok(Outcome { json: p.report("verify-numeric", result)?, summary, inconclusive })
}

fn write_csv(path: &std::path::Path, samples: &[Sample]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Runtime(e.into()))?;
    let io = |e: csv::Error| Failure::Runtime(e.into());
    w.write_record(["tau", "re", "im", "abs"]).map_err(io)?;
    for s in samples {
        w.serialize((s.tau, s.value.re, s.value.im, s.value.norm())).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
