//! Candidate poles of the local zeta functions, the oscillation-index verdict
//! with its hypothesis audit, and the Mellin transfer from zeta residues to
//! oscillatory coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{self, Fan};
use crate::nondegeneracy::NondegeneracyStatus;
use crate::pair::{self, PairAnalysis, PairOptions};
use crate::polyhedron::NewtonPolyhedron;
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::{self, Rational};
use crate::sign::{self, SignStatus};

pub const DEFAULT_NU_MAX: i64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Provenance {
    /// `−(l̃(a) + ⟨a⟩ + ν) / l(a)` for the ray `a`.
    Ray { ray: Vec<i64>, nu: i64 },
    /// The negative integers.
    IntegerSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PoleCandidate {
    #[serde(with = "rational::as_string")]
    pub location: Rational,
    pub max_order: usize,
    pub provenance: Vec<Provenance>,
}

/// Per-ray data `(a, l(a), l̃(a) + ⟨a⟩)`.
struct RayData {
    ray: Vec<i64>,
    l: i64,
    shift: i64,
}

fn ray_data(fan: &Fan, pf: &NewtonPolyhedron, shift: impl Fn(&[i64]) -> i64) -> Vec<RayData> {
    fan.rays()
        .iter()
        .map(|a| RayData { ray: a.clone(), l: pf.support_value_i64(a), shift: shift(a) })
        .collect()
}

fn check_fan(fan: &Fan, pf: &NewtonPolyhedron) -> Result<()> {
    if fan.dim() != pf.dim() {
        return Err(Error::DimensionMismatch { expected: pf.dim(), found: fan.dim() });
    }
    Ok(())
}

/// The `ν` at which ray data produce the location `s`, if any.
fn shift_at(r: &RayData, s: &Rational) -> Option<i64> {
    if r.l <= 0 {
        return None;
    }
    let nu = -(s * rational::int(r.l)) - rational::int(r.shift);
    (rational::is_integer(&nu) && !nu.is_negative()).then(|| nu.to_integer().to_i64().expect("small"))
}

/// Order bound at `s`: the largest number of rays of one maximal cone that
/// produce `s`, raised by one (capped at `n`) at negative integers.
fn order_at(fan: &Fan, rays: &[RayData], s: &Rational) -> usize {
    let k = fan
        .max_cone_ids()
        .iter()
        .map(|c| c.iter().filter(|&&j| shift_at(&rays[j], s).is_some()).count())
        .max()
        .unwrap_or(0);
    if rational::is_integer(s) {
        (k + 1).min(fan.dim())
    } else {
        k
    }
}

fn candidates(fan: &Fan, rays: &[RayData], nu_max: i64) -> Result<Vec<PoleCandidate>> {
    if nu_max < 0 {
        return Err(Error::Poles("nuMax must be nonnegative".into()));
    }
    let mut found: std::collections::BTreeMap<Rational, Vec<Provenance>> = Default::default();
    for r in rays.iter().filter(|r| r.l > 0) {
        for nu in 0..=nu_max {
            let s = -rational::ratio(r.shift + nu, r.l);
            found.entry(s).or_default().push(Provenance::Ray { ray: r.ray.clone(), nu });
        }
    }
    let deepest = found.keys().next().cloned().ok_or(Error::NoPositiveFacet)?;
    let count = (-deepest).floor().to_integer().to_i64().unwrap_or(0);
    for k in 1..=count {
        found.entry(rational::int(-k)).or_default().push(Provenance::IntegerSeries);
    }
    Ok(found
        .into_iter()
        .rev()
        .map(|(location, provenance)| PoleCandidate {
            max_order: order_at(fan, rays, &location),
            location,
            provenance,
        })
        .collect())
}

/// Truncated candidate poles for the amplitude `x^p`, given a unimodular fan
/// refining the normal fan of `Γ₊(f)`.
pub fn candidate_poles_monomial(
    pf: &NewtonPolyhedron,
    fan: &Fan,
    p: &ExponentVector,
    nu_max: i64,
) -> Result<Vec<PoleCandidate>> {
    check_fan(fan, pf)?;
    if p.dim() != pf.dim() {
        return Err(Error::DimensionMismatch { expected: pf.dim(), found: p.dim() });
    }
    let rays = ray_data(fan, pf, |a| p.dot(a) + a.iter().sum::<i64>());
    candidates(fan, &rays, nu_max)
}

/// `β(p)`: the largest candidate over the rays of `fan`, checked against
/// `−1/d(f, x^p)`.
pub fn beta_of_monomial(pf: &NewtonPolyhedron, fan: &Fan, p: &ExponentVector) -> Result<Rational> {
    check_fan(fan, pf)?;
    let over_rays = ray_data(fan, pf, |a| p.dot(a) + a.iter().sum::<i64>())
        .iter()
        .filter(|r| r.l > 0)
        .map(|r| -rational::ratio(r.shift, r.l))
        .max()
        .ok_or(Error::NoPositiveFacet)?;
    let md = pair::monomial_distance(pf, p)?;
    let beta = -md.d.recip();
    assert_eq!(beta, over_rays, "ray maximum disagrees with the monomial distance");
    Ok(beta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralCandidates {
    pub candidates: Vec<PoleCandidate>,
    #[serde(with = "rational::as_string")]
    pub leading: Rational,
    #[serde(rename = "leadingOrder")]
    pub leading_order: usize,
}

/// Truncated candidate poles for a polynomial amplitude, given a unimodular
/// refinement of both normal fans. The leading candidate is `−1/d(f, φ)`.
pub fn candidate_poles_general(
    pf: &NewtonPolyhedron,
    pphi: &NewtonPolyhedron,
    fan: &Fan,
    nu_max: i64,
) -> Result<GeneralCandidates> {
    check_fan(fan, pf)?;
    check_fan(fan, pphi)?;
    let rays = ray_data(fan, pf, |a| pphi.support_value_i64(a) + a.iter().sum::<i64>());
    let d = pair::newton_distance(pf, pphi)?;
    let leading = -d.recip();
    let over_rays = rays
        .iter()
        .filter(|r| r.l > 0)
        .map(|r| -rational::ratio(r.shift, r.l))
        .max()
        .ok_or(Error::NoPositiveFacet)?;
    if over_rays != leading {
        return Err(Error::Poles(format!("ray maximum {over_rays} differs from -1/d = {leading}")));
    }
    let mut candidates = candidates(fan, &rays, nu_max)?;
    let m = pair::newton_multiplicity(pf, pphi, &d)?;
    let bound = pair::order_bound(&d, m, pf.dim());
    let lead = candidates.iter_mut().find(|c| c.location == leading).expect("leading candidate");
    lead.max_order = lead.max_order.min(bound);
    let leading_order = lead.max_order;
    Ok(GeneralCandidates { candidates, leading, leading_order })
}

/// Arithmetic progression `start, start + step, …` of candidate exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Progression {
    #[serde(with = "rational::as_string")]
    pub start: Rational,
    #[serde(with = "rational::as_string")]
    pub step: Rational,
}

/// The progressions containing every possible exponent of the expansion.
pub fn progressions(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron, fan: &Fan) -> Vec<Progression> {
    let rays = ray_data(fan, pf, |a| pphi.support_value_i64(a) + a.iter().sum::<i64>());
    let mut out: Vec<Progression> = rays
        .iter()
        .filter(|r| r.l > 0)
        .map(|r| Progression { start: -rational::ratio(r.shift, r.l), step: -rational::ratio(1, r.l) })
        .chain(std::iter::once(Progression { start: rational::int(-1), step: rational::int(-1) }))
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HypothesisStatus {
    Holds,
    Fails,
    Unknown,
}

impl HypothesisStatus {
    fn from_bool(b: bool) -> Self {
        if b { Self::Holds } else { Self::Fails }
    }

    fn from_sign(s: SignStatus) -> Self {
        match s {
            SignStatus::Nonnegative | SignStatus::Nonpositive => Self::Holds,
            SignStatus::Indefinite => Self::Fails,
            SignStatus::Unknown => Self::Unknown,
        }
    }

    fn or(self, other: Self) -> Self {
        match (self, other) {
            (Self::Holds, _) | (_, Self::Holds) => Self::Holds,
            (Self::Fails, Self::Fails) => Self::Fails,
            _ => Self::Unknown,
        }
    }

    fn and(self, other: Self) -> Self {
        match (self, other) {
            (Self::Fails, _) | (_, Self::Fails) => Self::Fails,
            (Self::Holds, Self::Holds) => Self::Holds,
            _ => Self::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub id: String,
    pub status: HypothesisStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Claim {
    UpperBoundOnly,
    ExactIndexAndMultiplicity,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictReport {
    pub schema_version: u32,
    pub n: usize,
    #[serde(with = "rational::as_string")]
    pub d_newton: Rational,
    pub m: usize,
    #[serde(with = "rational::as_string")]
    pub leading_candidate: Rational,
    pub order_bound: usize,
    pub claim: Claim,
    /// `β ≤ −1/d` whenever the upper bound applies.
    #[serde(with = "rational::as_opt_string")]
    pub beta_upper_bound: Option<Rational>,
    #[serde(with = "rational::as_opt_string")]
    pub beta: Option<Rational>,
    pub eta: Option<usize>,
    pub hypotheses: Vec<Hypothesis>,
    pub progressions: Vec<Progression>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
}

impl VerdictReport {
    pub fn hypothesis(&self, id: &str) -> Option<HypothesisStatus> {
        self.hypotheses.iter().find(|h| h.id == id).map(|h| h.status)
    }
}

/// Componentwise minimum of the support, when it is itself in the support:
/// then `φ = x^p·u` with `u(0) ≠ 0`.
fn monomial_unit_exponent(phi: &Polynomial) -> Option<ExponentVector> {
    let n = phi.dim();
    let support = phi.taylor_support();
    let p: Vec<i64> = (0..n).map(|i| support.iter().map(|e| e[i]).min().unwrap_or(0)).collect();
    let p = ExponentVector::new(p).ok()?;
    support.contains(&p).then_some(p)
}

fn lowest_term(p: &Polynomial) -> Option<(i64, Rational)> {
    p.terms().map(|(e, c)| (e[0], c.clone())).min_by_key(|(k, _)| *k)
}

/// Audits the hypotheses of the upper-bound and exactness theorems for
/// `(f, φ)` and states the strongest claim they support.
pub fn oscillation_verdict(f: &Polynomial, phi: &Polynomial, options: &PairOptions) -> Result<VerdictReport> {
    if !f.constant_term().is_zero() {
        return Err(Error::Invalid("verdict: the phase must vanish at the origin".into()));
    }
    let analysis = pair::analyze_pair(f, phi, options)?;
    let pf = NewtonPolyhedron::from_polynomial(f)?;
    let pphi = NewtonPolyhedron::from_polynomial(phi)?;
    let fan = fan::pair_resolution_fan(&pf, &pphi)?;
    verdict_from_analysis(f, phi, &pf, &pphi, &analysis, &fan, options)
}

fn verdict_from_analysis(
    f: &Polynomial,
    phi: &Polynomial,
    pf: &NewtonPolyhedron,
    pphi: &NewtonPolyhedron,
    a: &PairAnalysis,
    fan: &Fan,
    options: &PairOptions,
) -> Result<VerdictReport> {
    use HypothesisStatus as H;
    let n = f.dim();
    let mut hyps: Vec<Hypothesis> = Vec::new();
    let mut record = |id: &str, status: H| {
        hyps.push(Hypothesis { id: id.into(), status });
        status
    };

    let critical = record("critical-point", H::from_bool(f.terms().all(|(e, _)| e.degree() >= 2)));
    let nondeg = record(
        "phase-nondegenerate",
        match a.nondegeneracy.status {
            NondegeneracyStatus::Nondegenerate => H::Holds,
            NondegeneracyStatus::Degenerate => H::Fails,
            NondegeneracyStatus::Unknown => H::Unknown,
        },
    );
    let f_conv = record("phase-convenient", H::from_bool(pf.is_convenient()));
    let phi_conv = record("amplitude-convenient", H::from_bool(pphi.is_convenient()));
    let analytic = record("amplitude-analytic", H::Holds);
    let unit = monomial_unit_exponent(phi);
    let mono = record("amplitude-monomial-times-unit", H::from_bool(unit.is_some()));
    let upper = critical.and(nondeg).and(f_conv.or(phi_conv).or(analytic).or(mono));

    let far = record("distance-exceeds-one", H::from_bool(a.d > rational::int(1)));
    let f_sign = sign::sign_certificate(f, options.even_shortcut);
    let definite = record("phase-sign-definite", H::from_sign(f_sign.status));
    let even_unit = record(
        "amplitude-even-monomial-times-unit",
        H::from_bool(unit.as_ref().is_some_and(|p| p.is_even())),
    );
    let pg = &a.phi_gamma0;
    let essential_even = record(
        "essential-terms-even-one-sign",
        H::from_bool(!pg.is_zero() && pg.all_exponents_even() && pg.coefficient_sign().is_some()),
    );
    let essential_sign = record(
        "phase-convenient-and-essential-part-sign-definite",
        f_conv.and(H::from_sign(a.sign_phi_gamma0.status)),
    );
    let mut exact = upper.and(far.or(definite)).and(even_unit.or(essential_even).or(essential_sign));

    if n == 1 && critical == H::Holds {
        let (q, f0) = lowest_term(f).expect("nonzero phase");
        let (p, phi0) = lowest_term(phi).expect("nonzero amplitude");
        let (_, nonzero) = one_dim_reference(q, p, &f0, &phi0)?;
        let one_dim = record("one-dimensional-leading-coefficient-nonzero", H::from_bool(nonzero));
        exact = exact.or(one_dim);
    }

    let phi_sign = sign::sign_certificate(phi, options.even_shortcut).status;
    let symmetric_case = f_conv.and(phi_conv).and(definite).and(H::from_sign(phi_sign)).and(nondeg);
    let symmetry = if symmetric_case == H::Holds { Some(symmetry_check(f, phi, options)?) } else { None };

    let leading = -a.d.recip();
    let claim = match (upper, exact) {
        (H::Holds, H::Holds) => Claim::ExactIndexAndMultiplicity,
        (H::Holds, H::Fails) => Claim::UpperBoundOnly,
        _ => Claim::Inconclusive,
    };
    let exact_claim = claim == Claim::ExactIndexAndMultiplicity;
    Ok(VerdictReport {
        schema_version: 1,
        n,
        d_newton: a.d.clone(),
        m: a.m,
        leading_candidate: leading.clone(),
        order_bound: a.order_bound,
        claim,
        beta_upper_bound: (upper == H::Holds).then(|| leading.clone()),
        beta: exact_claim.then(|| leading.clone()),
        eta: exact_claim.then_some(a.m),
        hypotheses: hyps,
        progressions: progressions(pf, pphi, fan),
        symmetry,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SymmetryReport {
    /// Convenient, nondegenerate and sign-definite phase and amplitude.
    pub applicable: HypothesisStatus,
    /// `d(x^𝟙 f, φ)`.
    #[serde(with = "rational::as_string")]
    pub d1: Rational,
    /// `d(x^𝟙 φ, f)`.
    #[serde(with = "rational::as_string")]
    pub d2: Rational,
    #[serde(with = "rational::as_string")]
    pub distance_product: Rational,
    /// `β(x^𝟙 f, φ)·β(x^𝟙 φ, f) = 1/(d1·d2)`.
    #[serde(with = "rational::as_string")]
    pub beta_product: Rational,
    pub proportional: bool,
    /// `t` with `Γ₊(x^𝟙 f) = t·Γ₊(x^𝟙 φ)`.
    #[serde(with = "rational::as_opt_string")]
    pub scale: Option<Rational>,
    pub eta: Option<usize>,
}

fn times_ones(p: &Polynomial) -> Result<Polynomial> {
    let ones = Polynomial::monomial(ExponentVector::new(vec![1; p.dim()])?, rational::int(1));
    p.try_mul(&ones)
}

/// Distances between `x^𝟙 f` and `φ` and between `x^𝟙 φ` and `f`, their
/// product, and the exact proportionality test for the equality case.
pub fn symmetry_check(f: &Polynomial, phi: &Polynomial, options: &PairOptions) -> Result<SymmetryReport> {
    use HypothesisStatus as H;
    if f.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: phi.dim() });
    }
    let pf = NewtonPolyhedron::from_polynomial(f)?;
    let pphi = NewtonPolyhedron::from_polynomial(phi)?;
    let xf = NewtonPolyhedron::from_polynomial(&times_ones(f)?)?;
    let xphi = NewtonPolyhedron::from_polynomial(&times_ones(phi)?)?;
    let d1 = pair::newton_distance(&xf, &pphi)?;
    let d2 = pair::newton_distance(&xphi, &pf)?;
    let product = &d1 * &d2;
    let scale = pair::is_scaled_copy(&xf, &xphi);
    let nondeg = |p: &Polynomial, poly: &NewtonPolyhedron| {
        match crate::nondegeneracy::nondegeneracy_check(p, poly, &options.nondegeneracy).status {
            NondegeneracyStatus::Nondegenerate => H::Holds,
            NondegeneracyStatus::Degenerate => H::Fails,
            NondegeneracyStatus::Unknown => H::Unknown,
        }
    };
    let applicable = H::from_bool(pf.is_convenient() && pphi.is_convenient())
        .and(nondeg(f, &pf))
        .and(nondeg(phi, &pphi))
        .and(H::from_sign(sign::sign_certificate(f, options.even_shortcut).status))
        .and(H::from_sign(sign::sign_certificate(phi, options.even_shortcut).status));
    Ok(SymmetryReport {
        applicable,
        beta_product: product.recip(),
        distance_product: product,
        d1,
        d2,
        proportional: scale.is_some(),
        eta: scale.is_some().then_some(f.dim()),
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MellinCoefficient {
    pub lambda: f64,
    pub rho: usize,
    #[serde(serialize_with = "complex_pair")]
    pub b_plus: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub b_minus: Complex64,
    #[serde(serialize_with = "complex_pair", rename = "B")]
    pub b: Complex64,
}

pub fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq([z.re, z.im])
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `B = Γ(λ)/(ρ−1)!·(e^{iπλ/2} B₊ + e^{−iπλ/2} B₋)`: the coefficient of
/// `τ^{−λ}(log τ)^{ρ−1}` produced by zeta coefficients `B±` of
/// `(s+λ)^{−ρ}`.
pub fn mellin_transfer(lambda: &Rational, rho: usize, b_plus: Complex64, b_minus: Complex64) -> Result<MellinCoefficient> {
    if !lambda.is_positive() || rho == 0 {
        return Err(Error::Poles("mellin transfer needs lambda > 0 and rho >= 1".into()));
    }
    let l = rational::to_f64(lambda);
    let phase = Complex64::from_polar(1.0, PI * l / 2.0);
    let scale = statrs::function::gamma::gamma(l) / factorial(rho - 1);
    let b = (phase * b_plus + phase.conj() * b_minus) * scale;
    Ok(MellinCoefficient { lambda: l, rho, b_plus, b_minus, b })
}

/// Leading coefficient `C₀` of `∫ e^{iτf} φ` for `f = x^q·f̃`, `φ = x^p·φ̃`
/// near 0, at `τ^{−(p+1)/q}`, and whether it is nonzero.
pub fn one_dim_reference(q: i64, p: i64, f0: &Rational, phi0: &Rational) -> Result<(Complex64, bool)> {
    if q < 2 || p < 0 || f0.is_zero() || phi0.is_zero() {
        return Err(Error::Poles("one-dimensional reference needs q >= 2, p >= 0 and nonzero leading terms".into()));
    }
    let lambda = rational::ratio(p + 1, q);
    let half = &lambda / rational::int(2);
    let alpha = if f0.is_positive() { 1.0 } else { -1.0 };
    let l = rational::to_f64(&lambda);
    let common = 2.0 / q as f64
        * statrs::function::gamma::gamma(l)
        * rational::to_f64(&f0.abs()).powf(-l)
        * rational::to_f64(phi0);
    let (c0, nonzero) = match (q % 2 == 0, p % 2 == 0) {
        (true, true) => (Complex64::from_polar(common, alpha * PI * l / 2.0), true),
        (true, false) => (Complex64::zero(), false),
        (false, true) => {
            let shifted = &half - rational::ratio(1, 2);
            let vanishes = rational::is_integer(&shifted) && !shifted.is_negative();
            let v = if vanishes { 0.0 } else { common * (PI * l / 2.0).cos() };
            (Complex64::new(v, 0.0), !vanishes)
        }
        (false, false) => {
            let vanishes = rational::is_integer(&half);
            let v = if vanishes { 0.0 } else { alpha * common * (PI * l / 2.0).sin() };
            (Complex64::new(0.0, v), !vanishes)
        }
    };
    Ok((c0, nonzero))
}
