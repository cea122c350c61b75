//! Invariants of a phase/amplitude pair: Newton distance, multiplicity and
//! the essential set.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dd::Bitset;
use crate::error::{Error, Result};
use crate::nondegeneracy::{self, NondegeneracyOptions, NondegeneracyReport};
use crate::polyhedron::{Face, NewtonPolyhedron};
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::{self, Rational};
use crate::sign::{self, SignCertificate};

fn check_dims(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron) -> Result<()> {
    if pf.dim() != pphi.dim() {
        return Err(Error::DimensionMismatch { expected: pf.dim(), found: pphi.dim() });
    }
    Ok(())
}

/// `min ⟨a, v + 𝟙⟩` over the polyhedron.
fn shifted_support(pphi: &NewtonPolyhedron, a: &[i64]) -> i64 {
    pphi.support_value_i64(a) + a.iter().sum::<i64>()
}

/// `d(f, φ) = max l(a) / min ⟨a, v + 𝟙⟩` over facets `(a, l)` of `Γ₊(f)`
/// with `l > 0`.
pub fn newton_distance(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron) -> Result<Rational> {
    check_dims(pf, pphi)?;
    pf.facets()
        .iter()
        .filter(|f| f.offset.is_positive())
        .map(|f| &f.offset / rational::int(shifted_support(pphi, &f.normal)))
        .max()
        .ok_or(Error::NoPositiveFacet)
}

/// Facets of `Γ₊(f)` that realize the distance `d`.
pub fn tight_facets(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron, d: &Rational) -> Vec<usize> {
    pf.facets()
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            f.offset.is_positive() && f.offset == d * rational::int(shifted_support(pphi, &f.normal))
        })
        .map(|(k, _)| k)
        .collect()
}

/// Γ(φ, f): the inclusion-maximal faces of `Γ₊(φ)` that touch
/// `(1/d)·∂Γ₊(f) − 𝟙`, one per tight facet of `Γ₊(f)`.
pub fn gamma_phi_f(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron, d: &Rational) -> Result<Vec<Face>> {
    check_dims(pf, pphi)?;
    let mut faces: Vec<Face> = Vec::new();
    for k in tight_facets(pf, pphi, d) {
        let face = pphi.face_of_direction(&pf.facets()[k].normal)?;
        if !faces.contains(face) {
            faces.push(face.clone());
        }
    }
    let gens: Vec<Bitset> = faces.iter().map(|f| pphi.face_generators(f)).collect();
    let maximal: Vec<Face> = faces
        .iter()
        .enumerate()
        .filter(|(i, _)| !gens.iter().enumerate().any(|(j, g)| j != *i && g != &gens[*i] && g.is_superset(&gens[*i])))
        .map(|(_, f)| f.clone())
        .collect();
    Ok(maximal)
}

/// Faces `G` of `∂Γ₊(f)` reachable by `d·(Γ₊(φ) + 𝟙)`, with the codimension
/// of `G` and the face of `Γ₊(φ)` that lands on it.
fn feasible_faces<'a>(
    pf: &NewtonPolyhedron,
    pphi: &'a NewtonPolyhedron,
    d: &Rational,
) -> Result<Vec<(usize, &'a Face)>> {
    check_dims(pf, pphi)?;
    let tight = tight_facets(pf, pphi, d);
    let directional: Vec<Option<Bitset>> = (0..pf.facets().len())
        .map(|k| {
            if tight.contains(&k) {
                pphi.face_of_direction(&pf.facets()[k].normal)
                    .ok()
                    .map(|f| pphi.face_generators(f))
            } else {
                None
            }
        })
        .collect();
    let n = pf.dim();
    let mut out = Vec::new();
    for g in pf.enumerate_faces() {
        if g.is_trivial() || !g.active.iter().all(|k| tight.contains(k)) {
            continue;
        }
        let mut gens = pphi.face_generators(pphi.face_of_direction(&vec![0; n])?);
        for &k in &g.active {
            gens = gens.and(directional[k].as_ref().expect("tight facet"));
        }
        if let Some(face) = pphi.face_by_generators(&gens) {
            out.push((g.codim(n), face));
        }
    }
    Ok(out)
}

/// m(f, φ): the largest codimension of a face of `Γ₊(f)` met by
/// `d·(Γ₊(φ) + 𝟙)`.
pub fn newton_multiplicity(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron, d: &Rational) -> Result<usize> {
    feasible_faces(pf, pphi, d)?
        .iter()
        .map(|(c, _)| *c)
        .max()
        .ok_or_else(|| Error::Invalid("pair-analysis: distance does not touch the boundary".into()))
}

/// Γ₀ as a list of pairwise disjoint faces of `Γ₊(φ)`.
pub fn essential_set(
    pf: &NewtonPolyhedron,
    pphi: &NewtonPolyhedron,
    d: &Rational,
    m: usize,
) -> Result<Vec<Face>> {
    let mut faces: Vec<Face> = Vec::new();
    for (codim, face) in feasible_faces(pf, pphi, d)? {
        if codim == m && !faces.contains(face) {
            faces.push(face.clone());
        }
    }
    Ok(faces)
}

/// φ_{Γ₀}: the sum of the face polynomials over the essential faces.
pub fn principal_on_essential(phi: &Polynomial, pphi: &NewtonPolyhedron, essential: &[Face]) -> Result<Polynomial> {
    let mut out = Polynomial::zero(phi.dim());
    for face in essential {
        out = out.try_add(&pphi.restrict_to_face(phi, face)?)?;
    }
    Ok(out)
}

/// The A of the `τ^{-1/d} (log τ)^{A-1}` upper bound.
pub fn order_bound(d: &Rational, m: usize, n: usize) -> usize {
    if rational::is_integer(&d.recip()) {
        (m + 1).min(n)
    } else {
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialDistance {
    #[serde(with = "rational::as_string")]
    pub d: Rational,
    #[serde(with = "rational::vec_as_string")]
    pub q: Vec<Rational>,
    pub m: usize,
}

/// Distance data for the monomial amplitude `x^p`: `q = d·(p + 𝟙)` is where
/// the ray through `p + 𝟙` leaves `Γ₊(f)`.
pub fn monomial_distance(pf: &NewtonPolyhedron, p: &ExponentVector) -> Result<MonomialDistance> {
    let orthant = NewtonPolyhedron::from_support(&[p.clone()].into_iter().collect())?;
    let d = newton_distance(pf, &orthant)?;
    let q: Vec<Rational> = p.as_slice().iter().map(|&pi| &d * rational::int(pi + 1)).collect();
    let m = pf.rho(&q)?;
    debug_assert!(p
        .as_slice()
        .iter()
        .zip(&q)
        .all(|(&pi, qi)| rational::int(pi + 1) / qi == d.recip()));
    Ok(MonomialDistance { d, q, m })
}

/// Everything the verdict engine needs to know about a pair.
#[derive(Debug, Clone)]
pub struct PairAnalysis {
    pub n: usize,
    pub d: Rational,
    pub m: usize,
    pub gamma_phi_f: Vec<Face>,
    pub essential: Vec<Face>,
    pub order_bound: usize,
    pub phi_gamma0: Polynomial,
    pub sign_phi_gamma0: SignCertificate,
    pub nondegeneracy: NondegeneracyReport,
}

#[derive(Debug, Clone, Default)]
pub struct PairOptions {
    pub even_shortcut: bool,
    pub nondegeneracy: NondegeneracyOptions,
}

pub fn analyze_pair(f: &Polynomial, phi: &Polynomial, options: &PairOptions) -> Result<PairAnalysis> {
    if f.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: phi.dim() });
    }
    let pf = NewtonPolyhedron::from_polynomial(f)?;
    let pphi = NewtonPolyhedron::from_polynomial(phi)?;
    let d = newton_distance(&pf, &pphi)?;
    let m = newton_multiplicity(&pf, &pphi, &d)?;
    let gamma = gamma_phi_f(&pf, &pphi, &d)?;
    let essential = essential_set(&pf, &pphi, &d, m)?;
    let phi_gamma0 = principal_on_essential(phi, &pphi, &essential)?;
    let sign_phi_gamma0 = sign::sign_certificate(&phi_gamma0, options.even_shortcut);
    let nondegeneracy = nondegeneracy::nondegeneracy_check(f, &pf, &options.nondegeneracy);
    Ok(PairAnalysis {
        n: f.dim(),
        order_bound: order_bound(&d, m, f.dim()),
        d,
        m,
        gamma_phi_f: gamma,
        essential,
        phi_gamma0,
        sign_phi_gamma0,
        nondegeneracy,
    })
}

impl Serialize for PairAnalysis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Json<'a> {
            schema_version: u32,
            n: usize,
            #[serde(with = "rational::as_string")]
            d: &'a Rational,
            m: usize,
            gamma_phi_f: &'a [Face],
            essential: &'a [Face],
            phi_gamma0: String,
            sign_phi_gamma0: &'a str,
            sign_certificate: &'a SignCertificate,
            nondegenerate: &'a str,
            nondegeneracy: &'a NondegeneracyReport,
            order_bound: usize,
        }
        Json {
            schema_version: 1,
            n: self.n,
            d: &self.d,
            m: self.m,
            gamma_phi_f: &self.gamma_phi_f,
            essential: &self.essential,
            phi_gamma0: self.phi_gamma0.to_string(),
            sign_phi_gamma0: self.sign_phi_gamma0.status.as_str(),
            sign_certificate: &self.sign_phi_gamma0,
            nondegenerate: self.nondegeneracy.status.as_str(),
            nondegeneracy: &self.nondegeneracy,
            order_bound: self.order_bound,
        }
        .serialize(s)
    }
}

/// `d_f = d(f, 1)`.
pub fn phase_distance(pf: &NewtonPolyhedron) -> Result<Rational> {
    let one = NewtonPolyhedron::from_support(&[ExponentVector::zero(pf.dim())].into_iter().collect())?;
    newton_distance(pf, &one)
}

/// True when every vertex of `a` is `t·v` for a vertex `v` of `b`, with one
/// common `t`, i.e. `Γ₊(a) = t·Γ₊(b)`.
pub fn is_scaled_copy(a: &NewtonPolyhedron, b: &NewtonPolyhedron) -> Option<Rational> {
    if a.dim() != b.dim() || a.vertices().len() != b.vertices().len() {
        return None;
    }
    let (va, vb) = (a.vertices(), b.vertices());
    let (sa, sb) = (va[0].degree(), vb[0].degree());
    if sb == 0 {
        return if sa == 0 && va.iter().all(|v| v.degree() == 0) { Some(Rational::one()) } else { None };
    }
    let t = rational::ratio(sa, sb);
    if t.is_zero() {
        return None;
    }
    let scaled: std::collections::BTreeSet<Vec<Rational>> = vb
        .iter()
        .map(|v| v.as_slice().iter().map(|&x| &t * rational::int(x)).collect())
        .collect();
    let target: std::collections::BTreeSet<Vec<Rational>> = va
        .iter()
        .map(|v| v.as_slice().iter().map(|&x| rational::int(x)).collect())
        .collect();
    (scaled == target).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::rational::{int, ratio};

    fn np(text: &str, n: usize) -> NewtonPolyhedron {
        NewtonPolyhedron::from_polynomial(&parse_polynomial(text, n).unwrap()).unwrap()
    }

    fn verts(face: &Face) -> Vec<Vec<i64>> {
        face.vertices.iter().map(|v| v.as_slice().to_vec()).collect()
    }

    #[test]
    fn distances() {
        let f = np("x1^5 + x1^6 + x2^5", 2);
        for t in ["", " + x1*x2", " - 3*x1*x2", " + 7/2*x1*x2"] {
            let phi = np(&format!("x1^2{t} + x2^2"), 2);
            assert_eq!(newton_distance(&f, &phi).unwrap(), ratio(5, 4));
        }
        assert_eq!(newton_distance(&np("x1^4", 2), &np("x1^2*x2^2", 2)).unwrap(), ratio(4, 3));
        assert_eq!(phase_distance(&f).unwrap(), ratio(5, 2));
        assert_eq!(phase_distance(&np("x1^2 + x2^2", 2)).unwrap(), int(1));
        assert!(matches!(newton_distance(&np("1 + x1", 2), &np("1", 2)), Err(Error::NoPositiveFacet)));
    }

    #[test]
    fn example_two_pair() {
        let f = np("x1^5 + x1^6 + x2^5", 2);
        let phi_poly = parse_polynomial("x1^2 + x1*x2 + x2^2", 2).unwrap();
        let phi = NewtonPolyhedron::from_polynomial(&phi_poly).unwrap();
        let d = newton_distance(&f, &phi).unwrap();
        let gamma = gamma_phi_f(&f, &phi, &d).unwrap();
        assert_eq!(gamma.len(), 1);
        assert_eq!(verts(&gamma[0]), vec![vec![2, 0], vec![0, 2]]);
        assert!(gamma[0].compact);
        let m = newton_multiplicity(&f, &phi, &d).unwrap();
        assert_eq!(m, 1);
        let ess = essential_set(&f, &phi, &d, m).unwrap();
        assert_eq!(ess, gamma);
        assert_eq!(principal_on_essential(&phi_poly, &phi, &ess).unwrap(), phi_poly);
        assert_eq!(order_bound(&d, m, 2), 1);
    }

    #[test]
    fn example_one_pair() {
        let f = np("x1^4", 2);
        let phi_poly = parse_polynomial("x1^2*x2^2", 2).unwrap();
        let phi = NewtonPolyhedron::from_polynomial(&phi_poly).unwrap();
        let d = newton_distance(&f, &phi).unwrap();
        let m = newton_multiplicity(&f, &phi, &d).unwrap();
        assert_eq!(m, 1);
        let ess = essential_set(&f, &phi, &d, m).unwrap();
        assert_eq!(ess.len(), 1);
        assert_eq!(verts(&ess[0]), vec![vec![2, 2]]);
        assert_eq!(principal_on_essential(&phi_poly, &phi, &ess).unwrap(), phi_poly);
    }

    #[test]
    fn multiplicity_of_a_circle_is_one() {
        // The diagonal meets the edge (2,0)-(0,2) in its relative interior.
        let f = np("x1^2 + x2^2", 2);
        let one = np("1", 2);
        let d = newton_distance(&f, &one).unwrap();
        assert_eq!(d, int(1));
        assert_eq!(newton_multiplicity(&f, &one, &d).unwrap(), 1);
        assert_eq!(order_bound(&d, 1, 2), 2);
    }

    #[test]
    fn multiplicity_at_a_vertex() {
        let f = np("x1^6 + x1^2*x2^2 + x2^6", 2);
        let one = np("1", 2);
        let d = newton_distance(&f, &one).unwrap();
        assert_eq!(d, int(2));
        assert_eq!(newton_multiplicity(&f, &one, &d).unwrap(), 2);
        let ess = essential_set(&f, &one, &d, 2).unwrap();
        assert_eq!(ess.len(), 1);
        assert_eq!(verts(&ess[0]), vec![vec![0, 0]]);
        assert_eq!(order_bound(&d, 2, 2), 2);
    }

    #[test]
    fn monomial_amplitude_gives_a_vertex() {
        let f = np("x1^5 + x1^6 + x2^5", 2);
        let phi = np("3*x1*x2^3", 2);
        let d = newton_distance(&f, &phi).unwrap();
        let gamma = gamma_phi_f(&f, &phi, &d).unwrap();
        assert_eq!(gamma.len(), 1);
        assert_eq!(verts(&gamma[0]), vec![vec![1, 3]]);
    }

    #[test]
    fn monomial_distances() {
        let f = np("x1^5 + x1^6 + x2^5", 2);
        let md = monomial_distance(&f, &ExponentVector::zero(2)).unwrap();
        assert_eq!(md.d, ratio(5, 2));
        assert_eq!(md.q, vec![ratio(5, 2), ratio(5, 2)]);
        assert_eq!(md.m, 1);
        let g = np("x1^2", 1);
        let md = monomial_distance(&g, &ExponentVector::zero(1)).unwrap();
        assert_eq!((md.d, md.q, md.m), (int(2), vec![int(2)], 1));
        let h = np("x1^4", 2);
        let md = monomial_distance(&h, &ExponentVector::new(vec![2, 2]).unwrap()).unwrap();
        assert_eq!(md.d, ratio(4, 3));
        assert_eq!(md.q, vec![int(4), int(4)]);
        assert_eq!(md.m, 1);
    }

    #[test]
    fn scaled_copies() {
        let a = np("x1^2*x2 + x1*x2^2", 2);
        let b = np("x1^5*x2^2 + x1^2*x2^5", 2);
        assert_eq!(is_scaled_copy(&a, &b), None);
        let c = np("x1^4*x2^2 + x1^2*x2^4", 2);
        assert_eq!(is_scaled_copy(&c, &a), Some(int(2)));
    }
}
