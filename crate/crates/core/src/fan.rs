//! Fans in `R₊ⁿ`: the normal fan of a Newton polyhedron, common refinements,
//! simplicial and unimodular subdivisions, and the monomial charts they
//! define.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dd;
use crate::error::{Error, Result};
use crate::linalg;
use crate::polyhedron::NewtonPolyhedron;
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::{self, Rational};

pub const MAX_CONES: usize = 10_000;
/// Largest parallelepiped scan (`index^n`) attempted by `unimodularize`.
pub const MAX_PARALLELEPIPED: u64 = 20_000_000;

/// A strongly convex rational cone, given by its primitive generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cone {
    pub generators: Vec<Vec<i64>>,
}

impl Cone {
    pub fn new(mut generators: Vec<Vec<i64>>) -> Self {
        generators.sort();
        generators.dedup();
        Self { generators }
    }

    pub fn dim(&self) -> usize {
        linalg::rank(&self.generators)
    }

    pub fn is_simplicial(&self) -> bool {
        self.dim() == self.generators.len()
    }

    /// `|det|` of the generator matrix for a full-dimensional simplicial cone.
    pub fn index(&self) -> Option<u64> {
        if self.generators.len() != self.generators.first().map_or(0, |g| g.len()) {
            return None;
        }
        linalg::det(&self.generators).abs().to_u64()
    }
}

/// A fan given by its rays and all of its nonzero cones (as sorted ray-index
/// lists). Maximal cones are listed separately, each with its inward facet
/// normals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    n: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    max_cones: Vec<Vec<usize>>,
    max_facets: Vec<Vec<Vec<i64>>>,
}

impl Serialize for Fan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Json<'a> {
            n: usize,
            rays: &'a [Vec<i64>],
            max_cones: &'a [Vec<usize>],
        }
        Json { n: self.n, rays: &self.rays, max_cones: &self.max_cones }.serialize(s)
    }
}

/// Faces (as sets of positions into `rays`) of a full-dimensional cone.
fn cone_face_sets(rays: &[Vec<i64>], n: usize) -> Result<(Vec<BTreeSet<usize>>, Vec<Vec<i64>>)> {
    let facets = dd::cone_facets(rays, n)?;
    let facet_sets: Vec<BTreeSet<usize>> = facets.tight.iter().map(|t| t.iter().copied().collect()).collect();
    let full: BTreeSet<usize> = (0..rays.len()).collect();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut queue = VecDeque::from([full.clone()]);
    seen.insert(full);
    while let Some(s) = queue.pop_front() {
        for f in &facet_sets {
            let t: BTreeSet<usize> = s.intersection(f).copied().collect();
            if !t.is_empty() && seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    Ok((seen.into_iter().collect(), facets.rays))
}

impl Fan {
    /// Builds a fan from its maximal cones (each given by generators that are
    /// extreme rays), adding all faces.
    pub fn from_max_cones(n: usize, max: &[Cone]) -> Result<Self> {
        if max.len() > MAX_CONES {
            return Err(Error::Fan(format!("fan exceeds {MAX_CONES} cones")));
        }
        let ray_set: BTreeSet<Vec<i64>> = max.iter().flat_map(|c| c.generators.iter().cloned()).collect();
        let rays: Vec<Vec<i64>> = ray_set.into_iter().collect();
        let id = |r: &Vec<i64>| rays.binary_search(r).expect("ray present");
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut max_cones = Vec::new();
        let mut max_facets = Vec::new();
        for c in max {
            if c.dim() != n {
                return Err(Error::Fan("maximal cone is not full-dimensional".into()));
            }
            let ids: Vec<usize> = c.generators.iter().map(id).collect();
            let (faces, facets) = cone_face_sets(&c.generators, n)?;
            for f in faces {
                let mut v: Vec<usize> = f.into_iter().map(|i| ids[i]).collect();
                v.sort();
                cones.insert(v);
            }
            let mut sorted = ids.clone();
            sorted.sort();
            max_cones.push(sorted);
            max_facets.push(facets);
            if cones.len() > MAX_CONES {
                return Err(Error::Fan(format!("fan exceeds {MAX_CONES} cones")));
            }
        }
        let mut cones: Vec<Vec<usize>> = cones.into_iter().collect();
        let rank = |c: &Vec<usize>| linalg::rank(&c.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>());
        cones.sort_by_cached_key(|c| (rank(c), c.clone()));
        // Keep max cones in a canonical order as well.
        let mut order: Vec<usize> = (0..max_cones.len()).collect();
        order.sort_by(|&a, &b| max_cones[a].cmp(&max_cones[b]));
        let max_cones: Vec<Vec<usize>> = order.iter().map(|&i| max_cones[i].clone()).collect();
        let max_facets: Vec<Vec<Vec<i64>>> = order.iter().map(|&i| max_facets[i].clone()).collect();
        Ok(Self { n, rays, cones, max_cones, max_facets })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn max_cone_ids(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, ids: &[usize]) -> Cone {
        Cone::new(ids.iter().map(|&i| self.rays[i].clone()).collect())
    }

    pub fn max_cones(&self) -> Vec<Cone> {
        self.max_cones.iter().map(|c| self.cone(c)).collect()
    }

    fn point_in_max_cone(&self, k: usize, y: &[i64]) -> bool {
        self.max_facets[k]
            .iter()
            .all(|a| a.iter().zip(y).map(|(x, z)| (*x as i128) * (*z as i128)).sum::<i128>() >= 0)
    }

    /// Index of a maximal cone containing `y`.
    pub fn locate(&self, y: &[i64]) -> Option<usize> {
        (0..self.max_cones.len()).find(|&k| self.point_in_max_cone(k, y))
    }

    /// Checks the fan axioms and that the support is `R₊ⁿ`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let fail = |m: String| Err(Error::Fan(m));
        if self.rays.iter().any(|r| r.iter().any(|&x| x < 0) || linalg::gcd_slice(r) != 1) {
            return fail("ray outside R₊ⁿ or not primitive".into());
        }
        let cone_set: BTreeSet<&Vec<usize>> = self.cones.iter().collect();
        // Pairwise intersections of maximal cones are common faces.
        for i in 0..self.max_cones.len() {
            for j in i + 1..self.max_cones.len() {
                let mut rows = self.max_facets[i].clone();
                rows.extend(self.max_facets[j].iter().cloned());
                let meet = dd::extreme_rays(&rows, n)?;
                let shared: Vec<usize> =
                    self.max_cones[i].iter().filter(|r| self.max_cones[j].contains(r)).copied().collect();
                let shared_rays: BTreeSet<&Vec<i64>> = shared.iter().map(|&r| &self.rays[r]).collect();
                let meet_rays: BTreeSet<&Vec<i64>> = meet.rays.iter().collect();
                if !meet_rays.is_subset(&shared_rays) {
                    return fail(format!("cones {i} and {j} overlap outside a common face"));
                }
                if !shared.is_empty() && !cone_set.contains(&shared) {
                    return fail(format!("cones {i} and {j} meet in a non-face"));
                }
            }
        }
        // Every codimension-one cone is shared by two maximal cones, unless it
        // lies in a coordinate hyperplane.
        for c in &self.cones {
            let gens: Vec<Vec<i64>> = c.iter().map(|&i| self.rays[i].clone()).collect();
            if linalg::rank(&gens) != n - 1 || n == 1 {
                continue;
            }
            let count = self.max_cones.iter().filter(|m| c.iter().all(|r| m.contains(r))).count();
            let boundary = (0..n).any(|k| gens.iter().all(|g| g[k] == 0));
            let expected = if boundary { 1 } else { 2 };
            if count != expected {
                return fail(format!("wall {c:?} lies in {count} maximal cones, expected {expected}"));
            }
        }
        // Coverage of random interior directions.
        let mut rng = ChaCha8Rng::seed_from_u64(0xfa11);
        for _ in 0..64 {
            let y: Vec<i64> = (0..n).map(|_| rng.random_range(1..=97)).collect();
            if self.locate(&y).is_none() {
                return fail(format!("direction {y:?} is not covered"));
            }
        }
        Ok(())
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones.iter().all(|c| c.len() == self.n)
    }

    pub fn is_unimodular(&self) -> bool {
        self.max_cones().iter().all(|c| c.index() == Some(1))
    }
}

/// One maximal cone per vertex, spanned by the normals of the facets through
/// it; lower cones are the duals of the higher-dimensional faces.
pub fn normal_fan(p: &NewtonPolyhedron) -> Result<Fan> {
    let mut max = Vec::new();
    for face in p.enumerate_faces().iter().filter(|f| f.dim == 0) {
        let gens: Vec<Vec<i64>> = face.active.iter().map(|&k| p.facets()[k].normal.clone()).collect();
        max.push(Cone::new(gens));
    }
    Fan::from_max_cones(p.dim(), &max)
}

/// The fan of all full-dimensional intersections `σ ∩ τ`.
pub fn common_refinement(f1: &Fan, f2: &Fan) -> Result<Fan> {
    if f1.n != f2.n {
        return Err(Error::DimensionMismatch { expected: f1.n, found: f2.n });
    }
    let n = f1.n;
    let mut max = Vec::new();
    for a in &f1.max_facets {
        for b in &f2.max_facets {
            let mut rows = a.clone();
            rows.extend(b.iter().cloned());
            let meet = dd::extreme_rays(&rows, n)?;
            if linalg::rank(&meet.rays) == n {
                max.push(Cone::new(meet.rays));
            }
        }
    }
    Fan::from_max_cones(n, &max)
}

/// Face lattice of one cone in terms of global ray ids.
struct LocalLattice {
    faces: Vec<(Vec<usize>, usize)>,
}

impl LocalLattice {
    fn new(fan: &Fan, ids: &[usize]) -> Result<Self> {
        let gens: Vec<Vec<i64>> = ids.iter().map(|&i| fan.rays[i].clone()).collect();
        let (sets, _) = cone_face_sets(&gens, fan.n)?;
        let faces = sets
            .into_iter()
            .map(|s| {
                let v: Vec<usize> = s.into_iter().map(|i| ids[i]).collect();
                let d = linalg::rank(&v.iter().map(|&i| fan.rays[i].clone()).collect::<Vec<_>>());
                let mut v = v;
                v.sort();
                (v, d)
            })
            .collect();
        Ok(Self { faces })
    }

    fn facets_of(&self, face: &[usize], dim: usize) -> Vec<Vec<usize>> {
        self.faces
            .iter()
            .filter(|(f, d)| *d + 1 == dim && f.iter().all(|r| face.contains(r)))
            .map(|(f, _)| f.clone())
            .collect()
    }
}

/// Pulling triangulation: pull the smallest ray (by id, i.e. lexicographic
/// order of the ray vectors), cone it over the triangulations of the facets
/// that miss it.
fn pull(lattice: &LocalLattice, face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if face.len() == dim {
        return vec![face.to_vec()];
    }
    let apex = *face.iter().min().expect("nonempty face");
    let mut out = Vec::new();
    for facet in lattice.facets_of(face, dim) {
        if facet.contains(&apex) {
            continue;
        }
        for mut simplex in pull(lattice, &facet, dim - 1) {
            simplex.push(apex);
            simplex.sort();
            out.push(simplex);
        }
    }
    out
}

/// Subdivides every maximal cone into simplicial cones without new rays.
pub fn simplicialize(fan: &Fan) -> Result<Fan> {
    if fan.is_simplicial() {
        return Ok(fan.clone());
    }
    let mut max = Vec::new();
    for ids in &fan.max_cones {
        if ids.len() == fan.n {
            max.push(fan.cone(ids));
            continue;
        }
        let lattice = LocalLattice::new(fan, ids)?;
        for simplex in pull(&lattice, ids, fan.n) {
            max.push(fan.cone(&simplex));
        }
    }
    Fan::from_max_cones(fan.n, &max)
}

/// Nonzero lattice point `Σ λ_i u_i`, `λ_i ∈ [0,1)`, minimizing `Σ λ_i`
/// (ties broken lexicographically on the numerators `g·λ`).
fn interior_lattice_point(gens: &[Vec<i64>], index: u64) -> Result<(Vec<i64>, Vec<i64>)> {
    let n = gens.len();
    let g = index as i64;
    if (index as f64).powi(n as i32) > MAX_PARALLELEPIPED as f64 {
        return Err(Error::Fan(format!("cone index {index} too large to subdivide")));
    }
    let mut best: Option<(i64, Vec<i64>, Vec<i64>)> = None;
    let mut k = vec![0i64; n];
    loop {
        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == n {
                let (_, lam, v) = best.ok_or_else(|| Error::Fan("no lattice point found in parallelepiped".into()))?;
                return Ok((v, lam));
            }
            k[pos] += 1;
            if k[pos] < g {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
        let sum: i64 = k.iter().sum();
        if best.as_ref().is_some_and(|(s, lam, _)| sum > *s || (sum == *s && &k >= lam)) {
            continue;
        }
        let mut v = vec![0i64; gens[0].len()];
        for (ki, u) in k.iter().zip(gens) {
            for (vj, uj) in v.iter_mut().zip(u) {
                *vj += ki * uj;
            }
        }
        if v.iter().all(|x| x % g == 0) {
            let v: Vec<i64> = v.iter().map(|x| x / g).collect();
            best = Some((sum, k.clone(), v));
        }
    }
}

/// Refines a simplicial fan by stellar subdivisions until every maximal cone
/// is unimodular.
pub fn unimodularize(fan: &Fan) -> Result<Fan> {
    if !fan.is_simplicial() {
        return Err(Error::Fan("unimodularize needs a simplicial fan".into()));
    }
    let n = fan.n;
    let mut cones: Vec<Vec<Vec<i64>>> = fan.max_cones().into_iter().map(|c| c.generators).collect();
    loop {
        let Some((pos, index)) = cones
            .iter()
            .enumerate()
            .map(|(i, c)| (i, linalg::det(c).abs().to_u64().unwrap_or(u64::MAX)))
            .find(|(_, d)| *d > 1)
        else {
            break;
        };
        let (v, lam) = interior_lattice_point(&cones[pos], index)?;
        let v = linalg::make_primitive(&v);
        let tau: Vec<Vec<i64>> =
            cones[pos].iter().zip(&lam).filter(|(_, &l)| l > 0).map(|(u, _)| u.clone()).collect();
        let mut next = Vec::with_capacity(cones.len() + n);
        for c in cones {
            if !tau.iter().all(|t| c.contains(t)) {
                next.push(c);
                continue;
            }
            let parent = linalg::det(&c).abs();
            for t in &tau {
                let child: Vec<Vec<i64>> = c.iter().map(|u| if u == t { v.clone() } else { u.clone() }).collect();
                let d = linalg::det(&child).abs();
                assert!(
                    !d.is_zero() && d < parent,
                    "stellar subdivision must lower the index ({parent} -> {d})"
                );
                next.push(child);
            }
        }
        cones = next;
        if cones.len() > MAX_CONES {
            return Err(Error::Fan(format!("unimodular subdivision exceeds {MAX_CONES} cones")));
        }
    }
    let max: Vec<Cone> = cones.into_iter().map(Cone::new).collect();
    Fan::from_max_cones(n, &max)
}

/// Normal fan of `Γ₊(f)`, made simplicial and unimodular.
pub fn resolution_fan(pf: &NewtonPolyhedron) -> Result<Fan> {
    unimodularize(&simplicialize(&normal_fan(pf)?)?)
}

/// Common refinement of the normal fans of `Γ₊(f)` and `Γ₊(φ)`, made
/// simplicial and unimodular.
pub fn pair_resolution_fan(pf: &NewtonPolyhedron, pphi: &NewtonPolyhedron) -> Result<Fan> {
    let refined = common_refinement(&normal_fan(pf)?, &normal_fan(pphi)?)?;
    unimodularize(&simplicialize(&refined)?)
}

/// Exponent data of the chart `x_i = Π_j y_j^{a^j_i}` attached to an
/// n-dimensional cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PullbackData {
    /// Rows `a^j(σ)`.
    pub matrix: Vec<Vec<i64>>,
    pub det: i64,
    pub l_vector: Vec<i64>,
    pub l_tilde_vector: Option<Vec<i64>>,
    pub jacobian_exponents: Vec<i64>,
    #[serde(with = "rational::as_string")]
    pub f_sigma_constant: Rational,
    #[serde(skip)]
    pub f_sigma: Option<Polynomial>,
    #[serde(skip)]
    pub phi_sigma: Option<Polynomial>,
}

/// `x^α ↦ y^{Aα}`.
pub fn substitute(p: &Polynomial, matrix: &[Vec<i64>]) -> Polynomial {
    let mut out = Polynomial::zero(matrix.len());
    for (e, c) in p.terms() {
        let img: Vec<i64> = matrix.iter().map(|a| e.dot(a)).collect();
        out.add_term(ExponentVector::new(img).expect("nonnegative"), c.clone());
    }
    out
}

/// Divides by `y^l`, which must divide every term.
fn divide_monomial(p: &Polynomial, l: &[i64]) -> Result<Polynomial> {
    let mut out = Polynomial::zero(p.dim());
    for (e, c) in p.terms() {
        let q: Vec<i64> = e.as_slice().iter().zip(l).map(|(a, b)| a - b).collect();
        if q.iter().any(|&x| x < 0) {
            return Err(Error::Fan("pullback is not divisible by the expected monomial".into()));
        }
        out.add_term(ExponentVector::new(q).expect("checked"), c.clone());
    }
    Ok(out)
}

/// Pulls `f` (and optionally `φ`) back along the chart of `sigma`. With
/// `full`, the strict transforms `f_σ`, `φ_σ` are returned as polynomials.
pub fn pullback(
    f: &Polynomial,
    pf: &NewtonPolyhedron,
    phi: Option<(&Polynomial, &NewtonPolyhedron)>,
    sigma: &Cone,
    full: bool,
) -> Result<PullbackData> {
    let n = f.dim();
    if sigma.generators.len() != n || sigma.dim() != n {
        return Err(Error::Fan("pullback needs an n-dimensional simplicial cone".into()));
    }
    let matrix = sigma.generators.clone();
    let det = linalg::det(&matrix).to_i64().ok_or(Error::Overflow)?;
    let l_vector: Vec<i64> = matrix.iter().map(|a| pf.support_value_i64(a)).collect();
    let l_tilde_vector = phi.map(|(_, pp)| matrix.iter().map(|a| pp.support_value_i64(a)).collect::<Vec<i64>>());
    let jacobian_exponents: Vec<i64> = matrix.iter().map(|a| a.iter().sum::<i64>() - 1).collect();
    let pulled = substitute(f, &matrix);
    let f_sigma = divide_monomial(&pulled, &l_vector)?;
    let f_sigma_constant = f_sigma.constant_term();
    let phi_sigma = match (phi, &l_tilde_vector) {
        (Some((p, _)), Some(lt)) if full => Some(divide_monomial(&substitute(p, &matrix), lt)?),
        _ => None,
    };
    Ok(PullbackData {
        matrix,
        det,
        l_vector,
        l_tilde_vector,
        jacobian_exponents,
        f_sigma_constant,
        f_sigma: full.then_some(f_sigma),
        phi_sigma,
    })
}

/// `Σ c_α` over the exponents paired minimally with every row.
pub fn f_sigma_constant(f: &Polynomial, pf: &NewtonPolyhedron, matrix: &[Vec<i64>]) -> Rational {
    let l: Vec<i64> = matrix.iter().map(|a| pf.support_value_i64(a)).collect();
    f.terms()
        .filter(|(e, _)| matrix.iter().zip(&l).all(|(a, li)| e.dot(a) == *li))
        .fold(Rational::zero(), |s, (_, c)| s + c)
}

/// Ray multiplicities: how many maximal cones contain each ray.
pub fn ray_usage(fan: &Fan) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for c in &fan.max_cones {
        for &r in c {
            *m.entry(r).or_insert(0) += 1;
        }
    }
    m
}
