//! Newton polyhedra `Γ₊ = conv(S + R₊ⁿ)` and their face lattices.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use num_traits::Zero;
use serde::Serialize;

use crate::dd::{self, Bitset};
use crate::error::{Error, Result};
use crate::linalg;
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::{self, Rational};

pub const MAX_DIMENSION: usize = 6;
pub const MAX_SUPPORT: usize = 200;

/// Supporting half-space `⟨a, x⟩ ≥ l` with `a` primitive and nonnegative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Facet {
    #[serde(rename = "a")]
    pub normal: Vec<i64>,
    #[serde(rename = "l", with = "rational::as_string")]
    pub offset: Rational,
}

/// A nonempty face, described by the facets containing it and by its
/// generators: the polyhedron vertices on it plus the axis directions in its
/// recession cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub active: Vec<usize>,
    pub vertices: Vec<ExponentVector>,
    #[serde(skip)]
    pub vertex_ids: Vec<usize>,
    pub rays: Vec<usize>,
    pub dim: usize,
    pub compact: bool,
}

impl Face {
    pub fn is_trivial(&self) -> bool {
        self.active.is_empty()
    }

    /// Codimension in the ambient space.
    pub fn codim(&self, n: usize) -> usize {
        n - self.dim
    }
}

#[derive(Debug)]
struct Lattice {
    faces: Vec<Face>,
    by_generators: HashMap<Bitset, usize>,
}

#[derive(Debug)]
pub struct NewtonPolyhedron {
    n: usize,
    vertices: Vec<ExponentVector>,
    facets: Vec<Facet>,
    lattice: OnceLock<Lattice>,
}

impl Clone for NewtonPolyhedron {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
            lattice: OnceLock::new(),
        }
    }
}

impl PartialEq for NewtonPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.vertices == other.vertices && self.facets == other.facets
    }
}

impl Eq for NewtonPolyhedron {}

impl Serialize for NewtonPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            n: usize,
            vertices: &'a [ExponentVector],
            facets: &'a [Facet],
        }
        Json { n: self.n, vertices: &self.vertices, facets: &self.facets }.serialize(s)
    }
}

pub fn build_newton_polyhedron(support: &BTreeSet<ExponentVector>) -> Result<NewtonPolyhedron> {
    NewtonPolyhedron::from_support(support)
}

impl NewtonPolyhedron {
    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        let support = p.taylor_support();
        if support.is_empty() {
            return Err(Error::EmptyNewtonPolyhedron);
        }
        Self::from_support(&support)
    }

    pub fn from_support(support: &BTreeSet<ExponentVector>) -> Result<Self> {
        let Some(first) = support.iter().next() else {
            return Err(Error::EmptyNewtonPolyhedron);
        };
        let n = first.dim();
        if support.iter().any(|e| e.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: 0 });
        }
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::TooLarge(format!("dimension {n} outside 1..={MAX_DIMENSION}")));
        }
        if support.len() > MAX_SUPPORT {
            return Err(Error::TooLarge(format!(
                "support has {} points, limit is {MAX_SUPPORT}",
                support.len()
            )));
        }

        // Homogenized hull: rows (1, α) and (0, e_i) in R^{n+1}.
        let mut rows: Vec<Vec<i64>> = support
            .iter()
            .map(|e| std::iter::once(1).chain(e.as_slice().iter().copied()).collect())
            .collect();
        for i in 0..n {
            let mut r = vec![0; n + 1];
            r[i + 1] = 1;
            rows.push(r);
        }
        let cone = dd::extreme_rays(&rows, n + 1)?;
        let mut facets = Vec::new();
        for y in &cone.rays {
            let a = &y[1..];
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            let g = linalg::gcd_slice(a);
            let normal: Vec<i64> = a.iter().map(|x| x / g).collect();
            let offset = rational::ratio(-y[0], g);
            facets.push(Facet { normal, offset });
        }
        facets.sort_by(|x, y| y.offset.cmp(&x.offset).then_with(|| y.normal.cmp(&x.normal)));
        facets.dedup();

        let mut vertices: Vec<ExponentVector> = support
            .iter()
            .filter(|e| {
                let active: Vec<Vec<i64>> = facets
                    .iter()
                    .filter(|f| rational::int(e.dot(&f.normal)) == f.offset)
                    .map(|f| f.normal.clone())
                    .collect();
                linalg::rank(&active) == n
            })
            .cloned()
            .collect();
        vertices.sort_by(|a, b| b.cmp(a));

        Ok(Self { n, vertices, facets, lattice: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[ExponentVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    fn check_direction(&self, a: &[i64]) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.len() });
        }
        if a.iter().any(|&x| x < 0) {
            return Err(Error::NegativeDirection);
        }
        Ok(())
    }

    /// `l(a) = min ⟨a, α⟩` over the polyhedron.
    pub fn support_value(&self, a: &[i64]) -> Result<Rational> {
        self.check_direction(a)?;
        Ok(rational::int(self.support_value_i64(a)))
    }

    pub(crate) fn support_value_i64(&self, a: &[i64]) -> i64 {
        self.vertices.iter().map(|v| v.dot(a)).min().unwrap_or(0)
    }

    /// The face `{α ∈ Γ₊ : ⟨a, α⟩ = l(a)}`; `a = 0` gives the whole polyhedron.
    pub fn face_of_direction(&self, a: &[i64]) -> Result<&Face> {
        self.check_direction(a)?;
        let lattice = self.lattice();
        let l = self.support_value_i64(a);
        let mut gens = Bitset::new(self.vertices.len() + self.n);
        for (i, v) in self.vertices.iter().enumerate() {
            if v.dot(a) == l {
                gens.insert(i);
            }
        }
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                gens.insert(self.vertices.len() + i);
            }
        }
        let idx = lattice
            .by_generators
            .get(&gens)
            .copied()
            .ok_or_else(|| Error::Invalid("newton-polyhedron: face lookup failed".into()))?;
        Ok(&lattice.faces[idx])
    }

    /// All nonempty faces, ordered by dimension, then by generators.
    pub fn enumerate_faces(&self) -> &[Face] {
        &self.lattice().faces
    }

    /// The compact faces.
    pub fn newton_diagram(&self) -> Vec<&Face> {
        self.enumerate_faces().iter().filter(|f| f.compact).collect()
    }

    pub fn is_convenient(&self) -> bool {
        (0..self.n).all(|i| {
            self.vertices
                .iter()
                .any(|v| v.as_slice().iter().enumerate().all(|(j, &x)| j == i || x == 0))
        })
    }

    /// Facets whose hyperplane contains `point`; errors when the point lies
    /// outside the polyhedron.
    pub fn active_facets_at(&self, point: &[Rational]) -> Result<Vec<usize>> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: point.len() });
        }
        let mut active = Vec::new();
        for (k, f) in self.facets.iter().enumerate() {
            let value: Rational = f
                .normal
                .iter()
                .zip(point)
                .map(|(&a, x)| rational::int(a) * x)
                .fold(Rational::zero(), |s, t| s + t);
            if value < f.offset {
                return Err(Error::PointOutsidePolyhedron);
            }
            if value == f.offset {
                active.push(k);
            }
        }
        Ok(active)
    }

    /// Codimension of the face whose relative interior contains `point`.
    pub fn rho(&self, point: &[Rational]) -> Result<usize> {
        let active = self.active_facets_at(point)?;
        let normals: Vec<Vec<i64>> = active.iter().map(|&k| self.facets[k].normal.clone()).collect();
        Ok(linalg::rank(&normals))
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        self.active_facets_at(point).is_ok()
    }

    /// Terms of `p` whose exponents lie on `face`.
    pub fn restrict_to_face(&self, p: &Polynomial, face: &Face) -> Result<Polynomial> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.dim() });
        }
        Ok(p.filter_terms(|e| self.on_face(e, face)))
    }

    pub fn on_face(&self, e: &ExponentVector, face: &Face) -> bool {
        face.active.iter().all(|&k| {
            let f = &self.facets[k];
            rational::int(e.dot(&f.normal)) == f.offset
        })
    }

    pub(crate) fn face_generators(&self, face: &Face) -> Bitset {
        let mut g = Bitset::new(self.vertices.len() + self.n);
        for &v in &face.vertex_ids {
            g.insert(v);
        }
        for &r in &face.rays {
            g.insert(self.vertices.len() + r);
        }
        g
    }

    pub(crate) fn face_by_generators(&self, gens: &Bitset) -> Option<&Face> {
        let lattice = self.lattice();
        lattice.by_generators.get(gens).map(|&i| &lattice.faces[i])
    }

    fn lattice(&self) -> &Lattice {
        self.lattice.get_or_init(|| self.build_lattice())
    }

    fn build_lattice(&self) -> Lattice {
        let nv = self.vertices.len();
        let total = nv + self.n;
        let incidence: Vec<Bitset> = self
            .facets
            .iter()
            .map(|f| {
                let mut b = Bitset::new(total);
                for (i, v) in self.vertices.iter().enumerate() {
                    if rational::int(v.dot(&f.normal)) == f.offset {
                        b.insert(i);
                    }
                }
                for (i, &a) in f.normal.iter().enumerate() {
                    if a == 0 {
                        b.insert(nv + i);
                    }
                }
                b
            })
            .collect();
        let mut full = Bitset::new(total);
        for i in 0..total {
            full.insert(i);
        }
        let has_vertex = |b: &Bitset| (0..nv).any(|i| b.contains(i));

        let mut seen: HashMap<Bitset, ()> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([full.clone()]);
        seen.insert(full, ());
        while let Some(s) = queue.pop_front() {
            for inc in &incidence {
                let t = s.and(inc);
                if has_vertex(&t) && !seen.contains_key(&t) {
                    seen.insert(t.clone(), ());
                    queue.push_back(t);
                }
            }
            order.push(s);
        }

        let mut faces: Vec<(Bitset, Face)> = order
            .into_iter()
            .map(|gens| {
                let active: Vec<usize> = (0..self.facets.len())
                    .filter(|&k| incidence[k].is_superset(&gens))
                    .collect();
                let normals: Vec<Vec<i64>> =
                    active.iter().map(|&k| self.facets[k].normal.clone()).collect();
                let dim = self.n - linalg::rank(&normals);
                let vertex_ids: Vec<usize> = (0..nv).filter(|&i| gens.contains(i)).collect();
                let rays: Vec<usize> = (0..self.n).filter(|&i| gens.contains(nv + i)).collect();
                let face = Face {
                    vertices: vertex_ids.iter().map(|&i| self.vertices[i].clone()).collect(),
                    compact: rays.is_empty(),
                    active,
                    vertex_ids,
                    rays,
                    dim,
                };
                (gens, face)
            })
            .collect();
        faces.sort_by(|(_, a), (_, b)| {
            a.dim
                .cmp(&b.dim)
                .then_with(|| a.vertex_ids.cmp(&b.vertex_ids))
                .then_with(|| a.rays.cmp(&b.rays))
        });
        let by_generators = faces.iter().enumerate().map(|(i, (g, _))| (g.clone(), i)).collect();
        Lattice { faces: faces.into_iter().map(|(_, f)| f).collect(), by_generators }
    }
}

/// Free-function form of [`NewtonPolyhedron::restrict_to_face`].
pub fn restrict_to_face(p: &Polynomial, polyhedron: &NewtonPolyhedron, face: &Face) -> Result<Polynomial> {
    polyhedron.restrict_to_face(p, face)
}
