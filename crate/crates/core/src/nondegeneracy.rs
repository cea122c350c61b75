//! Nondegeneracy of a phase with respect to its Newton polyhedron: for every
//! compact face γ, `∇f_γ` has no zero with all coordinates nonzero.
//!
//! Vertices and (for n = 2) compact edges are decided exactly. Faces of
//! dimension ≥ 1 in n ≥ 3 are searched numerically; a numeric near-zero is
//! reported as Degenerate only after an exact check at a rational point.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::polyhedron::{Face, NewtonPolyhedron};
use crate::polynomial::{ExponentVector, Polynomial};
use crate::rational::{self, Rational};
use crate::univariate::UPoly;

pub const DEFAULT_SEED: u64 = 0x5eed_0002;
/// Gradient norm (squared, after normalizing coefficients) below which a
/// numeric zero is suspected.
pub const ZERO_TOLERANCE: f64 = 1e-10;
/// Every start must stay above this for a numeric Nondegenerate verdict.
pub const CLEAR_TOLERANCE: f64 = 1e-4;
/// Searched magnitudes lie in `[1/K, K]`.
pub const MAGNITUDE_BOX: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NondegeneracyStatus {
    Nondegenerate,
    Degenerate,
    Unknown,
}

impl NondegeneracyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Nondegenerate => "Nondegenerate",
            Self::Degenerate => "Degenerate",
            Self::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegeneracyWitness {
    pub face_vertices: Vec<ExponentVector>,
    pub point: Vec<f64>,
    /// The same point as exact rationals when the zero was confirmed exactly.
    #[serde(serialize_with = "ser_opt_point")]
    pub exact: Option<Vec<Rational>>,
}

fn ser_opt_point<S: serde::Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(p) => s.collect_seq(p.iter().map(|x| x.to_string())),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NondegeneracyReport {
    pub status: NondegeneracyStatus,
    pub witnesses: Vec<DegeneracyWitness>,
    pub faces_checked: usize,
    /// Faces decided numerically rather than exactly.
    pub numeric_faces: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct NondegeneracyOptions {
    pub seed: u64,
    pub starts: usize,
    pub iterations: usize,
}

impl Default for NondegeneracyOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, starts: 48, iterations: 200 }
    }
}

enum FaceOutcome {
    Clear,
    Degenerate(DegeneracyWitness),
    Unsure,
}

pub fn nondegeneracy_check(f: &Polynomial, p: &NewtonPolyhedron, options: &NondegeneracyOptions) -> NondegeneracyReport {
    let mut witnesses = Vec::new();
    let mut unsure = false;
    let mut checked = 0;
    let mut numeric = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for face in p.newton_diagram() {
        checked += 1;
        let fg = p.restrict_to_face(f, face).expect("same dimension");
        let outcome = if face.dim == 0 {
            vertex_outcome(face)
        } else if f.dim() == 2 {
            edge_outcome(&fg, face, &p.facets()[face.active[0]].normal)
        } else {
            numeric += 1;
            let w = weight(p, face);
            numeric_outcome(&fg, face, &w, options, &mut rng)
        };
        match outcome {
            FaceOutcome::Clear => {}
            FaceOutcome::Degenerate(w) => witnesses.push(w),
            FaceOutcome::Unsure => unsure = true,
        }
    }
    let status = if !witnesses.is_empty() {
        NondegeneracyStatus::Degenerate
    } else if unsure {
        NondegeneracyStatus::Unknown
    } else {
        NondegeneracyStatus::Nondegenerate
    };
    NondegeneracyReport { status, witnesses, faces_checked: checked, numeric_faces: numeric, seed: options.seed }
}

/// `c·x^α` has a nonvanishing gradient on the torus unless `α = 0`.
fn vertex_outcome(face: &Face) -> FaceOutcome {
    let v = &face.vertices[0];
    if v.degree() == 0 {
        FaceOutcome::Degenerate(DegeneracyWitness {
            face_vertices: face.vertices.clone(),
            point: vec![1.0; v.dim()],
            exact: Some(vec![rational::int(1); v.dim()]),
        })
    } else {
        FaceOutcome::Clear
    }
}

/// Compact edge in the plane with normal `a > 0`. On the torus every point is
/// `(ξ t^{a₁}, ε t^{a₂})`, and `f_γ` there equals `t^l g_ε(ξ)` with
/// `g_ε(ξ) = Σ c_α ξ^{α₁} ε^{α₂}`. By the Euler identity the gradient
/// vanishes exactly at the nonzero multiple roots of `g_ε`.
fn edge_outcome(fg: &Polynomial, face: &Face, a: &[i64]) -> FaceOutcome {
    debug_assert!(a.iter().all(|&x| x > 0));
    for eps in [1i64, -1] {
        let deg = fg.terms().map(|(e, _)| e[0]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (e, c) in fg.terms() {
            let s = if eps < 0 && e[1] % 2 == 1 { -c.clone() } else { c.clone() };
            coeffs[e[0] as usize] += s;
        }
        let g = UPoly::new(coeffs);
        let h = g.gcd(&g.derivative()).strip_zero_roots();
        if let Some((xi, exact)) = h.some_real_root() {
            return FaceOutcome::Degenerate(DegeneracyWitness {
                face_vertices: face.vertices.clone(),
                point: vec![xi, eps as f64],
                exact: exact.map(|x| vec![x, rational::int(eps)]),
            });
        }
    }
    FaceOutcome::Clear
}

/// A strictly positive weight for which `f_γ` is quasi-homogeneous.
fn weight(p: &NewtonPolyhedron, face: &Face) -> Vec<i64> {
    let mut w = vec![0i64; p.dim()];
    for &k in &face.active {
        for (wi, a) in w.iter_mut().zip(&p.facets()[k].normal) {
            *wi += a;
        }
    }
    w
}

struct GradientSystem {
    n: usize,
    grad: Vec<Polynomial>,
    hess: Vec<Vec<Polynomial>>,
    scale: f64,
}

impl GradientSystem {
    fn new(fg: &Polynomial) -> Self {
        let scale = fg.terms().map(|(_, c)| rational::to_f64(c).abs()).fold(0.0, f64::max).max(1e-300);
        let grad = fg.gradient();
        let hess = grad.iter().map(|g| g.gradient()).collect();
        Self { n: fg.dim(), grad, hess, scale }
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval_f64(x) / self.scale).collect()
    }

    fn norm2(&self, x: &[f64]) -> f64 {
        self.residual(x).iter().map(|r| r * r).sum()
    }

    /// Jacobian of the residual with respect to the first `n - 1` coordinates.
    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.hess
            .iter()
            .map(|row| row[..self.n - 1].iter().map(|h| h.eval_f64(x) / self.scale).collect())
            .collect()
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn in_box(x: &[f64]) -> bool {
    x.iter().all(|v| {
        let m = v.abs();
        (1.0 / MAGNITUDE_BOX..=MAGNITUDE_BOX).contains(&m)
    })
}

/// Levenberg–Marquardt on `∇f_γ = 0` over the slice `x_n = ±1`; returns the
/// smallest squared norm seen inside the magnitude box and where.
fn descend(sys: &GradientSystem, mut x: Vec<f64>, iterations: usize) -> (f64, Vec<f64>) {
    let k = sys.n - 1;
    let mut lambda = 1e-3;
    let mut value = sys.norm2(&x);
    let mut best = (value, x.clone());
    for _ in 0..iterations {
        let r = sys.residual(&x);
        let j = sys.jacobian(&x);
        let mut jtj = vec![vec![0.0; k]; k];
        let mut jtr = vec![0.0; k];
        for (row, ri) in j.iter().zip(&r) {
            for a in 0..k {
                jtr[a] += row[a] * ri;
                for b in 0..k {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += lambda * (1.0 + jtj[a][a]);
            }
            let Some(step) = solve_dense(m, jtr.iter().map(|v| -v).collect()) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = x.clone();
            for a in 0..k {
                trial[a] += step[a];
            }
            let tv = sys.norm2(&trial);
            if tv < value {
                x = trial;
                value = tv;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !in_box(&x) {
            break;
        }
        if value < best.0 {
            best = (value, x.clone());
        }
        if !improved || value < 1e-28 {
            break;
        }
    }
    best
}

fn numeric_outcome(
    fg: &Polynomial,
    face: &Face,
    w: &[i64],
    options: &NondegeneracyOptions,
    rng: &mut ChaCha8Rng,
) -> FaceOutcome {
    let n = fg.dim();
    debug_assert!(w[n - 1] > 0, "compact faces have strictly positive weights");
    let sys = GradientSystem::new(fg);
    let ln_k = MAGNITUDE_BOX.ln();
    let mut overall = f64::INFINITY;
    let mut best_point = Vec::new();
    for start in 0..options.starts {
        let mut x: Vec<f64> = (0..n - 1)
            .map(|_| {
                let mag = (rng.random_range(-ln_k..ln_k) * 0.75).exp();
                if rng.random_bool(0.5) { mag } else { -mag }
            })
            .collect();
        x.push(if start % 2 == 0 { 1.0 } else { -1.0 });
        let (v, p) = descend(&sys, x, options.iterations);
        if v < overall {
            overall = v;
            best_point = p;
        }
    }
    if overall > CLEAR_TOLERANCE {
        return FaceOutcome::Clear;
    }
    if overall < ZERO_TOLERANCE {
        let exact: Option<Vec<Rational>> = best_point.iter().map(|&v| rational::approximate(v, 1000)).collect();
        if let Some(q) = exact {
            let all_zero = q.iter().all(|c| !c.is_zero())
                && fg.gradient().iter().all(|g| g.eval(&q).expect("dimension").is_zero());
            if all_zero {
                return FaceOutcome::Degenerate(DegeneracyWitness {
                    face_vertices: face.vertices.clone(),
                    point: best_point,
                    exact: Some(q),
                });
            }
        }
    }
    FaceOutcome::Unsure
}
