//! Property bodies and generators shared by the property suite and the
//! acceptance target, each checked against an independent oracle.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::Zero;
use oscindex_core::fan::{self, Fan};
use oscindex_core::pair;
use oscindex_core::poles;
use oscindex_core::rational::{self, int, Rational};
use oscindex_core::{ExponentVector, NewtonPolyhedron, Polynomial};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

/// Exponent cap per dimension, keeping the n = 4 fans small.
fn cap(n: usize) -> i64 {
    match n {
        1 => 8,
        2 => 6,
        3 => 4,
        _ => 2,
    }
}

/// Supports without the origin, so that a positive facet exists.
pub fn support(n: usize, max_terms: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let c = cap(n);
    prop::collection::vec(prop::collection::vec(0..=c, n), 1..=max_terms).prop_map(|pts| {
        let set: BTreeSet<Vec<i64>> = pts.into_iter().filter(|p| p.iter().any(|&x| x > 0)).collect();
        set.into_iter().collect::<Vec<_>>()
    })
    .prop_filter("nonempty", |s| !s.is_empty())
}

pub fn polynomial_from(n: usize, pts: &[Vec<i64>], coeffs: &[i64]) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for (e, &c) in pts.iter().zip(coeffs.iter().cycle()) {
        p.add_term(ExponentVector::new(e.clone()).unwrap(), int(c));
    }
    p
}

pub fn phase(n: usize, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    (support(n, max_terms), prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 1..=8))
        .prop_map(move |(s, c)| polynomial_from(n, &s, &c))
}

pub fn dim() -> impl Strategy<Value = usize> {
    1usize..=4
}

pub fn poly_of(points: &[Vec<i64>]) -> NewtonPolyhedron {
    let set: BTreeSet<ExponentVector> = points.iter().map(|p| ExponentVector::new(p.clone()).unwrap()).collect();
    NewtonPolyhedron::from_support(&set).unwrap()
}

// ---------------------------------------------------------------------------
// Brute-force facet oracle: every hyperplane through n generators (support
// points and axis directions) of rank n − 1 that supports the set.

pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let k = m.len();
    if k == 0 {
        return 1;
    }
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det_i128(&minor)
        })
        .sum()
}

/// Generalized cross product of `n − 1` vectors in `Zⁿ`.
fn cross(rows: &[Vec<i128>], n: usize) -> Vec<i128> {
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                rows.iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * det_i128(&minor)
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if len < k {
        return vec![];
    }
    let mut out = subsets(len - 1, k);
    for mut s in subsets(len - 1, k - 1) {
        s.push(len - 1);
        out.push(s);
    }
    out
}

fn brute_force_facets(points: &[Vec<i64>], n: usize) -> BTreeSet<(Vec<i64>, i64)> {
    let pts: Vec<Vec<i128>> = points.iter().map(|p| p.iter().map(|&x| x as i128).collect()).collect();
    let mut out = BTreeSet::new();
    if n == 1 {
        let m = points.iter().map(|p| p[0]).min().unwrap();
        out.insert((vec![1], m));
        return out;
    }
    for k in 1..=n {
        for ps in subsets(pts.len(), k) {
            for ds in subsets(n, n - k) {
                let base = &pts[ps[0]];
                let mut rows: Vec<Vec<i128>> =
                    ps[1..].iter().map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
                for &d in &ds {
                    rows.push((0..n).map(|j| i128::from(j == d)).collect());
                }
                let mut a = cross(&rows, n);
                if a.iter().all(|&x| x == 0) {
                    continue;
                }
                if a.iter().any(|&x| x < 0) {
                    a.iter_mut().for_each(|x| *x = -*x);
                }
                if a.iter().any(|&x| x < 0) {
                    continue;
                }
                let g = a.iter().fold(0, |g, &x| gcd(g, x));
                a.iter_mut().for_each(|x| *x /= g);
                let val = |p: &Vec<i128>| p.iter().zip(&a).map(|(x, y)| x * y).sum::<i128>();
                let l = val(base);
                if pts.iter().all(|p| val(p) >= l) {
                    out.insert((a.iter().map(|&x| x as i64).collect(), l as i64));
                }
            }
        }
    }
    out
}

fn in_polyhedron(facets: &BTreeSet<(Vec<i64>, i64)>, x: &[Rational]) -> bool {
    facets.iter().all(|(a, l)| {
        let v: Rational = a.iter().zip(x).map(|(ai, xi)| int(*ai) * xi).sum();
        v >= int(*l)
    })
}

/// Smallest `d` with `d·(v + 𝟙) ∈ Γ₊(f)` for every `v`, by bisection on a
/// membership oracle.
fn bisected_distance(facets: &BTreeSet<(Vec<i64>, i64)>, phi_points: &[Vec<i64>]) -> f64 {
    let fits = |d: &Rational| {
        phi_points.iter().all(|v| {
            let x: Vec<Rational> = v.iter().map(|&vi| d * int(vi + 1)).collect();
            in_polyhedron(facets, &x)
        })
    };
    let (mut lo, mut hi) = (Rational::zero(), int(64));
    assert!(fits(&hi));
    for _ in 0..60 {
        let mid = (&lo + &hi) / int(2);
        if fits(&mid) { hi = mid } else { lo = mid }
    }
    rational::to_f64(&hi)
}

pub fn hull_matches_brute_force(n: usize, seed: u64) -> Result<(), TestCaseError> {
    let pts = draw_support(n, 7, seed);
    let p = poly_of(&pts);
    let ours: BTreeSet<(Vec<i64>, i64)> = p
        .facets()
        .iter()
        .map(|f| (f.normal.clone(), f.offset.to_integer().try_into().unwrap()))
        .collect();
    prop_assert_eq!(ours, brute_force_facets(&pts, n));
    for v in p.vertices() {
        prop_assert!(pts.contains(&v.as_slice().to_vec()));
    }
    Ok(())
}

pub fn distance_matches_bisection(n: usize, s1: u64, s2: u64) -> Result<(), TestCaseError> {
    let f_pts = draw_support(n, 6, s1);
    let mut phi_pts = draw_support(n, 4, s2);
    if s2.is_multiple_of(3) {
        phi_pts.push(vec![0; n]);
    }
    let pf = poly_of(&f_pts);
    let pphi = poly_of(&phi_pts);
    let d = pair::newton_distance(&pf, &pphi).unwrap();
    let oracle = bisected_distance(&brute_force_facets(&f_pts, n), &phi_pts);
    prop_assert!((rational::to_f64(&d) - oracle).abs() < 1e-12, "d = {} oracle = {}", d, oracle);
    let df = pair::phase_distance(&pf).unwrap();
    prop_assert!(d <= df);
    Ok(())
}

pub fn monomial_identities(f: Polynomial, s: u64) -> Result<(), TestCaseError> {
    let n = f.dim();
    let p: Vec<i64> = (0..n).map(|i| ((s >> (4 * i)) % 4) as i64).collect();
    let p = ExponentVector::new(p).unwrap();
    let pf = NewtonPolyhedron::from_polynomial(&f).unwrap();
    let md = pair::monomial_distance(&pf, &p).unwrap();
    let fan = fan::resolution_fan(&pf).unwrap();
    let beta = poles::beta_of_monomial(&pf, &fan, &p).unwrap();
    for i in 0..n {
        prop_assert_eq!(-&beta, int(p[i] + 1) / &md.q[i]);
    }
    let orthant = poly_of(&[p.as_slice().to_vec()]);
    prop_assert_eq!(md.m, pair::newton_multiplicity(&pf, &orthant, &md.d).unwrap());
    prop_assert_eq!(md.m, pf.rho(&md.q).unwrap());
    Ok(())
}

pub fn distance_product_is_at_least_one(n: usize, s1: u64, s2: u64, t: i64) -> Result<(), TestCaseError> {
    let g_pts = draw_support(n, 4, s1);
    let h_pts = if s2.is_multiple_of(2) {
        // Γ₊(x^𝟙 h) = t·Γ₊(x^𝟙 g): h + 𝟙 = t(g + 𝟙).
        g_pts.iter().map(|v| v.iter().map(|&x| t * (x + 1) - 1).collect()).collect()
    } else {
        draw_support(n, 4, s2)
    };
    let shift = |pts: &[Vec<i64>]| pts.iter().map(|v| v.iter().map(|x| x + 1).collect()).collect::<Vec<Vec<i64>>>();
    let (pg, ph) = (poly_of(&g_pts), poly_of(&h_pts));
    let (xg, xh) = (poly_of(&shift(&g_pts)), poly_of(&shift(&h_pts)));
    let product = pair::newton_distance(&xg, &ph).unwrap() * pair::newton_distance(&xh, &pg).unwrap();
    prop_assert!(product >= int(1));
    let scaled = pair::is_scaled_copy(&xg, &xh).is_some();
    prop_assert_eq!(product == int(1), scaled);
    if s2.is_multiple_of(2) {
        prop_assert!(scaled);
    }
    Ok(())
}

pub fn unimodular_fans(f: Polynomial) -> Result<(), TestCaseError> {
    let pf = NewtonPolyhedron::from_polynomial(&f).unwrap();
    let normal = fan::normal_fan(&pf).unwrap();
    normal.validate().unwrap();
    let fan = fan::unimodularize(&fan::simplicialize(&normal).unwrap()).unwrap();
    fan.validate().unwrap();
    prop_assert!(fan.is_unimodular());
    for cone in fan.max_cones() {
        let m: Vec<Vec<i128>> = cone.generators.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        prop_assert_eq!(det_i128(&m).abs(), 1);
    }
    refines(&fan, &normal)?;
    Ok(())
}

pub fn pullbacks_divide_exactly(f: Polynomial) -> Result<(), TestCaseError> {
    let pf = NewtonPolyhedron::from_polynomial(&f).unwrap();
    let fan = fan::resolution_fan(&pf).unwrap();
    for sigma in fan.max_cones() {
        let data = fan::pullback(&f, &pf, None, &sigma, true).unwrap();
        let fs = data.f_sigma.clone().unwrap();
        let shift = ExponentVector::new(data.l_vector.clone()).unwrap();
        prop_assert_eq!(fs.shift(&shift), fan::substitute(&f, &sigma.generators));
        let dual: Vec<&ExponentVector> = f
            .terms()
            .map(|(e, _)| e)
            .filter(|e| sigma.generators.iter().zip(&data.l_vector).all(|(a, l)| e.dot(a) == *l))
            .collect();
        prop_assert_eq!(dual.len(), 1);
        prop_assert_eq!(&data.f_sigma_constant, &f.coefficient(dual[0]));
        prop_assert_eq!(fs.constant_term(), data.f_sigma_constant);
        let jac: Vec<i64> = sigma.generators.iter().map(|a| a.iter().sum::<i64>() - 1).collect();
        prop_assert_eq!(data.jacobian_exponents, jac);
    }
    Ok(())
}

fn seed_bytes(seed: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    for (i, chunk) in out.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64).to_le_bytes());
    }
    out
}

pub fn draw_support(n: usize, max_terms: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut runner = proptest::test_runner::TestRunner::new_with_rng(
        ProptestConfig::default(),
        proptest::test_runner::TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &seed_bytes(seed)),
    );
    support(n, max_terms).new_tree(&mut runner).unwrap().current()
}

/// Every maximal cone of `fine` sits inside a maximal cone of `coarse`.
pub fn refines(fine: &Fan, coarse: &Fan) -> std::result::Result<(), TestCaseError> {
    for cone in fine.max_cones() {
        let interior: Vec<i64> = (0..fine.dim()).map(|j| cone.generators.iter().map(|g| g[j]).sum()).collect();
        let k = coarse.locate(&interior);
        prop_assert!(k.is_some());
        let host = &coarse.max_cones()[k.unwrap()];
        for g in &cone.generators {
            let solo = Fan::from_max_cones(fine.dim(), std::slice::from_ref(host)).unwrap();
            prop_assert!(solo.locate(g).is_some());
        }
    }
    Ok(())
}
