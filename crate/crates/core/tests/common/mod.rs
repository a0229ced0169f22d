//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod checks;

use ddae_core::polyalg::{MatPoly, Poly, Rat, RatMatrix};
use ddae_core::solution::PiecewisePolyFn;
use ddae_core::system::DdaeSystem;
use ddae_core::verify::Trajectory;
use ddae_core::Result;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn m(rows: &[&[i64]]) -> RatMatrix {
    RatMatrix::from_ints(rows)
}

pub fn r(n: i64) -> Rat {
    Rat::from_int(n)
}

pub fn example_21() -> (RatMatrix, RatMatrix, RatMatrix) {
    (
        m(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]),
        m(&[&[0, 1, 0], &[0, 0, 1], &[0, -1, 0]]),
        m(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]),
    )
}

pub fn example_22() -> (RatMatrix, RatMatrix, RatMatrix) {
    (
        m(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]),
        m(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
        m(&[&[0, -1, 0], &[0, 0, 0], &[0, 0, 1]]),
    )
}

pub fn example_31() -> (RatMatrix, RatMatrix, RatMatrix) {
    (
        m(&[&[1, 0, 0], &[0, 0, 1], &[0, 0, 0]]),
        m(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        m(&[&[0, 0, 0], &[0, 0, 0], &[-1, 0, 0]]),
    )
}

pub fn lambert_example(gamma: Rat) -> (RatMatrix, RatMatrix, RatMatrix) {
    let b = RatMatrix::from_rows(vec![vec![Rat::zero(), Rat::zero()], vec![-gamma, Rat::zero()]]).unwrap();
    (m(&[&[0, 1], &[0, 0]]), RatMatrix::identity(2), b)
}

pub fn example_41() -> (RatMatrix, RatMatrix, RatMatrix) {
    (
        m(&[&[2, -4, -8], &[-8, -4, 2], &[12, 16, 12]]),
        m(&[&[28, 36, 36], &[-12, -14, -24], &[-12, -24, -14]]),
        m(&[&[2, -6, -6], &[2, 9, 4], &[2, 4, 9]]),
    )
}

/// Real root of `λ + 2 − e^{−λ}` by bisection.
pub fn bisect_scalar_root() -> f64 {
    let g = |x: f64| x + 2.0 - (-x).exp();
    let (mut lo, mut hi) = (-1.0, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn small_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rat {
    Rat::new(rng.gen_range(lo..=hi), den)
}

pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize, lo: i64, hi: i64) -> Poly {
    Poly::new((0..=degree).map(|_| small_rat(rng, lo, hi, 1)).collect())
}

/// Random vector polynomial on `[−τ, 0]`.
pub fn random_phi(rng: &mut ChaCha8Rng, n: usize, tau: &Rat, max_degree: usize) -> PiecewisePolyFn {
    let polys = (0..n)
        .map(|_| {
            let d = rng.gen_range(0..=max_degree);
            Poly::new((0..=d).map(|_| small_rat(rng, -4, 4, 2)).collect())
        })
        .collect();
    PiecewisePolyFn::single(-tau, Rat::zero(), polys).unwrap()
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> RatMatrix {
    RatMatrix::from_fn(rows, cols, |_, _| Rat::from_int(rng.gen_range(lo..=hi)))
}

/// Integer matrix with determinant 1 (product of unit triangular factors).
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    let l = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Rat::one(),
        std::cmp::Ordering::Greater => Rat::from_int(rng.gen_range(-1..=1)),
        std::cmp::Ordering::Less => Rat::zero(),
    });
    let u = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Rat::one(),
        std::cmp::Ordering::Less => Rat::from_int(rng.gen_range(-1..=1)),
        std::cmp::Ordering::Greater => Rat::zero(),
    });
    &l * &u
}

pub fn random_matpoly(rng: &mut ChaCha8Rng, rows: usize, cols: usize, degree: usize) -> MatPoly {
    MatPoly::from_fn(rows, cols, |_, _| {
        let d = rng.gen_range(0..=degree);
        random_poly(rng, d, -2, 2)
    })
}

/// `d_k` = monic gcd of all `k×k` minors (zero when they all vanish).
pub fn determinantal_divisor(p: &MatPoly, k: usize) -> Poly {
    fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..n)
            .flat_map(|first| {
                combos(n, k - 1)
                    .into_iter()
                    .filter(move |rest| rest.first().is_none_or(|&r| r > first))
                    .map(move |rest| std::iter::once(first).chain(rest).collect())
            })
            .collect()
    }
    let mut g = Poly::zero();
    for rows in combos(p.rows(), k) {
        for cols in combos(p.cols(), k) {
            let minor = p.select(&rows, &cols).det().unwrap();
            if !minor.is_zero() {
                g = if g.is_zero() { minor.monic() } else { g.gcd_monic(&minor).unwrap() };
            }
        }
    }
    g
}

/// Exact Lagrange interpolation: the value at `x` of the degree
/// `< points.len()` polynomial through `(k, v_k)`.
pub fn lagrange(points: &[(Rat, Rat)], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut term = yi.clone();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                term = &term * &(&(x - xj) / &(xi - xj));
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// The hand-derived solution of the high-index three-variable example:
/// `x₁ = e^{−t}φ₁(0)`; on `[0, τ]` `x₂ = φ̇₁(t−τ)`, `x₃ = φ₁(t−τ)`; after
/// that `x₂ = −e^{−(t−τ)}φ₁(0)`, `x₃ = e^{−(t−τ)}φ₁(0)`.
pub struct Example31Solution {
    pub phi1: Poly,
    pub tau: f64,
    pub horizon: f64,
}

impl Example31Solution {
    fn parts(&self, t: f64, order: usize) -> Vec<f64> {
        let c = self.phi1.eval_f64(0.0);
        let sgn = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        let x1 = sgn * (-t).exp() * c;
        let s = t - self.tau;
        if s < 0.0 {
            vec![x1, self.phi1.nth_derivative(order + 1).eval_f64(s), self.phi1.nth_derivative(order).eval_f64(s)]
        } else {
            let e = (-s).exp() * c;
            vec![x1, -sgn * e, sgn * e]
        }
    }
}

impl Trajectory for Example31Solution {
    fn dim(&self) -> usize {
        3
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, self.horizon)
    }

    fn eval(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.parts(t, 0))
    }

    fn derivative(&self, t: f64) -> Option<Result<Vec<f64>>> {
        Some(Ok(self.parts(t, 1)))
    }
}

/// A commutative, strangeness-free triple `V·diag(e, a, b)·V⁻¹` whose modes
/// are each delay-independently stable: differential modes with
/// `|b| < −a`, algebraic modes with `|b/a| ≤ ½`.
pub fn random_stable_commutative(rng: &mut ChaCha8Rng, n: usize) -> (RatMatrix, RatMatrix, RatMatrix) {
    let mut e = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        if i == 0 || rng.gen_bool(0.6) {
            let ei = Rat::from_int(rng.gen_range(1..=2));
            let c = rng.gen_range(1..=3);
            a.push(&ei * &Rat::from_int(-c));
            b.push(&ei * &Rat::new(rng.gen_range(-(2 * c - 1)..=(2 * c - 1)), 2));
            e.push(ei);
        } else {
            let ai = Rat::from_int(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
            b.push(&ai * &Rat::new(rng.gen_range(-2..=2), 4));
            a.push(ai);
            e.push(Rat::zero());
        }
    }
    let v = random_unimodular(rng, n);
    let v_inv = v.inverse().unwrap();
    let conj = |d: &[Rat]| &(&v * &RatMatrix::diagonal(d)) * &v_inv;
    (conj(&e), conj(&a), conj(&b))
}

pub fn system_with_phi(e: RatMatrix, a: RatMatrix, b: RatMatrix, tau: Rat, phi: PiecewisePolyFn) -> DdaeSystem {
    DdaeSystem::new(e, a, b, tau).unwrap().with_phi(phi).unwrap()
}

/// Sample points on `(0, end)` that stay away from multiples of `τ`.
pub fn off_knot_samples(end: f64, tau: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (i as f64 + 0.37) * end / count as f64)
        .filter(|t| {
            let k = (t / tau).round();
            (t - k * tau).abs() > 1e-6 * tau
        })
        .collect()
}
