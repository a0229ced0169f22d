//! Seeded property checks. Each draws one instance from the generator and
//! returns a description of the first violated property.

use super::*;
use ddae_core::commutative::{decompose_triple, nilpotent_inverse_series};
use ddae_core::condensed::{regularity, solvability, BehaviorPair};
use ddae_core::polyalg::smith_form;
use ddae_core::solution::{delay_exp, solve_commutative};
use ddae_core::spectral::{commutative_block_abscissas, spectrum_in_region, QuasiPoly, Region};
use ddae_core::verify::residual;
use nalgebra::DMatrix;

pub type Check = std::result::Result<(), String>;

fn fail<T>(msg: String) -> std::result::Result<T, String> {
    Err(msg)
}

/// `U·P·V` is the Smith diagonal, `U`, `V` are unimodular, the invariant
/// factors are monic and divide each other, and they equal `d_k / d_{k−1}`.
pub fn smith(rng: &mut ChaCha8Rng) -> Check {
    let rows = rng.gen_range(1..=3);
    let cols = rng.gen_range(1..=3);
    let p = random_matpoly(rng, rows, cols, 2);
    let sf = smith_form(&p);
    let upv = sf.u.mul(&p).and_then(|x| x.mul(&sf.v)).map_err(|e| e.to_string())?;
    if upv != sf.diagonal(rows, cols) {
        return fail(format!("U·P·V is not the Smith diagonal for {p:?}"));
    }
    for (name, w) in [("U", &sf.u), ("V", &sf.v)] {
        if !matches!(w.det().map(|d| d.degree() == Some(0)), Ok(true)) {
            return fail(format!("{name} is not unimodular for {p:?}"));
        }
    }
    let mut prev = Poly::one();
    let mut rank = 0;
    for k in 1..=rows.min(cols) {
        let d = determinantal_divisor(&p, k);
        if d.is_zero() {
            break;
        }
        rank = k;
        let (q, rem) = d.divmod(&prev).map_err(|e| e.to_string())?;
        if !rem.is_zero() {
            return fail(format!("d_{k} not divisible by d_{}", k - 1));
        }
        match sf.invariant_factors.get(k - 1) {
            Some(f) if *f == q => {}
            other => return fail(format!("invariant factor {k}: {other:?}, expected {q}")),
        }
        prev = d;
    }
    if sf.rank != rank || sf.invariant_factors.len() != rank {
        return fail(format!("rank {} vs determinantal rank {rank}", sf.rank));
    }
    for w in sf.invariant_factors.windows(2) {
        if !w[0].is_monic() || !w[0].divides(&w[1]) {
            return fail(format!("divisibility chain broken: {:?}", sf.invariant_factors));
        }
    }
    Ok(())
}

/// `det(λE − A − ωB)` vanishes on an `(n+1)×(n+1)` integer grid iff it is
/// identically zero (degree ≤ n in each variable).
pub fn grid_regular(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> bool {
    let n = e.rows() as i64;
    (0..=n).any(|l| {
        (0..=n).any(|w| {
            let m = &(&e.scale(&r(l)) - a) - &b.scale(&r(w));
            !m.det().unwrap().is_zero()
        })
    })
}

/// Condensed-form classification, the determinant route and the grid oracle agree.
pub fn routes(rng: &mut ChaCha8Rng) -> Check {
    let n = rng.gen_range(1..=4);
    let sparse = |rng: &mut ChaCha8Rng| {
        RatMatrix::from_fn(n, n, |_, _| if rng.gen_bool(0.55) { Rat::zero() } else { r(rng.gen_range(-2..=2)) })
    };
    let (e, a, b) = (sparse(rng), sparse(rng), sparse(rng));
    let pair = BehaviorPair::first_order(&e, &a, &b, Rat::one()).map_err(|x| x.to_string())?;
    let (_, verdict) = solvability(&pair).map_err(|x| x.to_string())?;
    let by_det = regularity(&e, &a, &b).0;
    let oracle = grid_regular(&e, &a, &b);
    if verdict.regular != by_det || by_det != oracle {
        return fail(format!("condensed {} / det {by_det} / grid {oracle} for E={e:?} A={a:?} B={b:?}", verdict.regular));
    }
    Ok(())
}

pub fn random_retarded(rng: &mut ChaCha8Rng) -> QuasiPoly {
    let d = rng.gen_range(1..=3);
    let mut p0 = random_poly(rng, d - 1, -3, 3);
    p0 = &p0 + &Poly::monomial(Rat::one(), d);
    let mut terms = vec![(0, p0)];
    for j in 1..=rng.gen_range(1..=2) {
        let deg = rng.gen_range(0..d);
        terms.push((j, random_poly(rng, deg, -2, 2)));
    }
    let tau = Rat::new(rng.gen_range(1..=4), 2);
    QuasiPoly::new(terms, tau).unwrap()
}

/// Winding number of the box equals the number of certified roots found in it.
pub fn counting(rng: &mut ChaCha8Rng) -> Check {
    let q = random_retarded(rng);
    let rep = spectrum_in_region(&q, Region::new(-4.0, 2.0, 30.0).unwrap(), 1e-10).map_err(|e| e.to_string())?;
    let refined: usize = rep.roots.iter().map(|x| x.multiplicity).sum();
    if refined != rep.winding_count {
        return fail(format!("winding {} vs {} refined roots for {q:?}", rep.winding_count, refined));
    }
    for root in &rep.roots {
        if !q.certifies(root.value(), 1e-8) {
            return fail(format!("uncertified root {root:?} of {q:?}"));
        }
    }
    Ok(())
}

/// A 4×4 commutative system `V·diag(…)·V⁻¹` with one block of each solvable
/// kind: a scalar ODE, a 2×2 block with `E = εJ₂` (so ζ can be 2) and a
/// scalar pure algebraic block `0 = b x₃(t−τ) + f₃`. `φ` is consistent
/// with the algebraic block.
pub fn random_block_system(rng: &mut ChaCha8Rng) -> DdaeSystem {
    let j2 = m(&[&[0, 1], &[0, 0]]);
    let i2 = RatMatrix::identity(2);
    let one = |x: Rat| RatMatrix::diagonal(&[x]);
    let e1 = r(rng.gen_range(1..=2));
    let a1 = small_rat(rng, -6, 2, 2);
    let b1 = small_rat(rng, -4, 4, 2);
    let eps = r(rng.gen_range(0..=1));
    let alpha = r(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
    let e2 = j2.scale(&eps);
    let a2 = &i2.scale(&alpha) + &j2.scale(&r(rng.gen_range(-1..=1)));
    let b2 = &i2.scale(&small_rat(rng, -3, 3, 2)) + &j2.scale(&small_rat(rng, -2, 2, 2));
    let b3 = r(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());

    let v = random_unimodular(rng, 4);
    let v_inv = v.inverse().unwrap();
    let conj = |blocks: &[&RatMatrix]| &(&v * &RatMatrix::block_diag(blocks)) * &v_inv;
    let e = conj(&[&one(e1), &e2, &one(Rat::zero())]);
    let a = conj(&[&one(a1), &a2, &one(Rat::zero())]);
    let b = conj(&[&one(b1), &b2, &one(b3.clone())]);

    let tau = Rat::new(rng.gen_range(1..=3), 2);
    let horizon = &tau * &r(4);
    let f_end = &tau * &r(8);
    let fy: Vec<Poly> = (0..4).map(|_| {
        let d = rng.gen_range(0..=2);
        Poly::new((0..=d).map(|_| small_rat(rng, -2, 2, 2)).collect())
    }).collect();
    let mut phi_y: Vec<Poly> = (0..3).map(|_| {
        let d = rng.gen_range(0..=2);
        Poly::new((0..=d).map(|_| small_rat(rng, -4, 4, 2)).collect())
    }).collect();
    phi_y.push(fy[3].shift(&tau).scale(&(-b3.recip().unwrap())));
    let f = PiecewisePolyFn::single(Rat::zero(), f_end, fy).unwrap().map_linear(&v).unwrap();
    let phi = PiecewisePolyFn::single(-&tau, Rat::zero(), phi_y).unwrap().map_linear(&v).unwrap();
    DdaeSystem::new(e, a, b, tau)
        .and_then(|s| s.with_phi(phi))
        .and_then(|s| s.with_f(f))
        .and_then(|s| s.with_horizon(horizon))
        .unwrap()
}

pub fn closed_form_residual(sys: &DdaeSystem) -> Check {
    let sol = solve_commutative(sys, &sys.horizon).map_err(|e| e.to_string())?;
    let rep = residual(sys, &sol, 200).map_err(|e| e.to_string())?;
    if rep.max_residual > 1e-8 * rep.scale {
        return fail(format!("residual {:.3e} at t = {} (scale {})", rep.max_residual, rep.worst_t, rep.scale));
    }
    Ok(())
}

/// Residual of the closed form on the mixed-block generator and on the
/// weakly stable example with random `φ`.
pub fn residual_blocks(rng: &mut ChaCha8Rng) -> Check {
    closed_form_residual(&random_block_system(rng))?;
    let (e, a, b) = example_41();
    let phi = random_phi(rng, 3, &Rat::one(), 3);
    closed_form_residual(&system_with_phi(e, a, b, Rat::one(), phi).with_horizon(r(6)).unwrap())
}

/// Strictly upper triangular `ζ×ζ` matrix with nonzero superdiagonal,
/// conjugated by a random unimodular matrix: nilpotent of index exactly `ζ`.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, zeta: usize) -> RatMatrix {
    let x = RatMatrix::from_fn(zeta, zeta, |i, j| {
        if j == i + 1 {
            r(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap())
        } else if j > i + 1 {
            r(rng.gen_range(-2..=2))
        } else {
            Rat::zero()
        }
    });
    let v = random_unimodular(rng, zeta);
    &(&v * &x) * &v.inverse().unwrap()
}

pub fn poly_in(x: &RatMatrix, coeffs: &[Rat]) -> RatMatrix {
    let n = x.rows();
    let mut acc = RatMatrix::zeros(n, n);
    let mut pow = RatMatrix::identity(n);
    for c in coeffs {
        acc = &acc + &pow.scale(c);
        pow = &pow * x;
    }
    acc
}

fn is_nilpotent(n: &RatMatrix) -> bool {
    n.pow(n.rows()).is_zero()
}

/// Products, linear combinations and the inverse series for matrices
/// built as polynomials in one nilpotent matrix.
pub fn nilpotent_identities(rng: &mut ChaCha8Rng) -> Check {
    let dim = rng.gen_range(1..=4);
    let x = random_nilpotent(rng, dim);
    let coeffs = |rng: &mut ChaCha8Rng, constant: Rat| {
        let mut c = vec![constant];
        c.extend((1..dim.max(2)).map(|_| small_rat(rng, -3, 3, 2)));
        c
    };
    let c_n = coeffs(rng, Rat::zero());
    let c_nt = coeffs(rng, Rat::zero());
    let c0 = small_rat(rng, -4, 4, 2);
    let c_s = coeffs(rng, c0);
    let jc = r(*[-3, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
    let c_j = coeffs(rng, jc);
    let (n, nt, s, j) = (poly_in(&x, &c_n), poly_in(&x, &c_nt), poly_in(&x, &c_s), poly_in(&x, &c_j));
    if !is_nilpotent(&(&n * &s)) {
        return fail(format!("N·S not nilpotent for N={n:?} S={s:?}"));
    }
    let (al, be) = (small_rat(rng, -3, 3, 2), small_rat(rng, -3, 3, 2));
    if !is_nilpotent(&(&n.scale(&al) + &nt.scale(&be))) {
        return fail(format!("αN + βÑ not nilpotent for N={n:?} Ñ={nt:?}"));
    }
    let inv = nilpotent_inverse_series(&j, &n).map_err(|e| e.to_string())?;
    if &(&j - &n) * &inv != RatMatrix::identity(dim) || Some(inv.clone()) != (&j - &n).inverse() {
        return fail(format!("(J − N)⁻¹ series wrong for J={j:?} N={n:?}"));
    }
    Ok(())
}

/// Commutative system with a scalar ODE block and a nilpotent-E block; if the
/// difference block's abscissa is negative the scaled delay matrix of that
/// block has spectral radius below one.
pub fn difference_block_radius(rng: &mut ChaCha8Rng) -> std::result::Result<bool, String> {
    let k = rng.gen_range(1..=3);
    let x = random_nilpotent(rng, k);
    let ne = poly_in(&x, &[Rat::zero(), r(rng.gen_range(0..=1))]);
    let alpha = r(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
    let a2 = poly_in(&x, &[alpha, small_rat(rng, -2, 2, 2)]);
    let b2 = poly_in(&x, &[small_rat(rng, -5, 5, 2), small_rat(rng, -2, 2, 2), small_rat(rng, -2, 2, 2)]);
    let one = |v: Rat| RatMatrix::diagonal(&[v]);
    let e = RatMatrix::block_diag(&[&one(Rat::one()), &ne]);
    let a = RatMatrix::block_diag(&[&one(r(-2)), &a2]);
    let b = RatMatrix::block_diag(&[&one(Rat::new(1, 2)), &b2]);
    let v = random_unimodular(rng, k + 1);
    let vi = v.inverse().unwrap();
    let conj = |z: &RatMatrix| &(&v * z) * &vi;
    let dec = decompose_triple(&conj(&e), &conj(&a), &conj(&b)).map_err(|e| e.to_string())?;
    if dec.block_dims != [1, k, 0, 0] {
        return fail(format!("unexpected block dims {:?}", dec.block_dims));
    }
    let abscissas = commutative_block_abscissas(&dec, &Rat::one()).map_err(|e| e.to_string())?;
    let blk = &dec.blocks[1];
    let b_tilde = (&blk.a.inverse().unwrap() * &blk.b).to_f64();
    let rho = b_tilde.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let stable = abscissas[1].abscissa.is_some_and(|s| s < 0.0);
    if stable && rho >= 1.0 {
        return fail(format!("abscissa {:?} < 0 but ρ(B̃) = {rho}", abscissas[1].abscissa));
    }
    Ok(stable)
}

/// Entries of `((I − X)⁻¹)^k` for `k ≤ 12` are reproduced by the
/// interpolant through `k = 0, …, ζ−1`.
pub fn polynomial_in_k(rng: &mut ChaCha8Rng, zeta: usize) -> Check {
    let x = random_nilpotent(rng, zeta);
    let y = (&RatMatrix::identity(zeta) - &x).inverse().unwrap();
    let powers: Vec<RatMatrix> = (0..=12).map(|k| y.pow(k)).collect();
    for i in 0..zeta {
        for j in 0..zeta {
            let pts: Vec<(Rat, Rat)> = (0..zeta).map(|k| (r(k as i64), powers[k].get(i, j).clone())).collect();
            for (k, p) in powers.iter().enumerate() {
                if lagrange(&pts, &r(k as i64)) != *p.get(i, j) {
                    return fail(format!("entry ({i},{j}) of Y^{k} is off the degree-{} interpolant", zeta - 1));
                }
            }
        }
    }
    Ok(())
}

/// `d/dt e^{Dt}_τ = D e^{D(t−τ)}_τ` against central differences.
pub fn delay_exp_derivative(rng: &mut ChaCha8Rng) -> Check {
    let n = rng.gen_range(1..=3);
    let d = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.5..1.5));
    let tau: f64 = rng.gen_range(0.5..2.0);
    let h = 1e-6;
    for _ in 0..50 {
        let t = rng.gen_range(0.0..5.0 * tau);
        if ((t / tau) - (t / tau).round()).abs() * tau < 10.0 * h {
            continue;
        }
        let de = |t| delay_exp(&d, t, tau).map_err(|e| e.to_string());
        let fd = (de(t + h)? - de(t - h)?) / (2.0 * h);
        let exact = &d * de(t - tau)?;
        let err = (&fd - &exact).amax() / exact.amax().max(1.0);
        if err > 1e-6 {
            return fail(format!("derivative mismatch {err:.2e} at t = {t}, τ = {tau}"));
        }
    }
    Ok(())
}
