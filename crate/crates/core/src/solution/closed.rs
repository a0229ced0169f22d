//! Explicit solutions of regular commutative systems.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::blocks::{solve_x2, solve_x3};
use super::piecewise::PiecewisePolyFn;
use super::x1::X1Evaluator;
use crate::commutative::{decompose_triple, is_commutative_triple, Decomposition};
use crate::error::{DdaeError, Result};
use crate::polyalg::{Rat, RatMatrix};
use crate::system::DdaeSystem;
use crate::verify::Trajectory;

/// `x = T⁻¹·(x₁; x₂; x₃)` with an evaluator for the retarded block and
/// exact pieces for the nilpotent ones.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    pub basis: RatMatrix,
    pub basis_inv: RatMatrix,
    pub block_dims: [usize; 4],
    pub x1: X1Evaluator,
    pub x2: PiecewisePolyFn,
    pub x3: PiecewisePolyFn,
    /// Highest derivative of `φ` the formula consumes.
    pub required_smoothness: usize,
    pub zeta: usize,
    pub tau: Rat,
    pub horizon: Rat,
    t_inv: DMatrix<f64>,
}

impl ClosedFormSolution {
    pub fn n(&self) -> usize {
        self.basis.rows()
    }

    fn combine(&self, y1: DVector<f64>, y2: Vec<f64>, y3: Vec<f64>) -> Vec<f64> {
        let y: Vec<f64> = y1.iter().copied().chain(y2).chain(y3).collect();
        (&self.t_inv * DVector::from_vec(y)).iter().copied().collect()
    }

    /// Solution in block coordinates `T·x`.
    pub fn eval_blocks(&self, t: f64) -> Result<[Vec<f64>; 3]> {
        Ok([self.x1.eval(t)?.iter().copied().collect(), self.x2.eval(t)?, self.x3.eval(t)?])
    }

    /// Knots `jτ` inside the horizon.
    pub fn delay_knots(&self) -> Vec<f64> {
        let (tau, h) = (self.tau.to_f64(), self.horizon.to_f64());
        (0..).map(|j| j as f64 * tau).take_while(|&t| t <= h * (1.0 + 1e-14)).collect()
    }
}

impl Trajectory for ClosedFormSolution {
    fn dim(&self) -> usize {
        self.n()
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, self.horizon.to_f64())
    }

    fn eval(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.combine(self.x1.eval(t)?, self.x2.eval(t)?, self.x3.eval(t)?))
    }

    fn derivative(&self, t: f64) -> Option<Result<Vec<f64>>> {
        let d = || -> Result<Vec<f64>> {
            Ok(self.combine(self.x1.derivative(t)?, self.x2.eval_derivative(t, 1)?, self.x3.eval_derivative(t, 1)?))
        };
        Some(d())
    }

    fn knots(&self) -> Vec<f64> {
        let mut k = self.delay_knots();
        k.extend(self.x2.breakpoints().iter().map(Rat::to_f64));
        k.extend(self.x3.breakpoints().iter().map(Rat::to_f64));
        k
    }
}

fn split3(v: &PiecewisePolyFn, dims: [usize; 4]) -> [PiecewisePolyFn; 3] {
    let o = [0, dims[0], dims[0] + dims[1], dims[0] + dims[1] + dims[2]];
    [v.components(o[0]..o[1]), v.components(o[1]..o[2]), v.components(o[2]..o[3])]
}

fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    m.inverse().ok_or(DdaeError::Singular)
}

/// Decomposes the triple, scales each block by the inverse of its
/// invertible factor and solves the three block equations on `[0, horizon]`.
/// `f` must reach `horizon + n₃τ`.
pub fn solve_commutative(sys: &DdaeSystem, horizon: &Rat) -> Result<ClosedFormSolution> {
    if !sys.is_square() {
        return Err(DdaeError::NotSquare { rows: sys.ell(), cols: sys.n() });
    }
    if !horizon.is_positive() {
        return Err(DdaeError::InvalidArgument("horizon must be positive".into()));
    }
    if !is_commutative_triple(&sys.e, &sys.a, &sys.b)? {
        return Err(DdaeError::NotCommutative);
    }
    let dec = decompose_triple(&sys.e, &sys.a, &sys.b)?;
    solve_decomposed(sys, &dec, horizon)
}

pub fn solve_decomposed(sys: &DdaeSystem, dec: &Decomposition, horizon: &Rat) -> Result<ClosedFormSolution> {
    let dims = dec.block_dims;
    if dims[3] > 0 {
        return Err(DdaeError::Irregular(format!("a {}-dimensional block is nilpotent in E, A and B", dims[3])));
    }
    let tau = &sys.tau;
    let end = horizon + &(tau * &Rat::from_int(dims[2] as i64));
    let f_hat = match &sys.f {
        Some(_) => Some(sys.f_on(&end)?.map_linear(&dec.t)?),
        None => None,
    };
    let phi_hat = sys.phi_or_zero().map_linear(&dec.t)?;
    let [phi1, phi2, _] = split3(&phi_hat, dims);
    let fs = f_hat.as_ref().map(|f| split3(f, dims));
    let [b1, b2, b3, _] = &dec.blocks;

    let je_inv = inverse(&b1.e)?;
    let a1 = &je_inv * &b1.a;
    let bt1 = &je_inv * &b1.b;
    let f1 = match &fs {
        Some(f) => Some(f[0].map_linear(&je_inv)?.restrict(&Rat::zero(), horizon)?),
        None => None,
    };
    let x1 = X1Evaluator::new(&a1, &bt1, phi1, f1, tau.to_f64(), horizon.to_f64())?;

    let ja_inv = inverse(&b2.a)?;
    let f2 = match &fs {
        Some(f) => Some(f[1].map_linear(&ja_inv)?.restrict(&Rat::zero(), horizon)?),
        None => None,
    };
    let x2 = solve_x2(&(&ja_inv * &b2.e), &(&ja_inv * &b2.b), &phi2, f2.as_ref(), tau, horizon)?;

    let jb_inv = inverse(&b3.b)?;
    let f3 = match &fs {
        Some(f) => Some(f[2].map_linear(&jb_inv)?),
        None => None,
    };
    let x3 = solve_x3(&(&jb_inv * &b3.e), &(&jb_inv * &b3.a), f3.as_ref(), tau, horizon)?;

    Ok(ClosedFormSolution {
        t_inv: dec.t_inv.to_f64(),
        basis: dec.t.clone(),
        basis_inv: dec.t_inv.clone(),
        block_dims: dims,
        x1,
        x2,
        x3,
        required_smoothness: dec.zeta.saturating_sub(1),
        zeta: dec.zeta,
        tau: tau.clone(),
        horizon: horizon.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityParamKind {
    Exponential,
    Weak,
    None,
}

/// Constants of the growth bound `‖x₂(s + kτ)‖ ≤ C ‖B̃₂‖^k Σ_j k^j ‖φ₂‖_{C^{ζ−1}}`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthEvidence {
    /// `max_{j<ζ} ‖Ñ^j‖₂` with `Ñ = (J^A)⁻¹ N^E₂`.
    pub c: f64,
    pub b_tilde_norm: f64,
    pub b_tilde_spectral_radius: f64,
    pub zeta: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakStabilityParams {
    pub p: Option<usize>,
    pub kind: StabilityParamKind,
    pub evidence: GrowthEvidence,
}

fn norm2(m: &RatMatrix) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    m.to_f64().singular_values().max()
}

fn spectral_radius(m: &RatMatrix) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    m.to_f64().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn weak_stability_params(dec: &Decomposition, spectrum_ok: bool) -> Result<WeakStabilityParams> {
    let b2 = &dec.blocks[1];
    let ja_inv = inverse(&b2.a)?;
    let n_tilde = &ja_inv * &b2.e;
    let b_tilde = &ja_inv * &b2.b;
    let evidence = GrowthEvidence {
        c: (0..dec.zeta.max(1)).map(|j| norm2(&n_tilde.pow(j))).fold(0.0, f64::max),
        b_tilde_norm: norm2(&b_tilde),
        b_tilde_spectral_radius: spectral_radius(&b_tilde),
        zeta: dec.zeta,
    };
    let (p, kind) = match (spectrum_ok, b2.e.is_zero()) {
        (false, _) => (None, StabilityParamKind::None),
        (true, true) => (Some(0), StabilityParamKind::Exponential),
        (true, false) => (Some(dec.zeta), StabilityParamKind::Weak),
    };
    Ok(WeakStabilityParams { p, kind, evidence })
}
