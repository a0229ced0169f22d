//! The retarded block `ẋ₁ = Ã x₁ + B̃ x₁(t − τ) + f̃(t)` in closed form:
//!
//! ```text
//! x₁(t) = e^{Ãt} e_τ^{B̂(t−τ)} φ(0)
//!       + ∫_{−τ}^{0} e^{Ã(t−s)} e_τ^{B̂(t−2τ−s)} B̂ φ(s) ds
//!       + ∫_{0}^{t}  e^{Ã(t−s)} e_τ^{B̂(t−τ−s)} f̃(s) ds,      B̂ = e^{−Ãτ} B̃.
//! ```
//!
//! Since `Ã` and `B̃` commute, `e^{Ãu} e_τ^{B̂(u−τ)}` equals the fundamental
//! matrix `K(u) = Σ_{jτ≤u} e^{Ã(u−jτ)} B̃^j (u−jτ)^j / j!`, which is what gets
//! evaluated: its terms stay bounded where the expanded delay exponential
//! cancels catastrophically. The integrals use fixed-order Gauss–Legendre
//! rules on subintervals free of the kinks of `K` and of the breakpoints of
//! `φ`, `f̃`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};

use super::piecewise::PiecewisePolyFn;
use crate::error::{DdaeError, Result};
use crate::polyalg::RatMatrix;

pub const GL_ORDER: usize = 16;
const PANELS: usize = 2;

#[derive(Clone, Debug)]
pub struct X1Evaluator {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    exp_a_tau: DMatrix<f64>,
    phi: PiecewisePolyFn,
    f: Option<PiecewisePolyFn>,
    tau: f64,
    horizon: f64,
    rule: Vec<(f64, f64)>,
}

fn vec_of(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

impl X1Evaluator {
    /// `f = None` means the homogeneous equation.
    pub fn new(
        a: &RatMatrix,
        b: &RatMatrix,
        phi: PiecewisePolyFn,
        f: Option<PiecewisePolyFn>,
        tau: f64,
        horizon: f64,
    ) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || b.rows() != n || b.cols() != n || phi.dim() != n {
            return Err(DdaeError::Dimension("x1 block data differ in size".into()));
        }
        if let Some(f) = &f {
            if f.dim() != n || f.start().to_f64() > 0.0 || f.end().to_f64() < horizon * (1.0 - 1e-14) {
                return Err(DdaeError::Dimension("f does not cover [0, horizon] for the x1 block".into()));
            }
        }
        let a = a.to_f64();
        let b = b.to_f64();
        let exp_a_tau = (&a * tau).exp();
        let rule = GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("nonzero"))
            .as_node_weight_pairs()
            .to_vec();
        Ok(X1Evaluator { a, b, exp_a_tau, phi, f, tau, horizon, rule })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `K(u)`, zero for `u < 0`.
    pub fn fundamental(&self, u: f64) -> DMatrix<f64> {
        let n = self.dim();
        if u < 0.0 {
            return DMatrix::zeros(n, n);
        }
        let k = (u / self.tau).floor() as usize;
        // e^{Ã(u − jτ)} for j = k, k−1, …, 0
        let mut e = (&self.a * (u - k as f64 * self.tau)).exp();
        let mut acc = DMatrix::zeros(n, n);
        for j in (0..=k).rev() {
            let s = u - j as f64 * self.tau;
            let mut term = e.clone();
            let mut c = 1.0;
            for i in 1..=j {
                c *= s / i as f64;
                term = &term * &self.b;
            }
            acc += term * c;
            e = &e * &self.exp_a_tau;
        }
        acc
    }

    fn integrate(&self, knots: &mut Vec<f64>, lo: f64, hi: f64, g: impl Fn(f64) -> DVector<f64>) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dim());
        knots.retain(|&k| k > lo && k < hi);
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
        for w in knots.windows(2) {
            let h = (w[1] - w[0]) / PANELS as f64;
            for p in 0..PANELS {
                let a = w[0] + p as f64 * h;
                let (mid, half) = (a + 0.5 * h, 0.5 * h);
                for &(x, wt) in &self.rule {
                    acc += g(mid + half * x) * (wt * half);
                }
            }
        }
        acc
    }

    pub fn eval(&self, t: f64) -> Result<DVector<f64>> {
        let n = self.dim();
        if n == 0 {
            return Ok(DVector::zeros(0));
        }
        if !(t >= -1e-14 && t <= self.horizon * (1.0 + 1e-14)) {
            return Err(DdaeError::OutOfDomain { t, lo: 0.0, hi: self.horizon });
        }
        let t = t.max(0.0);
        let tau = self.tau;
        let phi0 = vec_of(self.phi.eval_left(0.0)?);
        let mut x = self.fundamental(t) * phi0;

        let mmax = (t / tau).floor() as i64 + 2;
        let mut knots: Vec<f64> = (-1..=mmax).map(|m| t - (m + 2) as f64 * tau).collect();
        knots.extend(self.phi.breakpoints().iter().map(|b| b.to_f64()));
        x += self.integrate(&mut knots, -tau, 0.0, |s| {
            let p = vec_of(self.phi.eval(s).expect("inside [−τ, 0]"));
            self.fundamental(t - s - tau) * (&self.b * p)
        });

        if let Some(f) = &self.f {
            if t > 0.0 {
                let mut knots: Vec<f64> = (-1..=mmax).map(|m| t - tau - m as f64 * tau).collect();
                knots.extend(f.breakpoints().iter().map(|b| b.to_f64()));
                x += self.integrate(&mut knots, 0.0, t, |s| {
                    let v = vec_of(f.eval(s).expect("inside [0, horizon]"));
                    self.fundamental(t - s) * v
                });
            }
        }
        Ok(x)
    }

    /// `x₁(t − τ)`, read from `φ` when `t < τ`.
    pub fn eval_delayed(&self, t: f64) -> Result<DVector<f64>> {
        let s = t - self.tau;
        if s < 0.0 {
            Ok(vec_of(self.phi.eval(s)?))
        } else {
            self.eval(s)
        }
    }

    /// `ẋ₁(t)` from the differential equation itself.
    pub fn derivative(&self, t: f64) -> Result<DVector<f64>> {
        let mut d = &self.a * self.eval(t)? + &self.b * self.eval_delayed(t)?;
        if let Some(f) = &self.f {
            d += vec_of(f.eval(t)?);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{Poly, Rat};

    fn scalar(v: i64) -> RatMatrix {
        RatMatrix::from_ints(&[[v]])
    }

    fn const_phi(c: i64) -> PiecewisePolyFn {
        PiecewisePolyFn::constant(Rat::from_int(-1), Rat::zero(), &[Rat::from_int(c)]).unwrap()
    }

    #[test]
    fn pure_ode() {
        let x1 = X1Evaluator::new(&scalar(-1), &scalar(0), const_phi(3), None, 1.0, 5.0).unwrap();
        for t in [0.0, 0.5, 2.0, 4.9] {
            assert!((x1.eval(t).unwrap()[0] - 3.0 * (-t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn first_interval_of_retarded_scalar() {
        let x1 = X1Evaluator::new(&scalar(-2), &scalar(1), const_phi(1), None, 1.0, 3.0).unwrap();
        let want = (1.0 + (-2f64).exp()) / 2.0;
        assert!((x1.eval(1.0).unwrap()[0] - want).abs() < 1e-12);
        // second interval: x(t) = ½ + ½e^{−2t} ... solved by steps
        let t: f64 = 1.6;
        let exact = {
            // ẋ = −2x + ½ + ½e^{−2(t−1)}, x(1) = want
            let c = want - 0.25;
            0.25 + 0.5 * (t - 1.0) * (-2.0 * (t - 1.0)).exp() + c * (-2.0 * (t - 1.0)).exp()
        };
        assert!((x1.eval(t).unwrap()[0] - exact).abs() < 1e-12);
    }

    #[test]
    fn fundamental_matrix_matches_delay_exponential() {
        let a = RatMatrix::from_ints(&[[-1, 1], [0, -1]]);
        let b = RatMatrix::from_ints(&[[1, 2], [0, 1]]);
        let x1 = X1Evaluator::new(&a, &b, PiecewisePolyFn::zero(Rat::from_int(-1), Rat::zero(), 2).unwrap(), None, 0.7, 5.0)
            .unwrap();
        let (af, bf) = (a.to_f64(), b.to_f64());
        let b_hat = (&af * -0.7).exp() * &bf;
        for u in [0.0, 0.3, 0.7, 1.2, 2.9, 4.4] {
            let product_form = (&af * u).exp() * super::super::delay_exp::delay_exp(&b_hat, u - 0.7, 0.7).unwrap();
            assert!((x1.fundamental(u) - product_form).amax() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn inhomogeneous_ode() {
        // ẋ = −x + 1, x(0) = 0  →  1 − e^{−t}
        let f = PiecewisePolyFn::single(Rat::zero(), Rat::from_int(4), vec![Poly::one()]).unwrap();
        let x1 = X1Evaluator::new(&scalar(-1), &scalar(0), const_phi(0), Some(f), 1.0, 4.0).unwrap();
        assert!((x1.eval(2.5).unwrap()[0] - (1.0 - (-2.5f64).exp())).abs() < 1e-13);
        assert!(x1.eval(4.5).is_err());
    }
}
