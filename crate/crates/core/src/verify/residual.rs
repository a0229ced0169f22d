use serde::Serialize;

use crate::error::{DdaeError, Result};
use crate::system::DdaeSystem;

/// A candidate solution on `[0, T]`.
pub trait Trajectory {
    fn dim(&self) -> usize;
    fn domain(&self) -> (f64, f64);
    fn eval(&self, t: f64) -> Result<Vec<f64>>;
    /// Exact derivative when the representation provides one.
    fn derivative(&self, _t: f64) -> Option<Result<Vec<f64>>> {
        None
    }
    /// Points where the derivative may jump, besides the delay multiples.
    fn knots(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub worst_t: f64,
    pub samples: usize,
    /// `max(1, ‖E‖∞, ‖A‖∞, ‖B‖∞, sup‖f‖)`.
    pub scale: f64,
}

pub const FD_STEP: f64 = 1e-6;

fn central_difference(x: &dyn Trajectory, t: f64) -> Result<Vec<f64>> {
    let (p, m) = (x.eval(t + FD_STEP)?, x.eval(t - FD_STEP)?);
    Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * FD_STEP)).collect())
}

/// Sample points spread over `(lo, hi)` that keep a margin from every knot.
fn sample_points(lo: f64, hi: f64, count: usize, knots: &[f64], margin: f64) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let mut t = lo + (hi - lo) * (i as f64 + 0.5) / count as f64;
            for _ in 0..8 {
                match knots.iter().find(|&&k| (t - k).abs() < margin) {
                    Some(&k) => t = k + if t >= k { margin } else { -margin } * 1.5,
                    None => break,
                }
            }
            t.clamp(lo + margin, hi - margin)
        })
        .collect()
}

/// `max_t ‖E ẋ(t) − A x(t) − B x(t − τ) − f(t)‖∞` over points avoiding the
/// knots `jτ`. `x(t − τ)` comes from `φ` for `t < τ`.
pub fn residual(sys: &DdaeSystem, x: &dyn Trajectory, samples: usize) -> Result<ResidualReport> {
    if x.dim() != sys.n() {
        return Err(DdaeError::Dimension(format!("trajectory has {} components, system {}", x.dim(), sys.n())));
    }
    if samples == 0 {
        return Err(DdaeError::InvalidArgument("at least one sample is needed".into()));
    }
    let (lo, hi) = x.domain();
    let tau = sys.tau.to_f64();
    let horizon = sys.horizon.to_f64().min(hi);
    if horizon <= lo {
        return Err(DdaeError::OutOfDomain { t: sys.horizon.to_f64(), lo, hi });
    }
    let phi = sys.phi_or_zero();
    let mut knots: Vec<f64> = (0..).map(|j| j as f64 * tau).take_while(|&t| t <= hi + tau).collect();
    knots.extend(x.knots());
    for b in phi.breakpoints() {
        knots.extend((1..).map(|j| b.to_f64() + j as f64 * tau).take_while(|&t| t <= hi));
    }
    if let Some(f) = &sys.f {
        knots.extend(f.breakpoints().iter().map(|b| b.to_f64()));
    }
    let margin = 1e-5 * tau.min(horizon - lo);
    let (e, a, b) = (sys.e.to_f64(), sys.a.to_f64(), sys.b.to_f64());
    let mut scale = [&sys.e, &sys.a, &sys.b].iter().map(|m| m.norm_inf()).fold(1.0, f64::max);
    let mut worst = (0.0f64, lo);
    for t in sample_points(lo, horizon, samples, &knots, margin) {
        let xt = nalgebra::DVector::from_vec(x.eval(t)?);
        let dx = match x.derivative(t) {
            Some(d) => d?,
            None => central_difference(x, t)?,
        };
        let xd = if t < tau { phi.eval(t - tau)? } else { x.eval(t - tau)? };
        let mut r = &e * nalgebra::DVector::from_vec(dx) - &a * xt - &b * nalgebra::DVector::from_vec(xd);
        if let Some(f) = &sys.f {
            let fv = nalgebra::DVector::from_vec(f.eval(t)?);
            scale = scale.max(fv.amax());
            r -= fv;
        }
        let v = r.amax();
        if v > worst.0 || v.is_nan() {
            worst = (v, t);
        }
    }
    Ok(ResidualReport { max_residual: worst.0, worst_t: worst.1, samples, scale })
}
