//! The delay matrix exponential `e_τ^{Dt}`, the piecewise polynomial
//! solution of `Ẏ(t) = D·Y(t − τ)` with `Y ≡ I` on `[−τ, 0]`.

use nalgebra::DMatrix;

use crate::error::{DdaeError, Result};

/// `I` on `[−τ, 0]`; on `[(k−1)τ, kτ]` it is `Σ_{j=0}^{k} D^j (t − (j−1)τ)^j / j!`.
pub fn delay_exp(d: &DMatrix<f64>, t: f64, tau: f64) -> Result<DMatrix<f64>> {
    if t < -tau * (1.0 + 1e-14) {
        return Err(DdaeError::OutOfDomain { t, lo: -tau, hi: f64::INFINITY });
    }
    Ok(delay_exp_or_zero(d, t, tau))
}

/// As [`delay_exp`], extended by zero for `t < −τ`.
fn delay_exp_or_zero(d: &DMatrix<f64>, t: f64, tau: f64) -> DMatrix<f64> {
    let n = d.nrows();
    if t < -tau {
        return DMatrix::zeros(n, n);
    }
    if t <= 0.0 {
        return DMatrix::identity(n, n);
    }
    let k = (t / tau).floor() as usize + 1;
    let mut acc = DMatrix::identity(n, n);
    let mut dj = DMatrix::identity(n, n);
    let mut fact = 1.0;
    for j in 1..=k {
        dj = &dj * d;
        fact *= j as f64;
        let s = t - (j as f64 - 1.0) * tau;
        if s <= 0.0 {
            break;
        }
        acc += &dj * (s.powi(j as i32) / fact);
    }
    acc
}
