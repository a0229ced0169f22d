//! Lambert W on all branches by Halley iteration.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{DdaeError, Result};

const MAX_ITER: usize = 100;

fn initial_guess(k: i64, z: Complex64) -> Complex64 {
    let i = Complex64::i();
    // series around the branch point −1/e
    let near_branch = (z + 1.0 / E).norm() < 0.3;
    if near_branch && (k == 0 || (k == -1 && z.im.abs() < 1e-12) || (k == -1 && z.im >= 0.0) || (k == 1 && z.im < 0.0)) {
        let p = (2.0 * (E * z + 1.0)).sqrt();
        let p = if k == 0 { p } else { -p };
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if k == 0 && z.norm() < 1.5 {
        return (1.0 + z).ln();
    }
    let l1 = z.ln() + 2.0 * PI * (k as f64) * i;
    l1 - l1.ln()
}

/// `W_k(z)`: the solution of `w·e^w = z` on branch `k`.
pub fn lambert_w(k: i64, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return if k == 0 {
            Ok(z)
        } else {
            Err(DdaeError::InvalidArgument(format!("W_{k}(0) is undefined")))
        };
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(DdaeError::InvalidArgument(format!("non-finite argument {z}")));
    }
    let mut w = initial_guess(k, z);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom.norm() == 0.0 || !denom.re.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.norm() <= 1e-15 * (1.0 + w.norm()) {
            break;
        }
    }
    let residual = (w * w.exp() - z).norm();
    if !(residual <= 1e-13 * z.norm().max(1e-300)) {
        // one last Newton pass can recover the final digits
        let ew = w.exp();
        w -= (w * ew - z) / (ew * (w + 1.0));
        let residual = (w * w.exp() - z).norm();
        if !(residual <= 1e-13 * z.norm()) {
            return Err(DdaeError::NoConvergence(format!(
                "W_{k}({z}): residual {residual:e} after {MAX_ITER} Halley steps"
            )));
        }
    }
    Ok(w)
}
