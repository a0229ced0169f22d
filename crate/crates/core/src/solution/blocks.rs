//! Exact interval recursions for the nilpotent blocks.

use super::piecewise::PiecewisePolyFn;
use crate::commutative::nilpotency_index;
use crate::error::{DdaeError, Result};
use crate::polyalg::{Rat, RatMatrix};

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn interval_ends(tau: &Rat, horizon: &Rat) -> Vec<(Rat, Rat)> {
    let mut out = Vec::new();
    let mut lo = Rat::zero();
    while &lo < horizon {
        let next = &lo + tau;
        let hi = if &next < horizon { next } else { horizon.clone() };
        out.push((lo, hi.clone()));
        lo = hi;
    }
    out
}

/// Solution of `Ñ ẋ = x + B̃ x(t − τ) + f̃` on `[0, horizon]`:
/// `x(t) = −Σ_{i<ζ} Ñ^i (B̃ x^{(i)}(t − τ) + f̃^{(i)}(t))`, one delay interval
/// at a time. `f = None` means `f̃ ≡ 0`.
pub fn solve_x2(
    n_tilde: &RatMatrix,
    b_tilde: &RatMatrix,
    phi: &PiecewisePolyFn,
    f: Option<&PiecewisePolyFn>,
    tau: &Rat,
    horizon: &Rat,
) -> Result<PiecewisePolyFn> {
    let dim = n_tilde.rows();
    if b_tilde.rows() != dim || phi.dim() != dim || f.is_some_and(|f| f.dim() != dim) {
        return Err(DdaeError::Dimension("x2 block data differ in size".into()));
    }
    if !n_tilde.commutes_with(b_tilde) {
        return Err(DdaeError::NotCommutative);
    }
    let zeta = nilpotency_index(n_tilde)?.index;
    let powers: Vec<RatMatrix> = (0..zeta).map(|i| n_tilde.pow(i)).collect();
    let nb: Vec<RatMatrix> = powers.iter().map(|p| p * b_tilde).collect();

    let mut prev = phi.clone();
    let mut out: Option<PiecewisePolyFn> = None;
    for (lo, hi) in interval_ends(tau, horizon) {
        let delayed = prev.shift(&-tau).restrict(&lo, &hi)?;
        let fseg = match f {
            Some(f) => Some(f.restrict(&lo, &hi)?),
            None => None,
        };
        let mut acc = PiecewisePolyFn::zero(lo.clone(), hi.clone(), dim)?;
        for i in 0..zeta {
            acc = acc.add(&delayed.nth_derivative(i).map_linear(&nb[i])?)?;
            if let Some(fs) = &fseg {
                acc = acc.add(&fs.nth_derivative(i).map_linear(&powers[i])?)?;
            }
        }
        let x = acc.neg();
        out = Some(match out {
            None => x.clone(),
            Some(o) => o.concat(&x)?,
        });
        prev = x;
    }
    out.ok_or_else(|| DdaeError::InvalidArgument("horizon must be positive".into()))
}

/// Solution of `Ñ^E ẋ = Ñ^A x + x(t − τ) + f̃` on `[0, horizon]`:
/// `x(t) = −Σ_{i<n} (Ñ^E d/dt − Ñ^A)^i f̃(t + (i+1)τ)` with `n` the block
/// size. `f̃` must be given on `[0, horizon + nτ]`.
pub fn solve_x3(
    ne: &RatMatrix,
    na: &RatMatrix,
    f: Option<&PiecewisePolyFn>,
    tau: &Rat,
    horizon: &Rat,
) -> Result<PiecewisePolyFn> {
    let n = ne.rows();
    let zero = PiecewisePolyFn::zero(Rat::zero(), horizon.clone(), n)?;
    let Some(f) = f else {
        return Ok(zero);
    };
    if na.rows() != n || f.dim() != n {
        return Err(DdaeError::Dimension("x3 block data differ in size".into()));
    }
    let need = horizon + &(tau * &Rat::from_int(n as i64));
    if f.start() > &Rat::zero() || f.end() < &need {
        return Err(DdaeError::Lookahead(format!(
            "the x3 block needs f on [0, {need}], it is given on [{}, {}]",
            f.start(),
            f.end()
        )));
    }
    let neg_na = -na;
    let mut acc = zero;
    for i in 0..n {
        let shift = tau * &Rat::from_int(i as i64 + 1);
        for m in 0..=i {
            let coeff = &(&ne.pow(m) * &neg_na.pow(i - m)).scale(&Rat::from_int(binomial(i, m)));
            if coeff.is_zero() {
                continue;
            }
            let term = f.nth_derivative(m).shift(&shift).restrict(&Rat::zero(), horizon)?.map_linear(coeff)?;
            acc = acc.add(&term)?;
        }
    }
    Ok(acc.neg())
}
