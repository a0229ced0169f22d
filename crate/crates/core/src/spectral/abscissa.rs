//! Upper bounds on the spectral abscissa `sup{Re λ : g(λ) = 0}`.

use serde::Serialize;

use super::polyroots::poly_roots;
use super::quasipoly::{DelayType, QuasiPoly};
use super::roots::{find_roots, Region};
use crate::error::{DdaeError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbscissaBound {
    /// Every zero has real part at most this value (`−∞` when there are none).
    Bound { value: f64 },
    /// Zeros accumulate to the right (neutral chains or advanced growth);
    /// no finite box is guaranteed to contain the rightmost ones.
    Flag { delay_type: DelayType, reason: String },
}

impl AbscissaBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            AbscissaBound::Bound { value } => Some(*value),
            AbscissaBound::Flag { .. } => None,
        }
    }
}

const ROOT_TOL: f64 = 1e-10;
const MAX_RADIUS: f64 = 1e4;

/// Radius `R` such that every zero with `Re λ ≥ c` has `|λ| ≤ R`, valid
/// when the undelayed term strictly dominates the degree of the others.
fn retarded_radius(q: &QuasiPoly, c: f64) -> f64 {
    let tau = q.delay().to_f64();
    let terms = q.terms();
    let p0 = terms[0].1.to_f64_coeffs();
    let lead = p0.last().copied().unwrap_or(1.0).abs();
    let lower: f64 = p0[..p0.len() - 1].iter().map(|a| a.abs()).sum();
    let delayed: f64 = terms[1..]
        .iter()
        .map(|(j, p)| p.l1_norm_f64() * (-(*j as f64) * c * tau).exp())
        .sum();
    ((lower + delayed) / lead).max(1.0)
}

pub fn spectral_abscissa_bound(q: &QuasiPoly) -> Result<AbscissaBound> {
    if q.is_zero() {
        return Err(DdaeError::ZeroQuasiPoly);
    }
    let q = q.normalized();
    let ty = q.delay_type();
    match ty {
        DelayType::Polynomial => {
            let p = q.single_poly().expect("single term");
            Ok(AbscissaBound::Bound { value: poly_roots(p).iter().map(|(z, _)| z.re).fold(f64::NEG_INFINITY, f64::max) })
        }
        DelayType::PureDifference => Ok(AbscissaBound::Bound { value: q.chain_abscissa().expect("constant coefficients") }),
        DelayType::Neutral => Ok(AbscissaBound::Flag {
            delay_type: ty,
            reason: "neutral type: zeros form chains approaching a vertical line; \
                     the abscissa is decided by the difference part"
                .into(),
        }),
        DelayType::Advanced => Ok(AbscissaBound::Flag {
            delay_type: ty,
            reason: "advanced type: zero chains extend to Re λ → +∞".into(),
        }),
        DelayType::Retarded => {
            let mut c = -1.0;
            loop {
                let r = retarded_radius(&q, c);
                let raw = find_roots(&q, Region { re_min: c, re_max: r, im_max: r }, ROOT_TOL)?;
                if let Some(m) = raw.roots.iter().map(|z| z.re).reduce(f64::max) {
                    return Ok(AbscissaBound::Bound { value: m });
                }
                let next = 2.0 * c;
                if retarded_radius(&q, next) > MAX_RADIUS {
                    return Ok(AbscissaBound::Bound { value: c });
                }
                c = next;
            }
        }
    }
}
