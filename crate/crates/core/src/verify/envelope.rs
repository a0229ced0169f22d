//! Exponential envelopes `‖x(t)‖ ≤ δ e^{−γt} ‖φ‖` fitted to samples.

use serde::Serialize;

use crate::error::{DdaeError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub delta: f64,
    pub gamma: f64,
    /// RMS deviation of the log-linear fit through the interval peaks.
    pub residual_of_fit: f64,
    pub decaying: bool,
    pub trivially_stable: bool,
}

/// Fits `log(peak_k / ‖φ‖) ≈ log δ − γ t_k` over the per-interval peaks of
/// `(t, ‖x(t)‖)` samples, then inflates `δ` so the envelope dominates every
/// sample. The first interval is left out of the fit when at least four
/// intervals are available.
pub fn decay_envelope_fit(samples: &[(f64, f64)], tau: f64, norm_phi: f64) -> Result<EnvelopeFit> {
    if samples.len() < 10 {
        return Err(DdaeError::InvalidArgument(format!("{} samples, at least 10 needed", samples.len())));
    }
    if !(tau > 0.0) || !(norm_phi > 0.0) {
        return Err(DdaeError::InvalidArgument("delay and initial norm must be positive".into()));
    }
    if samples.iter().all(|&(_, v)| v == 0.0) {
        return Ok(EnvelopeFit { delta: 0.0, gamma: 0.0, residual_of_fit: 0.0, decaying: true, trivially_stable: true });
    }
    let mut peaks: std::collections::BTreeMap<i64, (f64, f64)> = Default::default();
    for &(t, v) in samples {
        let k = (t / tau).floor() as i64;
        let e = peaks.entry(k).or_insert((t, v));
        if v > e.1 {
            *e = (t, v);
        }
    }
    let mut pts: Vec<(f64, f64)> = peaks.values().copied().filter(|p| p.1 > 0.0).collect();
    if pts.len() >= 4 {
        pts.remove(0);
    }
    if pts.len() < 2 {
        return Err(DdaeError::InvalidArgument("samples must span several delay intervals".into()));
    }
    let ys: Vec<f64> = pts.iter().map(|p| (p.1 / norm_phi).ln()).collect();
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().zip(&ys).map(|(p, y)| (p.0 - tm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let gamma = -slope;
    let intercept = ym - slope * tm;
    let residual_of_fit =
        (pts.iter().zip(&ys).map(|(p, y)| (y - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    let delta = samples
        .iter()
        .map(|&(t, v)| v * (gamma * t).exp() / norm_phi)
        .fold(intercept.exp(), f64::max);
    Ok(EnvelopeFit { delta, gamma, residual_of_fit, decaying: gamma > 0.0, trivially_stable: false })
}
