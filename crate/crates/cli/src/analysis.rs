//! The analyses behind each subcommand and the JSON reports they produce.

use ddae_core::commutative::{decompose_triple, is_commutative_triple, Decomposition, DecompositionSummary};
use ddae_core::condensed::{regularity, solvability, BehaviorPair, CondensedSummary, SolvabilityVerdict};
use ddae_core::polyalg::Rat;
use ddae_core::solution::{solve_decomposed, weak_stability_params, ClosedFormSolution, WeakStabilityParams};
use ddae_core::spectral::{
    char_quasipoly, commutative_block_abscissas, spectrum_in_region, stability_verdict, strangeness_free_check,
    BlockAbscissa, Region, SpectrumReport, StabilityVerdict,
};
use ddae_core::system::DdaeSystem;
use ddae_core::verify::{
    decay_envelope_fit, method_of_steps_reference, residual, EnvelopeFit, ResidualReport, SFreeSystem,
    SampledTrajectory, Trajectory,
};
use ddae_core::DdaeError;
use serde::Serialize;

use crate::CliError;

/// Relative residual accepted by `verify`, against `ResidualReport::scale`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Method-of-steps steps per delay interval.
pub const STEPS_PER_DELAY: u32 = 200;

#[derive(Clone, Debug)]
pub struct Settings {
    pub region: Region,
    pub tol: f64,
    pub samples: usize,
    pub timestamp: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemInfo {
    pub n: usize,
    pub ell: usize,
    pub tau: Rat,
    pub horizon: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct Regularity {
    pub regular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CondensedReport {
    pub system: SystemInfo,
    pub status: String,
    pub regularity: Regularity,
    pub condensed: CondensedSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub summary: DecompositionSummary,
    pub block_abscissas: Vec<BlockAbscissa>,
    pub weak_stability: WeakStabilityParams,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    /// `p` of the `Cᵖ` norm of `φ` used for the envelope.
    pub norm_order: usize,
    pub norm_phi: f64,
    pub fit: EnvelopeFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub residual: ResidualReport,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeReport>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub system: SystemInfo,
    pub status: String,
    pub regularity: Regularity,
    pub condensed: CondensedSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    pub notes: Vec<String>,
}

fn plural(k: usize, word: &str) -> String {
    format!("{k} {word}{}", if k == 1 { "" } else { "s" })
}

/// `"irregular: 1 free variable, 1 consistency condition"`-style status.
pub fn irregular_status(v: &SolvabilityVerdict) -> String {
    format!(
        "irregular: {}, {}",
        plural(v.free_variable_count, "free variable"),
        plural(v.consistency_row_count, "consistency condition")
    )
}

pub fn system_info(sys: &DdaeSystem) -> SystemInfo {
    SystemInfo { n: sys.n(), ell: sys.ell(), tau: sys.tau.clone(), horizon: sys.horizon.clone() }
}

pub fn condensed(sys: &DdaeSystem) -> Result<CondensedReport, CliError> {
    let pair = BehaviorPair::first_order(&sys.e, &sys.a, &sys.b, sys.tau.clone())?;
    let (cf, verdict) = solvability(&pair)?;
    let (regular, diagnostic) = regularity(&sys.e, &sys.a, &sys.b);
    let status = if verdict.regular { "ok".to_string() } else { irregular_status(&verdict) };
    Ok(CondensedReport {
        system: system_info(sys),
        status,
        regularity: Regularity { regular, diagnostic },
        condensed: CondensedSummary::new(&cf, &verdict),
    })
}

pub fn spectrum(sys: &DdaeSystem, region: Region, tol: f64) -> Result<SpectrumReport, CliError> {
    let q = char_quasipoly(&sys.e, &sys.a, &sys.b, &sys.tau)?;
    Ok(spectrum_in_region(&q, region, tol)?)
}

/// The commutative block form, or `None` for non-commutative triples.
pub fn decomposition(sys: &DdaeSystem) -> Result<Option<(Decomposition, DecompositionReport)>, CliError> {
    if !sys.is_square() || !is_commutative_triple(&sys.e, &sys.a, &sys.b)? {
        return Ok(None);
    }
    let dec = decompose_triple(&sys.e, &sys.a, &sys.b)?;
    if dec.block_dims[3] > 0 {
        return Err(DdaeError::Irregular(format!("{}-dimensional all-nilpotent block", dec.block_dims[3])).into());
    }
    let block_abscissas = commutative_block_abscissas(&dec, &sys.tau)?;
    let stable = |k: usize| dec.block_dims[k] == 0 || block_abscissas[k].abscissa.is_some_and(|s| s < 0.0);
    let weak_stability = weak_stability_params(&dec, stable(0) && stable(1))?;
    let report = DecompositionReport { summary: DecompositionSummary::new(&dec), block_abscissas, weak_stability };
    Ok(Some((dec, report)))
}

pub enum Solved {
    Closed(Box<ClosedFormSolution>),
    Steps(SampledTrajectory),
}

impl Solved {
    pub fn trajectory(&self) -> &dyn Trajectory {
        match self {
            Solved::Closed(s) => s.as_ref(),
            Solved::Steps(s) => s,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            Solved::Closed(_) => "closed_form",
            Solved::Steps(_) => "method_of_steps",
        }
    }
}

/// Closed form for commutative triples, otherwise the method of steps on
/// a strangeness-free form.
pub fn solve(sys: &DdaeSystem, until: &Rat) -> Result<Solved, CliError> {
    if let Some((dec, _)) = decomposition(sys)? {
        return Ok(Solved::Closed(Box::new(solve_decomposed(sys, &dec, until)?)));
    }
    if sys.is_square() && strangeness_free_check(&sys.e, &sys.a, &sys.b)?.is_some() {
        let sf = SFreeSystem::from_system(sys)?;
        let h = sf.tau / STEPS_PER_DELAY as f64;
        return Ok(Solved::Steps(method_of_steps_reference(&sf, until.to_f64(), h)?));
    }
    Err(CliError::Unsupported(
        "no solver applies: the triple is neither commutative nor strangeness-free in the given coordinates".into(),
    ))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn verification(sys: &DdaeSystem, samples: usize) -> Result<Verification, CliError> {
    let solved = solve(sys, &sys.horizon)?;
    let x = solved.trajectory();
    let res = residual(sys, x, samples)?;
    let mut notes = Vec::new();
    let tau = sys.tau.to_f64();
    let horizon = sys.horizon.to_f64();
    let norm_order = match &solved {
        Solved::Closed(_) => decomposition(sys)?.and_then(|(_, d)| d.weak_stability.p).unwrap_or(0),
        Solved::Steps(_) => 0,
    };
    let norm_phi = sys.phi_or_zero().cp_norm(norm_order);
    let envelope = if horizon < 5.0 * tau {
        notes.push("envelope skipped: the horizon spans fewer than 5 delay intervals".into());
        None
    } else if norm_phi == 0.0 {
        notes.push("envelope skipped: zero initial function".into());
        None
    } else {
        let per = 50;
        let count = (horizon / tau).ceil() as usize * per;
        let pts: Result<Vec<(f64, f64)>, DdaeError> = (0..count)
            .map(|i| (i as f64 + 0.5) * horizon / count as f64)
            .map(|t| x.eval(t).map(|v| (t, norm2(&v))))
            .collect();
        match decay_envelope_fit(&pts?, tau, norm_phi) {
            Ok(fit) => Some(EnvelopeReport { norm_order, norm_phi, fit }),
            Err(e) => {
                notes.push(format!("envelope skipped: {e}"));
                None
            }
        }
    };
    let step = match &solved {
        Solved::Steps(s) => Some(s.h),
        Solved::Closed(_) => None,
    };
    Ok(Verification {
        method: solved.method(),
        step,
        passed: res.max_residual <= RESIDUAL_TOL * res.scale,
        residual: res,
        tolerance: RESIDUAL_TOL,
        envelope,
        notes,
    })
}

fn now_unix() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Regularity, condensed classification, spectrum, verdict, block form and
/// verification, in that order. Irregular systems stop after the condensed
/// form; the returned flag tells the caller.
pub fn analyze(sys: &DdaeSystem, settings: &Settings) -> Result<(AnalysisReport, bool), CliError> {
    let head = condensed(sys)?;
    let mut report = AnalysisReport {
        version: env!("CARGO_PKG_VERSION"),
        generated_at_unix: settings.timestamp.then(now_unix),
        system: head.system,
        status: head.status,
        regularity: head.regularity,
        condensed: head.condensed,
        spectrum: None,
        stability: None,
        decomposition: None,
        verification: None,
        notes: Vec::new(),
    };
    let irregular = !report.condensed.verdict.regular;
    if irregular {
        return Ok((report, true));
    }
    report.spectrum = Some(spectrum(sys, settings.region, settings.tol)?);
    report.stability = Some(stability_verdict(sys, settings.region, settings.tol)?);
    report.decomposition = decomposition(sys)?.map(|(_, d)| d);
    match verification(sys, settings.samples) {
        Ok(v) => report.verification = Some(v),
        Err(CliError::Unsupported(msg)) => report.notes.push(format!("verification skipped: {msg}")),
        Err(CliError::Core(e @ DdaeError::Lookahead(_))) => report.notes.push(format!("verification skipped: {e}")),
        Err(e) => return Err(e),
    }
    Ok((report, false))
}
