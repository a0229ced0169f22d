//! Stability classification by a fixed dispatch over the available
//! sufficient criteria.

use serde::Serialize;

use super::abscissa::{spectral_abscissa_bound, AbscissaBound};
use super::quasipoly::{char_quasipoly, QuasiPoly};
use super::roots::{spectrum_in_region, Region, Root, SpectrumReport};
use super::sfree::row_compression;
use crate::commutative::{decompose_triple, is_commutative_triple, nilpotency_index, Decomposition};
use crate::condensed::regularity;
use crate::error::{DdaeError, Result};
use crate::polyalg::{Rat, RatMatrix};
use crate::system::DdaeSystem;

/// Margin for deciding `σ ⊂ ℂ₋` from a finite region when no abscissa
/// bound is available.
pub const LEFT_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum StabilityKind {
    ExponentiallyStable,
    NotExponentiallyStable,
    /// `C^p`-weakly exponentially stable.
    WeaklyStable(usize),
    SpectrumStableClassificationUnknown,
    UnstableSpectrum,
    Irregular,
}

impl StabilityKind {
    pub fn is_exponentially_stable(&self) -> bool {
        matches!(self, StabilityKind::ExponentiallyStable)
    }

    pub fn is_not_exponentially_stable(&self) -> bool {
        matches!(self, StabilityKind::NotExponentiallyStable | StabilityKind::UnstableSpectrum)
    }

    pub fn label(&self) -> String {
        match self {
            StabilityKind::ExponentiallyStable => "exponentially_stable".into(),
            StabilityKind::NotExponentiallyStable => "not_exponentially_stable".into(),
            StabilityKind::WeaklyStable(p) => format!("weakly_stable({p})"),
            StabilityKind::SpectrumStableClassificationUnknown => "spectrum_stable_classification_unknown".into(),
            StabilityKind::UnstableSpectrum => "unstable_spectrum".into(),
            StabilityKind::Irregular => "irregular".into(),
        }
    }
}

/// Abscissa of one diagonal block's quasipolynomial.
#[derive(Clone, Debug, Serialize)]
pub struct BlockAbscissa {
    pub block: String,
    pub quasipolynomial: String,
    pub abscissa: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    /// The dispatch rule that produced the verdict, verbatim.
    pub rule: String,
    pub quasipolynomial: Option<String>,
    pub spectrum: Option<SpectrumReport>,
    pub abscissa: Option<AbscissaBound>,
    pub unstable_roots: Vec<Root>,
    pub strangeness_free_det: Option<Rat>,
    pub block_abscissas: Vec<BlockAbscissa>,
    pub notes: Vec<String>,
}

impl Evidence {
    fn new(rule: &str) -> Self {
        Evidence {
            rule: rule.into(),
            quasipolynomial: None,
            spectrum: None,
            abscissa: None,
            unstable_roots: Vec::new(),
            strangeness_free_det: None,
            block_abscissas: Vec::new(),
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub kind: StabilityKind,
    pub label: String,
    pub evidence: Evidence,
}

impl StabilityVerdict {
    fn new(kind: StabilityKind, evidence: Evidence) -> Self {
        StabilityVerdict { label: kind.label(), kind, evidence }
    }
}

pub const RULE_IRREGULAR: &str = "(0) det(λE − A − ωB) ≡ 0: the triple is irregular";
pub const RULE_UNSTABLE: &str =
    "(1) a certified root with Re λ ≥ 0 exists: unstable_spectrum (not exponentially stable)";
pub const RULE_SFREE: &str =
    "(2) strangeness-free ([E1; A2] nonsingular) and abscissa estimate < 0: exponentially_stable";
pub const RULE_COMM_EXP: &str = "(3) commutative triple, σ ⊂ ℂ₋ and N^E2 = 0: exponentially_stable";
pub const RULE_COMM_WEAK: &str = "(3) commutative triple and σ ⊂ ℂ₋: weakly_stable(ζ)";
pub const RULE_COMM_NOT: &str = "(3) commutative triple and σ ⊄ ℂ₋: not_exponentially_stable";
pub const RULE_BLOCK: &str =
    "(4) block form E=[[I,E2],[0,N]], A=[[A1,A2],[0,I]], B=[[B1,B2],[0,B4]] with N·B4 = B4·N: weakly_stable(ν) iff σ ⊂ ℂ₋";
pub const RULE_UNKNOWN: &str = "(5) no criterion applies: spectrum_stable_classification_unknown";

/// `σ ⊂ ℂ₋` from an abscissa bound, or, when only a flag is available, from
/// the absence of roots with `Re λ ≥ −margin` in the searched region.
fn left_half_plane(bound: &AbscissaBound, report: &SpectrumReport, notes: &mut Vec<String>) -> bool {
    match bound {
        AbscissaBound::Bound { value } => *value < 0.0,
        AbscissaBound::Flag { reason, .. } => {
            let clear = report.roots.iter().all(|r| r.re < -LEFT_MARGIN);
            notes.push(format!(
                "no abscissa bound ({reason}); decided from region Re ∈ [{}, {}], |Im| ≤ {} only",
                report.region.re_min, report.region.re_max, report.region.im_max
            ));
            clear
        }
    }
}

fn block_quasipoly(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix, tau: &Rat) -> Result<Option<QuasiPoly>> {
    if e.rows() == 0 {
        return Ok(None);
    }
    char_quasipoly(e, a, b, tau).map(Some)
}

fn block_abscissa(name: &str, q: Option<QuasiPoly>) -> Result<BlockAbscissa> {
    let Some(q) = q else {
        return Ok(BlockAbscissa { block: name.into(), quasipolynomial: "1".into(), abscissa: Some(f64::NEG_INFINITY) });
    };
    let abscissa = match &q {
        q if q.is_zero() => return Err(DdaeError::ZeroQuasiPoly),
        q => spectral_abscissa_bound(q)?.value(),
    };
    Ok(BlockAbscissa { block: name.into(), quasipolynomial: q.to_string(), abscissa })
}

/// Abscissas of the spectrum-carrying blocks of a commutative triple.
/// Block 2 reduces to `det(−J^A − ωB₂)` because `N^E₂` is nilpotent and
/// commutes with the rest; block 3 contributes no zeros.
pub fn commutative_block_abscissas(dec: &Decomposition, tau: &Rat) -> Result<Vec<BlockAbscissa>> {
    let [b1, b2, _, _] = &dec.blocks;
    let q1 = block_quasipoly(&b1.e, &b1.a, &b1.b, tau)?;
    let zero = RatMatrix::zeros(b2.dim(), b2.dim());
    let q2 = block_quasipoly(&zero, &b2.a, &b2.b, tau)?;
    Ok(vec![block_abscissa("1", q1)?, block_abscissa("2", q2)?])
}

/// The block-triple shape for some split `k`, with `ν` the index of `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTripleForm {
    pub k: usize,
    pub nu: usize,
    pub a1: RatMatrix,
    pub b1: RatMatrix,
    pub b4: RatMatrix,
}

pub fn match_block_triple(e: &RatMatrix, a: &RatMatrix, b: &RatMatrix) -> Option<BlockTripleForm> {
    let n = e.rows();
    if !e.is_square() || a.cols() != n || b.cols() != n {
        return None;
    }
    (0..n).find_map(|k| {
        let (top, bot) = (0..k, k..n);
        let ok = e.submatrix(top.clone(), top.clone()) == RatMatrix::identity(k)
            && e.submatrix(bot.clone(), top.clone()).is_zero()
            && a.submatrix(bot.clone(), top.clone()).is_zero()
            && a.submatrix(bot.clone(), bot.clone()) == RatMatrix::identity(n - k)
            && b.submatrix(bot.clone(), top.clone()).is_zero();
        if !ok {
            return None;
        }
        let nn = e.submatrix(bot.clone(), bot.clone());
        let b4 = b.submatrix(bot.clone(), bot.clone());
        if !nn.commutes_with(&b4) {
            return None;
        }
        let nu = nilpotency_index(&nn).ok()?.index;
        Some(BlockTripleForm {
            k,
            nu,
            a1: a.submatrix(top.clone(), top.clone()),
            b1: b.submatrix(top.clone(), top),
            b4,
        })
    })
}

pub fn stability_verdict(sys: &DdaeSystem, region: Region, tol: f64) -> Result<StabilityVerdict> {
    let (e, a, b, tau) = (&sys.e, &sys.a, &sys.b, &sys.tau);
    let (regular, reason) = regularity(e, a, b);
    if !regular {
        let mut ev = Evidence::new(RULE_IRREGULAR);
        ev.notes.extend(reason);
        return Ok(StabilityVerdict::new(StabilityKind::Irregular, ev));
    }
    let q = char_quasipoly(e, a, b, tau)?;
    let report = spectrum_in_region(&q, region, tol)?;
    let bound = spectral_abscissa_bound(&q)?;
    let mut ev = Evidence::new(RULE_UNKNOWN);
    ev.quasipolynomial = Some(q.to_string());
    ev.abscissa = Some(bound.clone());
    ev.notes.extend(report.warnings.iter().cloned());

    let unstable: Vec<Root> = report.roots.iter().filter(|r| r.re >= 0.0).copied().collect();
    if !unstable.is_empty() {
        ev.rule = RULE_UNSTABLE.into();
        ev.unstable_roots = unstable;
        ev.spectrum = Some(report);
        return Ok(StabilityVerdict::new(StabilityKind::UnstableSpectrum, ev));
    }

    let comp = row_compression(e, a, b)?;
    ev.strangeness_free_det = Some(comp.det.clone());
    if comp.is_strangeness_free() {
        let mut notes = Vec::new();
        if left_half_plane(&bound, &report, &mut notes) {
            ev.rule = RULE_SFREE.into();
            ev.notes.extend(notes);
            ev.spectrum = Some(report);
            return Ok(StabilityVerdict::new(StabilityKind::ExponentiallyStable, ev));
        }
    }

    if is_commutative_triple(e, a, b)? {
        let dec = decompose_triple(e, a, b)?;
        let blocks = commutative_block_abscissas(&dec, tau)?;
        let left = blocks.iter().all(|blk| blk.abscissa.is_some_and(|v| v < 0.0));
        ev.block_abscissas = blocks;
        ev.spectrum = Some(report);
        let kind = if !left {
            ev.rule = RULE_COMM_NOT.into();
            StabilityKind::NotExponentiallyStable
        } else if dec.block_dims[1] == 0 || dec.blocks[1].e.is_zero() {
            ev.rule = RULE_COMM_EXP.into();
            StabilityKind::ExponentiallyStable
        } else {
            ev.rule = RULE_COMM_WEAK.into();
            StabilityKind::WeaklyStable(dec.zeta)
        };
        return Ok(StabilityVerdict::new(kind, ev));
    }

    if let Some(form) = match_block_triple(e, a, b) {
        let q1 = block_quasipoly(&RatMatrix::identity(form.k), &form.a1, &form.b1, tau)?;
        let m = form.b4.rows();
        let q2 = block_quasipoly(&RatMatrix::zeros(m, m), &RatMatrix::identity(m), &form.b4, tau)?;
        let blocks = vec![block_abscissa("I, A1, B1", q1)?, block_abscissa("N, I, B4", q2)?];
        let left = blocks.iter().all(|blk| blk.abscissa.is_some_and(|v| v < 0.0));
        ev.block_abscissas = blocks;
        ev.spectrum = Some(report);
        ev.rule = RULE_BLOCK.into();
        let kind = match (left, form.nu) {
            (false, _) => StabilityKind::NotExponentiallyStable,
            (true, 0) => StabilityKind::ExponentiallyStable,
            (true, nu) => StabilityKind::WeaklyStable(nu),
        };
        return Ok(StabilityVerdict::new(kind, ev));
    }

    ev.spectrum = Some(report);
    Ok(StabilityVerdict::new(StabilityKind::SpectrumStableClassificationUnknown, ev))
}
