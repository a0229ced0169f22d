//! The JSON system description and its conversion to [`DdaeSystem`].
//!
//! Rationals are strings (`"3/4"`, `"-2"`, `"0.125"`) so files stay exact.
//! Polynomials are ascending coefficient arrays, one per component.

use std::path::Path;

use ddae_core::polyalg::{Poly, Rat, RatMatrix};
use ddae_core::solution::PiecewisePolyFn;
use ddae_core::spectral::Region;
use ddae_core::system::DdaeSystem;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub start: Rat,
    pub end: Rat,
    pub polys: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub ell: usize,
    pub tau: Rat,
    #[serde(rename = "E")]
    pub e: Vec<Vec<Rat>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Rat>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<PieceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<PieceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn matrix(name: &str, rows: &[Vec<Rat>], ell: usize, n: usize) -> Result<RatMatrix, CliError> {
    if rows.len() != ell {
        return Err(input(format!("{name}: expected {ell} rows (ell), got {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(input(format!("{name}[{i}]: expected {n} entries (n), got {}", row.len())));
        }
    }
    if ell == 0 || n == 0 {
        return Err(input(format!("{name}: empty matrix")));
    }
    RatMatrix::from_rows(rows.to_vec()).map_err(|e| input(format!("{name}: {e}")))
}

fn piecewise(name: &str, pieces: &[PieceSpec], dim: usize) -> Result<PiecewisePolyFn, CliError> {
    for (k, p) in pieces.iter().enumerate() {
        if p.polys.len() != dim {
            return Err(input(format!("{name}[{k}].polys: expected {dim} components, got {}", p.polys.len())));
        }
    }
    let parts = pieces
        .iter()
        .map(|p| (p.start.clone(), p.end.clone(), p.polys.iter().cloned().map(Poly::new).collect()))
        .collect();
    PiecewisePolyFn::from_pieces(parts).map_err(|e| input(format!("{name}: {e}")))
}

fn pieces_of(f: &PiecewisePolyFn) -> Vec<PieceSpec> {
    let bps = f.breakpoints();
    f.pieces()
        .iter()
        .enumerate()
        .map(|(k, polys)| PieceSpec {
            start: bps[k].clone(),
            end: bps[k + 1].clone(),
            polys: polys.iter().map(|p| p.coeffs().to_vec()).collect(),
        })
        .collect()
}

impl SystemFile {
    pub fn to_system(&self) -> Result<DdaeSystem, CliError> {
        let e = matrix("E", &self.e, self.ell, self.n)?;
        let a = matrix("A", &self.a, self.ell, self.n)?;
        let b = matrix("B", &self.b, self.ell, self.n)?;
        let mut sys = DdaeSystem::new(e, a, b, self.tau.clone()).map_err(|e| input(format!("tau: {e}")))?;
        if let Some(h) = &self.horizon {
            sys = sys.with_horizon(h.clone()).map_err(|e| input(format!("horizon: {e}")))?;
        }
        if let Some(phi) = &self.phi {
            let phi = piecewise("phi", phi, self.n)?;
            sys = sys.with_phi(phi).map_err(|e| input(format!("phi: {e}")))?;
        }
        if let Some(f) = &self.f {
            let f = piecewise("f", f, self.ell)?;
            sys = sys.with_f(f).map_err(|e| input(format!("f: {e}")))?;
        }
        if let Some(r) = &self.region {
            r.validate().map_err(|e| input(format!("region: {e}")))?;
        }
        Ok(sys)
    }

    pub fn from_system(sys: &DdaeSystem, region: Option<Region>) -> Self {
        SystemFile {
            n: sys.n(),
            ell: sys.ell(),
            tau: sys.tau.clone(),
            e: sys.e.to_rows(),
            a: sys.a.to_rows(),
            b: sys.b.to_rows(),
            f: sys.f.as_ref().map(pieces_of),
            phi: sys.phi.as_ref().map(pieces_of),
            horizon: Some(sys.horizon.clone()),
            region,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system files always serialize")
    }
}

/// Parses and validates a system description. Schema errors name the JSON
/// path and position of the offending field.
pub fn parse_system_str(text: &str) -> Result<(SystemFile, DdaeSystem), CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SystemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            input(inner.to_string())
        } else {
            input(format!("{path}: {inner}"))
        }
    })?;
    let sys = file.to_system()?;
    Ok((file, sys))
}

pub fn parse_system(path: &Path) -> Result<(SystemFile, DdaeSystem), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_system_str(&text).map_err(|e| match e {
        CliError::Input(msg) => input(format!("{}: {msg}", path.display())),
        other => other,
    })
}
