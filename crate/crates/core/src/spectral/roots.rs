//! Zeros of quasipolynomials in a rectangle.
//!
//! The winding number of `g` along the boundary counts the zeros inside.
//! Boxes holding one zero are finished by Newton's method; boxes holding a
//! cluster of `m` zeros first try Newton on `g^{(m−1)}`, which converges
//! quadratically to an `m`-fold zero, and otherwise are bisected along the
//! longer side. Children are processed in parallel and merged in a fixed
//! order, so results do not depend on scheduling.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::abscissa::{spectral_abscissa_bound, AbscissaBound};
use super::polyroots::poly_roots;
use super::quasipoly::{DelayType, QuasiPoly};
use crate::error::{DdaeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl Default for Region {
    fn default() -> Self {
        Region { re_min: -10.0, re_max: 2.0, im_max: 50.0 }
    }
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_max: f64) -> Result<Self> {
        let r = Region { re_min, re_max, im_max };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_max].iter().all(|x| x.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_max <= 0.0 {
            return Err(DdaeError::InvalidArgument(format!(
                "region needs re_min < re_max and im_max > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im.abs() <= self.im_max
    }

    fn rect(&self) -> Rect {
        Rect { x0: self.re_min, x1: self.re_max, y0: -self.im_max, y1: self.im_max }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub multiplicity: usize,
}

impl Root {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbscissaEstimate {
    Value { value: f64 },
    Unresolved { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub roots: Vec<Root>,
    /// Region actually searched (perturbed outward if a zero sat on the boundary).
    pub region: Region,
    pub winding_count: usize,
    pub abscissa_estimate: AbscissaEstimate,
    pub stable_in_region: bool,
    pub delay_type: DelayType,
    pub tolerance: f64,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    pub fn rightmost(&self) -> Option<&Root> {
        self.roots.iter().max_by(|a, b| a.re.total_cmp(&b.re))
    }

    /// `re,im,residual` rows with 12 significant digits, sorted by `|Im|`.
    pub fn to_csv(&self) -> String {
        let mut roots = self.roots.clone();
        roots.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()).then(a.im.total_cmp(&b.im)).then(a.re.total_cmp(&b.re)));
        let mut out = String::from("re,im,residual\n");
        for r in roots {
            out.push_str(&format!("{:.11e},{:.11e},{:.11e}\n", r.re, r.im, r.residual));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn diam(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x0 - slack && z.re <= self.x1 + slack && z.im >= self.y0 - slack && z.im <= self.y1 + slack
    }

    fn contains_rect(&self, o: &Rect) -> bool {
        o.x0 >= self.x0 && o.x1 <= self.x1 && o.y0 >= self.y0 && o.y1 <= self.y1
    }

    fn split(&self, frac: f64) -> (Rect, Rect) {
        if self.x1 - self.x0 >= self.y1 - self.y0 {
            let xm = self.x0 + frac * (self.x1 - self.x0);
            (Rect { x1: xm, ..*self }, Rect { x0: xm, ..*self })
        } else {
            let ym = self.y0 + frac * (self.y1 - self.y0);
            (Rect { y1: ym, ..*self }, Rect { y0: ym, ..*self })
        }
    }
}

/// Signals a zero (numerically) on the contour.
#[derive(Debug)]
struct BoundaryHit(Complex64);

struct Finder<'a> {
    q: &'a QuasiPoly,
    tol: f64,
    base_density: f64,
}

const MAX_ARG_STEP: f64 = PI / 4.0;
const BOUNDARY_TOL: f64 = 1e-9;

impl Finder<'_> {
    fn value(&self, z: Complex64) -> std::result::Result<Complex64, BoundaryHit> {
        let g = self.q.eval(z);
        if !(g.norm() > BOUNDARY_TOL * self.q.scale(z)) {
            return Err(BoundaryHit(z));
        }
        Ok(g)
    }

    fn segment(
        &self,
        za: Complex64,
        ga: Complex64,
        zb: Complex64,
        gb: Complex64,
        depth: u32,
    ) -> std::result::Result<f64, BoundaryHit> {
        let d = (gb / ga).arg();
        if d.abs() <= MAX_ARG_STEP {
            return Ok(d);
        }
        if depth > 40 {
            return Err(BoundaryHit(0.5 * (za + zb)));
        }
        let zm = 0.5 * (za + zb);
        let gm = self.value(zm)?;
        Ok(self.segment(za, ga, zm, gm, depth + 1)? + self.segment(zm, gm, zb, gb, depth + 1)?)
    }

    fn edge(&self, a: Complex64, b: Complex64, density: f64) -> std::result::Result<f64, BoundaryHit> {
        let n = ((b - a).norm() * density).ceil() as usize + 4;
        let mut total = 0.0;
        let mut za = a;
        let mut ga = self.value(a)?;
        for i in 1..=n {
            let zb = a + (b - a) * (i as f64 / n as f64);
            let gb = self.value(zb)?;
            total += self.segment(za, ga, zb, gb, 0)?;
            za = zb;
            ga = gb;
        }
        Ok(total)
    }

    fn raw_winding(&self, r: &Rect, density: f64) -> std::result::Result<f64, BoundaryHit> {
        let c = [
            Complex64::new(r.x0, r.y0),
            Complex64::new(r.x1, r.y0),
            Complex64::new(r.x1, r.y1),
            Complex64::new(r.x0, r.y1),
        ];
        let mut total = 0.0;
        for k in 0..4 {
            total += self.edge(c[k], c[(k + 1) % 4], density)?;
        }
        Ok(total / (2.0 * PI))
    }

    /// Zero count inside `r`, rechecked at doubled sampling density until
    /// two consecutive estimates agree on an integer.
    fn winding(&self, r: &Rect) -> std::result::Result<usize, BoundaryHit> {
        let mut density = self.base_density;
        let mut prev: Option<i64> = None;
        for _ in 0..6 {
            let w = self.raw_winding(r, density)?;
            let k = w.round();
            if (w - k).abs() < 0.25 && k >= 0.0 {
                if prev == Some(k as i64) {
                    return Ok(k as usize);
                }
                prev = Some(k as i64);
            } else {
                prev = None;
            }
            density *= 2.0;
        }
        Err(BoundaryHit(r.center()))
    }

    fn newton(&self, f: &QuasiPoly, df: &QuasiPoly, mut z: Complex64) -> Option<Complex64> {
        for _ in 0..80 {
            let d = df.eval(z);
            if d.norm() == 0.0 {
                return None;
            }
            let step = f.eval(z) / d;
            z -= step;
            if !z.re.is_finite() || !z.im.is_finite() {
                return None;
            }
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        Some(z)
    }

    fn root(&self, z: Complex64, multiplicity: usize) -> Root {
        Root { re: z.re, im: z.im, residual: self.q.eval(z).norm(), multiplicity }
    }

    fn simple(&self, r: &Rect) -> Option<Root> {
        let dq = self.q.derivative();
        let z = self.newton(self.q, &dq, r.center())?;
        (r.contains(z, 1e-12 * r.diam()) && self.q.certifies(z, self.tol)).then(|| self.root(z, 1))
    }

    fn cluster(&self, r: &Rect, m: usize) -> Option<Root> {
        let h = self.q.nth_derivative(m - 1);
        let z = self.newton(&h, &h.derivative(), r.center())?;
        if !r.contains(z, 0.0) || !self.q.certifies(z, self.tol) {
            return None;
        }
        let rho = (1e-3 * r.diam()).max(1e-7 * (1.0 + z.norm()));
        let small = Rect { x0: z.re - rho, x1: z.re + rho, y0: z.im - rho, y1: z.im + rho };
        if !r.contains_rect(&small) {
            return None;
        }
        (self.winding(&small).ok()? == m).then(|| self.root(z, m))
    }

    fn process(&self, r: Rect, count: usize, warnings: &mut Vec<String>) -> Vec<Root> {
        if count == 0 {
            return Vec::new();
        }
        if count == 1 {
            if let Some(root) = self.simple(&r) {
                return vec![root];
            }
        } else if let Some(root) = self.cluster(&r, count) {
            return vec![root];
        }
        let c = r.center();
        if r.diam() < 1e-11 * (1.0 + c.norm()) {
            warnings.push(format!("unresolved cluster of {count} zeros near {c}"));
            return vec![self.root(c, count)];
        }
        for frac in [0.5, 0.47, 0.53, 0.44, 0.56, 0.41, 0.59, 0.38, 0.62] {
            let (a, b) = r.split(frac);
            let (Ok(na), Ok(nb)) = (self.winding(&a), self.winding(&b)) else {
                continue;
            };
            if na + nb != count {
                continue;
            }
            let (mut wa, mut wb) = (Vec::new(), Vec::new());
            let (ra, rb) = rayon::join(|| self.process(a, na, &mut wa), || self.process(b, nb, &mut wb));
            warnings.extend(wa);
            warnings.extend(wb);
            return ra.into_iter().chain(rb).collect();
        }
        warnings.push(format!("could not split box around {c} holding {count} zeros"));
        vec![self.root(c, count)]
    }
}

pub(crate) struct RawSpectrum {
    pub roots: Vec<Root>,
    pub winding: usize,
    pub region: Region,
    pub warnings: Vec<String>,
}

fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
}

pub(crate) fn find_roots(q: &QuasiPoly, region: Region, tol: f64) -> Result<RawSpectrum> {
    region.validate()?;
    if q.is_zero() {
        return Err(DdaeError::ZeroQuasiPoly);
    }
    let q = q.normalized();
    if let Some(p) = q.single_poly() {
        let mut roots: Vec<Root> = poly_roots(p)
            .into_iter()
            .filter(|(z, _)| region.contains(*z))
            .map(|(z, m)| Root { re: z.re, im: z.im, residual: q.eval(z).norm(), multiplicity: m })
            .collect();
        sort_roots(&mut roots);
        let winding = roots.iter().map(|r| r.multiplicity).sum();
        return Ok(RawSpectrum { roots, winding, region, warnings: Vec::new() });
    }
    let tau = q.delay().to_f64();
    let finder = Finder { q: &q, tol, base_density: 4.0 * (1.0 + q.max_power() as f64 * tau) };
    let mut region = region;
    let mut warnings = Vec::new();
    let size = (region.re_max - region.re_min).max(region.im_max);
    for attempt in 1..=6 {
        match finder.winding(&region.rect()) {
            Ok(n) => {
                let mut roots = finder.process(region.rect(), n, &mut warnings);
                sort_roots(&mut roots);
                return Ok(RawSpectrum { roots, winding: n, region, warnings });
            }
            Err(BoundaryHit(z)) => {
                let d = 1e-3 * size * attempt as f64;
                warnings.push(format!("zero near the region boundary at {z}; region widened by {d:.3e}"));
                region = Region { re_min: region.re_min - d, re_max: region.re_max + d, im_max: region.im_max + d };
            }
        }
    }
    Err(DdaeError::NoConvergence("region boundary keeps passing through zeros".into()))
}

/// Zeros of `q` in `region`, certified by `|g(λ)| ≤ tol·(1 + Σ|p_j(λ)|e^{−j Re λ τ})`.
pub fn spectrum_in_region(q: &QuasiPoly, region: Region, tol: f64) -> Result<SpectrumReport> {
    let raw = find_roots(q, region, tol)?;
    let abscissa_estimate = match spectral_abscissa_bound(q)? {
        AbscissaBound::Bound { value } => AbscissaEstimate::Value { value },
        AbscissaBound::Flag { reason, .. } => AbscissaEstimate::Unresolved { reason },
    };
    let stable_in_region = raw.roots.iter().all(|r| r.re < 0.0);
    Ok(SpectrumReport {
        roots: raw.roots,
        region: raw.region,
        winding_count: raw.winding,
        abscissa_estimate,
        stable_in_region,
        delay_type: q.delay_type(),
        tolerance: tol,
        warnings: raw.warnings,
    })
}
