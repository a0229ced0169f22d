//! Reference integrator for strangeness-free systems
//!
//! ```text
//! E₁ ẋ = A₁ x + B₁ x(t−τ) + f₁(t)
//!  0   = A₂ x + B₂ x(t−τ) + C₂ ẋ(t−τ) + f₂(t)
//! ```
//!
//! With `M = [E₁; A₂]` nonsingular, `z = E₁x` is integrated by RK4 while
//! the algebraic rows are solved from the history at every stage.

use nalgebra::{DMatrix, DVector};

use super::residual::Trajectory;
use crate::error::{DdaeError, Result};
use crate::polyalg::RatMatrix;
use crate::solution::PiecewisePolyFn;
use crate::spectral::row_compression;
use crate::system::DdaeSystem;

#[derive(Clone, Debug)]
pub struct SFreeSystem {
    pub e1: RatMatrix,
    pub a1: RatMatrix,
    pub b1: RatMatrix,
    pub a2: RatMatrix,
    pub b2: RatMatrix,
    /// Coefficient of the delayed derivative in the algebraic rows.
    pub c2: Option<RatMatrix>,
    pub tau: f64,
    pub f: Option<PiecewisePolyFn>,
    pub phi: PiecewisePolyFn,
}

impl SFreeSystem {
    /// Row compression of a strangeness-free system; `f` is transformed along.
    pub fn from_system(sys: &DdaeSystem) -> Result<Self> {
        let form = row_compression(&sys.e, &sys.a, &sys.b)?;
        if !form.is_strangeness_free() {
            return Err(DdaeError::NotStrangenessFree);
        }
        let f = match &sys.f {
            Some(f) => Some(f.map_linear(&form.s)?),
            None => None,
        };
        Ok(SFreeSystem {
            e1: form.e1,
            a1: form.a1,
            b1: form.b1,
            a2: form.a2,
            b2: form.b2,
            c2: None,
            tau: sys.tau.to_f64(),
            f,
            phi: sys.phi_or_zero(),
        })
    }

    pub fn n(&self) -> usize {
        self.e1.cols()
    }

    pub fn rank(&self) -> usize {
        self.e1.rows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// One RK4 step: values and derivatives at both ends. The end values are
/// left limits, so jumps at the knots `jτ` stay sharp.
#[derive(Clone, Debug)]
struct Cell {
    x0: DVector<f64>,
    dx0: DVector<f64>,
    x1: DVector<f64>,
    dx1: DVector<f64>,
}

/// RK4 output with cubic Hermite interpolation between nodes and `φ`
/// before 0.
#[derive(Clone, Debug)]
pub struct SampledTrajectory {
    pub h: f64,
    cells: Vec<Cell>,
    /// Right limits at the nodes; the last entry belongs to the final node.
    start: DVector<f64>,
    start_dx: DVector<f64>,
    phi: [PiecewisePolyFn; 3],
}

impl SampledTrajectory {
    pub fn end(&self) -> f64 {
        self.cells.len() as f64 * self.h
    }

    /// Node times.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells.len()).map(|i| i as f64 * self.h).collect()
    }

    /// Value (`order = 0`) or derivative (`order = 1, 2`) at `s`, right-continuous.
    pub fn history(&self, s: f64, order: usize) -> Result<DVector<f64>> {
        self.history_side(s, order, Side::Right)
    }

    fn history_side(&self, s: f64, order: usize, side: Side) -> Result<DVector<f64>> {
        if s < 0.0 || (s == 0.0 && side == Side::Left) {
            let f = &self.phi[order.min(2)];
            let v = if side == Side::Left { f.eval_left(s)? } else { f.eval(s)? };
            return Ok(DVector::from_vec(v));
        }
        let n = self.cells.len();
        let end = self.end();
        if s > end * (1.0 + 1e-12) + 1e-14 {
            return Err(DdaeError::OutOfDomain { t: s, lo: 0.0, hi: end });
        }
        let u = s / self.h;
        let node = u.round();
        let at_node = (u - node).abs() <= 1e-9;
        if at_node && order < 2 {
            let i = node as usize;
            return Ok(match (side, i) {
                (Side::Left, i) if i > 0 => if order == 0 { self.cells[i - 1].x1.clone() } else { self.cells[i - 1].dx1.clone() },
                (_, i) if i >= n => if order == 0 { self.start.clone() } else { self.start_dx.clone() },
                (_, i) => if order == 0 { self.cells[i].x0.clone() } else { self.cells[i].dx0.clone() },
            });
        }
        if n == 0 {
            return Ok(DVector::zeros(self.start.len()));
        }
        let i = match side {
            Side::Right => (u.floor() as usize).min(n - 1),
            Side::Left => ((u.ceil() as usize).max(1) - 1).min(n - 1),
        };
        Ok(self.hermite(i, u - i as f64, order))
    }

    fn hermite(&self, i: usize, th: f64, order: usize) -> DVector<f64> {
        let h = self.h;
        let c = &self.cells[i];
        let (t2, t3) = (th * th, th * th * th);
        let (c00, c10, c01, c11, scale) = match order {
            0 => (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + th, -2.0 * t3 + 3.0 * t2, t3 - t2, 1.0),
            1 => (6.0 * t2 - 6.0 * th, 3.0 * t2 - 4.0 * th + 1.0, -6.0 * t2 + 6.0 * th, 3.0 * t2 - 2.0 * th, 1.0 / h),
            _ => (12.0 * th - 6.0, 6.0 * th - 4.0, -12.0 * th + 6.0, 6.0 * th - 2.0, 1.0 / (h * h)),
        };
        (&c.x0 * c00 + &c.dx0 * (c10 * h) + &c.x1 * c01 + &c.dx1 * (c11 * h)) * scale
    }
}

impl Trajectory for SampledTrajectory {
    fn dim(&self) -> usize {
        self.start.len()
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, self.end())
    }

    fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if t < 0.0 {
            return Err(DdaeError::OutOfDomain { t, lo: 0.0, hi: self.end() });
        }
        Ok(self.history(t, 0)?.iter().copied().collect())
    }

    fn derivative(&self, t: f64) -> Option<Result<Vec<f64>>> {
        Some(self.history(t, 1).map(|v| v.iter().copied().collect()))
    }
}

struct Rhs<'a> {
    sys: &'a SFreeSystem,
    m_inv: DMatrix<f64>,
    a1: DMatrix<f64>,
    b1: DMatrix<f64>,
    b2: DMatrix<f64>,
    c2: Option<DMatrix<f64>>,
}

fn stack(top: &DVector<f64>, bottom: &DVector<f64>) -> DVector<f64> {
    let mut v = top.clone().resize_vertically(top.len() + bottom.len(), 0.0);
    v.rows_mut(top.len(), bottom.len()).copy_from(bottom);
    v
}

impl Rhs<'_> {
    fn forcing(&self, t: f64, order: usize, side: Side) -> Result<(DVector<f64>, DVector<f64>)> {
        let (r, n) = (self.sys.rank(), self.sys.n());
        match &self.sys.f {
            None => Ok((DVector::zeros(r), DVector::zeros(n - r))),
            Some(f) => {
                let g = f.nth_derivative(order);
                let v = DVector::from_vec(if side == Side::Left { g.eval_left(t)? } else { g.eval(t)? });
                Ok((v.rows(0, r).into_owned(), v.rows(r, n - r).into_owned()))
            }
        }
    }

    /// `x` from `z = E₁x` and the algebraic rows, plus `ż`.
    fn state(
        &self,
        traj: &SampledTrajectory,
        t: f64,
        z: &DVector<f64>,
        side: Side,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let s = t - self.sys.tau;
        let xd = traj.history_side(s, 0, side)?;
        let (f1, f2) = self.forcing(t, 0, side)?;
        let mut g = -(&self.b2 * &xd) - f2;
        if let Some(c2) = &self.c2 {
            g -= c2 * traj.history_side(s, 1, side)?;
        }
        let x = &self.m_inv * stack(z, &g);
        let dz = &self.a1 * &x + &self.b1 * xd + f1;
        Ok((x, dz))
    }

    fn full_derivative(&self, traj: &SampledTrajectory, t: f64, dz: &DVector<f64>, side: Side) -> Result<DVector<f64>> {
        let s = t - self.sys.tau;
        let (_, df2) = self.forcing(t, 1, side)?;
        let mut dg = -(&self.b2 * traj.history_side(s, 1, side)?) - df2;
        if let Some(c2) = &self.c2 {
            dg -= c2 * traj.history_side(s, 2, side)?;
        }
        Ok(&self.m_inv * stack(dz, &dg))
    }

    fn node(&self, traj: &SampledTrajectory, t: f64, z: &DVector<f64>, side: Side) -> Result<(DVector<f64>, DVector<f64>)> {
        let (x, dz) = self.state(traj, t, z, side)?;
        let dx = self.full_derivative(traj, t, &dz, side)?;
        Ok((x, dx))
    }
}

/// Classical RK4 with step `h`, which must divide `τ`.
pub fn method_of_steps_reference(sys: &SFreeSystem, horizon: f64, step: f64) -> Result<SampledTrajectory> {
    let tau = sys.tau;
    if !(step > 0.0) || !(horizon > 0.0) {
        return Err(DdaeError::InvalidArgument("step and horizon must be positive".into()));
    }
    let per_delay = tau / step;
    if (per_delay - per_delay.round()).abs() > 1e-9 * per_delay.max(1.0) || per_delay.round() < 1.0 {
        return Err(DdaeError::InvalidArgument(format!("step {step} does not divide the delay {tau}")));
    }
    let h = tau / per_delay.round();
    let m = sys.e1.vstack(&sys.a2)?;
    let m_inv = m.inverse().ok_or(DdaeError::NotStrangenessFree)?.to_f64();
    let rhs = Rhs {
        sys,
        m_inv,
        a1: sys.a1.to_f64(),
        b1: sys.b1.to_f64(),
        b2: sys.b2.to_f64(),
        c2: sys.c2.as_ref().map(RatMatrix::to_f64),
    };
    let phi0 = DVector::from_vec(sys.phi.eval(0.0)?);
    let mut z = sys.e1.to_f64() * &phi0;
    let mut traj = SampledTrajectory {
        h,
        cells: Vec::new(),
        start: phi0.clone(),
        start_dx: phi0.clone() * 0.0,
        phi: [sys.phi.clone(), sys.phi.derivative(), sys.phi.nth_derivative(2)],
    };
    let (x0, dx0) = rhs.node(&traj, 0.0, &z, Side::Right)?;
    traj.start = x0;
    traj.start_dx = dx0;

    let steps = (horizon / h - 1e-9).ceil() as usize;
    for i in 0..steps {
        let t = i as f64 * h;
        let (_, k1) = rhs.state(&traj, t, &z, Side::Right)?;
        let (_, k2) = rhs.state(&traj, t + 0.5 * h, &(&z + &k1 * (0.5 * h)), Side::Right)?;
        let (_, k3) = rhs.state(&traj, t + 0.5 * h, &(&z + &k2 * (0.5 * h)), Side::Right)?;
        let (_, k4) = rhs.state(&traj, t + h, &(&z + &k3 * h), Side::Left)?;
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let tn = (i + 1) as f64 * h;
        let (x1, dx1) = rhs.node(&traj, tn, &z, Side::Left)?;
        let x0 = std::mem::replace(&mut traj.start, x1.clone());
        let dx0 = std::mem::replace(&mut traj.start_dx, dx1.clone());
        traj.cells.push(Cell { x0, dx0, x1, dx1 });
        let (xr, dxr) = rhs.node(&traj, tn, &z, Side::Right)?;
        traj.start = xr;
        traj.start_dx = dxr;
    }
    Ok(traj)
}
