//! The problem data `E x'(t) = A x(t) + B x(t − τ) + f(t)`, `x|[−τ,0] = φ`.

use crate::error::{DdaeError, Result};
use crate::polyalg::{Rat, RatMatrix};
use crate::solution::PiecewisePolyFn;

#[derive(Clone, Debug, PartialEq)]
pub struct DdaeSystem {
    pub e: RatMatrix,
    pub a: RatMatrix,
    pub b: RatMatrix,
    pub tau: Rat,
    /// Inhomogeneity (ℓ-vector); `None` means `f ≡ 0`.
    pub f: Option<PiecewisePolyFn>,
    /// Initial function (n-vector) on exactly `[−τ, 0]`.
    pub phi: Option<PiecewisePolyFn>,
    pub horizon: Rat,
}

impl DdaeSystem {
    /// Homogeneous system without initial data; the horizon defaults to `10τ`.
    pub fn new(e: RatMatrix, a: RatMatrix, b: RatMatrix, tau: Rat) -> Result<Self> {
        let horizon = &tau * &Rat::from_int(10);
        let sys = DdaeSystem { e, a, b, tau, f: None, phi: None, horizon };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_phi(mut self, phi: PiecewisePolyFn) -> Result<Self> {
        self.phi = Some(phi);
        self.validate()?;
        Ok(self)
    }

    pub fn with_f(mut self, f: PiecewisePolyFn) -> Result<Self> {
        self.f = Some(f);
        self.validate()?;
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: Rat) -> Result<Self> {
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    /// Number of equations ℓ.
    pub fn ell(&self) -> usize {
        self.e.rows()
    }

    /// Number of unknowns n.
    pub fn n(&self) -> usize {
        self.e.cols()
    }

    pub fn is_square(&self) -> bool {
        self.e.is_square()
    }

    pub fn validate(&self) -> Result<()> {
        let (l, n) = (self.e.rows(), self.e.cols());
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            if m.rows() != l || m.cols() != n {
                return Err(DdaeError::Dimension(format!(
                    "E is {l}x{n} but {name} is {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if !self.tau.is_positive() {
            return Err(DdaeError::NonPositiveDelay);
        }
        if !self.horizon.is_positive() {
            return Err(DdaeError::InvalidArgument("horizon must be positive".into()));
        }
        if let Some(phi) = &self.phi {
            if phi.dim() != n {
                return Err(DdaeError::Dimension(format!("phi has {} components, expected {n}", phi.dim())));
            }
            if phi.start() != &-&self.tau || !phi.end().is_zero() {
                return Err(DdaeError::InvalidArgument(format!(
                    "phi must be given on exactly [-{}, 0], got [{}, {}]",
                    self.tau,
                    phi.start(),
                    phi.end()
                )));
            }
        }
        if let Some(f) = &self.f {
            if f.dim() != l {
                return Err(DdaeError::Dimension(format!("f has {} components, expected {l}", f.dim())));
            }
            if f.start() > &Rat::zero() {
                return Err(DdaeError::InvalidArgument(format!("f must start at or before 0, starts at {}", f.start())));
            }
        }
        Ok(())
    }

    /// `f` on `[0, end]`, zero when the system is homogeneous.
    pub fn f_on(&self, end: &Rat) -> Result<PiecewisePolyFn> {
        match &self.f {
            None => PiecewisePolyFn::zero(Rat::zero(), end.clone(), self.ell()),
            Some(f) => {
                if f.end() < end {
                    return Err(DdaeError::Lookahead(format!("f is given up to {} but is needed up to {end}", f.end())));
                }
                f.restrict(&Rat::zero(), end)
            }
        }
    }

    /// `φ`, zero when absent.
    pub fn phi_or_zero(&self) -> PiecewisePolyFn {
        self.phi.clone().unwrap_or_else(|| {
            PiecewisePolyFn::zero(-&self.tau, Rat::zero(), self.n()).expect("τ > 0")
        })
    }
}
