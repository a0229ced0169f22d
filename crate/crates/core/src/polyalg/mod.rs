//! Exact arithmetic: rationals, univariate and bivariate polynomials,
//! rational and polynomial matrices, and the Smith canonical form.

mod bipoly;
mod matpoly;
mod poly;
mod rat;
mod ratmat;
mod smith;

pub use bipoly::BiPoly;
pub use matpoly::{bareiss_det, cofactor_det, MatPoly};
pub use poly::Poly;
pub use rat::Rat;
pub use ratmat::RatMatrix;
pub use smith::{smith_form, SmithForm};

/// Commutative ring with exact division, enough for Bareiss elimination.
pub trait Ring: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `Some(q)` with `q·rhs = self`, or `None` if `rhs` does not divide.
    fn div_exact(&self, rhs: &Self) -> Option<Self>;
}
