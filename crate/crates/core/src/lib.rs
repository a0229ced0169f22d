//! Analysis of linear time-invariant delay differential-algebraic equations
//!
//! ```text
//! E x'(t) = A x(t) + B x(t − τ) + f(t),   x|[−τ,0] = φ
//! ```
//!
//! The crate decides solvability through a condensed form of the
//! associated matrix polynomial pair, computes the spectrum of the
//! characteristic quasipolynomial `det(λE − A − e^{−λτ}B)`, classifies
//! exponential and weak exponential stability, and builds explicit
//! solutions for systems whose coefficients pairwise commute.

pub mod commutative;
pub mod condensed;
pub mod error;
pub mod polyalg;
pub mod solution;
pub mod spectral;
pub mod system;
pub mod verify;

pub use error::{DdaeError, Result};
