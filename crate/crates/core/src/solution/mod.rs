//! Piecewise polynomial data and explicit solutions of commutative systems.

mod blocks;
mod closed;
mod delay_exp;
mod piecewise;
mod x1;

pub use blocks::{solve_x2, solve_x3};
pub use closed::{
    solve_commutative, solve_decomposed, weak_stability_params, ClosedFormSolution, GrowthEvidence,
    StabilityParamKind, WeakStabilityParams,
};
pub use delay_exp::delay_exp;
pub use piecewise::PiecewisePolyFn;
pub use x1::{X1Evaluator, GL_ORDER};
