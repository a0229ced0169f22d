//! Independent checks: equation residuals, a method-of-steps integrator and
//! decay envelope fits.

mod envelope;
mod residual;
mod steps;

pub use envelope::{decay_envelope_fit, EnvelopeFit};
pub use residual::{residual, ResidualReport, Trajectory};
pub use steps::{method_of_steps_reference, SampledTrajectory, SFreeSystem};
