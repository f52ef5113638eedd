//! Grid solver for the vortex form of the Bochner equation
//! Δw = e^{2w} − |φ|²e^{−2w}, pullback-metric length functionals, and the
//! length-asymptotics experiment.

pub mod experiment;
pub mod grid;
pub mod lengths;
pub mod solve;

pub use experiment::{asymptotic_experiment, ExperimentConfig, ExperimentResult, ExperimentRow};
pub use grid::{GridDomain, NodeClass};
pub use lengths::{decay_profile, leg_pullback_length, path_length};
pub use solve::{solve, solve_with_boundary, SolveParams, VortexField};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VortexError {
    #[error("bad domain: {0}")]
    BadDomain(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("Newton iteration diverged (residual {0:.3e})")]
    NewtonDiverged(f64),
    #[error("linear solve failed: {0}")]
    LinearSolveFailed(String),
    #[error("path leaves the active domain at {0}")]
    PathLeavesDomain(Complex64),
    #[error(transparent)]
    Differential(#[from] crate::qdiff::QdError),
}
