//! Numeric checks on the transverse plane: grid spectra and loop holonomies.

pub mod eigen;
pub mod grid;
pub mod holonomy;

pub use eigen::{
    eigenvalues, eigenvalues_with, landau_degeneracy, Cluster, DegeneracyReport, EigenOptions, SpectrumResult,
    MAX_EIGENVALUES, RESIDUAL_TOL,
};
pub use grid::{discretize, discretize_fields, preset_shift, Discretization, GridSpec, HermitianMatrix};
pub use holonomy::{holonomy, interference_phase, Loop, Orientation};

use crate::opalg::EvalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectraError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0} is not real on the grid")]
    NotReal(&'static str),
    #[error("requested {requested} eigenvalues, at most {limit} available")]
    TooManyEigenvalues { requested: usize, limit: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("eigensolver did not converge after {cycles} cycles ({converged} pairs converged, worst residual {worst_residual:.3e})")]
    NotConverged { cycles: usize, converged: usize, worst_residual: f64 },
    #[error("singular loop: {0}")]
    SingularLoop(String),
}
