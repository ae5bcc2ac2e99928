//! Crate error type.
//!
//! Every fallible public operation returns [`Result`]. Variants are grouped by
//! the way a caller is expected to react:
//!
//! * validation errors — the input violates a documented precondition
//!   (bad grid shape, insufficient edge decay, inadmissible reflection data);
//! * solver failures — an iteration failed to converge or a time-stepper
//!   went unstable;
//! * hypothesis failures — the data itself is outside the solvability class
//!   (an eigenvalue or spectral singularity was detected), so the requested
//!   computation is refused rather than attempted.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the IST engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A structural precondition on a grid was violated.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A sampled function fails a decay or admissibility precondition.
    #[error("invalid input data: {0}")]
    InvalidInput(String),

    /// Reflection data violates an admissibility requirement (mismatched
    /// grids, broken `r_- = 4z r_+` relation, failed positivity).
    #[error("inadmissible reflection data: {0}")]
    InadmissibleReflection(String),

    /// An iterative solver did not reach its tolerance.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// The reference PDE integrator lost stability (NaN/∞ or CFL breach).
    #[error("PDE integrator failure: {0}")]
    PdeInstability(String),

    /// `|a|` dipped below the resonance floor on the real line: a spectral
    /// singularity is present (or numerically indistinguishable from one).
    #[error("resonance detected: min |a| = {min_abs_a:.3e} ≤ floor {floor:.3e}")]
    ResonanceDetected {
        /// Smallest `|a(z)|` observed on the real line.
        min_abs_a: f64,
        /// Configured admissibility floor.
        floor: f64,
    },

    /// The winding-number count found zeros of `a` in the upper half plane:
    /// the potential supports eigenvalues and lies outside the reflection-only
    /// solvability class.
    #[error("eigenvalue detected: winding number of a over the upper half plane is {winding}")]
    EigenvalueDetected {
        /// Computed winding (= number of zeros counted with multiplicity).
        winding: i64,
    },

    /// The adaptive winding count could not resolve the argument increments
    /// within its refinement budget.
    #[error("winding computation unresolved: {0}")]
    WindingUnresolved(String),

    /// Input/output or serialization problem.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
