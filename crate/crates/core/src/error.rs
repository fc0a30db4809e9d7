//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("particle number must be at least 1, got {0}")]
    InvalidParticleNumber(usize),

    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("state is not normalized: |norm^2 - 1| = {defect:.3e} exceeds {tolerance:.3e}")]
    NotNormalized { defect: f64, tolerance: f64 },

    #[error("t = {t} is outside the schedule domain [{lo}, {hi}]")]
    ScheduleDomain { t: f64, lo: f64, hi: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid propagation config: {0}")]
    InvalidPropagationConfig(String),

    #[error(
        "norm drift {drift:.3e} at t = {t} exceeds tolerance {tolerance:.3e}; \
         the time step is too large for this Hamiltonian"
    )]
    NormDrift { t: f64, drift: f64, tolerance: f64 },

    #[error(
        "finite-difference step {dt} at t = {t} is outside the convergent regime \
         (halving the step changed the estimate by {change:.3e})"
    )]
    FiniteDifferenceStep { t: f64, dt: f64, change: f64 },

    #[error("invalid well specification: {0}")]
    InvalidWellSpec(String),

    #[error("potential has no double-well structure: {0}")]
    NotDoubleWell(String),

    #[error(
        "barrier too low for a two-mode description: E0 = {e0:.6e}, E1 = {e1:.6e}, \
         barrier top = {barrier:.6e}"
    )]
    BarrierTooLow { e0: f64, e1: f64, barrier: f64 },

    #[error(
        "grid too coarse: halving the spacing changed parameters by {change:.3e} \
         (relative), tolerance {tolerance:.3e}"
    )]
    GridTooCoarse { change: f64, tolerance: f64 },

    #[error("time ranges do not overlap: quantum [{q_lo}, {q_hi}], classical [{c_lo}, {c_hi}]")]
    DisjointTimeRanges {
        q_lo: f64,
        q_hi: f64,
        c_lo: f64,
        c_hi: f64,
    },

    #[error("empty trajectory record")]
    EmptyRecord,

    #[error("eigensolver failed to converge: {0}")]
    EigenFailure(String),
}
