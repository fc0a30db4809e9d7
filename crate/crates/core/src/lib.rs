//! Simulator for the quantum and mean-field dynamics of a two-mode
//! Bose-Einstein condensate in a double-well potential.
//!
//! The library covers:
//!
//! * Schwinger angular-momentum operators on the Dicke basis ([`operators`])
//! * Hamiltonian assembly with on-site and higher-order interaction
//!   corrections, validated against an independent boson-operator
//!   construction ([`model`])
//! * fixed-step Schrödinger propagation with observable recording and
//!   equation-of-motion checks ([`dynamics`])
//! * classical Bloch-vector and two-mode amplitude flows with
//!   quantum-classical comparison ([`meanfield`])
//! * extraction of the couplings from a 1-D double-well potential
//!   ([`wells`])
//! * deterministic verification suites ([`verify`])
//!
//! Conventions: hbar = 1, Jz = (N_R - N_L)/2 so the all-left state sits at
//! m = -N/2 (index 0), and the tunneling rate is a signed input.
//!
//! ```
//! use twomode::*;
//!
//! let params = ModelParams {
//!     n_particles: 10,
//!     u0: 0.05,
//!     ut: 0.0,
//!     utt: 0.0,
//!     epsilon: Schedule::constant(0.0),
//!     omega: Schedule::constant(-0.8),
//! };
//! let cfg = PropagationConfig::new(0.0, 10.0, 5e-4).with_stride(100);
//! let state0 = left_well_state(params.n_particles)?;
//! let quantum = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg)?;
//! let classical =
//!     integrate_bloch(BlochVector::left(), &params, HamiltonianKind::OnSiteOnly, &cfg)?;
//! let deviation = compare_quantum_classical(&quantum, &classical, params.n_particles)?;
//! assert_eq!(deviation.times.len(), quantum.times.len());
//! assert!(quantum.norm.iter().all(|n| (n - 1.0).abs() < 1e-9));
//! # Ok::<(), twomode::Error>(())
//! ```

// `!(x > 0.0)` is the NaN-rejecting form of the validation guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod meanfield;
pub mod model;
pub mod operators;
pub mod verify;
pub mod wells;

pub use dynamics::{
    eom_residual, exact_constant_evolution, propagate, transport_metrics, PropagationConfig,
    TrajectoryRecord, TransportMetrics,
};
pub use error::{Error, Result};
pub use meanfield::{
    bloch_rhs, compare_quantum_classical, gp_rhs, integrate_bloch, integrate_gp, BlochVector,
    ClassicalTrajectory, DeviationSeries, GpAmplitudes, GpCouplings, GpTrajectory,
};
pub use model::{
    boson_hamiltonian_at, evaluate_schedule, hamiltonian_at, HamiltonianKind, ModelParams, Schedule,
};
pub use operators::{
    build_operators, expectation, left_well_state, real_expectation, DickeBasis, OperatorSet,
    QuantumState,
};
pub use verify::{CheckOutcome, VerifyOptions};
pub use wells::{
    compute_parameters, extract_parameters, solve_modes, ExtractionReport, Grid1d, ModeFunctions,
    Potential, WellParameters, WellSpec,
};
