//! Dicke basis and Schwinger angular-momentum operators for a fixed
//! particle number N.
//!
//! Two bosonic modes (left/right well) map onto a spin j = N/2 via the
//! Schwinger representation; the basis is ordered by ascending m, so index 0
//! is the all-left state |j, -j> and index N is the all-right state |j, +j>.
//! Everything is dimensionless with hbar = 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dicke basis |j, m> with j = N/2 and m = -j, -j+1, ..., +j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DickeBasis {
    n_particles: usize,
}

impl DickeBasis {
    pub fn new(n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidParticleNumber(n_particles));
        }
        Ok(Self { n_particles })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    /// Total spin j = N/2.
    pub fn j(&self) -> f64 {
        self.n_particles as f64 / 2.0
    }

    /// Hilbert-space dimension N + 1.
    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }

    /// m values in ascending order, -j to +j. Half-integers are exact in f64.
    pub fn m_values(&self) -> Vec<f64> {
        let j = self.j();
        (0..self.dim()).map(|k| k as f64 - j).collect()
    }
}

/// Dense matrices of the Schwinger operators and their products on the
/// Dicke basis, all for the same fixed N.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub basis: DickeBasis,
    pub jx: DMatrix<Complex64>,
    pub jy: DMatrix<Complex64>,
    pub jz: DMatrix<Complex64>,
    pub jplus: DMatrix<Complex64>,
    pub jminus: DMatrix<Complex64>,
    /// Jz^2 (diagonal, exact products of m values).
    pub jz2: DMatrix<Complex64>,
    /// Jx^2 formed by dense matrix product.
    pub jx2: DMatrix<Complex64>,
    /// Jy^2 formed by dense matrix product.
    pub jy2: DMatrix<Complex64>,
}

/// Build the operator matrices for N particles.
///
/// Ladder elements follow <j,m+1| J+ |j,m> = sqrt(j(j+1) - m(m+1)), with
/// Jx = (J+ + J-)/2 and Jy = (J+ - J-)/(2i). Construction is pure integer
/// and half-integer arithmetic, so identical inputs give bit-identical
/// matrices.
pub fn build_operators(n_particles: usize) -> Result<OperatorSet> {
    let basis = DickeBasis::new(n_particles)?;
    let dim = basis.dim();
    let j = basis.j();
    let m = basis.m_values();

    let mut jplus = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        let amp = (j * (j + 1.0) - m[k] * (m[k] + 1.0)).sqrt();
        jplus[(k + 1, k)] = Complex64::new(amp, 0.0);
    }
    let jminus = jplus.adjoint();

    let jx = (&jplus + &jminus).map(|z| z * Complex64::new(0.5, 0.0));
    let jy = (&jplus - &jminus).map(|z| z * Complex64::new(0.0, -0.5));

    let mut jz = DMatrix::<Complex64>::zeros(dim, dim);
    let mut jz2 = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        jz[(k, k)] = Complex64::new(m[k], 0.0);
        jz2[(k, k)] = Complex64::new(m[k] * m[k], 0.0);
    }

    let jx2 = &jx * &jx;
    let jy2 = &jy * &jy;

    Ok(OperatorSet {
        basis,
        jx,
        jy,
        jz,
        jplus,
        jminus,
        jz2,
        jx2,
        jy2,
    })
}

/// Normalized state vector over the Dicke basis, indexed by ascending m.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<Complex64>,
}

/// Norm tolerance enforced at construction.
pub const NORM_TOLERANCE: f64 = 1e-12;

impl QuantumState {
    /// Wrap an amplitude vector, requiring sum |a|^2 = 1 within 1e-12.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let defect = (norm_sq - 1.0).abs();
        if defect > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                defect,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized {
                defect: 1.0,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// Basis state |j, m_k> where k is the ascending-m index.
    pub fn basis_state(n_particles: usize, index: usize) -> Result<Self> {
        let basis = DickeBasis::new(n_particles)?;
        if index >= basis.dim() {
            return Err(Error::DimensionMismatch {
                context: "basis state index",
                expected: basis.dim(),
                actual: index,
            });
        }
        let mut amplitudes = DVector::<Complex64>::zeros(basis.dim());
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    /// |<other|self>|^2.
    pub fn overlap_sqr(&self, other: &QuantumState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// All N particles in the left well: |j, -j>, amplitude 1 on m = -N/2.
pub fn left_well_state(n_particles: usize) -> Result<QuantumState> {
    QuantumState::basis_state(n_particles, 0)
}

/// <state| op |state>. Imaginary part stays below ~1e-10 for Hermitian op.
pub fn expectation(state: &QuantumState, op: &DMatrix<Complex64>) -> Result<Complex64> {
    if op.nrows() != state.dim() || op.ncols() != state.dim() {
        return Err(Error::DimensionMismatch {
            context: "expectation value",
            expected: state.dim(),
            actual: op.nrows(),
        });
    }
    Ok(state.amplitudes.dotc(&(op * &state.amplitudes)))
}

/// Real part of an expectation value of a Hermitian observable.
pub fn real_expectation(state: &QuantumState, op: &DMatrix<Complex64>) -> Result<f64> {
    Ok(expectation(state, op)?.re)
}
