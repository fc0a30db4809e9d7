//! Small dense-matrix helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest entry magnitude.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry magnitude of the difference.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A - (tr A / dim) * I. Used to compare Hamiltonians that differ by a
/// dropped constant.
pub fn traceless_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let shift = m.trace() / Complex64::new(dim as f64, 0.0);
    let mut out = m.clone();
    for k in 0..dim {
        out[(k, k)] -= shift;
    }
    out
}

/// Hermiticity defect max |A - A^dagger|.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Apply exp(-i H t) to a vector through a dense Hermitian eigendecomposition.
///
/// This is the exact-evolution route used as an oracle against stepped
/// propagation for time-independent Hamiltonians.
pub fn exact_evolution(
    h: &DMatrix<Complex64>,
    psi: &DVector<Complex64>,
    t: f64,
) -> DVector<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let coeffs = eig.eigenvectors.adjoint() * psi;
    let phased = DVector::from_iterator(
        coeffs.len(),
        coeffs
            .iter()
            .zip(eig.eigenvalues.iter())
            .map(|(c, lambda)| c * Complex64::new(0.0, -lambda * t).exp()),
    );
    &eig.eigenvectors * phased
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traceless_part_removes_trace() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(3.0, 0.0),
                Complex64::new(1.0, 2.0),
                Complex64::new(1.0, -2.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let t = traceless_part(&m);
        assert!(t.trace().norm() < 1e-15);
        assert_eq!(t[(0, 1)], m[(0, 1)]);
    }

    #[test]
    fn exact_evolution_rotates_phase_of_eigenstate() {
        // H = diag(2, -1): e_0 picks up phase exp(-2it)
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let psi = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let out = exact_evolution(&h, &psi, 0.5);
        let expected = Complex64::new(0.0, -1.0).exp();
        assert!((out[0] - expected).norm() < 1e-14);
        assert!(out[1].norm() < 1e-14);
    }
}
