use nalgebra::{DMatrix, DVector};

use super::matrix::{validate_matrix, JudgmentMatrix};
use crate::error::{Error, Result};

pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 10_000;

/// Dominant eigenvalue of the comparison matrix by power iteration.
///
/// This is the reference value the summation approximation in
/// [`derive_weights`](super::derive_weights) is checked against. For a
/// positive matrix the Perron root is real, simple and strictly dominant,
/// so the iteration converges from the uniform start vector.
pub fn exact_max_eigenvalue(m: &JudgmentMatrix) -> Result<f64> {
    let report = validate_matrix(m);
    if !report.is_valid() {
        return Err(Error::InvalidMatrix(report));
    }
    perron_root(&m.comparison_matrix(), POWER_TOLERANCE, POWER_MAX_ITERATIONS)
}

pub(crate) fn perron_root(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<f64> {
    let n = a.nrows();
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let y = a * &x;
        // x sums to 1, so the 1-norm of A x is the eigenvalue estimate.
        let next_lambda = y.sum();
        let next_x = y / next_lambda;
        let dx = (&next_x - &x).amax();
        let converged = (next_lambda - lambda).abs() <= tol * next_lambda.abs() && dx <= tol;
        lambda = next_lambda;
        x = next_x;
        if converged {
            return Ok(lambda);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::{fixtures, MatrixKind};

    #[test]
    fn consistent_reciprocal_matrix_has_root_n() {
        let m = JudgmentMatrix::from_rows(
            &[
                vec![1.0, 2.0, 4.0],
                vec![0.5, 1.0, 2.0],
                vec![0.25, 0.5, 1.0],
            ],
            MatrixKind::RawSaaty,
        )
        .unwrap();
        let lambda = exact_max_eigenvalue(&m).unwrap();
        assert!((lambda - 3.0).abs() < 1e-9, "{lambda}");
    }

    #[test]
    fn all_ones_matrix_has_root_n() {
        let m = JudgmentMatrix::from_rows(&vec![vec![1.0; 4]; 4], MatrixKind::RawSaaty).unwrap();
        assert!((exact_max_eigenvalue(&m).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn printed_b4_is_near_reported_value() {
        let lambda = exact_max_eigenvalue(&fixtures::b4()).unwrap();
        assert!((lambda - 5.112).abs() < 0.05, "{lambda}");
    }

    #[test]
    fn iteration_cap_is_reported() {
        // Eigenvalues are +sqrt(2) and -sqrt(2): the iterate oscillates.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 1.0, 0.0]);
        let err = perron_root(&a, 0.0, 50).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 50 }));
        assert!(err.to_string().contains("oracle did not converge"));
    }

    #[test]
    fn invalid_matrix_is_refused() {
        let m = JudgmentMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]], MatrixKind::RawSaaty)
            .unwrap();
        assert!(matches!(exact_max_eigenvalue(&m), Err(Error::InvalidMatrix(_))));
    }
}
