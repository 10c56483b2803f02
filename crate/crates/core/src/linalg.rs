//! Small dense linear-algebra helpers shared by the Gaussian routines.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::{Error, Result};

/// Relative eigenvalue floor below which a symmetric matrix is treated as
/// not positive definite.
pub const PD_RELATIVE_FLOOR: f64 = 1e-12;

/// Relative tolerance for the symmetry check on covariance inputs.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

pub fn check_finite(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `true` when `|m - mᵀ|_max <= tol * max(1, |m|_max)`.
pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Average `m` with its transpose.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(m.clone());
    let lo = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Positive definiteness under the relative floor: `λ_min > 1e-12 · λ_max`.
pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    let (lo, hi) = eigen_range(m);
    hi > 0.0 && lo > PD_RELATIVE_FLOOR * hi
}

/// Cholesky factor of a matrix already known to be positive definite.
pub fn cholesky(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone())
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorisation failed".into()))
}

pub fn log_det_cholesky(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.ln())
        .sum::<f64>()
}

/// `log |m|` for a symmetric positive definite matrix.
pub fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    Ok(log_det_cholesky(&cholesky(m)?))
}

/// `vᵀ m⁻¹ v` through the Cholesky factor.
pub fn inv_quad_form(chol: &Cholesky<f64, Dyn>, v: &DVector<f64>) -> f64 {
    let w = chol
        .l()
        .solve_lower_triangular(v)
        .expect("triangular solve");
    w.norm_squared()
}

pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(symmetrize(&cholesky(m)?.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn log_det_matches_product_of_eigenvalues() {
        let m = dmatrix![4.0, 1.0; 1.0, 3.0];
        let ld = log_det_spd(&m).unwrap();
        assert!((ld - 11.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn borderline_matrix_rejected() {
        let m = dmatrix![1.0, 0.0; 0.0, 1e-13];
        assert!(!is_positive_definite(&m));
        let m = dmatrix![1.0, 0.0; 0.0, 1e-11];
        assert!(is_positive_definite(&m));
    }

    #[test]
    fn symmetry_is_relative() {
        let mut m = dmatrix![1e6, 2.0; 2.0, 1.0];
        assert!(is_symmetric(&m, 1e-12));
        m[(0, 1)] += 1e-3;
        assert!(!is_symmetric(&m, 1e-12));
    }
}
