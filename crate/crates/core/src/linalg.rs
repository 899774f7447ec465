//! Dense decompositions and the least-squares helpers built on them.
//!
//! Matrices are stored as nalgebra types throughout the crate; the
//! decompositions themselves are delegated to faer.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};

fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin singular value decomposition `a = u diag(s) v^T`, singular values
/// in non-increasing order.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn svd(a: &DMatrix<f64>) -> Result<Svd> {
    if !a.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularInput(f64::NAN));
    }
    let d = to_faer(a)
        .thin_svd()
        .map_err(|e| Error::DegenerateMotion(format!("singular value decomposition failed: {e:?}")))?;
    let s = d.S().column_vector().iter().copied().collect();
    Ok(Svd { u: from_faer(d.U()), s, v: from_faer(d.V()) })
}

/// SVD of a 3x3 matrix as `(u, s, v)`.
pub(crate) fn svd3(m: &Matrix3<f64>) -> Result<(Matrix3<f64>, Vector3<f64>, Matrix3<f64>)> {
    let d = svd(&DMatrix::from_column_slice(3, 3, m.as_slice()))?;
    Ok((
        Matrix3::from_column_slice(d.u.as_slice()),
        Vector3::new(d.s[0], d.s[1], d.s[2]),
        Matrix3::from_column_slice(d.v.as_slice()),
    ))
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues in non-increasing
/// order; column `k` of the matrix belongs to eigenvalue `k`.
pub(crate) fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let e = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::DegenerateMotion(format!("eigen-decomposition failed: {e:?}")))?;
    let n = a.nrows();
    let vals: Vec<f64> = e.S().column_vector().iter().copied().collect();
    let vecs = e.U();
    // faer sorts ascending
    let values = (0..n).rev().map(|k| vals[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| vecs[(i, n - 1 - k)]);
    Ok((values, vectors))
}

/// Right singular basis of a (possibly wide) matrix.
///
/// Singular values are sorted in descending order and padded with zeros up
/// to the column count; `basis.column(k)` belongs to `singular_values[k]`.
pub(crate) struct RightSingular {
    pub singular_values: Vec<f64>,
    pub basis: DMatrix<f64>,
}

impl RightSingular {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let cols = a.ncols();
        let d = if a.nrows() < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.view_mut((0, 0), a.shape()).copy_from(a);
            svd(&p)?
        } else {
            svd(a)?
        };
        Ok(Self { singular_values: d.s, basis: d.v })
    }

    pub fn cols(&self) -> usize {
        self.basis.ncols()
    }

    /// Singular vector for the `k`-th smallest singular value (0 = smallest).
    pub fn smallest(&self, k: usize) -> DVector<f64> {
        self.basis.column(self.cols() - 1 - k).into_owned()
    }

    /// Number of singular values with `sigma / sigma_max < tol`.
    pub fn nullity(&self, tol: f64) -> usize {
        let s1 = self.singular_values.first().copied().unwrap_or(0.0);
        if s1 == 0.0 {
            return self.singular_values.len();
        }
        self.singular_values.iter().filter(|s| **s / s1 < tol).count()
    }
}

/// Solution of `a x = b` in the least-squares sense.
pub(crate) struct LeastSquares {
    pub x: DVector<f64>,
    pub singular_values: Vec<f64>,
    pub residual: f64,
}

/// Solves `min |a x - b|` through the SVD and fails with
/// `DegenerateMotion` when `a` is rank deficient at relative tolerance `tol`.
pub(crate) fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Result<LeastSquares> {
    let cols = a.ncols();
    if a.nrows() < cols {
        return Err(Error::DegenerateMotion(format!(
            "{} equations for {} unknowns",
            a.nrows(),
            cols
        )));
    }
    let d = svd(a)?;
    let s1 = d.s.first().copied().unwrap_or(0.0);
    let rank = d.s.iter().filter(|v| s1 > 0.0 && **v / s1 >= tol).count();
    if rank < cols {
        return Err(Error::DegenerateMotion(format!(
            "coefficient matrix has rank {rank} < {cols}"
        )));
    }
    let utb = d.u.transpose() * b;
    let scaled = DVector::from_iterator(cols, (0..cols).map(|i| utb[i] / d.s[i]));
    let x = &d.v * scaled;
    let residual = (a * &x - b).norm();
    Ok(LeastSquares { x, singular_values: d.s, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_matrix_keeps_full_basis() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let rs = RightSingular::new(&a).unwrap();
        assert_eq!(rs.cols(), 3);
        assert_eq!(rs.nullity(1e-8), 2);
        for k in 0..2 {
            assert!((&a * rs.smallest(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn least_squares_exact_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 1.0, 1.0]);
        let x = DVector::from_vec(vec![0.5, -1.5]);
        let b = &a * &x;
        let ls = least_squares(&a, &b, 1e-10).unwrap();
        assert!((ls.x - x).norm() < 1e-14);
        assert!(ls.residual < 1e-14);
    }

    #[test]
    fn least_squares_rank_deficient() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(least_squares(&a, &b, 1e-10), Err(Error::DegenerateMotion(_))));
    }

    #[test]
    fn nearly_rank_one_matrix_recomposes() {
        // A rank-one product polluted at the 1e-16 level; an earlier
        // decomposition backend returned a wrong factorization here.
        let c = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.14630564374469107, -0.17526483387340805, 0.2588091364523035, -0.16492535053557508,
                0.17526483387340805, -0.2099560974303692, 0.31003684577191215, -0.19757005555829765,
                -0.2588091364523035, 0.31003684577191215, -0.4578235493640525, 0.29174669177964985,
                0.16492535053557508, -0.19757005555829765, 0.29174669177964985, -0.18591470946088723,
            ],
        );
        let d = svd(&c).unwrap();
        assert!((d.s[0] - 1.0).abs() < 1e-12);
        let r = &d.u * DMatrix::from_diagonal(&DVector::from_vec(d.s.clone())) * d.v.transpose();
        assert!((r - c).norm() < 1e-12);
    }

    #[test]
    fn symmetric_eigen_descending() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let v0 = vecs.column(0);
        assert!((v0[0].abs() - v0[1].abs()).abs() < 1e-14);
    }
}
