//! Representation algebra: cross-product matrices, the Kronecker product,
//! column-major vectorization and the unified left/right multiplication
//! mapping shared by the quaternion and Kronecker formulations.
//!
//! For a product `AB` both representations provide a left matrix `M+(A)`
//! and a right matrix `M-(B)` such that
//!
//! ```text
//! vec(AB) = M+(A) vec(B) = M-(B) vec(A)
//! ```
//!
//! Quaternion: `M+ = Q+(a)`, `M- = Q-(b)`, `vec(q) = q`.
//! Kronecker:  `M+ = I (x) A`, `M- = B^T (x) I`, column-major `vec`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::transform::Rotation3;
use crate::error::{Error, Result};

/// Skew-symmetric matrix with `cross_matrix(a) * b == a.cross(b)`.
pub fn cross_matrix(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Kronecker product `A (x) B`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let mut out = DMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            out.view_mut((i * p, j * q), (p, q)).copy_from(&(b * aij));
        }
    }
    out
}

/// Column-major vectorization.
pub fn vec(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if rows * cols != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape a {}-vector into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(DMatrix::from_column_slice(rows, cols, v.as_slice()))
}

pub(crate) fn vec3(m: &Matrix3<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvec3(v: &[f64]) -> Matrix3<f64> {
    Matrix3::from_column_slice(&v[..9])
}

/// Rotation representation used to linearize the rotation equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    AxisAngle,
    Quaternion,
    Kronecker,
}

impl Representation {
    /// Length of `vec(R)` in this representation.
    pub fn dim(self) -> usize {
        match self {
            Representation::AxisAngle => 3,
            Representation::Quaternion => 4,
            Representation::Kronecker => 9,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Representation::AxisAngle => "axis_angle",
            Representation::Quaternion => "quaternion",
            Representation::Kronecker => "kronecker",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axis_angle" => Ok(Representation::AxisAngle),
            "quaternion" => Ok(Representation::Quaternion),
            "kronecker" => Ok(Representation::Kronecker),
            other => Err(Error::UnsupportedRepresentation(other.to_string())),
        }
    }
}

/// Vectorized rotation in the given representation.
pub fn vectorize(r: &Rotation3, repr: Representation) -> Result<DVector<f64>> {
    match repr {
        Representation::Quaternion => {
            Ok(DVector::from_column_slice(r.to_quaternion().to_vector().as_slice()))
        }
        Representation::Kronecker => Ok(vec3(r.matrix())),
        Representation::AxisAngle => Err(Error::UnsupportedRepresentation(
            "axis-angle has no linear multiplication mapping".into(),
        )),
    }
}

/// Left multiplication matrix `M+(R)`.
pub fn omega_left(r: &Rotation3, repr: Representation) -> Result<DMatrix<f64>> {
    match repr {
        Representation::Quaternion => Ok(to_dmatrix4(&r.to_quaternion().left_matrix())),
        Representation::Kronecker => Ok(kron_identity_left(r.matrix())),
        Representation::AxisAngle => Err(Error::UnsupportedRepresentation(
            "axis-angle has no linear multiplication mapping".into(),
        )),
    }
}

/// Right multiplication matrix `M-(R)`.
pub fn omega_right(r: &Rotation3, repr: Representation) -> Result<DMatrix<f64>> {
    match repr {
        Representation::Quaternion => Ok(to_dmatrix4(&r.to_quaternion().right_matrix())),
        Representation::Kronecker => Ok(kron_identity_right(r.matrix())),
        Representation::AxisAngle => Err(Error::UnsupportedRepresentation(
            "axis-angle has no linear multiplication mapping".into(),
        )),
    }
}

/// `I (x) A` for a 3x3 `A`.
pub(crate) fn kron_identity_left(a: &Matrix3<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(9, 9);
    for k in 0..3 {
        out.view_mut((3 * k, 3 * k), (3, 3)).copy_from(a);
    }
    out
}

/// `B^T (x) I` for a 3x3 `B`.
pub(crate) fn kron_identity_right(b: &Matrix3<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            let bji = b[(j, i)];
            for k in 0..3 {
                out[(3 * i + k, 3 * j + k)] = bji;
            }
        }
    }
    out
}

pub(crate) fn to_dmatrix4(m: &nalgebra::Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}
