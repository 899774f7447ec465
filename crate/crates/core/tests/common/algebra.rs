//! Algebraic identities as error functions of raw random inputs, shared by
//! the property tests and the acceptance runner.

use handeye::recovery::reorthonormalize;
use handeye::se3::quaternion::{hamilton, left_matrix, right_matrix};
use handeye::se3::{kron, vec, Rotation3, UnitQuaternion};
use nalgebra::{DMatrix, Matrix3, Matrix4, Vector4};
use proptest::prelude::*;

pub fn quat_strategy() -> impl Strategy<Value = Vector4<f64>> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_map(Vector4::from)
        .prop_filter("away from zero", |q| q.norm() > 0.2)
        .prop_map(|q| q.normalize())
}

pub fn matrix3_strategy() -> impl Strategy<Value = Matrix3<f64>> {
    prop::array::uniform9(-2.0f64..2.0).prop_map(|a| Matrix3::from_column_slice(&a))
}

pub fn rotation_of(q: &Vector4<f64>) -> Rotation3 {
    Rotation3::from_quaternion(&UnitQuaternion::from_vector(q).unwrap())
}

fn dm(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(3, 3, m.as_slice())
}

/// `|Q+(p) q - Q-(q) p| + |Q+(p) q - p q|`.
pub fn commutation(p: &Vector4<f64>, q: &Vector4<f64>) -> f64 {
    let pq = hamilton(p, q);
    (left_matrix(p) * q - right_matrix(q) * p).norm() + (left_matrix(p) * q - pq).norm()
}

/// `|Q+(p) Q-(q) - Q-(q) Q+(p)|`.
pub fn left_right_commute(p: &Vector4<f64>, q: &Vector4<f64>) -> f64 {
    let (l, r) = (left_matrix(p), right_matrix(q));
    (l * r - r * l).norm()
}

/// Deviation of `Q+(q)`, `Q-(q)` from orthogonality.
pub fn orthogonality(q: &Vector4<f64>) -> f64 {
    let i = Matrix4::identity();
    let (l, r) = (left_matrix(q), right_matrix(q));
    (l.transpose() * l - i).norm() + (r.transpose() * r - i).norm()
}

/// `|vec(A X B) - (B^T (x) A) vec X|`.
pub fn vec_kron(a: &Matrix3<f64>, x: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let lhs = vec(&dm(&(a * x * b)));
    let rhs = kron(&dm(&b.transpose()), &dm(a)) * vec(&dm(x));
    (lhs - rhs).norm()
}

/// `|f(f(M)) - f(M)|` for the nearest-rotation projection `f`. `None` if
/// `M` is too close to singular.
pub fn reorthonormalize_idempotence(m: &Matrix3<f64>) -> Option<f64> {
    let r = reorthonormalize(m).ok()?;
    let rr = reorthonormalize(r.matrix()).ok()?;
    Some((rr.matrix() - r.matrix()).norm())
}

/// `|f(R S) - R|` with `S = L L^T + I/2` symmetric positive definite.
pub fn polar_factor(q: &Vector4<f64>, l: &Matrix3<f64>) -> f64 {
    let r = rotation_of(q);
    let s = l * l.transpose() + Matrix3::identity() * 0.5;
    let f = reorthonormalize(&(r.matrix() * s)).unwrap();
    (f.matrix() - r.matrix()).norm()
}
