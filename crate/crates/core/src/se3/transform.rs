use nalgebra::{Matrix3, Matrix4, Vector3};

use super::quaternion::UnitQuaternion;
use crate::error::{Error, Result};

const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Proper rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: Matrix3<f64>,
}

impl Rotation3 {
    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    /// Checks `m^T m = I` and `det m = +1` within `1e-10`.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::InvariantViolation("rotation has non-finite entries".into()));
        }
        let ortho = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if ortho > ORTHONORMALITY_TOL || (det - 1.0).abs() > ORTHONORMALITY_TOL {
            return Err(Error::InvariantViolation(format!(
                "not a rotation: |R^T R - I|_max = {ortho:.3e}, det = {det:.12}"
            )));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self { m }
    }

    pub fn from_quaternion(q: &UnitQuaternion) -> Self {
        Self { m: q.to_matrix() }
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        Self::from_quaternion(&UnitQuaternion::from_axis_angle(axis, angle))
    }

    /// Exponential map of a rotation vector.
    pub fn from_scaled_axis(w: &Vector3<f64>) -> Self {
        Self::from_axis_angle(w, w.norm())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn to_quaternion(&self) -> UnitQuaternion {
        UnitQuaternion::from_matrix(&self.m)
    }

    /// Rotation axis and angle in `[0, pi]`. The identity maps to the x axis
    /// with angle zero.
    pub fn axis_angle(&self) -> (Vector3<f64>, f64) {
        let q = self.to_quaternion();
        let s = q.v().norm();
        let angle = 2.0 * s.atan2(q.w());
        if s == 0.0 {
            return (Vector3::x(), 0.0);
        }
        let mut axis = q.v() / s;
        if std::f64::consts::PI - angle < 1e-6 {
            // Near a half turn the vector part is better recovered from the
            // dominant column of R + I = 2 e e^T.
            let rp = self.m + Matrix3::identity();
            let col = (0..3)
                .map(|j| rp.column(j).into_owned())
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap_or_else(Vector3::x);
            let e = col.normalize();
            axis = if e.dot(&axis) < 0.0 { -e } else { e };
        }
        (axis, angle)
    }

    /// Logarithm map: axis times angle.
    pub fn log(&self) -> Vector3<f64> {
        let (axis, angle) = self.axis_angle();
        axis * angle
    }

    pub fn angle(&self) -> f64 {
        self.to_quaternion().angle()
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self { m: self.m * rhs.m }
    }

    pub fn transpose(&self) -> Self {
        self.inverse()
    }
}

impl std::ops::Mul for Rotation3 {
    type Output = Rotation3;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl std::ops::Mul<Vector3<f64>> for Rotation3 {
    type Output = Vector3<f64>;

    fn mul(self, rhs: Vector3<f64>) -> Vector3<f64> {
        self.m * rhs
    }
}

/// Rigid transformation: rotation followed by translation (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Rotation3,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn new(rotation: Rotation3, translation: Vector3<f64>) -> Result<Self> {
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvariantViolation("translation is not finite".into()));
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self { rotation: Rotation3::identity(), translation: Vector3::zeros() }
    }

    pub fn from_parts(rotation: Rotation3, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            rotation: self.rotation.compose(&rhs.rotation),
            translation: self.rotation.matrix() * rhs.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.inverse();
        Self { rotation: rt, translation: -(rt.matrix() * self.translation) }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.matrix() * p + self.translation
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut h = Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        h
    }
}

impl std::ops::Mul for RigidTransform {
    type Output = RigidTransform;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}
