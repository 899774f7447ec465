use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use super::algebra::cross_matrix;

/// Unit quaternion stored as scalar part `w` and vector part `v`.
///
/// Every constructor returns the canonical representative of the pair
/// `{q, -q}`: `w >= 0`, and for `w == 0` the first nonzero component of `v`
/// is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    w: f64,
    v: Vector3<f64>,
}

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self { w: 1.0, v: Vector3::zeros() }
    }

    /// Normalizes and canonicalizes `(w, x, y, z)`. Returns `None` for a zero
    /// or non-finite input.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        Self::from_vector(&Vector4::new(w, x, y, z))
    }

    /// Builds from a 4-vector in `(w, x, y, z)` order.
    pub fn from_vector(q: &Vector4<f64>) -> Option<Self> {
        let n = q.norm();
        if !n.is_finite() || n == 0.0 {
            return None;
        }
        let q = canonical_sign(q / n);
        Some(Self { w: q[0], v: Vector3::new(q[1], q[2], q[3]) })
    }

    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 || angle == 0.0 {
            return Self::identity();
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let v = axis * (s / n);
        Self::from_vector(&Vector4::new(c, v.x, v.y, v.z)).unwrap_or_else(Self::identity)
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn v(&self) -> Vector3<f64> {
        self.v
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.v.x, self.v.y, self.v.z)
    }

    pub fn conjugate(&self) -> Self {
        Self::from_vector(&Vector4::new(self.w, -self.v.x, -self.v.y, -self.v.z))
            .unwrap_or_else(Self::identity)
    }

    /// Hamilton product, renormalized and canonicalized.
    pub fn mul(&self, rhs: &Self) -> Self {
        let p = hamilton(&self.to_vector(), &rhs.to_vector());
        Self::from_vector(&p).unwrap_or_else(Self::identity)
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        2.0 * self.v.norm().atan2(self.w.abs())
    }

    /// Left multiplication matrix `Q+`: `Q+(p) q = p q`.
    pub fn left_matrix(&self) -> Matrix4<f64> {
        left_matrix(&self.to_vector())
    }

    /// Right multiplication matrix `Q-`: `Q-(q) p = p q`.
    pub fn right_matrix(&self) -> Matrix4<f64> {
        right_matrix(&self.to_vector())
    }

    /// Rotation matrix of this quaternion.
    pub fn to_matrix(&self) -> Matrix3<f64> {
        let (w, x, y, z) = (self.w, self.v.x, self.v.y, self.v.z);
        let (xx, yy, zz) = (x * x, y * y, z * z);
        let (xy, xz, yz) = (x * y, x * z, y * z);
        let (wx, wy, wz) = (w * x, w * y, w * z);
        Matrix3::new(
            1.0 - 2.0 * (yy + zz),
            2.0 * (xy - wz),
            2.0 * (xz + wy),
            2.0 * (xy + wz),
            1.0 - 2.0 * (xx + zz),
            2.0 * (yz - wx),
            2.0 * (xz - wy),
            2.0 * (yz + wx),
            1.0 - 2.0 * (xx + yy),
        )
    }

    /// Quaternion of a rotation matrix (Shepperd's method).
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if trace >= m[(0, 0)] && trace >= m[(1, 1)] && trace >= m[(2, 2)] {
            let s = 2.0 * (1.0 + trace).max(0.0).sqrt();
            Vector4::new(
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).max(0.0).sqrt();
            Vector4::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        } else if m[(1, 1)] >= m[(2, 2)] {
            let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).max(0.0).sqrt();
            Vector4::new(
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        } else {
            let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).max(0.0).sqrt();
            Vector4::new(
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            )
        };
        Self::from_vector(&q).unwrap_or_else(Self::identity)
    }
}

/// Quaternion with identically zero scalar part, used to embed 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQuaternion {
    pub v: Vector3<f64>,
}

impl PureQuaternion {
    pub fn new(v: Vector3<f64>) -> Self {
        Self { v }
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(0.0, self.v.x, self.v.y, self.v.z)
    }

    pub fn left_matrix(&self) -> Matrix4<f64> {
        left_matrix(&self.to_vector())
    }

    pub fn right_matrix(&self) -> Matrix4<f64> {
        right_matrix(&self.to_vector())
    }
}

/// Flips the sign of a 4-vector so that it is the canonical representative.
pub fn canonical_sign(q: Vector4<f64>) -> Vector4<f64> {
    let lead = q.iter().copied().find(|c| *c != 0.0).unwrap_or(0.0);
    if q[0] < 0.0 || (q[0] == 0.0 && lead < 0.0) {
        -q
    } else {
        q
    }
}

/// Raw Hamilton product of two 4-vectors in `(w, x, y, z)` order.
pub fn hamilton(p: &Vector4<f64>, q: &Vector4<f64>) -> Vector4<f64> {
    let (pw, pv) = (p[0], Vector3::new(p[1], p[2], p[3]));
    let (qw, qv) = (q[0], Vector3::new(q[1], q[2], q[3]));
    let w = pw * qw - pv.dot(&qv);
    let v = qv * pw + pv * qw + pv.cross(&qv);
    Vector4::new(w, v.x, v.y, v.z)
}

/// `Q+` of an arbitrary (not necessarily unit) 4-vector.
pub fn left_matrix(q: &Vector4<f64>) -> Matrix4<f64> {
    multiplication_matrix(q, 1.0)
}

/// `Q-` of an arbitrary (not necessarily unit) 4-vector.
pub fn right_matrix(q: &Vector4<f64>) -> Matrix4<f64> {
    multiplication_matrix(q, -1.0)
}

fn multiplication_matrix(q: &Vector4<f64>, sign: f64) -> Matrix4<f64> {
    let w = q[0];
    let v = Vector3::new(q[1], q[2], q[3]);
    let lower = Matrix3::identity() * w + cross_matrix(&v) * sign;
    let mut m = Matrix4::zeros();
    m[(0, 0)] = w;
    for i in 0..3 {
        m[(0, i + 1)] = -v[i];
        m[(i + 1, 0)] = v[i];
        for j in 0..3 {
            m[(i + 1, j + 1)] = lower[(i, j)];
        }
    }
    m
}
