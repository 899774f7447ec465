//! Rotation and rigid-transform types plus the representation algebra the
//! solvers are built on.

pub mod algebra;
pub mod quaternion;
pub mod transform;

pub use algebra::{
    cross_matrix, kron, omega_left, omega_right, unvec, vec, vectorize, Representation,
};
pub use quaternion::{canonical_sign, hamilton, PureQuaternion, UnitQuaternion};
pub use transform::{RigidTransform, Rotation3};

/// Hamilton product of two unit quaternions.
pub fn quat_mul(p: &UnitQuaternion, q: &UnitQuaternion) -> UnitQuaternion {
    p.mul(q)
}

pub fn rotation_to_quat(r: &Rotation3) -> UnitQuaternion {
    r.to_quaternion()
}

pub fn quat_to_rotation(q: &UnitQuaternion) -> Rotation3 {
    Rotation3::from_quaternion(q)
}

pub fn compose(a: &RigidTransform, b: &RigidTransform) -> RigidTransform {
    a.compose(b)
}

pub fn inverse(t: &RigidTransform) -> RigidTransform {
    t.inverse()
}
