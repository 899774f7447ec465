//! Builders for the stacked linear systems behind every solver.
//!
//! Unknown layouts (quaternion blocks are 4-vectors, `w_* = Q-(q_*) t'_*`):
//!
//! | system                        | AX=YB                            | AX=XB            |
//! |-------------------------------|----------------------------------|------------------|
//! | rotation (quaternion)         | `[x; y]`                         | `[x]`            |
//! | rotation (kronecker)          | `[vec R_X; vec R_Y]`             | `[vec R_X]`      |
//! | quaternion translation        | `[x; w_X; y; w_Y]`               | `[x; w_X]`       |
//! | reduced quaternion translation| `[y; w_Y; w_X]`                  | `[x; w_X]`       |
//! | kronecker simultaneous        | `[vec R_X; vec R_Y; t_X; t_Y]`   | `[vec R_X; t_X]` |
//! | kronecker translation         | `[vec R_Y; t_Y; t_X]` (points)   | `[vec R_X; t_X]` |
//!
//! Quaternion systems expect sign-consistent quaternion pairs, see
//! [`aligned_quaternions`].

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3, Vector4};

use super::types::{MotionPair, Problem, TranslationData};
use crate::se3::algebra::{kron_identity_left, kron_identity_right, vec3};
use crate::se3::quaternion::{left_matrix, right_matrix};
use crate::se3::{PureQuaternion, RigidTransform, UnitQuaternion};

/// Quaternions of `(R_A, R_B)` with signs chosen so that a single sign of
/// the unknowns satisfies `a x = y b` for every pair.
///
/// For AX=XB both scalar parts are equal, so matching their signs suffices.
/// For AX=YB the relative sign of pair `i` against an already fixed pair
/// `j` follows from `sign(a_j . a_i) * sign(b_j . b_i)`; the reference `j`
/// is the one with the best-conditioned dot products.
pub fn aligned_quaternions(pairs: &[MotionPair], problem: Problem) -> Vec<(Vector4<f64>, Vector4<f64>)> {
    let mut out: Vec<(Vector4<f64>, Vector4<f64>)> = pairs
        .iter()
        .map(|p| (p.a.rotation.to_quaternion().to_vector(), p.b.rotation.to_quaternion().to_vector()))
        .collect();
    match problem {
        Problem::Axxb => {
            for (a, b) in out.iter_mut() {
                if a[0] * b[0] < 0.0 {
                    *b = -*b;
                }
            }
        }
        Problem::Axyb => {
            for i in 1..out.len() {
                let (ai, bi) = out[i];
                let (j, _) = (0..i)
                    .map(|j| (j, out[j].0.dot(&ai).abs().min(out[j].1.dot(&bi).abs())))
                    .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
                let (aj, bj) = out[j];
                if aj.dot(&ai) * bj.dot(&bi) < 0.0 {
                    out[i].1 = -bi;
                }
            }
        }
    }
    out
}

fn put4(m: &mut DMatrix<f64>, row: usize, col: usize, block: &Matrix4<f64>) {
    m.view_mut((row, col), (4, 4)).copy_from(block);
}

fn pure(t: &Vector3<f64>) -> Vector4<f64> {
    PureQuaternion::new(*t).to_vector()
}

/// Rotation equation `[Q+(a)  -Q-(b)]` per pair (4 rows).
pub fn quaternion_rotation_system(quats: &[(Vector4<f64>, Vector4<f64>)], problem: Problem) -> DMatrix<f64> {
    let cols = match problem {
        Problem::Axxb => 4,
        Problem::Axyb => 8,
    };
    let mut m = DMatrix::zeros(4 * quats.len(), cols);
    for (i, (a, b)) in quats.iter().enumerate() {
        let (lp, rm) = (left_matrix(a), right_matrix(b));
        match problem {
            Problem::Axxb => put4(&mut m, 4 * i, 0, &(lp - rm)),
            Problem::Axyb => {
                put4(&mut m, 4 * i, 0, &lp);
                put4(&mut m, 4 * i, 4, &(-rm));
            }
        }
    }
    m
}

/// Vector-part rows of the quaternion rotation equation (3 rows per pair).
///
/// For AX=XB this is the homogeneous form of
/// `[a_v + b_v]x x_v = -(a_v - b_v) x_w`.
pub fn axis_angle_rotation_system(quats: &[(Vector4<f64>, Vector4<f64>)], problem: Problem) -> DMatrix<f64> {
    let full = quaternion_rotation_system(quats, problem);
    let mut m = DMatrix::zeros(3 * quats.len(), full.ncols());
    for i in 0..quats.len() {
        m.rows_mut(3 * i, 3).copy_from(&full.rows(4 * i + 1, 3));
    }
    m
}

/// Rotation equation `[I (x) R_A   -(R_B^T (x) I)]` per pair (9 rows).
pub fn kronecker_rotation_system(pairs: &[MotionPair], problem: Problem) -> DMatrix<f64> {
    let cols = match problem {
        Problem::Axxb => 9,
        Problem::Axyb => 18,
    };
    let mut m = DMatrix::zeros(9 * pairs.len(), cols);
    for (i, p) in pairs.iter().enumerate() {
        let lp = kron_identity_left(p.a.rotation.matrix());
        let rm = kron_identity_right(p.b.rotation.matrix());
        match problem {
            Problem::Axxb => m.view_mut((9 * i, 0), (9, 9)).copy_from(&(lp - rm)),
            Problem::Axyb => {
                m.view_mut((9 * i, 0), (9, 9)).copy_from(&lp);
                m.view_mut((9 * i, 9), (9, 9)).copy_from(&(-rm));
            }
        }
    }
    m
}

/// Quaternion translation equation per pair (4 rows):
/// `[Q+(t'_A)Q+(a)   Q+(a)   -Q-(b)Q-(t'_B)   -Q-(b)]`.
pub fn quaternion_translation_system(
    pairs: &[MotionPair],
    quats: &[(Vector4<f64>, Vector4<f64>)],
    problem: Problem,
) -> DMatrix<f64> {
    let cols = match problem {
        Problem::Axxb => 8,
        Problem::Axyb => 16,
    };
    let mut m = DMatrix::zeros(4 * pairs.len(), cols);
    for (i, (p, (a, b))) in pairs.iter().zip(quats).enumerate() {
        let qa = left_matrix(a);
        let qb = right_matrix(b);
        let ta = left_matrix(&pure(&p.a.translation));
        let tb = right_matrix(&pure(&p.b.translation));
        let c0 = ta * qa;
        let c2 = -(qb * tb);
        match problem {
            Problem::Axxb => {
                put4(&mut m, 4 * i, 0, &(c0 + c2));
                put4(&mut m, 4 * i, 4, &(qa - qb));
            }
            Problem::Axyb => {
                put4(&mut m, 4 * i, 0, &c0);
                put4(&mut m, 4 * i, 4, &qa);
                put4(&mut m, 4 * i, 8, &c2);
                put4(&mut m, 4 * i, 12, &(-qb));
            }
        }
    }
    m
}

/// Reduced quaternion translation equation per pair (4 rows):
/// `[Q-(t'_B) - Q+(t'_A)   I   -Q-(b)^T Q+(a)]`, with the last two blocks
/// merged for AX=XB.
pub fn reduced_translation_system(
    pairs: &[MotionPair],
    quats: &[(Vector4<f64>, Vector4<f64>)],
    problem: Problem,
) -> DMatrix<f64> {
    let cols = match problem {
        Problem::Axxb => 8,
        Problem::Axyb => 12,
    };
    let mut m = DMatrix::zeros(4 * pairs.len(), cols);
    for (i, (p, (a, b))) in pairs.iter().zip(quats).enumerate() {
        let c0 = right_matrix(&pure(&p.b.translation)) - left_matrix(&pure(&p.a.translation));
        let mix = right_matrix(b).transpose() * left_matrix(a);
        put4(&mut m, 4 * i, 0, &c0);
        match problem {
            Problem::Axxb => put4(&mut m, 4 * i, 4, &(Matrix4::identity() - mix)),
            Problem::Axyb => {
                put4(&mut m, 4 * i, 4, &Matrix4::identity());
                put4(&mut m, 4 * i, 8, &(-mix));
            }
        }
    }
    m
}

/// `t_B^T (x) I`, the 3x9 map `vec(R) -> R t_B`.
pub fn point_kron(t_b: &Vector3<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(3, 9);
    for j in 0..3 {
        for k in 0..3 {
            m[(k, 3 * j + k)] = t_b[j];
        }
    }
    m
}

/// Kronecker simultaneous system: rotation rows (9, right-hand side 0) and
/// translation rows (3, right-hand side `t_A`) per pair.
pub fn kronecker_simultaneous_system(pairs: &[MotionPair], problem: Problem) -> (DMatrix<f64>, DVector<f64>) {
    let cols = match problem {
        Problem::Axxb => 12,
        Problem::Axyb => 24,
    };
    let mut m = DMatrix::zeros(12 * pairs.len(), cols);
    let mut rhs = DVector::zeros(12 * pairs.len());
    for (i, p) in pairs.iter().enumerate() {
        let r0 = 12 * i;
        let lp = kron_identity_left(p.a.rotation.matrix());
        let rm = kron_identity_right(p.b.rotation.matrix());
        let ra = p.a.rotation.matrix();
        let tk = point_kron(&p.b.translation);
        match problem {
            Problem::Axxb => {
                m.view_mut((r0, 0), (9, 9)).copy_from(&(lp - rm));
                m.view_mut((r0 + 9, 0), (3, 9)).copy_from(&tk);
                m.view_mut((r0 + 9, 9), (3, 3)).copy_from(&(Matrix3::identity() - ra));
            }
            Problem::Axyb => {
                m.view_mut((r0, 0), (9, 9)).copy_from(&lp);
                m.view_mut((r0, 9), (9, 9)).copy_from(&(-rm));
                m.view_mut((r0 + 9, 9), (3, 9)).copy_from(&tk);
                m.view_mut((r0 + 9, 18), (3, 3)).copy_from(&(-ra));
                m.view_mut((r0 + 9, 21), (3, 3)).copy_from(&Matrix3::identity());
            }
        }
        rhs.rows_mut(r0 + 9, 3).copy_from(&p.a.translation);
    }
    (m, rhs)
}

/// Kronecker translation equation for AX=XB (3 rows per pair):
/// `[t_B^T (x) I   I - R_A] [vec R_X; t_X] = t_A`.
pub fn kronecker_translation_system(pairs: &[MotionPair]) -> (DMatrix<f64>, DVector<f64>) {
    let mut m = DMatrix::zeros(3 * pairs.len(), 12);
    let mut rhs = DVector::zeros(3 * pairs.len());
    for (i, p) in pairs.iter().enumerate() {
        m.view_mut((3 * i, 0), (3, 9)).copy_from(&point_kron(&p.b.translation));
        m.view_mut((3 * i, 9), (3, 3)).copy_from(&(Matrix3::identity() - p.a.rotation.matrix()));
        rhs.rows_mut(3 * i, 3).copy_from(&p.a.translation);
    }
    (m, rhs)
}

/// Point-based system (3 rows per observation):
/// `[t_B^T (x) I   I   -R_A] [vec R_Y; t_Y; t_X] = t_A`.
pub fn point_translation_system<T: TranslationData>(obs: &[T]) -> (DMatrix<f64>, DVector<f64>) {
    let mut m = DMatrix::zeros(3 * obs.len(), 15);
    let mut rhs = DVector::zeros(3 * obs.len());
    for (i, o) in obs.iter().enumerate() {
        m.view_mut((3 * i, 0), (3, 9)).copy_from(&point_kron(&o.t_b()));
        m.view_mut((3 * i, 9), (3, 3)).copy_from(&Matrix3::identity());
        m.view_mut((3 * i, 12), (3, 3)).copy_from(&(-o.rot_a()));
        rhs.rows_mut(3 * i, 3).copy_from(&o.t_a());
    }
    (m, rhs)
}

/// Ground-truth unknown vectors for each layout, for residual checks.
pub mod truth {
    use super::*;

    fn quat(t: &RigidTransform) -> Vector4<f64> {
        t.rotation.to_quaternion().to_vector()
    }

    fn w(t: &RigidTransform) -> Vector4<f64> {
        right_matrix(&quat(t)) * pure(&t.translation)
    }

    fn stack(parts: &[&[f64]]) -> DVector<f64> {
        DVector::from_iterator(parts.iter().map(|p| p.len()).sum(), parts.iter().flat_map(|p| p.iter().copied()))
    }

    pub fn quaternion_rotation(x: &RigidTransform, y: &RigidTransform, problem: Problem) -> DVector<f64> {
        match problem {
            Problem::Axxb => stack(&[quat(x).as_slice()]),
            Problem::Axyb => stack(&[quat(x).as_slice(), quat(y).as_slice()]),
        }
    }

    pub fn kronecker_rotation(x: &RigidTransform, y: &RigidTransform, problem: Problem) -> DVector<f64> {
        let vx = vec3(x.rotation.matrix());
        match problem {
            Problem::Axxb => vx,
            Problem::Axyb => stack(&[vx.as_slice(), vec3(y.rotation.matrix()).as_slice()]),
        }
    }

    pub fn quaternion_translation(x: &RigidTransform, y: &RigidTransform, problem: Problem) -> DVector<f64> {
        match problem {
            Problem::Axxb => stack(&[quat(x).as_slice(), w(x).as_slice()]),
            Problem::Axyb => {
                stack(&[quat(x).as_slice(), w(x).as_slice(), quat(y).as_slice(), w(y).as_slice()])
            }
        }
    }

    pub fn reduced_translation(x: &RigidTransform, y: &RigidTransform, problem: Problem) -> DVector<f64> {
        match problem {
            Problem::Axxb => stack(&[quat(x).as_slice(), w(x).as_slice()]),
            Problem::Axyb => stack(&[quat(y).as_slice(), w(y).as_slice(), w(x).as_slice()]),
        }
    }

    pub fn kronecker_simultaneous(x: &RigidTransform, y: &RigidTransform, problem: Problem) -> DVector<f64> {
        let vx = vec3(x.rotation.matrix());
        match problem {
            Problem::Axxb => stack(&[vx.as_slice(), x.translation.as_slice()]),
            Problem::Axyb => stack(&[
                vx.as_slice(),
                vec3(y.rotation.matrix()).as_slice(),
                x.translation.as_slice(),
                y.translation.as_slice(),
            ]),
        }
    }

    pub fn kronecker_translation(x: &RigidTransform) -> DVector<f64> {
        stack(&[vec3(x.rotation.matrix()).as_slice(), x.translation.as_slice()])
    }

    pub fn point_translation(x: &RigidTransform, y: &RigidTransform) -> DVector<f64> {
        stack(&[vec3(y.rotation.matrix()).as_slice(), y.translation.as_slice(), x.translation.as_slice()])
    }

    /// Quaternion sign of the ground truth matching the aligned pair
    /// quaternions: `+1` if `a x = y b`, `-1` if `a x = -y b`.
    pub fn quaternion_sign(quats: &[(Vector4<f64>, Vector4<f64>)], x: &RigidTransform, y: &RigidTransform) -> f64 {
        let (a, b) = quats[0];
        let ax = crate::se3::hamilton(&a, &quat(x));
        let yb = crate::se3::hamilton(&quat(y), &b);
        if ax.dot(&yb) < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

pub(crate) fn unit_from(v: &[f64]) -> Option<UnitQuaternion> {
    UnitQuaternion::from_vector(&Vector4::new(v[0], v[1], v[2], v[3]))
}
