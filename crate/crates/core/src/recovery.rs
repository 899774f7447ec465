//! Shared numerical back-ends: two-dimensional null-space recovery for the
//! quaternion translation systems, projection onto SO(3), and the
//! translation least squares used once rotations are known.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, svd3};
use crate::se3::quaternion::right_matrix;
use crate::se3::{Rotation3, UnitQuaternion};
use crate::solvers::{Problem, TranslationData};

/// Offsets of the rotation quaternion block and its paired translation block
/// `w = Q-(q) t'` inside a null-space vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub q: usize,
    pub w: usize,
}

/// Recovered unit quaternion and its translation block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullspaceSolution {
    pub q: UnitQuaternion,
    pub w: Vector4<f64>,
    /// Mixing coefficients applied to `u1`, `u2`.
    pub lambda: (f64, f64),
}

fn block(u: &DVector<f64>, at: usize) -> Vector4<f64> {
    Vector4::new(u[at], u[at + 1], u[at + 2], u[at + 3])
}

/// Combines two null-space basis vectors `v = l1 u1 + l2 u2` such that the
/// quaternion block has unit norm and is orthogonal to the translation
/// block (the scalar part of the embedded translation vanishes).
///
/// The orthogonality condition is a homogeneous quadratic in `(l1, l2)`;
/// of its two real root directions the one carrying more weight in the
/// quaternion block is used.
pub fn recover_from_nullspace(
    u1: &DVector<f64>,
    u2: &DVector<f64>,
    layout: BlockLayout,
) -> Result<NullspaceSolution> {
    let len = u1.len();
    if u2.len() != len || layout.q + 4 > len || layout.w + 4 > len {
        return Err(Error::DimensionMismatch(format!(
            "basis vectors of length {len}/{} do not hold blocks at {} and {}",
            u2.len(),
            layout.q,
            layout.w
        )));
    }
    let (q1, w1) = (block(u1, layout.q), block(u1, layout.w));
    let (q2, w2) = (block(u2, layout.q), block(u2, layout.w));

    // a l1^2 + b l1 l2 + c l2^2 = 0
    let a = q1.dot(&w1);
    let b = q1.dot(&w2) + q2.dot(&w1);
    let c = q2.dot(&w2);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Err(Error::NullspaceAnomaly(
            "orthogonality constraint vanishes on the whole null space".into(),
        ));
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-12 {
            disc = 0.0;
        } else {
            return Err(Error::NoRealRoot(disc));
        }
    }
    let h = -0.5 * (b + b.signum() * disc.sqrt());
    // Root directions (l1, l2) written without dividing by a or c.
    let candidates = [(h, a), (c, h)];

    let mut best: Option<(f64, f64, f64)> = None;
    for (l1, l2) in candidates {
        let n = l1.hypot(l2);
        if n == 0.0 || !n.is_finite() {
            continue;
        }
        let (l1, l2) = (l1 / n, l2 / n);
        let weight = (q1 * l1 + q2 * l2).norm();
        if best.is_none_or(|(_, _, w)| weight > w) {
            best = Some((l1, l2, weight));
        }
    }
    let (l1, l2, weight) = best.ok_or_else(|| {
        Error::NullspaceAnomaly("no admissible root direction for the null-space combination".into())
    })?;
    if weight < 1e-12 {
        return Err(Error::NullspaceAnomaly(
            "quaternion block vanishes for every admissible combination".into(),
        ));
    }
    let (mut l1, mut l2) = (l1 / weight, l2 / weight);
    let mut q = q1 * l1 + q2 * l2;
    let mut w = w1 * l1 + w2 * l2;
    if q[0] < 0.0 {
        q = -q;
        w = -w;
        l1 = -l1;
        l2 = -l2;
    }
    let unit = UnitQuaternion::from_vector(&q)
        .ok_or_else(|| Error::NullspaceAnomaly("degenerate quaternion block".into()))?;
    // from_vector may still flip the sign when q[0] == 0
    if unit.to_vector().dot(&q) < 0.0 {
        w = -w;
        l1 = -l1;
        l2 = -l2;
    }
    Ok(NullspaceSolution { q: unit, w, lambda: (l1, l2) })
}

/// Translation `t` from `w = Q-(q) t'`, i.e. the vector part of `Q-(q)^T w`.
pub fn extract_translation(q: &UnitQuaternion, w: &Vector4<f64>) -> Result<Vector3<f64>> {
    let t = right_matrix(&q.to_vector()).transpose() * w;
    if t[0].abs() >= 1e-8 * w.norm().max(1.0) {
        return Err(Error::NullspaceAnomaly(format!(
            "recovered translation has scalar part {:.3e}",
            t[0]
        )));
    }
    Ok(Vector3::new(t[1], t[2], t[3]))
}

/// Nearest rotation in Frobenius norm, `U diag(1, 1, det(U V^T)) V^T`.
pub fn reorthonormalize(m: &Matrix3<f64>) -> Result<Rotation3> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularInput(f64::NAN));
    }
    let (u, s, v) = svd3(m)?;
    let smin = s.min();
    if smin < 1e-12 {
        return Err(Error::SingularInput(smin));
    }
    let v_t = v.transpose();
    let d = (u * v_t).determinant().signum();
    let r = u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t;
    Ok(Rotation3::from_matrix_unchecked(r))
}

/// Least-squares translations with known rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationFit {
    pub t_x: Vector3<f64>,
    pub t_y: Vector3<f64>,
    pub residual: f64,
    pub singular_values: Vec<f64>,
}

/// Solves `[R_A  -I] [t_X; t_Y] = R_Y t_B - t_A` (AX=YB) or
/// `(R_A - I) t_X = R_X t_B - t_A` (AX=XB, where `rotation` is `R_X`).
pub fn recover_translations<T: TranslationData>(
    data: &[T],
    rotation: &Rotation3,
    problem: Problem,
    rank_tol: f64,
) -> Result<TranslationFit> {
    let unknowns = match problem {
        Problem::Axxb => 3,
        Problem::Axyb => 6,
    };
    let rows = 3 * data.len();
    if rows < unknowns {
        return Err(Error::DegenerateMotion(format!(
            "{} measurement(s) give {rows} equations for {unknowns} unknowns",
            data.len()
        )));
    }
    let r = rotation.matrix();
    let mut m = DMatrix::zeros(rows, unknowns);
    let mut rhs = DVector::zeros(rows);
    for (i, d) in data.iter().enumerate() {
        let ra = d.rot_a();
        match problem {
            Problem::Axxb => {
                m.view_mut((3 * i, 0), (3, 3)).copy_from(&(ra - Matrix3::identity()));
            }
            Problem::Axyb => {
                m.view_mut((3 * i, 0), (3, 3)).copy_from(ra);
                m.view_mut((3 * i, 3), (3, 3)).copy_from(&(-Matrix3::identity()));
            }
        }
        rhs.rows_mut(3 * i, 3).copy_from(&(r * d.t_b() - d.t_a()));
    }
    let ls = least_squares(&m, &rhs, rank_tol)?;
    let t_x = Vector3::new(ls.x[0], ls.x[1], ls.x[2]);
    let t_y = match problem {
        Problem::Axxb => t_x,
        Problem::Axyb => Vector3::new(ls.x[3], ls.x[4], ls.x[5]),
    };
    Ok(TranslationFit { t_x, t_y, residual: ls.residual, singular_values: ls.singular_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::{PureQuaternion, RigidTransform};
    use crate::solvers::MotionPair;

    #[test]
    fn extract_identity_quaternion() {
        let t = extract_translation(&UnitQuaternion::identity(), &Vector4::new(0.0, 1.0, 2.0, 3.0))
            .unwrap();
        assert_eq!(t, Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn extract_round_trip() {
        let q = UnitQuaternion::new(0.4, -0.3, 0.8, 0.1).unwrap();
        let t = Vector3::new(0.25, -1.5, 0.75);
        let w = q.right_matrix() * PureQuaternion::new(t).to_vector();
        assert!((extract_translation(&q, &w).unwrap() - t).norm() < 1e-12);
    }

    #[test]
    fn extract_rejects_scalar_residual() {
        let q = UnitQuaternion::new(0.4, -0.3, 0.8, 0.1).unwrap();
        let w = q.right_matrix() * Vector4::new(0.5, 1.0, 0.0, 0.0);
        assert!(matches!(extract_translation(&q, &w), Err(Error::NullspaceAnomaly(_))));
    }

    #[test]
    fn reorthonormalize_fixed_points() {
        let r = Rotation3::from_axis_angle(&Vector3::new(1.0, -2.0, 0.5), 0.7);
        let same = reorthonormalize(r.matrix()).unwrap();
        assert!((same.matrix() - r.matrix()).amax() < 1e-12);
        let scaled = reorthonormalize(&(r.matrix() * 2.0)).unwrap();
        assert!((scaled.matrix() - r.matrix()).amax() < 1e-12);
        assert!(matches!(reorthonormalize(&Matrix3::zeros()), Err(Error::SingularInput(_))));
    }

    #[test]
    fn reorthonormalize_small_perturbation() {
        let r = Rotation3::from_axis_angle(&Vector3::new(0.2, 0.3, -1.0), 2.1);
        let e = Matrix3::new(0.3, -0.1, 0.2, 0.5, 0.1, -0.4, 0.0, 0.2, 0.6);
        let e = e * (1e-3 / e.norm());
        let out = reorthonormalize(&(r.matrix() + e)).unwrap();
        assert!(Rotation3::from_matrix(*out.matrix()).is_ok());
        let err = Rotation3::from_matrix_unchecked(r.matrix().transpose() * out.matrix()).angle();
        assert!(err < 2e-3, "{err}");
    }

    #[test]
    fn pre_separated_blocks() {
        // u1 = (q, w)/|(q, w)|, u2 = (0, q): the quadratic has a root at
        // infinity in l1/l2, picked up by the homogeneous formulation.
        let q = UnitQuaternion::new(0.6, 0.2, -0.5, 0.3).unwrap();
        let t = Vector3::new(0.3, 0.1, -0.8);
        let w = q.right_matrix() * PureQuaternion::new(t).to_vector();
        let mut u1 = DVector::zeros(8);
        u1.rows_mut(0, 4).copy_from(&q.to_vector());
        u1.rows_mut(4, 4).copy_from(&w);
        let n = u1.norm();
        u1 /= n;
        let mut u2 = DVector::zeros(8);
        u2.rows_mut(4, 4).copy_from(&q.to_vector());
        let sol = recover_from_nullspace(&u1, &u2, BlockLayout { q: 0, w: 4 }).unwrap();
        assert!((sol.q.to_vector() - q.to_vector()).norm() < 1e-12);
        assert!((sol.w - w).norm() < 1e-12);
        assert!((sol.lambda.1 / sol.lambda.0).abs() < 1e-12);
    }

    #[test]
    fn separated_blocks_without_constraint_information() {
        let q = UnitQuaternion::new(0.6, 0.2, -0.5, 0.3).unwrap();
        let mut u1 = DVector::zeros(8);
        u1.rows_mut(0, 4).copy_from(&q.to_vector());
        // u2 = (0, w/|w|) with w = Q-(q) t': every coefficient of the
        // constraint vanishes, so the scale of the translation is lost.
        let w = q.right_matrix() * PureQuaternion::new(Vector3::new(0.3, 0.1, -0.8)).to_vector();
        let mut u2 = DVector::zeros(8);
        u2.rows_mut(4, 4).copy_from(&w.normalize());
        let e = recover_from_nullspace(&u1, &u2, BlockLayout { q: 0, w: 4 });
        assert!(matches!(e, Err(Error::NullspaceAnomaly(_))));
    }

    #[test]
    fn translations_identity_scenario() {
        let pairs: Vec<MotionPair> = [0.3, 1.1, 2.0]
            .iter()
            .enumerate()
            .map(|(i, ang)| {
                let axis = [Vector3::x(), Vector3::y(), Vector3::z()][i];
                let a = RigidTransform::from_parts(
                    Rotation3::from_axis_angle(&axis, *ang),
                    Vector3::new(0.1 * i as f64, 0.2, -0.3),
                );
                MotionPair::new(a, a)
            })
            .collect();
        let fit = recover_translations(&pairs, &Rotation3::identity(), Problem::Axyb, 1e-8).unwrap();
        assert!(fit.t_x.norm() < 1e-12 && fit.t_y.norm() < 1e-12);
        let single = recover_translations(&pairs[..1], &Rotation3::identity(), Problem::Axyb, 1e-8);
        assert!(matches!(single, Err(Error::DegenerateMotion(_))));
    }
}
