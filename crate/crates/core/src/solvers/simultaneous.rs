//! Rotation and translation equations stacked into one system.

use nalgebra::{DMatrix, DVector, Vector3, Vector4};

use super::formulation::{
    aligned_quaternions, kronecker_simultaneous_system, quaternion_rotation_system,
    quaternion_translation_system,
};
use super::rotation::require_pairs;
use super::types::{CalibrationResult, Diagnostics, MotionPair, Problem};
use super::SolveOptions;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, RightSingular};
use crate::recovery::{extract_translation, recover_from_nullspace, recover_translations, reorthonormalize, BlockLayout};
use crate::se3::algebra::unvec3;
use crate::se3::quaternion::right_matrix;
use crate::se3::{Representation, RigidTransform, Rotation3, UnitQuaternion};

/// Unit quaternion from `q` together with its translation block, keeping
/// both signs consistent with the canonical quaternion sign.
fn normalized_pair(q: Vector4<f64>, w: Vector4<f64>) -> Result<(UnitQuaternion, Vector4<f64>)> {
    let n = q.norm();
    let unit = UnitQuaternion::from_vector(&q)
        .ok_or_else(|| Error::NullspaceAnomaly("quaternion block vanished".into()))?;
    let s = if unit.to_vector().dot(&q) < 0.0 { -1.0 / n } else { 1.0 / n };
    Ok((unit, w * s))
}

fn block(v: &DVector<f64>, at: usize) -> Vector4<f64> {
    Vector4::new(v[at], v[at + 1], v[at + 2], v[at + 3])
}

/// Transforms recovered from the two-dimensional null space of a
/// homogeneous quaternion system.
pub(crate) struct NullspaceFit {
    pub primary: RigidTransform,
    pub secondary: Option<RigidTransform>,
    pub diagnostics: Diagnostics,
}

/// Picks the combination of the two smallest right singular vectors whose
/// `primary` quaternion block is unit and orthogonal to its translation
/// block. The optional `secondary` block pair is read off the same
/// combination.
pub(crate) fn nullity_two_fit(
    system: &DMatrix<f64>,
    primary: BlockLayout,
    secondary: Option<BlockLayout>,
    opts: &SolveOptions,
) -> Result<NullspaceFit> {
    let rs = RightSingular::new(system)?;
    let nullity = rs.nullity(opts.rank_tol);
    if nullity > 2 {
        return Err(Error::DegenerateMotion(format!(
            "translation system has a {nullity}-dimensional null space, 2 expected"
        )));
    }
    let (u1, u2) = (rs.smallest(0), rs.smallest(1));
    let sol = recover_from_nullspace(&u1, &u2, primary)?;
    let (l1, l2) = sol.lambda;
    let v = &u1 * l1 + &u2 * l2;
    let t = extract_translation(&sol.q, &sol.w)?;
    let primary_tf = RigidTransform::from_parts(Rotation3::from_quaternion(&sol.q), t);

    let secondary_tf = match secondary {
        Some(layout) => {
            // Only the primary block pair is constrained to be orthogonal; with
            // noisy data this one keeps a small scalar part, which is dropped.
            let (q, w) = normalized_pair(block(&v, layout.q), block(&v, layout.w))?;
            let t4 = right_matrix(&q.to_vector()).transpose() * w;
            let t = Vector3::new(t4[1], t4[2], t4[3]);
            Some(RigidTransform::from_parts(Rotation3::from_quaternion(&q), t))
        }
        None => None,
    };
    let residual = (system * &v).norm();
    Ok(NullspaceFit {
        primary: primary_tf,
        secondary: secondary_tf,
        diagnostics: Diagnostics {
            singular_values: rs.singular_values,
            residual,
            nullspace_dim: 2,
            incidental_t_x: None,
        },
    })
}

/// Solves rotation and translation together.
///
/// The quaternion path stacks the rotation rows `[Q+(a) 0 -Q-(b) 0]` on top
/// of the quaternion translation rows and recovers the unknowns from the
/// two-dimensional null space; the kronecker path solves the inhomogeneous
/// system by least squares, projects onto SO(3) and recomputes the
/// translations with the projected rotations fixed.
pub fn solve_simultaneous(
    pairs: &[MotionPair],
    problem: Problem,
    repr: Representation,
    opts: &SolveOptions,
) -> Result<CalibrationResult> {
    require_pairs(pairs, 3)?;
    match repr {
        Representation::Quaternion => {
            let quats = aligned_quaternions(pairs, problem);
            let rot = quaternion_rotation_system(&quats, problem);
            let tra = quaternion_translation_system(pairs, &quats, problem);
            let cols = tra.ncols();
            let mut system = DMatrix::zeros(rot.nrows() + tra.nrows(), cols);
            for i in 0..quats.len() {
                // rotation rows act on the quaternion blocks only
                let (r0, t0) = (4 * i, 8 * i);
                match problem {
                    Problem::Axxb => {
                        system.view_mut((t0, 0), (4, 4)).copy_from(&rot.view((r0, 0), (4, 4)));
                    }
                    Problem::Axyb => {
                        system.view_mut((t0, 0), (4, 4)).copy_from(&rot.view((r0, 0), (4, 4)));
                        system.view_mut((t0, 8), (4, 4)).copy_from(&rot.view((r0, 4), (4, 4)));
                    }
                }
                system.view_mut((t0 + 4, 0), (4, cols)).copy_from(&tra.rows(4 * i, 4));
            }
            let (x_layout, y_layout) = match problem {
                Problem::Axxb => (BlockLayout { q: 0, w: 4 }, None),
                Problem::Axyb => (BlockLayout { q: 0, w: 4 }, Some(BlockLayout { q: 8, w: 12 })),
            };
            let fit = nullity_two_fit(&system, x_layout, y_layout, opts)?;
            Ok(CalibrationResult { x: Some(fit.primary), y: fit.secondary, diagnostics: fit.diagnostics })
        }
        Representation::Kronecker => {
            let (m, rhs) = kronecker_simultaneous_system(pairs, problem);
            let ls = least_squares(&m, &rhs, opts.rank_tol)?;
            let v = ls.x.as_slice();
            let (x_rot, y_rot) = match problem {
                Problem::Axxb => (reorthonormalize(&unvec3(&v[..9]))?, None),
                Problem::Axyb => (
                    reorthonormalize(&unvec3(&v[..9]))?,
                    Some(reorthonormalize(&unvec3(&v[9..18]))?),
                ),
            };
            let diagnostics = Diagnostics {
                singular_values: ls.singular_values,
                residual: ls.residual,
                nullspace_dim: 0,
                incidental_t_x: None,
            };
            let (x, y) = match (problem, y_rot) {
                (Problem::Axyb, Some(ry)) => {
                    let fit = recover_translations(pairs, &ry, problem, opts.rank_tol)?;
                    (
                        RigidTransform::from_parts(x_rot, fit.t_x),
                        Some(RigidTransform::from_parts(ry, fit.t_y)),
                    )
                }
                _ => {
                    let fit = recover_translations(pairs, &x_rot, Problem::Axxb, opts.rank_tol)?;
                    (RigidTransform::from_parts(x_rot, fit.t_x), None)
                }
            };
            Ok(CalibrationResult { x: Some(x), y, diagnostics })
        }
        Representation::AxisAngle => Err(Error::UnsupportedRepresentation(
            "no simultaneous axis-angle formulation".into(),
        )),
    }
}
