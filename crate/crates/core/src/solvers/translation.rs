//! Solvers that only use the translation equation.

use nalgebra::Vector3;

use super::formulation::{
    aligned_quaternions, kronecker_translation_system, point_translation_system,
    quaternion_translation_system, reduced_translation_system,
};
use super::rotation::require_pairs;
use super::simultaneous::nullity_two_fit;
use super::types::{CalibrationResult, Diagnostics, MotionPair, PointObservation, Problem};
use super::SolveOptions;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::recovery::{recover_translations, reorthonormalize, BlockLayout};
use crate::se3::algebra::unvec3;
use crate::se3::{Representation, RigidTransform};

/// Translation equation alone.
///
/// The quaternion path takes the two-dimensional null space of
/// `[Q+(t'_A)Q+(a)  Q+(a)  -Q-(b)Q-(t'_B)  -Q-(b)]`; the kronecker path
/// (AX=XB only) solves `(t_B^T (x) I) vec R_X + (I - R_A) t_X = t_A`, then
/// projects `R_X` onto SO(3) and recomputes `t_X`.
pub fn solve_translation_only(
    pairs: &[MotionPair],
    problem: Problem,
    repr: Representation,
    opts: &SolveOptions,
) -> Result<CalibrationResult> {
    require_pairs(pairs, 3)?;
    match (repr, problem) {
        (Representation::Quaternion, _) => {
            if problem == Problem::Axyb {
                require_pairs(pairs, 4)?;
            }
            let quats = aligned_quaternions(pairs, problem);
            let system = quaternion_translation_system(pairs, &quats, problem);
            let y_layout = match problem {
                Problem::Axxb => None,
                Problem::Axyb => Some(BlockLayout { q: 8, w: 12 }),
            };
            let fit = nullity_two_fit(&system, BlockLayout { q: 0, w: 4 }, y_layout, opts)?;
            Ok(CalibrationResult { x: Some(fit.primary), y: fit.secondary, diagnostics: fit.diagnostics })
        }
        (Representation::Kronecker, Problem::Axxb) => {
            require_pairs(pairs, 4)?;
            let (m, rhs) = kronecker_translation_system(pairs);
            let ls = least_squares(&m, &rhs, opts.rank_tol)?;
            let rx = reorthonormalize(&unvec3(&ls.x.as_slice()[..9]))?;
            let fit = recover_translations(pairs, &rx, Problem::Axxb, opts.rank_tol)?;
            Ok(CalibrationResult {
                x: Some(RigidTransform::from_parts(rx, fit.t_x)),
                y: None,
                diagnostics: Diagnostics {
                    singular_values: ls.singular_values,
                    residual: ls.residual,
                    nullspace_dim: 0,
                    incidental_t_x: None,
                },
            })
        }
        (Representation::Kronecker, Problem::Axyb) => {
            let obs: Vec<PointObservation> = pairs.iter().map(PointObservation::from).collect();
            solve_y_kron_t_prime(&obs, opts)
        }
        (Representation::AxisAngle, _) => Err(Error::UnsupportedRepresentation(
            "the translation equation has no axis-angle form".into(),
        )),
    }
}

/// Reduced quaternion translation equation.
///
/// AX=YB: `[Q-(t'_B) - Q+(t'_A)  I  -Q-(b)^T Q+(a)]` over
/// `[y; Q-(y)t'_Y; Q-(x)t'_X]`, so `x` is never solved for and only `Y` is
/// returned. AX=XB: `[Q-(t'_B) - Q+(t'_A)  I - Q-(b)^T Q+(a)]` over
/// `[x; Q-(x)t'_X]`.
pub fn solve_quat_t_prime(pairs: &[MotionPair], problem: Problem, opts: &SolveOptions) -> Result<CalibrationResult> {
    require_pairs(pairs, 3)?;
    let quats = aligned_quaternions(pairs, problem);
    let system = reduced_translation_system(pairs, &quats, problem);
    let fit = nullity_two_fit(&system, BlockLayout { q: 0, w: 4 }, None, opts)?;
    let (x, y) = match problem {
        Problem::Axxb => (Some(fit.primary), None),
        Problem::Axyb => (None, Some(fit.primary)),
    };
    Ok(CalibrationResult { x, y, diagnostics: fit.diagnostics })
}

/// AX=YB from the reduced quaternion translation equation; returns `Y` only.
pub fn solve_y_quat_t_prime(pairs: &[MotionPair], opts: &SolveOptions) -> Result<CalibrationResult> {
    solve_quat_t_prime(pairs, Problem::Axyb, opts)
}

/// AX=YB from sensor-side points alone:
/// `[t_B^T (x) I   I   -R_A] [vec R_Y; t_Y; t_X] = t_A`.
///
/// `R_Y` is projected onto SO(3) and both translations are recomputed with
/// it fixed. The sensor-side orientation never enters.
pub fn solve_y_kron_t_prime(observations: &[PointObservation], opts: &SolveOptions) -> Result<CalibrationResult> {
    if observations.len() < 5 {
        return Err(Error::InsufficientMeasurements { required: 5, found: observations.len() });
    }
    let (m, rhs) = point_translation_system(observations);
    let ls = least_squares(&m, &rhs, opts.rank_tol)?;
    let ry = reorthonormalize(&unvec3(&ls.x.as_slice()[..9]))?;
    let fit = recover_translations(observations, &ry, Problem::Axyb, opts.rank_tol)?;
    let t_x: Vector3<f64> = fit.t_x;
    Ok(CalibrationResult {
        x: None,
        y: Some(RigidTransform::from_parts(ry, fit.t_y)),
        diagnostics: Diagnostics {
            singular_values: ls.singular_values,
            residual: ls.residual,
            nullspace_dim: 0,
            incidental_t_x: Some([t_x[0], t_x[1], t_x[2]]),
        },
    })
}
