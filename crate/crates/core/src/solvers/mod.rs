//! Closed-form calibration solvers for AX=XB and AX=YB.
//!
//! Every solver is selected by a [`SolverSpec`] (problem, representation,
//! equation form). [`solve`] dispatches on it and, for rotation-only forms,
//! completes the estimate with a translation least-squares step.

pub mod formulation;
mod rotation;
mod simultaneous;
mod translation;
mod types;

pub use rotation::{product_sum, solve_rotation_direct, solve_rotation_procrustes, solve_rotation_svd_sum};
pub use simultaneous::solve_simultaneous;
pub use translation::{solve_quat_t_prime, solve_translation_only, solve_y_kron_t_prime, solve_y_quat_t_prime};
pub use types::{
    CalibrationResult, Diagnostics, Form, MotionPair, PointObservation, Problem, RotationEstimate,
    SolverSpec, TranslationData,
};

use crate::error::{Error, Result};
use crate::recovery::recover_translations;
use crate::se3::RigidTransform;

/// Numerical settings shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// A singular value `s` counts as zero when `s / s_max < rank_tol`.
    pub rank_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { rank_tol: 1e-8 }
    }
}

/// Rotation-only estimate for the rotation forms.
pub fn solve_rotation(spec: &SolverSpec, pairs: &[MotionPair], opts: &SolveOptions) -> Result<RotationEstimate> {
    let (p, r) = (spec.problem(), spec.representation());
    match spec.form() {
        Form::RotationDirect => solve_rotation_direct(pairs, p, r, opts),
        Form::RotationSvdSum => solve_rotation_svd_sum(pairs, p, r, opts),
        Form::RotationProcrustes => solve_rotation_procrustes(pairs, p, r, opts),
        other => Err(Error::InfeasibleSpec(format!("{} is not a rotation-only form", other.as_str()))),
    }
}

/// Full estimate for any feasible spec. Rotation-only forms are followed by
/// the translation least squares with the estimated rotation fixed.
pub fn solve(spec: &SolverSpec, pairs: &[MotionPair], opts: &SolveOptions) -> Result<CalibrationResult> {
    if pairs.is_empty() {
        return Err(Error::InsufficientMeasurements { required: spec.min_measurements(), found: 0 });
    }
    let (p, r) = (spec.problem(), spec.representation());
    match spec.form() {
        Form::RotationDirect | Form::RotationSvdSum | Form::RotationProcrustes => {
            let est = solve_rotation(spec, pairs, opts)?;
            let ry = est.y.unwrap_or(est.x);
            let fit = recover_translations(pairs, &ry, p, opts.rank_tol)?;
            let x = RigidTransform::from_parts(est.x, fit.t_x);
            let y = match p {
                Problem::Axxb => None,
                Problem::Axyb => Some(RigidTransform::from_parts(ry, fit.t_y)),
            };
            Ok(CalibrationResult { x: Some(x), y, diagnostics: est.diagnostics })
        }
        Form::Simultaneous => solve_simultaneous(pairs, p, r, opts),
        Form::TranslationOnly => solve_translation_only(pairs, p, r, opts),
        Form::TranslationOnlyReduced => solve_quat_t_prime(pairs, p, opts),
        Form::TranslationOnlyPoint => {
            let obs: Vec<PointObservation> = pairs.iter().map(PointObservation::from).collect();
            solve_y_kron_t_prime(&obs, opts)
        }
    }
}

/// Point-only estimate; only specs that never read the sensor orientation
/// accept this input.
pub fn solve_points(spec: &SolverSpec, observations: &[PointObservation], opts: &SolveOptions) -> Result<CalibrationResult> {
    if !spec.uses_points() {
        return Err(Error::InfeasibleSpec(format!("{} needs full sensor poses", spec.name())));
    }
    solve_y_kron_t_prime(observations, opts)
}
