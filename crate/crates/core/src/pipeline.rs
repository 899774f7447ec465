//! From recorded poses to calibration results: relative-pair construction,
//! input validation, solver dispatch and error metrics.

use nalgebra::{Vector3, Vector4};

use crate::error::{Error, Result};
use crate::linalg::RightSingular;
use crate::se3::{RigidTransform, Rotation3};
use crate::solvers::formulation::point_translation_system;
use crate::solvers::{
    self, CalibrationResult, MotionPair, PointObservation, Problem, SolveOptions, SolverSpec,
};

/// Minimum angle between two rotation axes for them to count as distinct.
pub const AXIS_SEPARATION_TOL: f64 = 1e-3;

/// Relative rotations smaller than this carry no usable axis.
const MIN_ROTATION_ANGLE: f64 = 1e-6;

/// What the sensor reported for one robot pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensorData {
    /// Full marker pose in the sensor frame.
    Pose(RigidTransform),
    /// Position of the marker origin only.
    Point(Vector3<f64>),
}

/// One robot pose (base to end-effector) with the simultaneous sensor reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub robot_pose: RigidTransform,
    pub sensor: SensorData,
}

impl PoseSample {
    pub fn with_pose(robot_pose: RigidTransform, sensor_pose: RigidTransform) -> Self {
        Self { robot_pose, sensor: SensorData::Pose(sensor_pose) }
    }

    pub fn with_point(robot_pose: RigidTransform, sensor_point: Vector3<f64>) -> Self {
        Self { robot_pose, sensor: SensorData::Point(sensor_point) }
    }

    pub fn sensor_pose(&self) -> Option<&RigidTransform> {
        match &self.sensor {
            SensorData::Pose(p) => Some(p),
            SensorData::Point(_) => None,
        }
    }

    /// Marker origin in the sensor frame, available for both kinds.
    pub fn sensor_point(&self) -> Vector3<f64> {
        match &self.sensor {
            SensorData::Pose(p) => p.translation,
            SensorData::Point(t) => *t,
        }
    }
}

/// Which unknown of `A X = Y B` an AX=XB pair sequence constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelativeForm {
    /// `(A_{i+1}^-1 A_i, B_{i+1}^-1 B_i)`, satisfying `A' X = X B'`.
    SolveX,
    /// `(A_i A_{i+1}^-1, B_i B_{i+1}^-1)`, satisfying `A' Y = Y B'`.
    SolveY,
}

fn full_poses(samples: &[PoseSample]) -> Result<Vec<(RigidTransform, RigidTransform)>> {
    samples
        .iter()
        .enumerate()
        .map(|(i, s)| match s.sensor {
            SensorData::Pose(b) => Ok((s.robot_pose, b)),
            SensorData::Point(_) => Err(Error::InvariantViolation(format!(
                "sample {i} has only a marker point but this solver needs full sensor poses"
            ))),
        })
        .collect()
}

/// Consecutive relative motions; `n` samples give `n - 1` pairs.
pub fn make_relative_pairs(samples: &[PoseSample], form: RelativeForm) -> Result<Vec<MotionPair>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientMeasurements { required: 2, found: samples.len() });
    }
    let poses = full_poses(samples)?;
    Ok(poses
        .windows(2)
        .map(|w| {
            let ((a0, b0), (a1, b1)) = (w[0], w[1]);
            match form {
                RelativeForm::SolveX => MotionPair::new(a1.inverse() * a0, b1.inverse() * b0),
                RelativeForm::SolveY => MotionPair::new(a0 * a1.inverse(), b0 * b1.inverse()),
            }
        })
        .collect())
}

/// Samples used directly as `(A_i, B_i)` for AX=YB.
pub fn absolute_pairs(samples: &[PoseSample]) -> Result<Vec<MotionPair>> {
    Ok(full_poses(samples)?.into_iter().map(|(a, b)| MotionPair::new(a, b)).collect())
}

/// Point observations; full sensor poses contribute their translation.
pub fn observations(samples: &[PoseSample]) -> Vec<PointObservation> {
    samples
        .iter()
        .map(|s| PointObservation { a: s.robot_pose, b_point: s.sensor_point() })
        .collect()
}

/// Angle between the lines spanned by two axes, in `[0, pi/2]`.
fn axis_separation(u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    u.cross(v).norm().atan2(u.dot(v).abs())
}

fn check_axis_diversity(rotations: impl Iterator<Item = Rotation3>) -> Result<()> {
    let mut first: Option<Vector3<f64>> = None;
    for r in rotations {
        let (axis, angle) = r.axis_angle();
        if angle < MIN_ROTATION_ANGLE {
            continue;
        }
        match first {
            None => first = Some(axis),
            Some(f) if axis_separation(&f, &axis) > AXIS_SEPARATION_TOL => return Ok(()),
            Some(_) => {}
        }
    }
    Err(Error::DegenerateMotion(format!(
        "no two robot rotations have axes more than {AXIS_SEPARATION_TOL:e} rad apart"
    )))
}

/// Checks the measurement count against the solver minimum and requires
/// robot motions about at least two distinct axes.
///
/// For AX=XB the pairs are already relative motions; for AX=YB the
/// relative rotations between consecutive robot poses are checked.
pub fn validate(pairs: &[MotionPair], spec: &SolverSpec) -> Result<()> {
    let required = spec.min_measurements();
    if pairs.len() < required {
        return Err(Error::InsufficientMeasurements { required, found: pairs.len() });
    }
    match spec.problem() {
        Problem::Axxb => check_axis_diversity(pairs.iter().map(|p| p.a.rotation)),
        Problem::Axyb => check_axis_diversity(
            pairs.windows(2).map(|w| w[0].a.rotation.inverse().compose(&w[1].a.rotation)),
        ),
    }
}

/// Count check plus full column rank of the point-based coefficient matrix.
pub fn validate_points(observations: &[PointObservation], spec: &SolverSpec, opts: &SolveOptions) -> Result<()> {
    let required = spec.min_measurements();
    if observations.len() < required {
        return Err(Error::InsufficientMeasurements { required, found: observations.len() });
    }
    let (m, _) = point_translation_system(observations);
    let rs = RightSingular::new(&m)?;
    let rank = m.ncols() - rs.nullity(opts.rank_tol);
    if rank < m.ncols() {
        return Err(Error::DegenerateMotion(format!(
            "point coefficient matrix has rank {rank} < {}",
            m.ncols()
        )));
    }
    Ok(())
}

/// Validates and solves.
///
/// AX=YB uses the samples directly. AX=XB solves `X` from
/// [`RelativeForm::SolveX`] pairs and, independently, `Y` from
/// [`RelativeForm::SolveY`] pairs; diagnostics refer to the `X` solve.
pub fn solve(samples: &[PoseSample], spec: &SolverSpec, opts: &SolveOptions) -> Result<CalibrationResult> {
    if spec.uses_points() {
        let obs = observations(samples);
        validate_points(&obs, spec, opts)?;
        return solvers::solve_points(spec, &obs, opts);
    }
    match spec.problem() {
        Problem::Axyb => {
            let pairs = absolute_pairs(samples)?;
            validate(&pairs, spec)?;
            solvers::solve(spec, &pairs, opts)
        }
        Problem::Axxb => {
            let x_pairs = make_relative_pairs(samples, RelativeForm::SolveX)?;
            validate(&x_pairs, spec)?;
            let y_pairs = make_relative_pairs(samples, RelativeForm::SolveY)?;
            validate(&y_pairs, spec)?;
            let rx = solvers::solve(spec, &x_pairs, opts)?;
            let ry = solvers::solve(spec, &y_pairs, opts)?;
            Ok(CalibrationResult { x: rx.x, y: ry.x, diagnostics: rx.diagnostics })
        }
    }
}

/// Geodesic distance `angle(R_gt^T R_est)` in radians.
pub fn rotation_error(est: &Rotation3, gt: &Rotation3) -> f64 {
    let q: Vector4<f64> = gt.inverse().compose(est).to_quaternion().to_vector();
    let v = Vector3::new(q[1], q[2], q[3]).norm();
    2.0 * v.atan2(q[0].abs())
}

/// Euclidean distance in meters.
pub fn translation_error(est: &Vector3<f64>, gt: &Vector3<f64>) -> f64 {
    (est - gt).norm()
}

/// Mean of `|t(A_i X) - t(Y B_i)|^2` over the samples, in square meters.
/// Point samples use the observed marker position for `t(Y B_i)`.
pub fn reprojection_error(samples: &[PoseSample], x: Option<&RigidTransform>, y: Option<&RigidTransform>) -> Result<f64> {
    let x = x.ok_or(Error::MissingEstimate("x"))?;
    let y = y.ok_or(Error::MissingEstimate("y"))?;
    if samples.is_empty() {
        return Err(Error::InsufficientMeasurements { required: 1, found: 0 });
    }
    let total: f64 = samples
        .iter()
        .map(|s| {
            let robot = s.robot_pose.apply(&x.translation);
            let sensor = y.apply(&s.sensor_point());
            (robot - sensor).norm_squared()
        })
        .sum();
    Ok(total / samples.len() as f64)
}

/// Errors of one estimate against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Radians.
    pub rotation_error: f64,
    /// Meters.
    pub translation_error: f64,
    /// Square meters; present when both `X` and `Y` were estimated.
    pub reprojection_error: Option<f64>,
}

impl ErrorReport {
    /// Compares `Y` when it was estimated and `X` otherwise. `samples` are
    /// used for the reprojection error.
    pub fn evaluate(
        result: &CalibrationResult,
        x_gt: &RigidTransform,
        y_gt: &RigidTransform,
        samples: &[PoseSample],
    ) -> Result<Self> {
        let (est, gt) = match (&result.y, &result.x) {
            (Some(y), _) => (y, y_gt),
            (None, Some(x)) => (x, x_gt),
            (None, None) => return Err(Error::MissingEstimate("x and y")),
        };
        let reprojection_error = match (&result.x, &result.y) {
            (Some(x), Some(y)) => Some(reprojection_error(samples, Some(x), Some(y))?),
            _ => None,
        };
        Ok(Self {
            rotation_error: rotation_error(&est.rotation, &gt.rotation),
            translation_error: translation_error(&est.translation, &gt.translation),
            reprojection_error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(axis: [f64; 3], angle: f64) -> Rotation3 {
        Rotation3::from_axis_angle(&Vector3::from(axis), angle)
    }

    #[test]
    fn identical_samples_give_identity_pair() {
        let a = RigidTransform::from_parts(rot([0.0, 1.0, 0.0], 0.4), Vector3::new(1.0, 2.0, 3.0));
        let b = RigidTransform::from_parts(rot([1.0, 0.0, 0.0], -0.2), Vector3::new(0.0, 0.5, 0.1));
        let s = PoseSample::with_pose(a, b);
        for form in [RelativeForm::SolveX, RelativeForm::SolveY] {
            let pairs = make_relative_pairs(&[s, s], form).unwrap();
            assert_eq!(pairs.len(), 1);
            assert!((pairs[0].a.rotation.matrix() - nalgebra::Matrix3::identity()).norm() < 1e-15);
            assert!(pairs[0].a.translation.norm() < 1e-15);
            assert!(pairs[0].b.translation.norm() < 1e-15);
        }
    }

    #[test]
    fn point_samples_rejected_for_relative_pairs() {
        let s = PoseSample::with_point(RigidTransform::identity(), Vector3::new(0.0, 0.0, 1.0));
        assert!(matches!(
            make_relative_pairs(&[s, s, s], RelativeForm::SolveX),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn rotation_error_of_five_degrees() {
        let gt = rot([0.3, -0.2, 0.9], 1.1);
        let est = gt.compose(&rot([1.0, 2.0, -0.5], 5f64.to_radians()));
        assert!((rotation_error(&est, &gt) - 5f64.to_radians()).abs() < 1e-12);
        assert_eq!(rotation_error(&gt, &gt), 0.0);
    }

    #[test]
    fn reprojection_offset_squared() {
        let d = Vector3::new(0.1, -0.2, 0.3);
        let samples: Vec<PoseSample> = (0..4)
            .map(|i| {
                let t = Vector3::new(i as f64, 0.5, -1.0);
                let a = RigidTransform::from_parts(Rotation3::identity(), t);
                PoseSample::with_pose(a, a)
            })
            .collect();
        let x = RigidTransform::identity();
        let y = RigidTransform::from_parts(Rotation3::identity(), d);
        let e = reprojection_error(&samples, Some(&x), Some(&y)).unwrap();
        assert!((e - d.norm_squared()).abs() < 1e-15);
        assert!(matches!(reprojection_error(&samples, Some(&x), None), Err(Error::MissingEstimate(_))));
    }
}
