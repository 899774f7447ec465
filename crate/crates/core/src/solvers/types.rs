use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::{Representation, RigidTransform, Rotation3};

/// One full-pose calibration measurement: robot-side `a`, sensor-side `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionPair {
    pub a: RigidTransform,
    pub b: RigidTransform,
}

impl MotionPair {
    pub fn new(a: RigidTransform, b: RigidTransform) -> Self {
        Self { a, b }
    }
}

/// Measurement where only the position of the calibration point is known
/// in the sensor frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointObservation {
    pub a: RigidTransform,
    pub b_point: Vector3<f64>,
}

impl PointObservation {
    pub fn new(a: RigidTransform, b_point: Vector3<f64>) -> Result<Self> {
        if !b_point.iter().all(|v| v.is_finite()) {
            return Err(Error::InvariantViolation("observed point is not finite".into()));
        }
        Ok(Self { a, b_point })
    }
}

impl From<&MotionPair> for PointObservation {
    fn from(p: &MotionPair) -> Self {
        Self { a: p.a, b_point: p.b.translation }
    }
}

/// Rows of the translation equation `R_A t_X + t_A = R_Y t_B + t_Y`.
pub trait TranslationData {
    fn rot_a(&self) -> &Matrix3<f64>;
    fn t_a(&self) -> Vector3<f64>;
    fn t_b(&self) -> Vector3<f64>;
}

impl TranslationData for MotionPair {
    fn rot_a(&self) -> &Matrix3<f64> {
        self.a.rotation.matrix()
    }
    fn t_a(&self) -> Vector3<f64> {
        self.a.translation
    }
    fn t_b(&self) -> Vector3<f64> {
        self.b.translation
    }
}

impl TranslationData for PointObservation {
    fn rot_a(&self) -> &Matrix3<f64> {
        self.a.rotation.matrix()
    }
    fn t_a(&self) -> Vector3<f64> {
        self.a.translation
    }
    fn t_b(&self) -> Vector3<f64> {
        self.b_point
    }
}

/// Calibration equation type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "AX=XB")]
    Axxb,
    #[serde(rename = "AX=YB")]
    Axyb,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Axxb => "AX=XB",
            Problem::Axyb => "AX=YB",
        })
    }
}

/// Equation form a solver is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// Stacked `[M+(R_A)  -M-(R_B)]` null vector.
    RotationDirect,
    /// Dominant singular pair of `sum M-(R_B)^T M+(R_A)`.
    RotationSvdSum,
    /// Orthogonal Procrustes on vectorized rotations.
    RotationProcrustes,
    /// Rotation and translation equations stacked into one system.
    Simultaneous,
    /// Translation equation alone over all unknowns.
    TranslationOnly,
    /// Quaternion translation equation reduced to the unknowns of `Y`.
    TranslationOnlyReduced,
    /// Kronecker translation equation that only needs sensor-side points.
    TranslationOnlyPoint,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::RotationDirect => "rotation_direct",
            Form::RotationSvdSum => "rotation_svd_sum",
            Form::RotationProcrustes => "rotation_procrustes",
            Form::Simultaneous => "simultaneous",
            Form::TranslationOnly => "translation_only",
            Form::TranslationOnlyReduced => "translation_only_reduced",
            Form::TranslationOnlyPoint => "translation_only_point",
        }
    }

    pub fn is_rotation_only(self) -> bool {
        matches!(self, Form::RotationDirect | Form::RotationSvdSum | Form::RotationProcrustes)
    }

    pub fn is_translation_only(self) -> bool {
        matches!(
            self,
            Form::TranslationOnly | Form::TranslationOnlyReduced | Form::TranslationOnlyPoint
        )
    }
}

/// A feasible point of the solution space: problem x representation x form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SolverSpec {
    problem: Problem,
    representation: Representation,
    form: Form,
}

/// The feasible combinations, with their display names.
pub(crate) const FEASIBLE: &[(Problem, Representation, Form, &str)] = {
    use Form::*;
    use Problem::*;
    use Representation::*;
    &[
        (Axxb, AxisAngle, RotationDirect, "XAxisR"),
        (Axxb, AxisAngle, RotationProcrustes, "XAxisRX"),
        (Axxb, Quaternion, RotationDirect, "XQuatR"),
        (Axxb, Quaternion, RotationProcrustes, "XQuatRX"),
        (Axxb, Quaternion, RotationSvdSum, "XQuatR*"),
        (Axxb, Kronecker, RotationDirect, "XKronR"),
        (Axxb, Kronecker, RotationSvdSum, "XKronR*"),
        (Axxb, Kronecker, RotationProcrustes, "XKronRX"),
        (Axxb, Quaternion, Simultaneous, "XQuatRT"),
        (Axxb, Kronecker, Simultaneous, "XKronRT"),
        (Axxb, Quaternion, TranslationOnly, "XQuatT"),
        (Axxb, Quaternion, TranslationOnlyReduced, "XQuatT'"),
        (Axxb, Kronecker, TranslationOnly, "XKronT"),
        (Axyb, AxisAngle, RotationDirect, "YAxisR"),
        (Axyb, Quaternion, RotationDirect, "YQuatR"),
        (Axyb, Quaternion, RotationSvdSum, "YQuatR*"),
        (Axyb, Kronecker, RotationDirect, "YKronR"),
        (Axyb, Kronecker, RotationSvdSum, "YKronR*"),
        (Axyb, Quaternion, Simultaneous, "YQuatRT"),
        (Axyb, Kronecker, Simultaneous, "YKronRT"),
        (Axyb, Quaternion, TranslationOnly, "YQuatT"),
        (Axyb, Quaternion, TranslationOnlyReduced, "YQuatT'"),
        (Axyb, Kronecker, TranslationOnlyPoint, "YKronT'"),
    ]
};

impl SolverSpec {
    /// Rejects combinations that are not part of the solver table.
    pub fn new(problem: Problem, representation: Representation, form: Form) -> Result<Self> {
        if FEASIBLE
            .iter()
            .any(|(p, r, f, _)| *p == problem && *r == representation && *f == form)
        {
            Ok(Self { problem, representation, form })
        } else {
            Err(Error::InfeasibleSpec(format!(
                "({problem}, {representation}, {}) is not an implemented solver",
                form.as_str()
            )))
        }
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn name(&self) -> &'static str {
        FEASIBLE
            .iter()
            .find(|(p, r, f, _)| *p == self.problem && *r == self.representation && *f == self.form)
            .map(|e| e.3)
            .expect("constructed specs are feasible")
    }

    /// Every feasible solver, in table order.
    pub fn all() -> Vec<SolverSpec> {
        FEASIBLE
            .iter()
            .map(|(p, r, f, _)| SolverSpec { problem: *p, representation: *r, form: *f })
            .collect()
    }

    /// Case-insensitive lookup by display name.
    pub fn by_name(name: &str) -> Option<SolverSpec> {
        FEASIBLE
            .iter()
            .find(|e| e.3.eq_ignore_ascii_case(name))
            .map(|(p, r, f, _)| SolverSpec { problem: *p, representation: *r, form: *f })
    }

    pub fn names() -> Vec<&'static str> {
        FEASIBLE.iter().map(|e| e.3).collect()
    }

    /// Minimum number of motion pairs (or point observations) the solver needs.
    pub fn min_measurements(&self) -> usize {
        use Form::*;
        match (self.problem, self.representation, self.form) {
            (Problem::Axxb, Representation::Kronecker, RotationProcrustes) => 5,
            (Problem::Axxb, Representation::Kronecker, TranslationOnly) => 4,
            (Problem::Axyb, Representation::Quaternion, TranslationOnly) => 4,
            (_, _, TranslationOnlyPoint) => 5,
            _ => 3,
        }
    }

    /// Whether the solver consumes only sensor-side positions.
    pub fn uses_points(&self) -> bool {
        self.form == Form::TranslationOnlyPoint
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numerical diagnostics attached to every estimate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Singular values of the main system, descending.
    pub singular_values: Vec<f64>,
    /// Residual norm of the main system at the returned solution.
    pub residual: f64,
    /// Number of singular values treated as zero.
    pub nullspace_dim: usize,
    /// Translation of `X` that falls out of the point-based solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incidental_t_x: Option<[f64; 3]>,
}

/// Rotation-only estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationEstimate {
    pub x: Rotation3,
    pub y: Option<Rotation3>,
    pub diagnostics: Diagnostics,
}

/// Estimated transforms plus diagnostics. At least one of `x`, `y` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub x: Option<RigidTransform>,
    pub y: Option<RigidTransform>,
    pub diagnostics: Diagnostics,
}
