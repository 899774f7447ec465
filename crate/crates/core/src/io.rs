//! JSON dataset and result files.
//!
//! Poses are stored as `{"q": [w, x, y, z], "t": [x, y, z]}` with
//! translations in meters.

use std::fs;
use std::io::Read;
use std::path::Path;

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pipeline::{PoseSample, SensorData};
use crate::se3::{RigidTransform, Rotation3, UnitQuaternion};
use crate::solvers::{CalibrationResult, Diagnostics, SolverSpec};

pub const DATASET_VERSION: u32 = 1;
pub const POSE_FORMAT: &str = "q = [w, x, y, z] unit quaternion, t = [x, y, z] meters";

/// Quaternions further than this from unit norm are rejected.
pub const UNIT_TOL: f64 = 1e-6;
/// Quaternions further than this (but within `UNIT_TOL`) are renormalized
/// with a warning.
pub const RENORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub q: [f64; 4],
    pub t: [f64; 3],
}

impl PoseRecord {
    pub fn from_transform(t: &RigidTransform) -> Self {
        let q = t.rotation.to_quaternion().to_vector();
        Self { q: [q[0], q[1], q[2], q[3]], t: [t.translation[0], t.translation[1], t.translation[2]] }
    }

    /// Validates the quaternion norm and builds the transform. `field`
    /// names the record in error messages.
    pub fn to_transform(&self, field: &str) -> Result<RigidTransform> {
        let q = Vector4::from(self.q);
        let t = Vector3::from(self.t);
        if !q.iter().chain(t.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvariantViolation(format!("{field}: non-finite value")));
        }
        let n = q.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvariantViolation(format!(
                "{field}: quaternion norm {n} is not within {UNIT_TOL:e} of 1"
            )));
        }
        if (n - 1.0).abs() > RENORM_TOL {
            log::warn!("{field}: quaternion norm {n}, renormalizing");
        }
        let unit = UnitQuaternion::from_vector(&q)
            .ok_or_else(|| Error::InvariantViolation(format!("{field}: zero quaternion")))?;
        RigidTransform::new(Rotation3::from_quaternion(&unit), t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub robot_pose: PoseRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker_pose: Option<PoseRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker_point: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub x: PoseRecord,
    pub y: PoseRecord,
}

/// On-disk dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub version: u32,
    #[serde(default = "default_format")]
    pub format: String,
    pub samples: Vec<SampleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthRecord>,
}

fn default_format() -> String {
    POSE_FORMAT.to_string()
}

/// Validated dataset contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<PoseSample>,
    /// `(X, Y)` when the file embeds them.
    pub ground_truth: Option<(RigidTransform, RigidTransform)>,
}

impl DatasetFile {
    pub fn from_dataset(samples: &[PoseSample], ground_truth: Option<(&RigidTransform, &RigidTransform)>) -> Self {
        let samples = samples
            .iter()
            .map(|s| {
                let robot_pose = PoseRecord::from_transform(&s.robot_pose);
                match s.sensor {
                    SensorData::Pose(b) => SampleRecord {
                        robot_pose,
                        marker_pose: Some(PoseRecord::from_transform(&b)),
                        marker_point: None,
                    },
                    SensorData::Point(p) => SampleRecord { robot_pose, marker_pose: None, marker_point: Some([p[0], p[1], p[2]]) },
                }
            })
            .collect();
        Self {
            version: DATASET_VERSION,
            format: default_format(),
            samples,
            ground_truth: ground_truth.map(|(x, y)| GroundTruthRecord {
                x: PoseRecord::from_transform(x),
                y: PoseRecord::from_transform(y),
            }),
        }
    }

    pub fn to_dataset(&self) -> Result<Dataset> {
        if self.version != DATASET_VERSION {
            return Err(Error::Parse(format!("unsupported dataset version {}", self.version)));
        }
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let robot_pose = s.robot_pose.to_transform(&format!("samples[{i}].robot_pose"))?;
                match (&s.marker_pose, &s.marker_point) {
                    (Some(b), None) => Ok(PoseSample::with_pose(
                        robot_pose,
                        b.to_transform(&format!("samples[{i}].marker_pose"))?,
                    )),
                    (None, Some(p)) => {
                        let p = Vector3::from(*p);
                        if !p.iter().all(|v| v.is_finite()) {
                            return Err(Error::InvariantViolation(format!(
                                "samples[{i}].marker_point: non-finite value"
                            )));
                        }
                        Ok(PoseSample::with_point(robot_pose, p))
                    }
                    _ => Err(Error::InvariantViolation(format!(
                        "samples[{i}]: exactly one of marker_pose and marker_point is required"
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let ground_truth = match &self.ground_truth {
            Some(g) => Some((g.x.to_transform("ground_truth.x")?, g.y.to_transform("ground_truth.y")?)),
            None => None,
        };
        Ok(Dataset { samples, ground_truth })
    }
}

/// Parses and validates dataset text. Parse errors carry line and column.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    parse_dataset_file(text)?.to_dataset()
}

pub fn parse_dataset_file(text: &str) -> Result<DatasetFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a dataset from `path`, or from standard input when `path` is `-`.
pub fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text)
}

pub fn dataset_to_string(file: &DatasetFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("dataset records always serialize");
    s.push('\n');
    s
}

pub fn save_dataset(path: impl AsRef<Path>, file: &DatasetFile) -> Result<()> {
    write_text(path.as_ref(), &dataset_to_string(file))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Hex SHA-256 of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// On-disk calibration result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub solver: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<PoseRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<PoseRecord>,
    pub diagnostics: Diagnostics,
    pub input_digest: String,
}

impl ResultFile {
    pub fn new(spec: &SolverSpec, result: &CalibrationResult, input: &[u8]) -> Self {
        Self {
            solver: spec.name().to_string(),
            x: result.x.as_ref().map(PoseRecord::from_transform),
            y: result.y.as_ref().map(PoseRecord::from_transform),
            diagnostics: result.diagnostics.clone(),
            input_digest: digest(input),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result records always serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
