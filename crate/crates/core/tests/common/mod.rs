#![allow(dead_code)]

pub mod algebra;

use handeye::pipeline::{self, rotation_error, PoseSample, RelativeForm};
use handeye::se3::quaternion::{left_matrix, right_matrix};
use handeye::se3::{kron, vec, RigidTransform};
use handeye::sim::{NoiseConfig, ScenarioConfig, Simulator};
use handeye::solvers::formulation::{self, truth};
use handeye::solvers::{product_sum, solve_rotation, MotionPair, Problem, SolveOptions, SolverSpec};
use handeye::se3::Representation;
use nalgebra::{DMatrix, DVector, Vector4};

/// Noise-free seeded data set: the samples, the AX=YB pairs, the AX=XB
/// relative pairs and the ground truth.
pub struct Fixture {
    pub samples: Vec<PoseSample>,
    pub axyb: Vec<MotionPair>,
    pub axxb: Vec<MotionPair>,
    pub x: RigidTransform,
    pub y: RigidTransform,
}

impl Fixture {
    pub fn new(seed: u64, n: usize) -> Self {
        let mut sim = Simulator::new(ScenarioConfig::with_seed(seed));
        let (samples, _) = sim.dataset(n, &NoiseConfig::none());
        let axyb = pipeline::absolute_pairs(&samples).unwrap();
        let axxb = pipeline::make_relative_pairs(&samples, RelativeForm::SolveX).unwrap();
        Self { samples, axyb, axxb, x: sim.scenario.x, y: sim.scenario.y }
    }

    pub fn pairs(&self, problem: Problem) -> &[MotionPair] {
        match problem {
            Problem::Axxb => &self.axxb,
            Problem::Axyb => &self.axyb,
        }
    }

    /// Ground truth `(X, Y)` for a problem; AX=XB uses `Y = X`.
    pub fn truth(&self, problem: Problem) -> (RigidTransform, RigidTransform) {
        match problem {
            Problem::Axxb => (self.x, self.x),
            Problem::Axyb => (self.x, self.y),
        }
    }
}

/// Multiplies the entries `range` of `v` by `s`.
fn flip(mut v: DVector<f64>, range: std::ops::Range<usize>, s: f64) -> DVector<f64> {
    for i in range {
        v[i] *= s;
    }
    v
}

/// Residual norm of every stacked system evaluated at the ground-truth
/// unknown vector, labelled by system and problem.
pub fn formulation_residuals(fx: &Fixture) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for problem in [Problem::Axxb, Problem::Axyb] {
        let pairs = fx.pairs(problem);
        let (x, y) = fx.truth(problem);
        let quats = formulation::aligned_quaternions(pairs, problem);
        let s = truth::quaternion_sign(&quats, &x, &y);
        let n = pairs.len() as f64;
        let tag = |name: &str| format!("{name} {problem}");

        let mut rot = truth::quaternion_rotation(&x, &y, problem);
        let mut trans = truth::quaternion_translation(&x, &y, problem);
        let mut reduced = truth::reduced_translation(&x, &y, problem);
        if problem == Problem::Axyb {
            rot = flip(rot, 4..8, s);
            trans = flip(trans, 8..16, s);
            reduced = flip(reduced, 0..8, s);
        }
        let m = formulation::quaternion_rotation_system(&quats, problem);
        out.push((tag("quaternion rotation stack"), (m * &rot).norm()));
        let m = formulation::axis_angle_rotation_system(&quats, problem);
        out.push((tag("axis-angle rotation stack"), (m * &rot).norm()));
        let m = formulation::kronecker_rotation_system(pairs, problem);
        out.push((tag("kronecker rotation stack"), (m * truth::kronecker_rotation(&x, &y, problem)).norm()));

        // Summed products: K r_X = n r_Y.
        let k = product_sum(pairs, problem, Representation::Quaternion).unwrap();
        let qx = DVector::from_column_slice(x.rotation.to_quaternion().to_vector().as_slice());
        let qy = DVector::from_column_slice(y.rotation.to_quaternion().to_vector().as_slice()) * s;
        out.push((tag("quaternion product sum"), (k * qx - qy * n).norm()));
        let k = product_sum(pairs, problem, Representation::Kronecker).unwrap();
        let vx = DVector::from_column_slice(x.rotation.matrix().as_slice());
        let vy = DVector::from_column_slice(y.rotation.matrix().as_slice());
        out.push((tag("kronecker product sum"), (k * vx - vy * n).norm()));

        let m = formulation::quaternion_translation_system(pairs, &quats, problem);
        out.push((tag("quaternion simultaneous translation stack"), (m * trans).norm()));
        let m = formulation::reduced_translation_system(pairs, &quats, problem);
        out.push((tag("reduced quaternion translation stack"), (m * reduced).norm()));
        let (m, rhs) = formulation::kronecker_simultaneous_system(pairs, problem);
        out.push((tag("kronecker simultaneous stack"), (m * truth::kronecker_simultaneous(&x, &y, problem) - rhs).norm()));

        if problem == Problem::Axxb {
            let (m, rhs) = formulation::kronecker_translation_system(pairs);
            out.push((tag("kronecker translation stack"), (m * truth::kronecker_translation(&x) - rhs).norm()));

            // Procrustes maps: vec_B to vec_A.
            let rx = x.rotation.matrix();
            let aa: f64 = pairs.iter().map(|p| (rx * p.b.rotation.log() - p.a.rotation.log()).norm()).sum();
            out.push((tag("axis-angle Procrustes map"), aa));
            let q = x.rotation.to_quaternion().to_vector();
            let qc = Vector4::new(q[0], -q[1], -q[2], -q[3]);
            let w4 = left_matrix(&q) * right_matrix(&qc);
            let qp: f64 = quats.iter().map(|(a, b)| (w4 * b - a).norm()).sum();
            out.push((tag("quaternion Procrustes map"), qp));
            let rxd = DMatrix::from_column_slice(3, 3, rx.as_slice());
            let w9 = kron(&rxd, &rxd);
            let kp: f64 = pairs
                .iter()
                .map(|p| {
                    let rb = DMatrix::from_column_slice(3, 3, p.b.rotation.matrix().as_slice());
                    let ra = DMatrix::from_column_slice(3, 3, p.a.rotation.matrix().as_slice());
                    (&w9 * vec(&rb) - vec(&ra)).norm()
                })
                .sum();
            out.push((tag("kronecker Procrustes map"), kp));
        } else {
            let obs = pipeline::observations(&fx.samples);
            let (m, rhs) = formulation::point_translation_system(&obs);
            out.push((tag("point translation stack"), (m * truth::point_translation(&x, &y) - rhs).norm()));
        }
    }
    out
}

/// Singular values of a dense matrix, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let f = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let mut s = f.singular_values().expect("singular values converge");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Right singular vectors of the two smallest singular values.
pub fn two_smallest_right_singular(m: &DMatrix<f64>) -> (DVector<f64>, DVector<f64>) {
    let f = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = f.thin_svd().expect("svd converges");
    let v = svd.V();
    let n = m.ncols();
    let col = |k: usize| DVector::from_fn(n, |i, _| v[(i, k)]);
    (col(n - 1), col(n - 2))
}

/// Singular values of the reduced AX=YB translation stack.
pub fn reduced_stack_singular_values(fx: &Fixture) -> Vec<f64> {
    let quats = formulation::aligned_quaternions(&fx.axyb, Problem::Axyb);
    singular_values(&formulation::reduced_translation_system(&fx.axyb, &quats, Problem::Axyb))
}

pub fn relative_nullity(s: &[f64], tol: f64) -> usize {
    s.iter().filter(|v| **v / s[0] < tol).count()
}

/// Largest pairwise rotation disagreement between the rotation-only
/// solvers of each problem on one data set, with the offending names.
pub fn cross_form_disagreement(fx: &Fixture) -> (f64, String) {
    let opts = SolveOptions::default();
    let mut worst = (0.0, String::new());
    for problem in [Problem::Axxb, Problem::Axyb] {
        let specs: Vec<SolverSpec> = SolverSpec::all()
            .into_iter()
            .filter(|s| s.problem() == problem && s.form().is_rotation_only())
            .collect();
        let est: Vec<_> = specs
            .iter()
            .map(|s| solve_rotation(s, fx.pairs(problem), &opts).unwrap_or_else(|e| panic!("{}: {e}", s.name())))
            .collect();
        for i in 0..est.len() {
            for j in i + 1..est.len() {
                let mut d = rotation_error(&est[i].x, &est[j].x);
                if let (Some(a), Some(b)) = (&est[i].y, &est[j].y) {
                    d = d.max(rotation_error(a, b));
                }
                if d > worst.0 {
                    worst = (d, format!("{} vs {}", specs[i].name(), specs[j].name()));
                }
            }
        }
    }
    worst
}

/// Worst rotation and translation error of a result against the truth.
pub fn result_errors(r: &handeye::solvers::CalibrationResult, x: &RigidTransform, y: &RigidTransform) -> (f64, f64) {
    let mut rot: f64 = 0.0;
    let mut tr: f64 = 0.0;
    if let Some(e) = &r.x {
        rot = rot.max(rotation_error(&e.rotation, &x.rotation));
        tr = tr.max((e.translation - x.translation).norm());
    }
    if let Some(e) = &r.y {
        rot = rot.max(rotation_error(&e.rotation, &y.rotation));
        tr = tr.max((e.translation - y.translation).norm());
    }
    (rot, tr)
}
