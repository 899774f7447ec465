//! Synthetic calibration scenarios, measurement noise and the two
//! benchmark experiments (error versus sample count, error versus noise).

use std::f64::consts::TAU;

use nalgebra::{Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::pipeline::{self, ErrorReport, PoseSample, SensorData};
use crate::se3::{RigidTransform, Rotation3, UnitQuaternion};
use crate::solvers::{Form, Problem, SolveOptions, SolverSpec};

/// Closed interval given by center and half width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub center: f64,
    pub half_width: f64,
}

impl Interval {
    pub const fn new(center: f64, half_width: f64) -> Self {
        Self { center, half_width }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo() && v <= self.hi()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.half_width == 0.0 {
            self.center
        } else {
            rng.random_range(self.lo()..=self.hi())
        }
    }
}

/// Sampling bounds of the simulated setup. Distances in meters, angles in
/// radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Translation length of `X`.
    pub x_dist: Interval,
    /// Translation length of every robot pose `A`.
    pub a_dist: Interval,
    /// Translation length of the initial marker pose `B`.
    pub b_dist: Interval,
    /// Per-axis orientation offset of `A` from the reference pose.
    pub a_orient_range: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            x_dist: Interval::new(0.2, 0.1),
            a_dist: Interval::new(1.25, 0.75),
            b_dist: Interval::new(0.8, 0.3),
            a_orient_range: 30f64.to_radians(),
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Upper bounds of the multiplicative noise on `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub a_rot_max: f64,
    pub a_trans_max: f64,
    pub b_rot_max: f64,
    pub b_trans_max: f64,
}

impl NoiseConfig {
    pub const fn none() -> Self {
        Self { a_rot_max: 0.0, a_trans_max: 0.0, b_rot_max: 0.0, b_trans_max: 0.0 }
    }

    /// Static noise of the sample-count experiment: 15 deg / 2 cm on `A`,
    /// 10 deg / 1 cm on `B`.
    pub fn paper() -> Self {
        Self {
            a_rot_max: 15f64.to_radians(),
            a_trans_max: 0.02,
            b_rot_max: 10f64.to_radians(),
            b_trans_max: 0.01,
        }
    }

    /// Final level of the noise sweep: 30 deg / 6 cm on `A`, 20 deg / 3 cm on `B`.
    pub fn sweep_max() -> Self {
        Self {
            a_rot_max: 30f64.to_radians(),
            a_trans_max: 0.06,
            b_rot_max: 20f64.to_radians(),
            b_trans_max: 0.03,
        }
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self {
            a_rot_max: self.a_rot_max * f,
            a_trans_max: self.a_trans_max * f,
            b_rot_max: self.b_rot_max * f,
            b_trans_max: self.b_trans_max * f,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::none()
    }
}

/// Ground truth of one simulated setup. `Y = A_0 X B_0^-1`, so every robot
/// pose `A` observes the marker at `B = Y^-1 A X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub x: RigidTransform,
    pub y: RigidTransform,
    /// Initial robot pose; its orientation is the reference for later poses.
    pub a0: RigidTransform,
    pub b0: RigidTransform,
}

/// Uniformly distributed rotation (Shoemake's subgroup algorithm).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Rotation3 {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = Vector4::new(b * (TAU * u3).cos(), a * (TAU * u2).sin(), a * (TAU * u2).cos(), b * (TAU * u3).sin());
    Rotation3::from_quaternion(&UnitQuaternion::from_vector(&q).expect("unit by construction"))
}

/// Uniformly distributed direction on the unit sphere.
pub fn random_unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

fn random_translation<R: Rng>(rng: &mut R, dist: &Interval) -> Vector3<f64> {
    random_unit_vector(rng) * dist.sample(rng)
}

/// Draws `X`, the initial poses `A_0`, `B_0` and the implied `Y`.
pub fn sample_scenario<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Scenario {
    let x = RigidTransform::from_parts(random_rotation(rng), random_translation(rng, &cfg.x_dist));
    let a0 = RigidTransform::from_parts(random_rotation(rng), random_translation(rng, &cfg.a_dist));
    let b0 = RigidTransform::from_parts(random_rotation(rng), random_translation(rng, &cfg.b_dist));
    let y = a0 * x * b0.inverse();
    Scenario { x, y, a0, b0 }
}

/// Noise-free sample: robot orientation within the per-axis range of the
/// reference orientation (`R_ref Rz Ry Rx`), translation length in
/// `a_dist`, marker pose from the closed chain.
pub fn sample_measurement<R: Rng>(scenario: &Scenario, cfg: &ScenarioConfig, rng: &mut R) -> PoseSample {
    let r = cfg.a_orient_range;
    let mut angle = || if r == 0.0 { 0.0 } else { rng.random_range(-r..=r) };
    let (rz, ry, rx) = (angle(), angle(), angle());
    let offset = Rotation3::from_axis_angle(&Vector3::z(), rz)
        * Rotation3::from_axis_angle(&Vector3::y(), ry)
        * Rotation3::from_axis_angle(&Vector3::x(), rx);
    let rotation = scenario.a0.rotation * offset;
    let a = RigidTransform::from_parts(rotation, random_translation(rng, &cfg.a_dist));
    let b = scenario.y.inverse() * a * scenario.x;
    PoseSample::with_pose(a, b)
}

/// Random transform with rotation angle uniform in `[0, rot_max)` about a
/// uniform axis and translation uniform in the ball of radius `trans_max`.
pub fn random_perturbation<R: Rng>(rng: &mut R, rot_max: f64, trans_max: f64) -> RigidTransform {
    let rotation = if rot_max > 0.0 {
        let axis = random_unit_vector(rng);
        Rotation3::from_axis_angle(&axis, rng.random_range(0.0..rot_max))
    } else {
        Rotation3::identity()
    };
    let translation = if trans_max > 0.0 {
        let u: f64 = rng.random();
        random_unit_vector(rng) * (trans_max * u.cbrt())
    } else {
        Vector3::zeros()
    };
    RigidTransform::from_parts(rotation, translation)
}

/// Right-multiplies `A` by `N_A` and `B` by `N_B` (noise in the measured
/// frame). Point samples receive the translation part of `N_B`.
pub fn inject_noise<R: Rng>(sample: &PoseSample, noise: &NoiseConfig, rng: &mut R) -> PoseSample {
    if noise.is_zero() {
        return *sample;
    }
    let na = random_perturbation(rng, noise.a_rot_max, noise.a_trans_max);
    let nb = random_perturbation(rng, noise.b_rot_max, noise.b_trans_max);
    let robot_pose = sample.robot_pose * na;
    let sensor = match sample.sensor {
        SensorData::Pose(b) => SensorData::Pose(b * nb),
        SensorData::Point(p) => SensorData::Point(p + nb.translation),
    };
    PoseSample { robot_pose, sensor }
}

/// Generator for one seeded stream of samples.
pub struct Simulator {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    rng: ChaCha8Rng,
}

impl Simulator {
    /// Stream 0 of `cfg.seed`.
    pub fn new(cfg: ScenarioConfig) -> Self {
        Self::with_stream(cfg, 0)
    }

    /// Independent generator for round `stream` of the same seed.
    pub fn with_stream(cfg: ScenarioConfig, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        let scenario = sample_scenario(&cfg, &mut rng);
        Self { config: cfg, scenario, rng }
    }

    pub fn measurement(&mut self) -> PoseSample {
        sample_measurement(&self.scenario, &self.config, &mut self.rng)
    }

    pub fn noisy(&mut self, sample: &PoseSample, noise: &NoiseConfig) -> PoseSample {
        inject_noise(sample, noise, &mut self.rng)
    }

    /// `n` clean samples and their noisy counterparts.
    pub fn dataset(&mut self, n: usize, noise: &NoiseConfig) -> (Vec<PoseSample>, Vec<PoseSample>) {
        let clean: Vec<PoseSample> = (0..n).map(|_| self.measurement()).collect();
        let noisy = clean.iter().map(|s| self.noisy(s, noise)).collect();
        (clean, noisy)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Coarse equation family, used for group statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquationType {
    Rotation,
    Simultaneous,
    Translation,
}

impl EquationType {
    pub fn of(form: Form) -> Self {
        if form.is_rotation_only() {
            EquationType::Rotation
        } else if form == Form::Simultaneous {
            EquationType::Simultaneous
        } else {
            EquationType::Translation
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EquationType::Rotation => "rotation",
            EquationType::Simultaneous => "simultaneous",
            EquationType::Translation => "translation",
        }
    }
}

/// Which error a statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Rotation,
    Translation,
    Reprojection,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rotation, Metric::Translation, Metric::Reprojection];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Rotation => "rotation",
            Metric::Translation => "translation",
            Metric::Reprojection => "reprojection",
        }
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stddev = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, stddev, count: n })
    }
}

/// Statistics of one solver at one x-axis value. A metric is `None` when
/// every round failed or the metric is undefined for the solver.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvePoint {
    pub rotation: Option<Stat>,
    pub translation: Option<Stat>,
    pub reprojection: Option<Stat>,
    pub failures: usize,
}

impl CurvePoint {
    pub fn get(&self, metric: Metric) -> Option<Stat> {
        match metric {
            Metric::Rotation => self.rotation,
            Metric::Translation => self.translation,
            Metric::Reprojection => self.reprojection,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSeries {
    pub spec: SolverSpec,
    pub points: Vec<CurvePoint>,
}

/// Per-solver error curves over a common x axis (sample count or noise step).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCurve {
    pub x_axis: Vec<f64>,
    pub series: Vec<SolverSeries>,
}

impl ExperimentCurve {
    pub fn series_for(&self, name: &str) -> Option<&SolverSeries> {
        self.series.iter().find(|s| s.spec.name().eq_ignore_ascii_case(name))
    }

    /// Index of an x-axis value.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.x_axis.iter().position(|v| *v == x)
    }

    /// Groups present in the curve, in a stable order.
    pub fn groups(&self) -> Vec<(Problem, EquationType)> {
        let mut g: Vec<(Problem, EquationType)> = self
            .series
            .iter()
            .map(|s| (s.spec.problem(), EquationType::of(s.spec.form())))
            .collect();
        g.sort_by_key(|(p, e)| (*p == Problem::Axyb, *e));
        g.dedup();
        g
    }

    /// Mean over the group members of their mean and of their standard
    /// deviation, per x-axis value. Members without data at a point are
    /// left out of that point.
    pub fn group_aggregate(&self, problem: Problem, eq: EquationType, metric: Metric) -> Vec<Option<(f64, f64)>> {
        let members: Vec<&SolverSeries> = self
            .series
            .iter()
            .filter(|s| s.spec.problem() == problem && EquationType::of(s.spec.form()) == eq)
            .collect();
        (0..self.x_axis.len())
            .map(|i| {
                let stats: Vec<Stat> = members.iter().filter_map(|s| s.points[i].get(metric)).collect();
                if stats.is_empty() {
                    None
                } else {
                    let n = stats.len() as f64;
                    Some((
                        stats.iter().map(|s| s.mean).sum::<f64>() / n,
                        stats.iter().map(|s| s.stddev).sum::<f64>() / n,
                    ))
                }
            })
            .collect()
    }
}

/// Settings of the error-versus-sample-count experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceConfig {
    pub min_samples: usize,
    pub max_samples: usize,
    pub rounds: usize,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { min_samples: 3, max_samples: 70, rounds: 30 }
    }
}

/// Settings of the error-versus-noise experiment. Step `k` of `steps` uses
/// `max_noise` scaled by `k / (steps - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub steps: usize,
    pub rounds: usize,
    pub samples: usize,
    pub max_noise: NoiseConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { steps: 70, rounds: 40, samples: 70, max_noise: NoiseConfig::sweep_max() }
    }
}

type Cell = Option<ErrorReport>;

fn evaluate_cell(spec: &SolverSpec, noisy: &[PoseSample], clean: &[PoseSample], scenario: &Scenario, opts: &SolveOptions) -> Cell {
    if noisy.len() < required_samples(spec) {
        return None;
    }
    let result = pipeline::solve(noisy, spec, opts).ok()?;
    ErrorReport::evaluate(&result, &scenario.x, &scenario.y, clean).ok()
}

/// Samples needed to reach the solver's minimum pair count.
pub fn required_samples(spec: &SolverSpec) -> usize {
    match spec.problem() {
        Problem::Axxb => spec.min_measurements() + 1,
        Problem::Axyb => spec.min_measurements(),
    }
}

fn aggregate(cells: &[Cell]) -> CurvePoint {
    let ok: Vec<&ErrorReport> = cells.iter().flatten().collect();
    let rot: Vec<f64> = ok.iter().map(|r| r.rotation_error).collect();
    let tra: Vec<f64> = ok.iter().map(|r| r.translation_error).collect();
    let rep: Vec<f64> = ok.iter().filter_map(|r| r.reprojection_error).collect();
    CurvePoint {
        rotation: Stat::of(&rot),
        translation: Stat::of(&tra),
        reprojection: Stat::of(&rep),
        failures: cells.len() - ok.len(),
    }
}

/// `cells[round][x][solver]` into per-solver curves.
fn collect(solvers: &[SolverSpec], x_axis: Vec<f64>, cells: Vec<Vec<Vec<Cell>>>) -> ExperimentCurve {
    let series = solvers
        .iter()
        .enumerate()
        .map(|(k, spec)| SolverSeries {
            spec: *spec,
            points: (0..x_axis.len())
                .map(|i| aggregate(&cells.iter().map(|round| round[i][k]).collect::<Vec<_>>()))
                .collect(),
        })
        .collect();
    ExperimentCurve { x_axis, series }
}

/// Error versus sample count under fixed noise.
///
/// Each round draws a scenario and `max_samples` measurements from its own
/// stream; the count `n` uses the first `n` of them. Errors are taken on
/// `Y` (on `X` for solvers that only return `X`); the reprojection error
/// is evaluated on the noise-free samples. Counts below a solver's minimum
/// and failed solves are recorded as missing.
pub fn run_convergence_experiment(
    solvers: &[SolverSpec],
    scenario_cfg: &ScenarioConfig,
    noise: &NoiseConfig,
    cfg: &ConvergenceConfig,
    opts: &SolveOptions,
) -> ExperimentCurve {
    let counts: Vec<usize> = (cfg.min_samples..=cfg.max_samples).collect();
    let cells: Vec<Vec<Vec<Cell>>> = (0..cfg.rounds as u64)
        .into_par_iter()
        .map(|round| {
            let mut sim = Simulator::with_stream(*scenario_cfg, round);
            let (clean, noisy) = sim.dataset(cfg.max_samples, noise);
            counts
                .iter()
                .map(|&n| {
                    solvers
                        .iter()
                        .map(|spec| evaluate_cell(spec, &noisy[..n], &clean[..n], &sim.scenario, opts))
                        .collect()
                })
                .collect()
        })
        .collect();
    collect(solvers, counts.iter().map(|n| *n as f64).collect(), cells)
}

/// Error versus noise level at a fixed sample count. The x axis holds the
/// step index; every step of a round reuses the same clean samples.
pub fn run_noise_sweep(
    solvers: &[SolverSpec],
    scenario_cfg: &ScenarioConfig,
    cfg: &SweepConfig,
    opts: &SolveOptions,
) -> ExperimentCurve {
    let denom = cfg.steps.saturating_sub(1).max(1) as f64;
    let cells: Vec<Vec<Vec<Cell>>> = (0..cfg.rounds as u64)
        .into_par_iter()
        .map(|round| {
            let mut sim = Simulator::with_stream(*scenario_cfg, round);
            let clean: Vec<PoseSample> = (0..cfg.samples).map(|_| sim.measurement()).collect();
            (0..cfg.steps)
                .map(|k| {
                    let noise = cfg.max_noise.scaled(k as f64 / denom);
                    let noisy: Vec<PoseSample> = clean.iter().map(|s| sim.noisy(s, &noise)).collect();
                    solvers
                        .iter()
                        .map(|spec| evaluate_cell(spec, &noisy, &clean, &sim.scenario, opts))
                        .collect()
                })
                .collect()
        })
        .collect();
    collect(solvers, (0..cfg.steps).map(|k| k as f64).collect(), cells)
}
