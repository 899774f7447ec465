mod common;

use common::Fixture;
use handeye::error::Error;
use handeye::pipeline::{
    self, make_relative_pairs, reprojection_error, rotation_error, translation_error, validate, ErrorReport,
    PoseSample, RelativeForm,
};
use handeye::se3::{RigidTransform, Rotation3};
use handeye::sim::{random_rotation, NoiseConfig, ScenarioConfig, Simulator};
use handeye::solvers::{MotionPair, SolveOptions, SolverSpec};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(name: &str) -> SolverSpec {
    SolverSpec::by_name(name).unwrap()
}

#[test]
fn validation_counts_and_axis_diversity() {
    let fx = Fixture::new(0, 11);
    let r = validate(&fx.axxb[..2], &spec("XQuatR"));
    assert!(matches!(r, Err(Error::InsufficientMeasurements { required: 3, found: 2 })));
    validate(&fx.axxb, &spec("XQuatR")).unwrap();
    validate(&fx.axyb, &spec("YQuatR*")).unwrap();

    let z_pairs: Vec<MotionPair> = (0..10)
        .map(|i| {
            let a = RigidTransform::from_parts(
                Rotation3::from_axis_angle(&Vector3::z(), 0.1 + 0.15 * i as f64),
                Vector3::new(0.0, 0.1 * i as f64, 0.0),
            );
            MotionPair::new(a, fx.x.inverse() * a * fx.x)
        })
        .collect();
    assert!(matches!(validate(&z_pairs, &spec("XQuatR")), Err(Error::DegenerateMotion(_))));
}

#[test]
fn pipeline_recovers_y_with_reduced_quaternion_solver() {
    let fx = Fixture::new(4, 10);
    let r = pipeline::solve(&fx.samples, &spec("YQuatT'"), &SolveOptions::default()).unwrap();
    let y = r.y.unwrap();
    assert!(rotation_error(&y.rotation, &fx.y.rotation) < 1e-8);
    assert!(translation_error(&y.translation, &fx.y.translation) < 1e-8);
}

#[test]
fn identity_data_gives_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<PoseSample> = (0..8)
        .map(|_| {
            let t = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0);
            let a = RigidTransform::from_parts(random_rotation(&mut rng), t);
            PoseSample::with_pose(a, a)
        })
        .collect();
    let r = pipeline::solve(&samples, &spec("XKronR*"), &SolveOptions::default()).unwrap();
    for t in [r.x.unwrap(), r.y.unwrap()] {
        assert!(rotation_error(&t.rotation, &Rotation3::identity()) < 1e-10);
        assert!(t.translation.norm() < 1e-10);
    }
}

#[test]
fn axxb_and_axyb_agree_when_y_equals_x() {
    // Samples with B_i = X^-1 A_i X close the chain A X = Y B with Y = X.
    let fx = Fixture::new(6, 12);
    let samples: Vec<PoseSample> = fx
        .samples
        .iter()
        .map(|s| PoseSample::with_pose(s.robot_pose, fx.x.inverse() * s.robot_pose * fx.x))
        .collect();
    let opts = SolveOptions::default();
    let a = pipeline::solve(&samples, &spec("XQuatRT"), &opts).unwrap();
    let b = pipeline::solve(&samples, &spec("YQuatRT"), &opts).unwrap();
    for (u, v) in [(a.x.unwrap(), b.x.unwrap()), (a.y.unwrap(), b.y.unwrap())] {
        assert!(rotation_error(&u.rotation, &v.rotation) < 1e-8);
        assert!((u.translation - v.translation).norm() < 1e-8);
    }
}

#[test]
fn solve_is_deterministic() {
    let mut sim = Simulator::new(ScenarioConfig::with_seed(9));
    let (_, noisy) = sim.dataset(15, &NoiseConfig::paper());
    for s in SolverSpec::all() {
        let a = pipeline::solve(&noisy, &s, &SolveOptions::default());
        let b = pipeline::solve(&noisy, &s, &SolveOptions::default());
        assert_eq!(a, b, "{}", s.name());
    }
}

#[test]
fn point_samples_work_only_for_the_point_solver() {
    let fx = Fixture::new(10, 8);
    let points: Vec<PoseSample> =
        fx.samples.iter().map(|s| PoseSample::with_point(s.robot_pose, s.sensor_point())).collect();
    assert!(pipeline::solve(&points, &spec("YKronT'"), &SolveOptions::default()).is_ok());
    let r = pipeline::solve(&points, &spec("YQuatT'"), &SolveOptions::default());
    assert!(matches!(r, Err(Error::InvariantViolation(_))));
    assert!(make_relative_pairs(&points, RelativeForm::SolveX).is_err());
}

#[test]
fn rotation_error_examples() {
    let r = Rotation3::from_axis_angle(&Vector3::new(0.3, -0.2, 0.9), 2.0);
    assert_eq!(rotation_error(&r, &r), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let est = r.compose(&Rotation3::from_axis_angle(&axis, 5f64.to_radians()));
        assert!((rotation_error(&est, &r) - 5f64.to_radians()).abs() < 1e-12);
    }
}

#[test]
fn reprojection_error_examples() {
    let fx = Fixture::new(13, 10);
    let e = reprojection_error(&fx.samples, Some(&fx.x), Some(&fx.y)).unwrap();
    assert!(e < 1e-18, "{e:e}");

    // Identity rotations: shifting Y by d moves every prediction by d.
    let id = RigidTransform::identity();
    let samples: Vec<PoseSample> = (0..4)
        .map(|i| {
            let a = RigidTransform::from_parts(Rotation3::identity(), Vector3::new(i as f64, 0.0, 0.0));
            PoseSample::with_pose(a, a)
        })
        .collect();
    let d = Vector3::new(0.03, -0.04, 0.0);
    let y = RigidTransform::from_parts(Rotation3::identity(), d);
    let e = reprojection_error(&samples, Some(&id), Some(&y)).unwrap();
    assert!((e - d.norm_squared()).abs() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let y = RigidTransform::from_parts(random_rotation(&mut rng), Vector3::new(0.1, 0.2, 0.3)) * fx.y;
    let brute: f64 = fx
        .samples
        .iter()
        .map(|s| {
            let lhs = (s.robot_pose * fx.x).translation;
            let rhs = (y * *s.sensor_pose().unwrap()).translation;
            (lhs - rhs).norm_squared()
        })
        .sum::<f64>()
        / fx.samples.len() as f64;
    let e = reprojection_error(&fx.samples, Some(&fx.x), Some(&y)).unwrap();
    assert!((e - brute).abs() < 1e-12 * brute.max(1.0));

    assert!(matches!(reprojection_error(&fx.samples, None, Some(&y)), Err(Error::MissingEstimate(_))));
}

#[test]
fn error_report_prefers_y() {
    let fx = Fixture::new(14, 10);
    let r = pipeline::solve(&fx.samples, &spec("YKronRT"), &SolveOptions::default()).unwrap();
    let e = ErrorReport::evaluate(&r, &fx.x, &fx.y, &fx.samples).unwrap();
    assert!(e.rotation_error < 1e-8 && e.translation_error < 1e-8);
    assert!(e.reprojection_error.unwrap() < 1e-14);
}
