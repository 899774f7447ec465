use handeye::pipeline::{self, rotation_error, translation_error};
use handeye::sim::{NoiseConfig, ScenarioConfig, Simulator};
use handeye::solvers::{SolveOptions, SolverSpec};

#[test]
fn every_solver_recovers_noise_free_ground_truth() {
    let opts = SolveOptions::default();
    let mut failures = Vec::new();
    for seed in 0..5u64 {
        let mut sim = Simulator::new(ScenarioConfig::with_seed(seed));
        let (samples, _) = sim.dataset(10, &NoiseConfig::none());
        let truth = sim.scenario;
        for spec in SolverSpec::all() {
            match pipeline::solve(&samples, &spec, &opts) {
                Ok(r) => {
                    let mut worst: f64 = 0.0;
                    let mut worst_t: f64 = 0.0;
                    if let Some(x) = r.x {
                        worst = worst.max(rotation_error(&x.rotation, &truth.x.rotation));
                        worst_t = worst_t.max(translation_error(&x.translation, &truth.x.translation));
                    }
                    if let Some(y) = r.y {
                        worst = worst.max(rotation_error(&y.rotation, &truth.y.rotation));
                        worst_t = worst_t.max(translation_error(&y.translation, &truth.y.translation));
                    }
                    if worst >= 1e-7 || worst_t >= 1e-6 {
                        failures.push(format!("seed {seed} {}: rot {worst:.3e} trans {worst_t:.3e}", spec.name()));
                    }
                }
                Err(e) => failures.push(format!("seed {seed} {}: {e}", spec.name())),
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
