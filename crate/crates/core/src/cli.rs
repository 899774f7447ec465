//! Command-line front end: `calibrate`, `simulate` and `benchmark`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, ErrorClass};
use crate::io::{self, DatasetFile, ResultFile};
use crate::pipeline::{self, ErrorReport, PoseSample};
use crate::sim::{
    run_convergence_experiment, run_noise_sweep, ConvergenceConfig, ExperimentCurve, Metric,
    NoiseConfig, ScenarioConfig, Simulator, SweepConfig,
};
use crate::solvers::{SolveOptions, SolverSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Usage => EXIT_USAGE,
        ErrorClass::Parse => EXIT_PARSE,
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Solver => EXIT_SOLVER,
    }
}

#[derive(Debug, Parser)]
#[command(name = "handeye", version, about = "Closed-form hand-eye calibration for AX=XB and AX=YB")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoisePreset {
    None,
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    #[value(name = "1")]
    SampleCount,
    #[value(name = "2")]
    NoiseSweep,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate X and/or Y from a dataset file.
    Calibrate {
        /// Dataset path, `-` for standard input.
        #[arg(default_value = "-")]
        input: String,
        /// Solver name, e.g. YQuatT' or YKronRT (case-insensitive).
        #[arg(long)]
        method: String,
        /// Result file; printed to standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a simulated dataset with embedded ground truth.
    Simulate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, value_enum, default_value_t = NoisePreset::None)]
        noise: NoisePreset,
        /// Store only the marker position of each sample.
        #[arg(long)]
        point_only: bool,
        /// Dataset path; printed to standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a simulation experiment and write the error curves as CSV.
    Benchmark {
        /// 1: error versus sample count, 2: error versus noise level.
        #[arg(long, value_enum)]
        experiment: Experiment,
        /// Rounds per point (default 30 for experiment 1, 40 for 2).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: Option<u64>,
        /// Comma-separated solver names; all solvers when omitted.
        #[arg(long, value_delimiter = ',')]
        solvers: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest sample count (experiment 1) or fixed sample count (experiment 2).
        #[arg(long, default_value_t = 70, value_parser = clap::value_parser!(u64).range(3..))]
        samples: u64,
        /// Noise steps of experiment 2.
        #[arg(long, default_value_t = 70, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        /// CSV path; printed to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a command: message plus exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: exit_code(e.class()), message: e.to_string() }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: EXIT_USAGE, message }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Calibrate { input, method, output } => calibrate(&input, &method, output),
        Command::Simulate { seed, samples, noise, point_only, output } => {
            simulate(seed, samples as usize, noise, point_only, output)
        }
        Command::Benchmark { experiment, rounds, solvers, seed, samples, steps, out } => {
            benchmark(experiment, rounds, solvers, seed, samples as usize, steps as usize, out)
        }
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => io::write_text(p, text).map_err(Failure::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::from(Error::Io(format!("stdout: {e}"))))
        }
    }
}

/// Summary lines go to stdout when the main output is a file, to stderr
/// when it is stdout.
fn report(to_stdout: bool, text: &str) {
    if to_stdout {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn lookup(method: &str) -> Result<SolverSpec, Failure> {
    SolverSpec::by_name(method).ok_or_else(|| {
        usage(format!("unknown method '{method}'; available: {}", SolverSpec::names().join(", ")))
    })
}

fn describe(label: &str, t: &crate::se3::RigidTransform) -> String {
    let (axis, angle) = t.rotation.axis_angle();
    format!(
        "{label}: rotation {:.6} deg about [{:.6}, {:.6}, {:.6}], translation [{:.6}, {:.6}, {:.6}] m\n",
        angle.to_degrees(),
        axis[0],
        axis[1],
        axis[2],
        t.translation[0],
        t.translation[1],
        t.translation[2]
    )
}

fn calibrate(input: &str, method: &str, output: Option<PathBuf>) -> Result<(), Failure> {
    let spec = lookup(method)?;
    let text = io::read_input(input)?;
    let dataset = io::parse_dataset(&text)?;
    let result = pipeline::solve(&dataset.samples, &spec, &SolveOptions::default())?;
    let file = ResultFile::new(&spec, &result, text.as_bytes());
    emit(output.as_ref(), &file.to_json())?;

    let mut summary = format!("solver {}\n", spec.name());
    if let Some(x) = &result.x {
        summary.push_str(&describe("X", x));
    }
    if let Some(y) = &result.y {
        summary.push_str(&describe("Y", y));
    }
    if let Some((x_gt, y_gt)) = &dataset.ground_truth {
        let e = ErrorReport::evaluate(&result, x_gt, y_gt, &dataset.samples)?;
        let _ = writeln!(
            summary,
            "ground truth check: rotation error {:.3e} rad, translation error {:.3e} m",
            e.rotation_error, e.translation_error
        );
        if let Some(r) = e.reprojection_error {
            let _ = writeln!(summary, "reprojection error {r:.3e} m^2");
        }
    }
    report(output.is_some(), &summary);
    Ok(())
}

fn simulate(seed: u64, samples: usize, noise: NoisePreset, point_only: bool, output: Option<PathBuf>) -> Result<(), Failure> {
    let noise = match noise {
        NoisePreset::None => NoiseConfig::none(),
        NoisePreset::Paper => NoiseConfig::paper(),
    };
    let mut sim = Simulator::new(ScenarioConfig::with_seed(seed));
    let (_, noisy) = sim.dataset(samples, &noise);
    let data: Vec<PoseSample> = if point_only {
        noisy.iter().map(|s| PoseSample::with_point(s.robot_pose, s.sensor_point())).collect()
    } else {
        noisy
    };
    let file = DatasetFile::from_dataset(&data, Some((&sim.scenario.x, &sim.scenario.y)));
    emit(output.as_ref(), &io::dataset_to_string(&file))
}

fn benchmark(
    experiment: Experiment,
    rounds: Option<u64>,
    solvers: Option<Vec<String>>,
    seed: u64,
    samples: usize,
    steps: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let specs = match solvers {
        Some(names) => names.iter().map(|n| lookup(n.trim())).collect::<Result<Vec<_>, _>>()?,
        None => SolverSpec::all(),
    };
    let scenario = ScenarioConfig::with_seed(seed);
    let opts = SolveOptions::default();
    let curve = match experiment {
        Experiment::SampleCount => {
            let cfg = ConvergenceConfig {
                max_samples: samples,
                rounds: rounds.unwrap_or(30) as usize,
                ..ConvergenceConfig::default()
            };
            run_convergence_experiment(&specs, &scenario, &NoiseConfig::paper(), &cfg, &opts)
        }
        Experiment::NoiseSweep => {
            let cfg = SweepConfig { steps, rounds: rounds.unwrap_or(40) as usize, samples, ..SweepConfig::default() };
            run_noise_sweep(&specs, &scenario, &cfg, &opts)
        }
    };
    emit(out.as_ref(), &curve_csv(&curve))?;
    report(out.is_some(), &final_ordering(&curve));
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn x_label(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        x.to_string()
    }
}

/// Tidy CSV: one row per (solver, x value, metric). Group rows are named
/// `group:<problem>/<equation type>` and hold the mean of the member means
/// and standard deviations.
pub fn curve_csv(curve: &ExperimentCurve) -> String {
    let mut s = String::from("solver,x_value,metric,mean,stddev\n");
    for series in &curve.series {
        for (i, x) in curve.x_axis.iter().enumerate() {
            for metric in Metric::ALL {
                let stat = series.points[i].get(metric);
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    series.spec.name(),
                    x_label(*x),
                    metric.as_str(),
                    cell(stat.map(|v| v.mean)),
                    cell(stat.map(|v| v.stddev))
                );
            }
        }
    }
    for (problem, eq) in curve.groups() {
        for metric in Metric::ALL {
            let agg = curve.group_aggregate(problem, eq, metric);
            for (x, g) in curve.x_axis.iter().zip(agg) {
                let _ = writeln!(
                    s,
                    "group:{problem}/{},{},{},{},{}",
                    eq.as_str(),
                    x_label(*x),
                    metric.as_str(),
                    cell(g.map(|v| v.0)),
                    cell(g.map(|v| v.1))
                );
            }
        }
    }
    s
}

/// Solvers sorted by mean rotation error at the last x-axis value.
fn final_ordering(curve: &ExperimentCurve) -> String {
    let Some(last) = curve.x_axis.len().checked_sub(1) else {
        return String::new();
    };
    let mut rows: Vec<(&str, Option<f64>)> = curve
        .series
        .iter()
        .map(|s| (s.spec.name(), s.points[last].rotation.map(|r| r.mean)))
        .collect();
    rows.sort_by(|a, b| match (a.1, b.1) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let mut s = format!("mean rotation error at x = {}:\n", x_label(curve.x_axis[last]));
    for (name, v) in rows {
        match v {
            Some(v) => {
                let _ = writeln!(s, "  {name:<10} {v:.6e} rad");
            }
            None => {
                let _ = writeln!(s, "  {name:<10} n/a");
            }
        }
    }
    s
}
