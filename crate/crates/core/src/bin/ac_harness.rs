//! Command-line front end for the experiment harness.
//!
//! Picks an experiment, fills per-experiment defaults for any flag not
//! given, validates the combination, and writes the experiment's output
//! files into `--out`. Exit status: 0 on success, 1 when the run itself
//! fails (solver or I/O), 2 for unusable command lines.

use acsplit::harness::{run_experiment, ExperimentKind, ExperimentSpec, ScalarPotential};
use acsplit::Boundary;
use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExperimentArg {
    ConvergePoly,
    ConvergeLog,
    Simulate,
    AdaptCompare,
    Ternary,
}

impl ExperimentArg {
    fn kind(self) -> ExperimentKind {
        match self {
            ExperimentArg::ConvergePoly => ExperimentKind::ConvergePoly,
            ExperimentArg::ConvergeLog => ExperimentKind::ConvergeLog,
            ExperimentArg::Simulate => ExperimentKind::Simulate,
            ExperimentArg::AdaptCompare => ExperimentKind::AdaptCompare,
            ExperimentArg::Ternary => ExperimentKind::Ternary,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BoundaryArg {
    Neumann,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PotentialArg {
    Poly,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Phase-field splitting experiments with reproducible text output.
#[derive(Parser, Debug)]
#[command(name = "ac-harness", version)]
struct Cli {
    /// Experiment to run.
    #[arg(long, value_enum)]
    experiment: ExperimentArg,

    /// Grid points per axis (even, at least 4).
    #[arg(long, default_value_t = 64)]
    grid: usize,

    /// Boundary condition [default: periodic for ternary, neumann otherwise].
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,

    /// Interface parameter [default: 0.01 converge-log, 0.05 ternary, 0.1 otherwise].
    #[arg(long)]
    eps: Option<f64>,

    /// Temperature of the logarithmic potential.
    #[arg(long, default_value_t = 0.25)]
    theta: f64,

    /// Critical temperature of the logarithmic potential.
    #[arg(long = "theta-c", default_value_t = 1.0)]
    theta_c: f64,

    /// Final time [default: 1 for convergence sweeps, 10 otherwise].
    #[arg(long = "t-final")]
    t_final: Option<f64>,

    /// Uniform/reference step size.
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,

    /// Smallest adaptive step.
    #[arg(long = "tau-min", default_value_t = 1e-3)]
    tau_min: f64,

    /// Largest adaptive step [default: 0.01 for the logarithmic potential, 0.1 otherwise].
    #[arg(long = "tau-max")]
    tau_max: Option<f64>,

    /// Adaptive sensitivity to the energy decay rate.
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,

    /// Step counts for convergence sweeps, comma separated.
    #[arg(long = "n-list", value_delimiter = ',', default_values_t = [50, 100, 200, 400])]
    n_list: Vec<usize>,

    /// Seed for every pseudo-random draw in the experiment.
    #[arg(long, default_value_t = 3)]
    seed: u64,

    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Times at which to write field snapshots, comma separated.
    #[arg(long = "snapshot-times", value_delimiter = ',')]
    snapshot_times: Vec<f64>,

    /// Record every n-th step in trace output.
    #[arg(long = "record-every", default_value_t = 1)]
    record_every: usize,

    /// Scalar potential for simulate/adapt-compare.
    #[arg(long, value_enum, default_value_t = PotentialArg::Poly)]
    potential: PotentialArg,

    /// Whether trace rows carry wall-clock times (off keeps reruns byte-identical).
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    timing: Switch,
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, String> {
    let experiment = cli.experiment.kind();
    let is_converge =
        matches!(experiment, ExperimentKind::ConvergePoly | ExperimentKind::ConvergeLog);

    if cli.grid < 4 || cli.grid % 2 != 0 {
        return Err(format!("--grid must be even and at least 4, got {}", cli.grid));
    }
    let boundary = match cli.boundary {
        Some(BoundaryArg::Neumann) => Boundary::Neumann,
        Some(BoundaryArg::Periodic) => Boundary::Periodic,
        None => match experiment {
            ExperimentKind::Ternary => Boundary::Periodic,
            _ => Boundary::Neumann,
        },
    };
    let eps = cli.eps.unwrap_or(match experiment {
        ExperimentKind::ConvergeLog => 0.01,
        ExperimentKind::Ternary => 0.05,
        _ => 0.1,
    });
    let t_final = cli.t_final.unwrap_or(if is_converge { 1.0 } else { 10.0 });
    let log_potential = cli.potential == PotentialArg::Log
        || matches!(experiment, ExperimentKind::ConvergeLog);
    let tau_max = cli.tau_max.unwrap_or(if log_potential { 0.01 } else { 0.1 });

    if !(eps > 0.0) {
        return Err(format!("--eps must be positive, got {eps}"));
    }
    if !(cli.theta > 0.0) || !(cli.theta_c > cli.theta) {
        return Err(format!(
            "need 0 < theta < theta-c, got theta={} theta-c={}",
            cli.theta, cli.theta_c
        ));
    }
    if !(t_final >= 0.0) {
        return Err(format!("--t-final must be nonnegative, got {t_final}"));
    }
    if !(cli.tau > 0.0) {
        return Err(format!("--tau must be positive, got {}", cli.tau));
    }
    if !(cli.tau_min > 0.0) || !(tau_max >= cli.tau_min) {
        return Err(format!(
            "need 0 < tau-min <= tau-max, got tau-min={} tau-max={tau_max}",
            cli.tau_min
        ));
    }
    if !(cli.alpha >= 0.0) {
        return Err(format!("--alpha must be nonnegative, got {}", cli.alpha));
    }
    if cli.record_every == 0 {
        return Err("--record-every must be at least 1".into());
    }
    if is_converge {
        if cli.n_list.is_empty() {
            return Err("convergence sweeps need a nonempty --n-list".into());
        }
        if let Some(&bad) = cli.n_list.iter().find(|&&n| n == 0) {
            return Err(format!("--n-list entries must be positive, got {bad}"));
        }
    }
    if let Some(&bad) = cli
        .snapshot_times
        .iter()
        .find(|&&t| !(0.0..=t_final).contains(&t))
    {
        return Err(format!(
            "--snapshot-times must lie in [0, {t_final}], got {bad}"
        ));
    }

    let potential = match cli.potential {
        PotentialArg::Poly => ScalarPotential::Polynomial,
        PotentialArg::Log => ScalarPotential::Logarithmic,
    };

    Ok(ExperimentSpec {
        experiment,
        grid_n: cli.grid,
        boundary,
        eps,
        theta: cli.theta,
        theta_c: cli.theta_c,
        t_final,
        tau: cli.tau,
        tau_min: cli.tau_min,
        tau_max,
        alpha: cli.alpha,
        n_list: cli.n_list.clone(),
        seed: cli.seed,
        snapshot_times: cli.snapshot_times.clone(),
        record_every: cli.record_every,
        potential,
        timing: cli.timing == Switch::On,
        out_dir: cli.out.clone(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run_experiment(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
