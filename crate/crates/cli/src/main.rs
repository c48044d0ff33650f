//! `isoclust`: lens and double-bubble constants, the convergence sweep,
//! constrained flow, the local-minimality probe and conjecture exploration.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isoclust_core::Error;

#[derive(Parser)]
#[command(name = "isoclust", version, about = "Planar isoperimetric clusters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constants of the lens with arcs of the given radius, optionally the discrete cluster.
    Lens {
        /// Arc radius; defaults to the unit-area radius.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 2048)]
        resolution: usize,
        #[arg(long = "window-r", default_value_t = 2.0)]
        window_r: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Solve the double bubble with areas (1, A).
    DoubleBubble {
        #[arg(long, allow_negative_numbers = true)]
        area: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 2048)]
        resolution: usize,
        #[arg(long = "window-r", default_value_t = 2.0)]
        window_r: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Limit gaps, distance and perimeter of D_A against the lens, one row per A.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        areas: Vec<f64>,
        #[arg(long = "window-r", default_value_t = 2.0)]
        window_r: f64,
        #[arg(long, default_value_t = 2048)]
        resolution: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Evolve a cluster under the constrained flow.
    Flow {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: FlowArgs,
        #[arg(long)]
        output: Option<PathBuf>,
        /// One-row CSV of the scalar report fields.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Per-interface curvature summary CSV.
        #[arg(long)]
        curvature: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Perturb, evolve and compare against the unperturbed perimeter.
    Probe {
        /// Cluster to probe; defaults to the standard lens.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        /// Bump amplitude; defaults to a tenth of the lens radius.
        #[arg(long)]
        amplitude: Option<f64>,
        /// First seed; overrides ISOCLUST_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long = "window-r", default_value_t = 2.0)]
        window_r: f64,
        #[command(flatten)]
        params: FlowArgs,
        /// Per-trial CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Evolve a conjectured minimizer seed to a stationary cluster.
    Conjecture {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long = "window-r", default_value_t = 3.0)]
        window_r: f64,
        #[command(flatten)]
        params: FlowArgs,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Peanut,
    Chalk,
}

/// Flow parameter overrides; unset fields come from the input cluster.
#[derive(Args, Clone, Copy, Default)]
struct FlowArgs {
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    resample_every: Option<usize>,
    #[arg(long)]
    target_spacing: Option<f64>,
    #[arg(long)]
    junction_weight: Option<f64>,
    #[arg(long)]
    area_tol: Option<f64>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Domain(_) | Error::Parse(_) | Error::Structural(_)) => 2,
        Some(Error::Solver { .. } | Error::Convergence { .. } | Error::DegenerateConstraint(_)) => 3,
        Some(Error::Topology(_)) => 4,
        Some(Error::Perturbation(_)) => 5,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_exit_codes() {
        let code = |e: Error| exit_code(&anyhow::Error::new(e).context("while running"));
        assert_eq!(code(Error::Parse("x".into())), 2);
        assert_eq!(code(Error::Structural("x".into())), 2);
        assert_eq!(code(Error::Solver { message: "x".into(), residual: 1.0 }), 3);
        assert_eq!(code(Error::DegenerateConstraint("x".into())), 3);
        assert_eq!(code(Error::Topology("x".into())), 4);
        assert_eq!(code(Error::Perturbation("x".into())), 5);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 1);
    }
}
