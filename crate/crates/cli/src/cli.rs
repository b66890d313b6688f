//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{PenaltyPolicy, PivotPolicy, VariantLabel};
use qite_core::qite::{LayerOrder, OffsetMode};

#[derive(Debug, Parser)]
#[command(name = "qite", version, about = "Reduced-parameter QITE for exact cover and set partitioning")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for sampling and generators.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (solve, sweep) or file (other commands).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Shots per measurement group; implies --sampled unless --exact is given.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Exact expectation values (default).
    #[arg(long, global = true, conflicts_with = "sampled")]
    pub exact: bool,
    /// Shot-sampled expectation values.
    #[arg(long, global = true)]
    pub sampled: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// p1a, p2a, reduced-zy, compressed-zy, reduced-xy, compressed-xy, universal
    #[arg(long)]
    pub variant: Option<VariantLabel>,
    /// heuristic, oracle, or a qubit index
    #[arg(long)]
    pub pivot: Option<PivotPolicy>,
    /// Number of QITE steps M.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fixed imaginary-time step.
    #[arg(long, conflicts_with = "adaptive")]
    pub dtau: Option<f64>,
    /// Largest step keeping every first-step rotation angle below pi/4.
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long)]
    pub ridge: Option<f64>,
    /// subtract or include
    #[arg(long, value_parser = parse_offset)]
    pub offset_mode: Option<OffsetMode>,
    /// ry-first or two-qubit-first
    #[arg(long, value_parser = parse_order)]
    pub layer_order: Option<LayerOrder>,
    /// Stop once the ground-state probability reaches this value.
    #[arg(long)]
    pub early_stop: Option<f64>,
    /// Ground-state probability counted as solved.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// file, conservative, or a uniform value
    #[arg(long)]
    pub penalty: Option<PenaltyPolicy>,
    /// Largest register for brute-force ground states.
    #[arg(long)]
    pub brute_force_cap: Option<usize>,
    /// Record the leading merge-error norm each step.
    #[arg(long)]
    pub compression_diagnostics: bool,
}

fn parse_offset(s: &str) -> Result<OffsetMode, String> {
    match s {
        "subtract" => Ok(OffsetMode::Subtract),
        "include" => Ok(OffsetMode::Include),
        _ => Err(format!("expected subtract or include, got '{s}'")),
    }
}

fn parse_order(s: &str) -> Result<LayerOrder, String> {
    match s {
        "ry-first" => Ok(LayerOrder::RyFirst),
        "two-qubit-first" => Ok(LayerOrder::TwoQubitFirst),
        _ => Err(format!("expected ry-first or two-qubit-first, got '{s}'")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct HardwareArgs {
    /// baseline, improved, improved-3us, or quoted
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub t_cnot: Option<f64>,
    #[arg(long)]
    pub t_measure: Option<f64>,
    #[arg(long)]
    pub t_feedback: Option<f64>,
    #[arg(long)]
    pub lambda_cnot: Option<f64>,
    #[arg(long)]
    pub lambda_meas: Option<f64>,
    #[arg(long)]
    pub lambda_idle: Option<f64>,
    /// Largest system size searched for crossovers.
    #[arg(long)]
    pub n_max: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run QITE on one instance and write a JSON record.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Re-run the configuration echoed in a previous record.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Run variants over a directory of instances and aggregate by size.
    Sweep {
        dir: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated variant labels.
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<VariantLabel>>,
    },
    /// Per-layer resource counts and runtimes.
    Resources {
        /// System size(s).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[command(flatten)]
        hw: HardwareArgs,
    },
    /// Process-fidelity bounds and the dynamic/unitary crossover.
    Fidelity {
        #[command(flatten)]
        hw: HardwareArgs,
        /// Also report every implementation at these sizes.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
    },
    /// Crossover grid over error-rate proportion and feedback latency.
    Heatmap {
        #[command(flatten)]
        hw: HardwareArgs,
        /// Multipliers of the CNOT and measurement error rates.
        #[arg(long, value_delimiter = ',')]
        proportions: Option<Vec<f64>>,
        /// Feedback latencies in seconds.
        #[arg(long, value_delimiter = ',')]
        feedbacks: Option<Vec<f64>>,
    },
    /// Pivot ranking and restart counts for instances or directories.
    Pivot {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        brute_force_cap: Option<usize>,
    },
    /// Convert an external instance file to the native text format.
    Convert {
        input: PathBuf,
        /// matrix or json
        #[arg(long, default_value = "matrix")]
        format: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Generate a seeded random instance with a planted exact cover.
    Generate {
        /// tail or sparse
        #[arg(long, default_value = "tail")]
        style: String,
        #[arg(long)]
        routes: usize,
        #[arg(long)]
        flights: Option<usize>,
        #[arg(long)]
        planted: Option<usize>,
        /// Draw integer costs from 1..=cost-max.
        #[arg(long, default_value_t = 0)]
        cost_max: u32,
        /// Require a unique exact cover.
        #[arg(long)]
        unique: bool,
        #[arg(long)]
        name: Option<String>,
    },
}
