//! Command-line interface definition.
//!
//! Exit codes: 0 success/pass, 2 analysis fail, 3 inconclusive,
//! 4 chattering abort, 64 usage error, 65 data error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "higs-ni",
    version,
    about = "Hybrid integrator-gain systems for negative-imaginary plants: \
             verification, certificates, describing functions, simulation",
    after_help = "Angular frequencies are rad/s unless --hz is given. \
                  The describing-function closed loop uses the positive \
                  feedback convention T = G / (1 - G*Dh)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the negative-imaginary property of a plant (frequency sweep,
    /// residues, and certificate synthesis). Exit 0 = NI with certificate,
    /// 2 = not NI, 3 = sweep passed but no certificate found.
    VerifyNi(VerifyNiArgs),
    /// Synthesize the certificate matrix Y alone. Exit 0 = certificate,
    /// 2 = provably not NI, 3 = search inconclusive.
    SynthY(SynthYArgs),
    /// Describing-function Bode data of the element.
    DfBode(DfBodeArgs),
    /// Closed-loop stability certificate for a (plant, element) pair.
    /// Exit 0 = pass, 2 = fail, 3 = inconclusive.
    Certify(CertifyArgs),
    /// Certify a grid of gains at a fixed integrator frequency.
    Sweep(SweepArgs),
    /// Simulate a scenario file (free response or step disturbance).
    /// Exit 4 on a chattering abort.
    Simulate(SimulateArgs),
    /// Emit the data bundle behind one of the report figures.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Sweep start (rad/s, or Hz with --hz).
    #[arg(long)]
    pub omega_min: Option<f64>,
    /// Sweep end (rad/s, or Hz with --hz).
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Number of log-spaced points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Interpret --omega-min/--omega-max as Hz.
    #[arg(long)]
    pub hz: bool,
}

#[derive(Debug, Args)]
pub struct VerifyNiArgs {
    /// Plant model JSON ({"a": [[..]], "b": [[..]], "c": [[..]], "d": ..}).
    #[arg(long)]
    pub system: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Machine-readable JSON report.
    #[arg(long)]
    pub json: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthYArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DfBodeArgs {
    /// Element gain k_h > 0.
    #[arg(long, default_value_t = 1.0)]
    pub k_h: f64,
    /// Integrator frequency omega_h >= 0 (rad/s).
    #[arg(long, default_value_t = 600.0 * std::f64::consts::PI)]
    pub omega_h: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Also report the cut-off frequency omega_c = omega_h |1 + 4j/pi|.
    #[arg(long)]
    pub cutoff: bool,
    /// JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub k_h: f64,
    #[arg(long)]
    pub omega_h: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub omega_h: f64,
    /// Comma-separated gains, e.g. 0.1,0.4939,0.9.
    #[arg(long, value_delimiter = ',')]
    pub k_h_grid: Vec<f64>,
    /// Attach a simulated settling time per gain (needs --x0).
    #[arg(long)]
    pub simulate: bool,
    /// Initial plant state for --simulate, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub x0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-6)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.05)]
    pub t_final: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Directory for trajectory.csv, monitors.json and (for disturbance
    /// scenarios) open_loop.csv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Print the summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Figure id: 1 (element describing-function Bode), 3 (plant model
    /// Bode), 4 (open/closed-loop response with damping summary), 5 (free
    /// response state trajectories), 6 (step responses).
    #[arg(long)]
    pub figure: u32,
    /// Parent directory for the timestamped bundle.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
