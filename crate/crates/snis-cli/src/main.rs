//! `snis` command line: tilt/diagnose workflows on user data, figure-data
//! regeneration, acceptance verification, and front ends for the limit
//! simulators.
//!
//! Every command is deterministic given (config, seed): all randomness flows
//! through counter-keyed ChaCha streams, parallel replicates are merged in
//! replicate order by a single writer, and floats print in shortest
//! round-trip form, so re-runs are byte-identical on stdout and on disk.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod ops;

#[derive(Parser)]
#[command(
    name = "snis",
    version,
    about = "Self-normalized importance sampling: tilting, diagnostics, and scaling-limit checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tilt a model or a CSV of samples and emit resampled draws, weights,
    /// and estimator diagnostics.
    Tilt(TiltArgs),
    /// Classify an (n, theta) or (n, M) schedule into the
    /// accurate/critical/undersampled regime.
    Diagnose(DiagnoseArgs),
    /// Regenerate the data files behind the six reference figures.
    Figures(FiguresArgs),
    /// Run acceptance suites; exit status is nonzero if any gate fails.
    Verify(VerifyArgs),
    /// Simulate the Poisson random measure and the critical-regime limit law.
    Prm(PrmArgs),
    /// Simulate the sup of the limiting Gaussian field and its
    /// concentration band.
    GaussSup(GaussSupArgs),
}

/// Flags shared by every command. `--config` names an experiment JSON file
/// supplying defaults; explicit flags win over config values.
#[derive(Args)]
struct CommonArgs {
    /// Experiment config JSON (defaults for model, schedule, seed, out).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for all random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for emitted files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TiltArgs {
    /// Model spec: inline JSON or a path to a JSON file.
    #[arg(long)]
    model: Option<String>,
    /// CSV of base samples, one point per row (instead of sampling --model).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Tilt parameter; comma-separated coordinates when d > 1.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    /// Statistic map: "identity" or "power:a1,...,ad".
    #[arg(long, default_value = "identity")]
    g: String,
    /// Base sample size when sampling from --model.
    #[arg(long)]
    n: Option<u64>,
    /// Number of resampled draws to emit.
    #[arg(long)]
    m: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Model spec (needed to turn theta schedules into M_theta values).
    #[arg(long)]
    model: Option<String>,
    /// Schedule CSV with header "n,theta" or "n,m".
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FiguresArgs {
    /// Figure id (exp1..exp6); all six when omitted.
    #[arg(long)]
    figure: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; all twelve when omitted.
    #[arg(long)]
    suite: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PrmArgs {
    /// Number of draws of the limit law Z_{c1,PRM}.
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GaussSupArgs {
    /// Model spec: inline JSON or a path to a JSON file.
    #[arg(long)]
    model: Option<String>,
    /// Tilt parameter (one-dimensional).
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Grid points for the field discretization.
    #[arg(long, default_value_t = 512)]
    n: u64,
    /// Number of simulated sup draws.
    #[arg(long, default_value_t = 4000)]
    m: u64,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Tilt(args) => ops::cmd_tilt(args),
        Command::Diagnose(args) => ops::cmd_diagnose(args),
        Command::Figures(args) => ops::cmd_figures(args),
        Command::Verify(args) => ops::cmd_verify(args),
        Command::Prm(args) => ops::cmd_prm(args),
        Command::GaussSup(args) => ops::cmd_gauss_sup(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
