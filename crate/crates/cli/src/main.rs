//! `hst`: synthesize symbols from spectral data, analyze Taylor
//! coefficients, and run the identity and roundtrip checks.
//!
//! Exit status is 0 on success, 1 on a domain error (with
//! `{"error": {"kind", "detail"}}` on stderr) and 2 on a usage error.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hst", version, about = "Spectral data of Hankel operators with finite-rank squared modulus")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectral data JSON -> Taylor coefficients of the symbol.
    Synthesize(SynthesizeArgs),
    /// Taylor coefficients -> recovered spectral data.
    Analyze(AnalyzeArgs),
    /// Synthesize then analyze, and report the recovery errors.
    Roundtrip(RoundtripArgs),
    /// Weights, identities and invertibility certificate of a spectrum.
    CauchyReport(CauchyReportArgs),
    /// Run the randomized identity suite.
    Verify(VerifyArgs),
    /// Boundary values of the symbol as CSV.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input JSON file, or `-` for stdin.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthesizeArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Number of Taylor coefficients (power of two, at least 8).
    #[arg(long, default_value_t = 128)]
    order: usize,
    /// Also write `order` more coefficients, enough for an `order x order`
    /// Hankel section and its shift.
    #[arg(long)]
    keep_section: bool,
    /// Fail when the tail exceeds this fraction of the coefficient norm.
    #[arg(long, default_value_t = 1e-6)]
    tail_tol: f64,
    /// Write boundary samples of the symbol (CSV) here as well.
    #[arg(long, value_name = "PATH")]
    boundary_trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Section size; defaults to the largest `M` with `2M - 1` coefficients
    /// available.
    #[arg(long)]
    order: Option<usize>,
    /// Eigenvalue clustering tolerance relative to the largest eigenvalue.
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    /// Minimum weight of `u` on an eigenspace for dominance.
    #[arg(long, default_value_t = 1e-4)]
    dom_tol: f64,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    #[command(flatten)]
    io: InputArgs,
    #[arg(long, default_value_t = 256)]
    order: usize,
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    dom_tol: f64,
}

#[derive(Debug, Args)]
struct CauchyReportArgs {
    /// Spectrum or spectral data JSON; a random spectrum is drawn when
    /// omitted.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Largest `N` of a random spectrum.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Parameter points for the invertibility certificate.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 25)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 512)]
    max_order: usize,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Number of equispaced points `t = 2 pi m / points + offset`.
    #[arg(long, default_value_t = 256)]
    points: usize,
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
}

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HST_LOG", "error"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    let result = match cli.command {
        Command::Synthesize(a) => commands::synthesize(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Roundtrip(a) => commands::roundtrip(&a),
        Command::CauchyReport(a) => commands::cauchy_report(&a, cli.seed),
        Command::Verify(a) => commands::verify(&a, cli.seed),
        Command::Sample(a) => commands::sample(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
