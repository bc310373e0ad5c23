//! Command-line front end: dataset generation, clustering, and benchmark
//! reports comparing every kernel variant against the serial oracle.

pub mod bench;
pub mod cluster;
pub mod gen;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use tiledscan::{MergeBackend, VariantId};

#[derive(Debug, Parser)]
#[command(
    name = "tiledscan",
    version,
    about = "Dense-matrix parallel DBSCAN for 3D points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic blob dataset.
    Gen(GenArgs),
    /// Cluster a point file and write one label per line.
    Cluster(ClusterArgs),
    /// Time every variant against the serial oracle and write a report.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub clusters: usize,
    /// Per-axis standard deviation of each blob.
    #[arg(long)]
    pub spread: f64,
    /// Fraction of points drawn uniformly instead of from a blob.
    #[arg(long)]
    pub noise: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Kernel variant name, or `serial` for the reference implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantChoice {
    Serial,
    Kernel(VariantId),
}

fn parse_variant(s: &str) -> Result<VariantChoice, String> {
    if s.eq_ignore_ascii_case("serial") {
        return Ok(VariantChoice::Serial);
    }
    s.parse().map(VariantChoice::Kernel).map_err(|_| {
        let names: Vec<&str> = VariantId::ALL.iter().map(|v| v.name()).collect();
        format!("expected serial or one of {}", names.join(", "))
    })
}

fn parse_kernel(s: &str) -> Result<VariantId, String> {
    s.parse().map_err(|e: tiledscan::Error| e.to_string())
}

fn parse_backend(s: &str) -> Result<MergeBackend, String> {
    s.parse().map_err(|e: tiledscan::Error| e.to_string())
}

#[derive(Debug, Clone, clap::Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub minpts: usize,
    #[arg(long, default_value = "fused-algebraic", value_parser = parse_variant)]
    pub variant: VariantChoice,
    #[arg(long, default_value = "iterative", value_parser = parse_backend)]
    pub merge: MergeBackend,
    /// Worker threads; defaults to all hardware threads.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 256)]
    pub tile: usize,
    #[arg(long, default_value_t = 32)]
    pub unroll: usize,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "5061,23040")]
    pub sizes: Vec<usize>,
    /// Radius; snapped to a half-grid value when `--grid` is set.
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 10)]
    pub minpts: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[arg(long, default_value_t = 8)]
    pub clusters: usize,
    #[arg(long, default_value_t = 2.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    /// Coordinate grid; 0 keeps raw coordinates.
    #[arg(long, default_value_t = 0.25)]
    pub grid: f64,
    /// Comma list of worker counts; defaults to all hardware threads.
    #[arg(long, value_delimiter = ',')]
    pub threads: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_kernel)]
    pub variants: Vec<VariantId>,
    #[arg(long, value_delimiter = ',', value_parser = parse_backend)]
    pub backends: Vec<MergeBackend>,
    #[arg(long, default_value_t = 256)]
    pub tile: usize,
    #[arg(long, default_value_t = 32)]
    pub unroll: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] tiledscan::Error),

    #[error(
        "equivalence check failed: size {size}, variant {variant}, merge {backend}, \
         {threads} threads: first differing point index {index}"
    )]
    Mismatch {
        size: usize,
        variant: VariantId,
        backend: MergeBackend,
        threads: usize,
        index: usize,
    },

    #[error("report: {0}")]
    Report(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(tiledscan::Error::InvalidParams { .. }) => 2,
            _ => 1,
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render().ansi())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => gen::cmd_gen(a, out),
        Command::Cluster(a) => cluster::cmd_cluster(a, out),
        Command::Bench(a) => bench::cmd_bench(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Core(tiledscan::Error::CapacityExceeded { .. }) = e {
                let _ = writeln!(
                    err,
                    "hint: set {} (bytes) to raise the cap",
                    tiledscan::MEM_CAP_ENV
                );
            }
            e.exit_code()
        }
    }
}

pub fn main_with(args: impl IntoIterator<Item = OsString>) -> ExitCode {
    let code = run(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
