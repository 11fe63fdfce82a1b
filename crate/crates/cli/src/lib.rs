//! `qsc`: command-line front end for `qsc-core`.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric-tolerance failure.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

/// Input error; reported on stderr with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError(pub String);

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl From<qsc_core::Error> for CliError {
    fn from(e: qsc_core::Error) -> Self {
        Self(e.to_string())
    }
}

/// What a command produced: the document, whether every numeric check held,
/// and warnings for stderr.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: String,
    pub ok: bool,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(body: String, ok: bool) -> Self {
        Self { body, ok, warnings: Vec::new() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qsc", version, about = "Diagram combinatorics, quantum Ito coefficients and Markov-limit numerics")]
struct Cli {
    /// JSON config file; flags override it, it overrides defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stirling row, Bell number and pair-partition count
    Combinatorics(CombinatoricsArgs),
    /// Vacuum moments of q or N: closed form, diagram sum and Fock oracle
    Moments(MomentsArgs),
    /// Ito coefficients of a coefficient family given as JSON
    ItoCoeffs(ItoCoeffsArgs),
    /// Coherent matrix elements by series, ODE and toy Fock space
    Evolve(EvolveArgs),
    /// Scaled-kernel diagram integrals against their white-noise limits
    MarkovScan(MarkovScanArgs),
    /// Pule and Xi domination report
    Bounds(BoundsArgs),
    /// Draw a diagram as text or SVG
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (relative paths resolve against $QSC_OUTPUT_DIR); stdout if absent
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct CombinatoricsArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Also count partitions by enumeration (n <= 14)
    #[arg(long)]
    enumerate: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    /// `q` (field quadrature) or `n` (displaced number operator)
    #[arg(long, default_value = "q")]
    kind: String,
    #[arg(long)]
    n: Option<usize>,
    /// Coherent amplitude as `re,im`
    #[arg(long, value_parser = config::parse_complex, allow_hyphen_values = true)]
    z: Option<num_complex::Complex64>,
    /// Relative tolerance against the Fock oracle
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ItoCoeffsArgs {
    /// Coefficient family JSON
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest acceptable unitarity residual
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Evolution JSON: `family` plus optional step functions `f`, `g`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Methods among series, ode, toyfock
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<String>,
    /// Use f = g = 0
    #[arg(long)]
    vacuum: bool,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    /// Toy Fock slot propagator: first-order or exponential
    #[arg(long, default_value = "first-order")]
    toyfock_mode: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct KernelArgs {
    /// Exponential kernel amplitude c
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    /// Exponential kernel decay time
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Exponential kernel modulation frequency
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Tabulated kernel JSON with `grid` and `values`
    #[arg(long)]
    kernel_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MarkovScanArgs {
    /// Diagram such as `4;(4,1),(3,2)`; repeatable
    #[arg(long = "diagram")]
    diagrams: Vec<String>,
    /// Add every pair diagram on this many vertices
    #[arg(long)]
    all_pairs: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Decreasing scale parameters
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<f64>>,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Largest even vertex count for the Pule check
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    times: Option<Vec<f64>>,
    /// Xi parameter A (ln of ||kappa E11||)
    #[arg(long, allow_hyphen_values = true)]
    xi_a: Option<f64>,
    /// Xi parameter B
    #[arg(long, allow_hyphen_values = true)]
    xi_b: Option<f64>,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    diagram: String,
    #[command(flatten)]
    out: OutputArgs,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Combinatorics(_) => "combinatorics",
            Command::Moments(_) => "moments",
            Command::ItoCoeffs(_) => "ito-coeffs",
            Command::Evolve(_) => "evolve",
            Command::MarkovScan(_) => "markov-scan",
            Command::Bounds(_) => "bounds",
            Command::Render(_) => "render",
        }
    }

    fn out(&self) -> &OutputArgs {
        match self {
            Command::Combinatorics(a) => &a.out,
            Command::Moments(a) => &a.out,
            Command::ItoCoeffs(a) => &a.out,
            Command::Evolve(a) => &a.out,
            Command::MarkovScan(a) => &a.out,
            Command::Bounds(a) => &a.out,
            Command::Render(a) => &a.out,
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.check_subcommand(cli.command.name())?;
    match &cli.command {
        Command::Combinatorics(a) => commands::combinatorics(a, &cfg),
        Command::Moments(a) => commands::moments(a, &cfg),
        Command::ItoCoeffs(a) => commands::ito_coeffs(a, &cfg),
        Command::Evolve(a) => commands::evolve(a, &cfg),
        Command::MarkovScan(a) => commands::markov_scan(a, &cfg),
        Command::Bounds(a) => commands::bounds(a, &cfg),
        Command::Render(a) => commands::render(a, &cfg),
    }
    .and_then(|report| {
        let output = cli.command.out().output.clone().or(cfg.output.clone());
        write_output(&report.body, output)?;
        Ok(report)
    })
}

fn write_output(body: &str, output: Option<PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let path = config::resolve_output(&path);
            std::fs::write(&path, body)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::input(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.ok {
                EXIT_OK
            } else {
                eprintln!("error: numeric check outside tolerance");
                EXIT_TOLERANCE
            }
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}
