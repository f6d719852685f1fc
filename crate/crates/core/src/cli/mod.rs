//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{CommandKind, Format, IntList, Overrides, RunConfig, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(crate::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }
}

const AFTER_HELP: &str = "\
CSV columns:
  levels  n,l,status,bracket,delta_e1_per_t2,t,delta_e1,max_rel_diff,agree
  ns      n,beta,S_ns,error,S_over_n2,flagged,oracle,oracle_error,agree,delta_e_ns_per_t
  bound   rel_uncertainty,coefficient,t_bound,hbar_sqrt_theta2_bound_m2,alpha_bound,bohr_radius_m,planck_length_m
  verify  check,passed,value,tolerance,detail

Energies are in hartree; delta_e1_per_t2 is the coefficient of t^2 and
delta_e_ns_per_t that of t. JSON documents carry a top-level schema_version
and print numbers to 15 significant digits.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.";

#[derive(Debug, Parser)]
#[command(name = "nc-hydrogen", version, about = "Hydrogen energy-level shifts from noncommuting coordinates", after_help = AFTER_HELP)]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output file (default: standard output).
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Significant digits in CSV output.
    #[arg(long, global = true)]
    pub precision: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Constants table replacing the bundled CODATA 2018 values.
    #[arg(long, global = true, value_name = "FILE")]
    pub constants: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First-order shifts of the l >= 2 levels.
    Levels(LevelArgs),
    /// The ns series S_ns(beta), optionally against the grid oracle.
    Ns(NsArgs),
    /// Bounds on the noncommutativity from the 1s-2s uncertainty.
    Bound(BoundArgs),
    /// Run the invariant and oracle suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
pub struct Strength {
    #[arg(long, conflicts_with = "t")]
    pub alpha: Option<f64>,
    /// Dimensionless strength hbar*sqrt<theta^2>/a_B^2.
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    /// Principal quantum numbers, e.g. 3..5 or 3,4,6.
    #[arg(long)]
    pub n: Option<IntList>,
    /// Orbital quantum numbers (default: all l < n).
    #[arg(long)]
    pub l: Option<IntList>,
    #[command(flatten)]
    pub strength: Strength,
}

#[derive(Debug, Args)]
pub struct NsArgs {
    #[arg(long)]
    pub n: Option<IntList>,
    /// Comma-separated beta values.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Last series index.
    #[arg(long = "K", short = 'K')]
    pub k: Option<usize>,
    /// Also evaluate the grid oracle (beta > 0 only).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[command(flatten)]
    pub strength: Strength,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub rel_uncertainty: Option<f64>,
    /// Measured 1s-2s frequency in Hz.
    #[arg(long)]
    pub frequency: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Series truncation for the S_1s(0) and n^2 checks.
    #[arg(long = "K", short = 'K')]
    pub k: Option<usize>,
    /// Run only the named checks (repeatable).
    #[arg(long = "check")]
    pub checks: Vec<String>,
    #[arg(long)]
    pub rel_uncertainty: Option<f64>,
}

fn overrides(cli: Cli) -> (Option<PathBuf>, Overrides) {
    let mut o = Overrides {
        out: cli.out,
        format: cli.format,
        precision: cli.precision,
        seed: cli.seed,
        constants: cli.constants,
        ..Default::default()
    };
    match cli.command {
        None => {}
        Some(Command::Levels(a)) => {
            o.command = Some(CommandKind::Levels);
            o.n = a.n;
            o.l = a.l;
            o.alpha = a.strength.alpha;
            o.t = a.strength.t;
        }
        Some(Command::Ns(a)) => {
            o.command = Some(CommandKind::Ns);
            o.n = a.n;
            o.beta = a.beta;
            o.k = a.k;
            o.oracle = a.oracle;
            o.grid_points = a.grid_points;
            o.rho_max = a.rho_max;
            o.alpha = a.strength.alpha;
            o.t = a.strength.t;
        }
        Some(Command::Bound(a)) => {
            o.command = Some(CommandKind::Bound);
            o.rel_uncertainty = a.rel_uncertainty;
            o.frequency_hz = a.frequency;
        }
        Some(Command::Verify(a)) => {
            o.command = Some(CommandKind::Verify);
            o.k = a.k;
            o.rel_uncertainty = a.rel_uncertainty;
            if !a.checks.is_empty() {
                o.checks = Some(a.checks);
            }
        }
    }
    (cli.config, o)
}

pub fn settings_from_args<I, T>(args: I) -> Result<Settings, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let (config_path, o) = overrides(cli);
    let cfg = match config_path {
        Some(p) => RunConfig::from_path(&p).map_err(CliError::Config)?,
        None => RunConfig::default(),
    };
    Settings::resolve(cfg, o).map_err(CliError::Config)
}

pub fn execute(s: &Settings) -> Result<commands::Output, CliError> {
    match s.command {
        CommandKind::Levels => commands::levels(s),
        CommandKind::Ns => commands::ns(s),
        CommandKind::Bound => commands::bound(s),
        CommandKind::Verify => Ok(verify::run(s)),
    }
}

/// Runs the program and returns its exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    // --help and --version are not errors
    if let Err(e) = Cli::try_parse_from(&args) {
        if !e.use_stderr() {
            let _ = e.print();
            return 0;
        }
    }
    let result = settings_from_args(&args).and_then(|s| {
        let out = execute(&s)?;
        emit(&s, &out)?;
        Ok(out.success)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("nc-hydrogen: {e}");
            e.exit_code()
        }
    }
}

fn emit(s: &Settings, out: &commands::Output) -> Result<(), CliError> {
    match &s.out {
        Some(path) => {
            std::fs::write(path, &out.document).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            println!("{}", out.summary);
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.document.as_bytes());
            eprintln!("{}", out.summary);
        }
    }
    Ok(())
}
