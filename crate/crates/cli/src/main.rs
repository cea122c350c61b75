//! `oscindex`: Newton-polyhedral analysis of oscillatory integrals from the
//! command line. JSON reports go to stdout (or `--json`), a short text
//! summary to stderr.

mod commands;
mod grid;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "oscindex", version, about = "Oscillation indices from Newton polyhedra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polyhedron of the phase: vertices, facets, Newton diagram.
    Polyhedron(Common),
    /// Newton distance, multiplicity and essential faces of (phase, amplitude).
    Pair(Common),
    /// Normal fans and their unimodular refinement.
    Fan(Common),
    /// Toric resolution charts with pullback data for every maximal cone.
    Resolve(Common),
    /// Candidate poles of the local zeta function.
    Poles(Common),
    /// Hypothesis audit and the strongest supported claim on the index.
    Verdict(Common),
    /// Distance product test between x^1 f and x^1 φ.
    Symmetry(Common),
    /// Quadrature of I(τ) over a τ grid, with exponent fit and verdict.
    VerifyNumeric(Numeric),
}

#[derive(Args, Clone)]
pub struct Common {
    /// Number of variables.
    #[arg(long)]
    pub dim: usize,
    /// Phase polynomial, e.g. "x1^5 + x1^6 + x2^5".
    #[arg(long)]
    pub phase: String,
    /// Amplitude; polynomials and the flat atoms exp(-1/xI^2).
    #[arg(long, default_value = "1")]
    pub amp: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long, visible_alias = "out")]
    pub json: Option<PathBuf>,
    /// Truncation of the candidate pole progressions.
    #[arg(long, default_value_t = oscindex_core::poles::DEFAULT_NU_MAX)]
    pub nu_max: i64,
    /// Seed for the numerical nondegeneracy search.
    #[arg(long, default_value_t = oscindex_core::nondegeneracy::DEFAULT_SEED)]
    pub seed: u64,
    /// Exit with status 3 when the verdict is inconclusive.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Shape {
    Product,
    Radial,
}

#[derive(Args, Clone)]
pub struct Numeric {
    #[command(flatten)]
    pub common: Common,
    /// Plateau and support radii "r,R" of the cutoff.
    #[arg(long, default_value = "0.25,0.5")]
    pub cutoff: String,
    #[arg(long, value_enum, default_value = "product")]
    pub shape: Shape,
    /// Geometric τ grid "2^a..2^b".
    #[arg(long, default_value = "2^5..2^14")]
    pub tau_grid: String,
    /// Step of the grid exponent.
    #[arg(long, default_value_t = 1.0)]
    pub tau_step: f64,
    /// Largest log-power tried by the fit (defaults to the dimension).
    #[arg(long)]
    pub max_eta: Option<usize>,
    /// Also write the samples as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Failures, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Malformed or unsupported input: status 2.
    Input(String),
    /// Anything else: status 1.
    Runtime(anyhow::Error),
}

impl From<oscindex_core::Error> for Failure {
    fn from(e: oscindex_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<oscindex_numeric::NumericError> for Failure {
    fn from(e: oscindex_numeric::NumericError) -> Self {
        use oscindex_numeric::NumericError as E;
        match e {
            E::Core(_) | E::DimensionTooLarge(_) | E::TauOutOfRange { .. } | E::BelowPole { .. } => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// What a command produced: the JSON report, a one-line text summary, and
/// whether `--strict` should turn it into status 3.
pub struct Outcome {
    pub json: String,
    pub summary: String,
    pub inconclusive: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Polyhedron(c) => (c, commands::polyhedron(c)),
        Command::Pair(c) => (c, commands::pair(c)),
        Command::Fan(c) => (c, commands::fan(c)),
        Command::Resolve(c) => (c, commands::resolve(c)),
        Command::Poles(c) => (c, commands::poles(c)),
        Command::Verdict(c) => (c, commands::verdict(c)),
        Command::Symmetry(c) => (c, commands::symmetry(c)),
        Command::VerifyNumeric(n) => (&n.common, commands::verify_numeric(n)),
    };
    let result = result.and_then(|out| {
        match &common.json {
            Some(path) => std::fs::write(path, format!("{}\n", out.json))?,
            None => writeln!(std::io::stdout().lock(), "{}", out.json)?,
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            eprintln!("{}", out.summary);
            if common.strict && out.inconclusive { ExitCode::from(3) } else { ExitCode::SUCCESS }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
