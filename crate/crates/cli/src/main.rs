//! `laguerre-difmat`: nodes, differentiation matrices, the two half-line
//! model problems and the stability study from the command line.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage error,
//! 3 expected classic-mode breakdown, 4 solver failure, 5 missing oracle
//! cache.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use laguerre_difmat::collocation::FamilyTag;
use laguerre_difmat::solvers::SchrodingerProblem;

use output::OutputSpec;

pub enum Failure {
    Usage(String),
    Breakdown { report: String, message: String },
    Solver(String),
    MissingCache(String),
    Io(std::io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Breakdown { .. } => 3,
            Failure::Solver(_) => 4,
            Failure::MissingCache(_) => 5,
        }
    }
}

fn parse_family(s: &str) -> Result<FamilyTag, String> {
    s.parse().map_err(|e: laguerre_difmat::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Stable,
    Classic,
}

#[derive(Debug, Parser)]
#[command(
    name = "laguerre-difmat",
    version,
    about = "Laguerre pseudospectral differentiation matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Collocation nodes and scaled coefficients.
    Nodes {
        /// standard-gauss, augmented-gauss or gauss-radau.
        #[arg(long, value_parser = parse_family, default_value = "augmented-gauss")]
        family: FamilyTag,
        #[arg(long)]
        npts: usize,
        /// Laguerre parameter; defaults to the family's own.
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[command(flatten)]
        out: OutputSpec,
    },
    /// A differentiation matrix.
    Difmat {
        #[arg(long, value_parser = parse_family, default_value = "augmented-gauss")]
        family: FamilyTag,
        #[arg(long)]
        npts: usize,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// `classic` reproduces the product-weight construction and reports
        /// its breakdown with exit code 3.
        #[arg(long, value_enum, default_value_t = ModeArg::Stable)]
        mode: ModeArg,
        #[command(flatten)]
        out: OutputSpec,
    },
    /// Max-norm error of `-u'' + γu = f` with exact solution `sin(2x) e^{-x/4}`.
    Bvp {
        #[arg(long, default_value_t = 4.03)]
        beta: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        /// Node count, or a sweep `A:B:STEP`.
        #[arg(long)]
        npts: String,
        #[command(flatten)]
        out: OutputSpec,
    },
    /// Smallest eigenvalues of `-y'' + y = λ q(x) y` with a Woods–Saxon `q`.
    Schrodinger {
        #[arg(long, default_value_t = 10.0)]
        beta: f64,
        /// Node count, or a sweep `A:B:STEP`.
        #[arg(long)]
        npts: String,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long, default_value_t = 7.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.6)]
        thickness: f64,
        #[command(flatten)]
        out: OutputSpec,
    },
    /// Classic, derivative-form and stable first-order matrices against
    /// cached oracle tables.
    StabilityStudy {
        #[arg(long, default_value_t = 500)]
        max_n: usize,
        #[arg(long, default_value_t = 10)]
        step: usize,
        #[arg(long, value_parser = parse_family, default_value = "augmented-gauss")]
        family: FamilyTag,
        /// Oracle table directory; overrides LAGUERRE_ORACLE_CACHE.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        out: OutputSpec,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (body, out) = match cli.command {
        Command::Nodes {
            family,
            npts,
            alpha,
            out,
        } => (commands::nodes(family, alpha, npts, &out), out),
        Command::Difmat {
            family,
            npts,
            alpha,
            order,
            mode,
            out,
        } => {
            let mode = match mode {
                ModeArg::Stable => commands::Mode::Stable,
                ModeArg::Classic => commands::Mode::Classic,
            };
            (commands::difmat_cmd(family, alpha, npts, order, mode, &out), out)
        }
        Command::Bvp { beta, gamma, npts, out } => (commands::bvp(beta, gamma, &npts, &out), out),
        Command::Schrodinger {
            beta,
            npts,
            count,
            radius,
            thickness,
            out,
        } => {
            let p = SchrodingerProblem {
                radius,
                thickness,
                beta,
                count,
            };
            (commands::schrodinger(p, &npts, &out), out)
        }
        Command::StabilityStudy {
            max_n,
            step,
            family,
            cache,
            out,
        } => (commands::stability_study(family, max_n, step, cache, &out), out),
    };
    match body {
        Ok(b) => out.write(&b).map_err(Failure::Io),
        Err(Failure::Breakdown { report, message }) => {
            out.write(&report).map_err(Failure::Io)?;
            Err(Failure::Breakdown { report, message })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Breakdown { message, .. } => eprintln!("classic construction broke down: {message}"),
                Failure::Solver(m) => eprintln!("solver failed: {m}"),
                Failure::MissingCache(m) => eprintln!("missing oracle cache: {m}"),
                Failure::Io(e) => eprintln!("cannot write output: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}
