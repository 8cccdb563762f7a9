//! `ptomech`: command-line front end for the gain-loss optomechanics simulator.

mod commands;
mod params;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use params::ParamArgs;

const AFTER_HELP: &str = "Units: every rate (omega_m, kappa, gamma_m, g, J, delta, chi) is in units of the \
passive-cavity loss gamma, and alpha_in in units of sqrt(gamma). Inputs with gamma != 1 are rescaled \
on ingestion. Parameters not given keep their defaults: omega_m=23, gamma=1, kappa=0.1, gamma_m=1.63e-3, \
g=7.4e-5, J=0.8, delta=omega_m, chi=0, theta=0, alpha_in=3000, n_th=0, n_a=0.\n\
Exit status: 0 on success, 1 on invalid input, 2 on a numerical failure.";

#[derive(Parser, Debug)]
#[command(name = "ptomech", version, about = "Gain-loss coupled-cavity optomechanics: steady states, stability, dynamics and entanglement", after_help = AFTER_HELP)]
struct Cli {
    /// Worker threads for grid commands [default: all cores]
    #[arg(long, global = true, env = "PTOMECH_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,

    /// Write results here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optical supermode frequencies and the PT regime
    #[command(after_help = AFTER_HELP)]
    Supermodes(ParamArgs),

    /// Every mean-field steady state, ascending in |alpha2|^2
    #[command(after_help = AFTER_HELP)]
    Steady(ParamArgs),

    /// Jacobian spectrum and stability verdict of each steady state
    #[command(after_help = AFTER_HELP)]
    Stability(StabilityArgs),

    /// Stability verdicts over a two-parameter grid
    #[command(after_help = AFTER_HELP)]
    Basin(BasinArgs),

    /// Integrate the mean-field equations from a perturbed steady state
    #[command(after_help = AFTER_HELP)]
    Dynamics(DynamicsArgs),

    /// Steady-state quadrature covariance matrix of each steady state
    #[command(after_help = AFTER_HELP)]
    Covariance(CovarianceArgs),

    /// Logarithmic negativity of every mode pair
    #[command(after_help = AFTER_HELP)]
    Entangle(EntangleArgs),

    /// Full pipeline over a parameter grid
    #[command(after_help = AFTER_HELP)]
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct StabilityArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Stable only if every eigenvalue has real part below -margin, units of gamma
    #[arg(long, default_value_t = ptomech::stability::STABILITY_MARGIN)]
    margin: f64,

    /// Build the Jacobian from the complex amplitude instead of its magnitude
    #[arg(long)]
    phase_exact: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rule {
    AnyStable,
    AllBranches,
}

#[derive(Args, Debug)]
struct BasinArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Named grid: fig1a, fig1b, fig1c or fig1d
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,

    /// Basin specification file (JSON: template, x, y, rule, margin)
    #[arg(long)]
    spec: Option<PathBuf>,

    /// How several branches combine into one verdict [default: the spec's, else any-stable]
    #[arg(long, value_enum)]
    rule: Option<Rule>,

    /// Stability margin, units of gamma [default: the spec's, else 1e-9]
    #[arg(long)]
    margin: Option<f64>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Steady state to start from (index in ascending |alpha2|^2)
    #[arg(long, default_value_t = 0)]
    branch: usize,

    /// Relative perturbation applied to the starting steady state
    #[arg(long, default_value_t = 1e-6)]
    perturb: f64,

    /// Integration horizon, units of 1/gamma
    #[arg(long, default_value_t = ptomech::dynamics::DEFAULT_T_END)]
    t_end: f64,

    /// Relative error tolerance per step
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,

    /// Absolute error tolerance per step
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,

    /// Fraction of the time span used to classify the trajectory
    #[arg(long, default_value_t = 0.1)]
    window: f64,

    /// csv: the sampled trajectory; json: status and classification
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct CovarianceArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Read `steady` JSON output from stdin instead of solving for the steady states
    #[arg(long)]
    stdin: bool,

    /// Use the bare detuning in the (phi2, I2) drift entry instead of the shifted one
    #[arg(long = "paper-literal-A")]
    paper_literal_a: bool,
}

#[derive(Args, Debug)]
struct EntangleArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Use the bare detuning in the (phi2, I2) drift entry instead of the shifted one
    #[arg(long = "paper-literal-A")]
    paper_literal_a: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Named sweep, e.g. fig3b or fig4 (see README for the list)
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,

    /// Sweep specification file (JSON: template, axes, branch_policy, outputs, margin)
    #[arg(long)]
    spec: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Everything that ends the process early.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
    /// The reader went away; nothing left to report.
    Closed,
}

impl From<ptomech::Error> for Failure {
    fn from(e: ptomech::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        match e.io_error_kind() {
            Some(std::io::ErrorKind::BrokenPipe) => Failure::Closed,
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => f.write_str(m),
            Failure::Closed => f.write_str("output closed"),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Closed => 0,
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

fn run(cli: Cli) -> Outcome {
    let workers = cli.workers.map(|w| w as usize);
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path)
                .map_err(|e| Failure::Input(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    };
    match cli.command {
        Command::Supermodes(p) => commands::supermodes(&p, &mut sink)?,
        Command::Steady(p) => commands::steady(&p, &mut sink)?,
        Command::Stability(a) => commands::stability(&a, &mut sink)?,
        Command::Basin(a) => commands::basin(&a, workers, &mut sink)?,
        Command::Dynamics(a) => commands::dynamics(&a, &mut sink)?,
        Command::Covariance(a) => commands::covariance(&a, &mut sink)?,
        Command::Entangle(a) => commands::entangle(&a, &mut sink)?,
        Command::Sweep(a) => commands::sweep(&a, workers, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("ptomech: {}", one_line(first));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ptomech: {}", one_line(&f.to_string()));
            ExitCode::from(f.exit_code())
        }
    }
}
