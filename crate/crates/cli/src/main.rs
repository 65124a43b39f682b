//! Command-line front end: one subcommand per experiment, a `run` subcommand
//! driven entirely by a TOML file, and `report` to bundle finished runs.
//!
//! Exit codes: 0 success, 1 failure, 2 invalid configuration, 3 enumeration
//! budget exceeded.

mod config;
mod experiments;
mod output;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Experiment, ExperimentConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(String),
    Failure(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Failure(format!("{}: {e}", path.display()))
    }

    pub fn csv(e: csv::Error) -> Self {
        CliError::Failure(format!("csv: {e}"))
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Budget(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<congrowth::Error> for CliError {
    fn from(e: congrowth::Error) -> Self {
        use congrowth::Error::*;
        match e {
            Budget { .. } => CliError::Budget(e.to_string()),
            // A mismatch can only come from a bug in this binary.
            ModelMismatch => CliError::Failure(e.to_string()),
            // Everything else is a parameter the computation cannot honour.
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "congrowth",
    version,
    about = "Conjugacy growth experiments on free groups and free products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML file with parameters; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: ExperimentConfig,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON reports written by earlier runs.
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Alphabet, sphere sizes and, with --g, conjugacy data of one element.
    ModelInfo(ExperimentArgs),
    /// Sphere, ball and annulus counts with a growth-rate fit.
    CensusBalls(ExperimentArgs),
    /// Conjugacy class counts under both length conventions.
    CensusConjugacy(ExperimentArgs),
    /// Fraction of elements with a barrier-free geodesic.
    CensusBarriers(ExperimentArgs),
    /// Fraction of elements with a fractionally barrier-free geodesic.
    CensusFractional(ExperimentArgs),
    /// Fraction of elements meeting the linear-drift clauses.
    CensusDrift(ExperimentArgs),
    /// Empirical contraction and bounded-intersection constants of an axis.
    AuditContraction(ExperimentArgs),
    /// Builds and validates a periodic admissible path, then mutates it.
    Admissible(ExperimentArgs),
    /// Projection complex on the translates of an axis within a window.
    ComplexBuild(ExperimentArgs),
    /// Displacement of a vertex under powers of g in the projection complex.
    ComplexLoxodromic(ExperimentArgs),
    /// Acylindricity counts and kernel bounds for the projection complex.
    ComplexAcyl(ExperimentArgs),
    /// Growth series coefficients and a rationality probe.
    Series(ExperimentArgs),
    /// Growth gap between a subgroup orbit and its escaping elements.
    SccEstimate(ExperimentArgs),
    /// Runs the experiment named by the `experiment` key of --config.
    Run(ExperimentArgs),
    /// Merges JSON reports into bundle.json and bundle.csv.
    Report(ReportArgs),
}

fn run_experiment(fixed: Option<Experiment>, args: ExperimentArgs) -> Result<(), CliError> {
    let base = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if fixed.is_none() && args.config.is_none() {
        return Err(CliError::Usage("run needs --config".into()));
    }
    let mut cfg = base.overlay(&args.params);
    if let Some(e) = fixed {
        if cfg.experiment.is_some_and(|c| c != e) {
            return Err(CliError::Usage(format!(
                "config names experiment {} but the subcommand is {e}",
                cfg.experiment.unwrap()
            )));
        }
        cfg.experiment = Some(e);
    }
    let resolved = cfg.resolve()?;
    let artifacts = experiments::run(&resolved)?;
    let path = output::emit(&resolved, &artifacts)?;
    println!("{}", artifacts.summary);
    println!("wrote {}", path.display());
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    use Command as C;
    use Experiment as E;
    let (fixed, args) = match command {
        C::Report(r) => return report::bundle(&r.inputs, &r.out_dir),
        C::Run(a) => (None, a),
        C::ModelInfo(a) => (Some(E::ModelInfo), a),
        C::CensusBalls(a) => (Some(E::CensusBalls), a),
        C::CensusConjugacy(a) => (Some(E::CensusConjugacy), a),
        C::CensusBarriers(a) => (Some(E::CensusBarriers), a),
        C::CensusFractional(a) => (Some(E::CensusFractional), a),
        C::CensusDrift(a) => (Some(E::CensusDrift), a),
        C::AuditContraction(a) => (Some(E::AuditContraction), a),
        C::Admissible(a) => (Some(E::Admissible), a),
        C::ComplexBuild(a) => (Some(E::ComplexBuild), a),
        C::ComplexLoxodromic(a) => (Some(E::ComplexLoxodromic), a),
        C::ComplexAcyl(a) => (Some(E::ComplexAcyl), a),
        C::Series(a) => (Some(E::Series), a),
        C::SccEstimate(a) => (Some(E::SccEstimate), a),
    };
    run_experiment(fixed, args)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
