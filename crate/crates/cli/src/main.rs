mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonexp::survival::Method;
use nonexp::Error;

use crate::config::RunConfig;

/// Survival probabilities of a quasi-bound state in a well-barrier potential
/// with an inverse-square tail.
#[derive(Parser)]
#[command(name = "nonexp", version)]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the energy density.
    Density,
    /// Exact survival probability plus the requested approximations.
    Survive,
    /// Effective exponent against the tail strength.
    Sweep,
    /// Magnitude of the continued density along rays in the lower half plane.
    ArcCheck,
    /// Power-law fit of a survival file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "exact")]
        method: Method,
    },
    /// Print the effective configuration.
    ShowConfig,
    #[command(hide = true)]
    Verify,
}

/// Flags override both the defaults and the configuration file.
#[derive(Args)]
struct Overrides {
    #[arg(long, global = true, allow_hyphen_values = true)]
    v0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    vb: Option<String>,
    #[arg(long = "r-a", global = true, allow_hyphen_values = true)]
    r_a: Option<String>,
    #[arg(long = "r-d", global = true, allow_hyphen_values = true)]
    r_d: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long = "n-a", global = true)]
    n_a: Option<String>,
    #[arg(long = "t-min", global = true)]
    t_min: Option<String>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<String>,
    #[arg(long = "t-per-decade", global = true)]
    t_per_decade: Option<String>,
    #[arg(long = "e-min", global = true)]
    e_min: Option<String>,
    #[arg(long = "e-max", global = true)]
    e_max: Option<String>,
    #[arg(long = "e-points", global = true)]
    e_points: Option<String>,
    #[arg(long = "fit-lo", global = true)]
    fit_lo: Option<String>,
    #[arg(long = "fit-hi", global = true)]
    fit_hi: Option<String>,
    #[arg(long = "fit-points", global = true)]
    fit_points: Option<String>,
    /// Comma-separated: laplace-axis, laplace-threshold, one-term, series.
    #[arg(long, global = true)]
    methods: Option<String>,
    #[arg(long = "n-terms", global = true)]
    n_terms: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    betas: Option<String>,
    #[arg(long, global = true)]
    radii: Option<String>,
    /// Comma-separated ray angles in units of pi, each in (-1/4, 0].
    #[arg(long, global = true, allow_hyphen_values = true)]
    angles: Option<String>,
    #[arg(long, global = true)]
    tolerance: Option<String>,
    #[arg(long, global = true)]
    parallel: Option<String>,
    #[arg(long, global = true)]
    output: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all = [
            ("v0", &self.v0),
            ("vb", &self.vb),
            ("r_a", &self.r_a),
            ("r_d", &self.r_d),
            ("beta", &self.beta),
            ("n_a", &self.n_a),
            ("t_min", &self.t_min),
            ("t_max", &self.t_max),
            ("t_per_decade", &self.t_per_decade),
            ("e_min", &self.e_min),
            ("e_max", &self.e_max),
            ("e_points", &self.e_points),
            ("fit_lo", &self.fit_lo),
            ("fit_hi", &self.fit_hi),
            ("fit_points", &self.fit_points),
            ("methods", &self.methods),
            ("n_terms", &self.n_terms),
            ("betas", &self.betas),
            ("radii", &self.radii),
            ("angles", &self.angles),
            ("tolerance", &self.tolerance),
            ("parallel", &self.parallel),
            ("output", &self.output),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .collect()
    }
}

/// Exit status per error class; 1 is left to panics and clap uses 2 for usage.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::BoundState { .. }
        | Error::StepSize { .. }
        | Error::WindowCoverage { .. }
        | Error::InsufficientCoefficients { .. } => 3,
        Error::Io(_) => 4,
        _ => 5,
    }
}

const VERIFY_FAILED: u8 = 6;

fn load(cli: &Cli) -> nonexp::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig::default(),
    };
    for (k, v) in cli.overrides.pairs() {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> nonexp::Result<bool> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Density => commands::density(&cfg),
        Command::Survive => commands::survive(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::ArcCheck => commands::arc_check(&cfg),
        Command::Fit { input, method } => commands::fit(&cfg, input, *method),
        Command::ShowConfig => {
            print!("{cfg}");
            Ok(true)
        }
        Command::Verify => commands::verify(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error[verification-failed]: oracle disagreement");
            ExitCode::from(VERIFY_FAILED)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(exit_code(&e))
        }
    }
}
