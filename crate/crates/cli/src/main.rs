//! `hyperwalk`: random walks on hyperbolic spaces from the command line.

mod backend;
mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Params, RunConfig};
use error::{config_error, CliError};

#[derive(Parser)]
#[command(name = "hyperwalk", version, about = "Exact laws, Monte Carlo probes and large deviations for random walks on hyperbolic spaces")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo trajectories: displacement and translation length at the horizon.
    Simulate,
    /// Exact law of d(e, γ_n) for the simple walk on F_q.
    ExactDist,
    /// Exact law of τ(γ_n) for the simple walk on F_q.
    TauDist,
    /// −(1/2n) ln P(d_2n = 0) and its running infimum.
    ReturnRate,
    /// Normalized log-moment generating function Λ_n(λ).
    Mgf,
    /// Finite-n rate curve −(1/n) ln P(d_n ≷ αn).
    Rate,
    /// Assemble above and below curves into a rate function.
    Assemble,
    /// Convex conjugate of the analytic rate or of Λ_n.
    Legendre,
    /// Chernoff bound sup_λ (λa − Λ_n(λ)) next to the exact rate.
    Chernoff,
    /// Closed-form rate function of the simple walk on F_q.
    Analytic,
    #[command(subcommand)]
    Schottky(SchottkyCommand),
    /// Displacement spectrum of products B^n.
    Spectrum,
    /// Search B^n for two elements of different stable length.
    Arithmetic,
    /// Joint displacement against joint translation length.
    BergerWang,
    #[command(subcommand)]
    Tails(TailsCommand),
    /// Harmonic measure of boundary cylinders and its decay exponent.
    Harmonic,
    #[command(subcommand)]
    Compare(CompareCommand),
}

#[derive(Subcommand)]
enum SchottkyCommand {
    /// Check the two-thirds condition at a constant (or find the smallest).
    Verify,
    /// Ping-pong construction from two loxodromic elements.
    Construct,
    /// The element of S maximizing τ(s·g).
    Boost,
    /// Cyclic rotation of a word whose length is closest to r.
    MovingTau,
}

#[derive(Subcommand)]
enum TailsCommand {
    /// P((z_n, z_0)_{z_i} ≥ R).
    Gromov,
    /// P((z_p, x)_{z_0} ≥ R).
    Punctual,
    /// P(d(z_n, x) − d(z_0, x) ≤ εn).
    WalkAway,
}

#[derive(Subcommand)]
enum CompareCommand {
    /// Exact τ-rate against d-rate; exits 3 beyond --tol.
    TauVsDist,
}

impl Command {
    fn path(&self) -> Vec<&'static str> {
        match self {
            Command::Simulate => vec!["simulate"],
            Command::ExactDist => vec!["exact-dist"],
            Command::TauDist => vec!["tau-dist"],
            Command::ReturnRate => vec!["return-rate"],
            Command::Mgf => vec!["mgf"],
            Command::Rate => vec!["rate"],
            Command::Assemble => vec!["assemble"],
            Command::Legendre => vec!["legendre"],
            Command::Chernoff => vec!["chernoff"],
            Command::Analytic => vec!["analytic"],
            Command::Schottky(s) => vec![
                "schottky",
                match s {
                    SchottkyCommand::Verify => "verify",
                    SchottkyCommand::Construct => "construct",
                    SchottkyCommand::Boost => "boost",
                    SchottkyCommand::MovingTau => "moving-tau",
                },
            ],
            Command::Spectrum => vec!["spectrum"],
            Command::Arithmetic => vec!["arithmetic"],
            Command::BergerWang => vec!["berger-wang"],
            Command::Tails(t) => vec![
                "tails",
                match t {
                    TailsCommand::Gromov => "gromov",
                    TailsCommand::Punctual => "punctual",
                    TailsCommand::WalkAway => "walk-away",
                },
            ],
            Command::Harmonic => vec!["harmonic"],
            Command::Compare(CompareCommand::TauVsDist) => vec!["compare", "tau-vs-dist"],
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.params.config {
        Some(path) => RunConfig::from_file(Path::new(path))?,
        None => RunConfig::default(),
    };
    config.apply(&cli.params)?;
    if let Some(cmd) = &cli.command {
        config.command = cmd.path().into_iter().map(String::from).collect();
    }
    if config.command.is_empty() {
        return Err(config_error("no subcommand given (on the command line or in the config)"));
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = resolve(cli)?;
    let outcome = commands::dispatch(&config)?;
    let bytes = outcome.report.render(&config);
    match &config.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Tolerance(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hyperwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
