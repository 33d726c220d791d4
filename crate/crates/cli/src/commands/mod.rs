//! One function per subcommand, each turning a resolved [`RunConfig`] into
//! a [`Report`].

mod exact;
mod ldp;
mod schottky;
mod walk;

use hyperwalk::exact::Side;

use crate::backend::Backend;
use crate::config::RunConfig;
use crate::error::{config_error, CliError};
use crate::report::Report;

/// A report, plus the reason if a tolerance check failed.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failure: None }
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let path: Vec<&str> = cfg.command.iter().map(String::as_str).collect();
    let report = match path.as_slice() {
        ["simulate"] => walk::simulate(cfg)?,
        ["exact-dist"] => exact::exact_dist(cfg)?,
        ["tau-dist"] => exact::tau_dist(cfg)?,
        ["return-rate"] => exact::return_rate(cfg)?,
        ["mgf"] => exact::mgf(cfg)?,
        ["rate"] => ldp::rate(cfg)?,
        ["assemble"] => ldp::assemble(cfg)?,
        ["legendre"] => ldp::legendre(cfg)?,
        ["chernoff"] => ldp::chernoff(cfg)?,
        ["analytic"] => ldp::analytic(cfg)?,
        ["schottky", "verify"] => schottky::verify(cfg)?,
        ["schottky", "construct"] => schottky::construct(cfg)?,
        ["schottky", "boost"] => schottky::boost(cfg)?,
        ["schottky", "moving-tau"] => schottky::moving_tau(cfg)?,
        ["spectrum"] => ldp::spectrum(cfg)?,
        ["arithmetic"] => ldp::arithmetic(cfg)?,
        ["berger-wang"] => ldp::berger_wang(cfg)?,
        ["tails", "gromov"] => walk::gromov(cfg)?,
        ["tails", "punctual"] => walk::punctual(cfg)?,
        ["tails", "walk-away"] => walk::walk_away(cfg)?,
        ["harmonic"] => walk::harmonic(cfg)?,
        ["compare", "tau-vs-dist"] => return exact::compare_tau_vs_dist(cfg),
        _ => return Err(config_error(format!("unknown command {:?}", cfg.command.join(" ")))),
    };
    Ok(report.into())
}

fn backend(cfg: &RunConfig) -> Result<Backend, CliError> {
    match &cfg.backend {
        Some(spec) => Backend::parse(spec),
        None => Backend::parse(&format!("free:q={}", cfg.q())),
    }
}

fn side(cfg: &RunConfig) -> Result<Side, CliError> {
    match cfg.side.as_deref().unwrap_or("above") {
        "above" => Ok(Side::Above),
        "below" => Ok(Side::Below),
        other => Err(config_error(format!("--side must be above or below, got {other:?}"))),
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Above => "above",
        Side::Below => "below",
    }
}

fn json<T: serde::Serialize>(value: &T) -> crate::report::Cell {
    crate::report::Cell::Json(serde_json::to_value(value).expect("library values serialize"))
}
