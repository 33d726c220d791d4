//! The resolved run configuration shared by every subcommand.
//!
//! A run is described by one flat JSON document. Values come from an
//! optional `--config` file first and are then overridden by flags; the
//! result is echoed into every output so a run can be replayed with
//! `hyperwalk --config <output>`.

use std::path::Path;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{config_error, CliError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

/// Flags accepted by every subcommand. Lists of numbers take
/// comma-separated values or `lo:step:hi` ranges (mixable).
#[derive(Clone, Debug, Default, Args)]
pub struct Params {
    /// Read the run configuration (or a previous output) from this JSON file.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// `free:q=K` or `sl2`.
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// `uniform-gens`, `point:<atom>`, `uniform:<atom>;<atom>…` or
    /// `atoms:<atom>@<p>;<atom>@<p>…`.
    #[arg(long, global = true)]
    pub measure: Option<String>,
    /// Where a curve comes from: `exact`, `tau`, `enum`, `mc`, `analytic`,
    /// `mgf` or `sampled` depending on the subcommand.
    #[arg(long, global = true)]
    pub source: Option<String>,
    #[arg(long, global = true)]
    pub q: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub ns: Option<String>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Cylinder depth.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Intermediate index of the Gromov probe.
    #[arg(long, global = true)]
    pub i: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambdas: Option<String>,
    /// `above` or `below`.
    #[arg(long, global = true)]
    pub side: Option<String>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub drift: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub p_max: Option<usize>,
    /// Targets for `schottky moving-tau` or thresholds for the Gromov probes.
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Group elements: words (`a`, `bA`, …) or matrix atoms (`"2,0,0,0.5"`).
    #[arg(long, global = true, num_args = 1..)]
    pub elements: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub word: Option<String>,
    #[arg(long, global = true)]
    pub g1: Option<String>,
    #[arg(long, global = true)]
    pub g2: Option<String>,
    /// Reference point, given as the element whose orbit point it is.
    #[arg(long, global = true)]
    pub x: Option<String>,
    #[arg(long, global = true)]
    pub constant: Option<f64>,
    #[arg(long, global = true)]
    pub c_max: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub chunk_size: Option<u64>,
    /// Emit exact rationals where available.
    #[arg(long, global = true)]
    pub exact: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<String>,
}

/// Parse `0.1,0.2,0.5:0.1:0.9` into a list of numbers.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| config_error(format!("bad number {t:?} in list {s:?}")))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [lo, step, hi] => {
                let (lo, step, hi) = (num(lo)?, num(step)?, num(hi)?);
                if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
                    return Err(config_error(format!("bad range {item:?}: need lo <= hi and step > 0")));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                if count > 10_000_000 {
                    return Err(config_error(format!("range {item:?} has too many points")));
                }
                out.extend((0..=count).map(|j| lo + j as f64 * step));
            }
            _ => return Err(config_error(format!("bad list item {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(config_error(format!("empty list {s:?}")));
    }
    Ok(out)
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| config_error(format!("bad integer {t:?} in list {s:?}")))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [lo, step, hi] => {
                let (lo, step, hi) = (num(lo)?, num(step)?, num(hi)?);
                if step == 0 || hi < lo {
                    return Err(config_error(format!("bad range {item:?}: need lo <= hi and step > 0")));
                }
                out.extend((lo..=hi).step_by(step));
            }
            _ => return Err(config_error(format!("bad list item {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(config_error(format!("empty list {s:?}")));
    }
    Ok(out)
}

impl RunConfig {
    /// Read a configuration file. An earlier output document is accepted
    /// too; its embedded `config` is used.
    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| config_error(format!("{} is not valid JSON: {e}", path.display())))?;
        let inner = match value.get("config") {
            Some(c) if value.get("tool").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| config_error(format!("bad config {}: {e}", path.display())))
    }

    /// Overlay the flags that were given on the command line.
    pub fn apply(&mut self, p: &Params) -> Result<(), CliError> {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &p.$field {
                    self.$field = Some(v.clone());
                })*
            };
        }
        set!(backend, measure, source, q, n, n_max, k, i, alpha, side, eps, drift, tol, p_max);
        set!(elements, word, g1, g2, x, constant, c_max, trials, samples, seed, workers, chunk_size, format, out);
        if let Some(s) = &p.ns {
            self.ns = Some(parse_usize_list(s)?);
        }
        if let Some(s) = &p.alphas {
            self.alphas = Some(parse_f64_list(s)?);
        }
        if let Some(s) = &p.lambdas {
            self.lambdas = Some(parse_f64_list(s)?);
        }
        if let Some(s) = &p.r {
            self.r = Some(parse_f64_list(s)?);
        }
        if p.exact {
            self.exact = Some(true);
        }
        Ok(())
    }

    pub fn require<T: Clone>(&self, value: &Option<T>, flag: &str) -> Result<T, CliError> {
        value
            .clone()
            .ok_or_else(|| config_error(format!("{} needs --{flag}", self.command.join(" "))))
    }

    /// The seed, mandatory for every Monte Carlo run.
    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| config_error(format!("{} is a Monte Carlo run and needs --seed", self.command.join(" "))))
    }

    pub fn q(&self) -> usize {
        self.q.unwrap_or(2)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}
