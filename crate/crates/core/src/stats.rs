//! Binomial tail estimates and least-squares fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// An estimated event probability from Monte Carlo hit counts.
///
/// Cells with zero hits are censored: no point estimate is reported, and
/// `upper` holds the exact one-sided 95% bound `1 − 0.05^{1/samples}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub event: String,
    pub hits: u64,
    pub samples: u64,
    /// `ln(hits/samples)`; `None` when censored.
    pub log_prob: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub censored: bool,
}

impl TailEstimate {
    pub fn new(event: impl Into<String>, hits: u64, samples: u64) -> Result<Self> {
        if samples == 0 || hits > samples {
            return Err(Error::InvalidArgument(format!(
                "tail estimate needs 0 <= hits <= samples and samples >= 1, got {hits}/{samples}"
            )));
        }
        let event = event.into();
        if hits == 0 {
            return Ok(TailEstimate {
                event,
                hits,
                samples,
                log_prob: None,
                lower: 0.0,
                upper: 1.0 - 0.05f64.powf(1.0 / samples as f64),
                censored: true,
            });
        }
        let p = hits as f64 / samples as f64;
        let (lo, hi) = wilson_interval(hits, samples, Z95);
        Ok(TailEstimate {
            event,
            hits,
            samples,
            log_prob: Some(p.ln()),
            lower: lo.min(p),
            upper: hi.max(p),
            censored: false,
        })
    }

    pub fn prob(&self) -> f64 {
        self.hits as f64 / self.samples as f64
    }

    /// Binomial standard error `√(p(1−p)/N)` at the point estimate.
    pub fn std_error(&self) -> f64 {
        let p = self.prob();
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }

    /// Combine two estimates of the same event from disjoint sample sets.
    pub fn merge(&self, other: &TailEstimate) -> Result<TailEstimate> {
        TailEstimate::new(
            self.event.clone(),
            self.hits + other.hits,
            self.samples + other.samples,
        )
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: u64, samples: u64, z: f64) -> (f64, f64) {
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; `1` when the data have no variance.
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("fit needs equally many x and y values".into()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("fit needs >= 2 points, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("fit needs at least two distinct x values".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        residual: (sse / n as f64).sqrt(),
        points: n,
    })
}
