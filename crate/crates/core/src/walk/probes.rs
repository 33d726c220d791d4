use serde::Serialize;

use super::engine::{map_chunks, sample_path, WalkRun};
use super::FiniteMeasure;
use crate::error::{invalid, Error, Result};
use crate::space::{gromov_product, PointedAction};
use crate::stats::{linear_fit, LinearFit, TailEstimate};

/// Cells with fewer hits than this are left out of slope fits.
pub const ESTIMABLE_MIN_HITS: u64 = 10;

/// One grid cell of a probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeCell {
    pub parameter: f64,
    pub estimate: TailEstimate,
}

/// Tail estimates over a parameter grid and the fitted slope of `ln P`
/// against the parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub parameter: &'static str,
    pub cells: Vec<ProbeCell>,
    /// Fit over cells with at least [`ESTIMABLE_MIN_HITS`] hits and at least
    /// that many misses; `None` if fewer than two such cells.
    pub fit: Option<LinearFit>,
    /// Sample mean of the probed statistic, when meaningful.
    pub mean_statistic: Option<f64>,
    pub note: Option<String>,
}

fn build_report(
    parameter: &'static str,
    grid: &[f64],
    labels: impl Fn(f64) -> String,
    hits: &[u64],
    samples: u64,
) -> Result<ProbeReport> {
    let cells = grid
        .iter()
        .zip(hits)
        .map(|(&x, &h)| {
            Ok(ProbeCell {
                parameter: x,
                estimate: TailEstimate::new(labels(x), h, samples)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = cells
        .iter()
        .filter(|c| {
            c.estimate.hits >= ESTIMABLE_MIN_HITS
                && c.estimate.samples - c.estimate.hits >= ESTIMABLE_MIN_HITS
        })
        .map(|c| (c.parameter, c.estimate.log_prob.expect("estimable cell")))
        .unzip();
    let fit = if xs.len() >= 2 { linear_fit(&xs, &ys).ok() } else { None };
    Ok(ProbeReport {
        parameter,
        cells,
        fit,
        mean_statistic: None,
        note: None,
    })
}

/// Per-chunk tallies: hit counts per cell and a running sum of a statistic.
struct Tally {
    hits: Vec<u64>,
    sum: f64,
}

fn merge(tallies: Vec<Tally>, cells: usize) -> Tally {
    tallies.into_iter().fold(
        Tally {
            hits: vec![0; cells],
            sum: 0.0,
        },
        |mut acc, t| {
            for (a, h) in acc.hits.iter_mut().zip(t.hits) {
                *a += h;
            }
            acc.sum += t.sum;
            acc
        },
    )
}

/// Estimates `P(d(z_n, x) − d(z0, x) ≤ εn)` for each `n` in `n_grid`.
pub fn walking_away_probe<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    run: &WalkRun,
    x: &A::Point,
    eps: f64,
    n_grid: &[usize],
    workers: Option<usize>,
) -> Result<ProbeReport> {
    if !(eps > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {eps}")));
    }
    if n_grid.is_empty() || n_grid.iter().any(|&n| n == 0 || n > run.horizon) {
        return Err(invalid("n grid must be non-empty and lie in 1..=horizon"));
    }
    let z0 = space.basepoint();
    let base = space.dist(&z0, x);
    let tallies = map_chunks(run, workers, |mut chunk| {
        let mut hits = vec![0u64; n_grid.len()];
        for s in 0..chunk.len {
            let path = sample_path(space, measure, run.horizon, &mut chunk.rng);
            for (cell, &n) in n_grid.iter().enumerate() {
                let zn = space.orbit(&path[n]).map_err(|e| Error::Sample {
                    sample: chunk.first_sample + s,
                    source: Box::new(e),
                })?;
                if space.dist(&zn, x) - base <= eps * n as f64 + A::TOLERANCE {
                    hits[cell] += 1;
                }
            }
        }
        Ok(Tally { hits, sum: 0.0 })
    })?;
    let total = merge(tallies, n_grid.len());
    let grid: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    build_report(
        "n",
        &grid,
        |n| format!("d(z_n,x) - d(z_0,x) <= {eps}*n at n = {n}"),
        &total.hits,
        run.samples,
    )
}

/// Which Gromov-product deviation to probe.
#[derive(Clone, Debug)]
pub enum GromovMode<P> {
    /// `(z_n, z_0)_{z_i}` with `n` the run's horizon.
    Intermediate { i: usize },
    /// `(z_p, x)_{z_0}` with `p` the run's horizon.
    Punctual { x: P },
}

/// Estimates `P(statistic ≥ R)` for each `R` in `r_grid`; the report's
/// `mean_statistic` is the sample mean of the statistic (divided by the
/// horizon in punctual mode).
pub fn gromov_deviation_probe<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    run: &WalkRun,
    mode: &GromovMode<A::Point>,
    r_grid: &[f64],
    workers: Option<usize>,
) -> Result<ProbeReport> {
    if r_grid.is_empty() {
        return Err(invalid("R grid must be non-empty"));
    }
    if let GromovMode::Intermediate { i } = mode {
        if *i > run.horizon {
            return Err(invalid(format!("intermediate index {i} exceeds horizon {}", run.horizon)));
        }
    }
    let n = run.horizon;
    let z0 = space.basepoint();
    let tallies = map_chunks(run, workers, |mut chunk| {
        let mut hits = vec![0u64; r_grid.len()];
        let mut sum = 0.0;
        for s in 0..chunk.len {
            let wrap = |e: Error| Error::Sample {
                sample: chunk.first_sample + s,
                source: Box::new(e),
            };
            let path = sample_path(space, measure, n, &mut chunk.rng);
            let zn = space.orbit(&path[n]).map_err(wrap)?;
            let value = match mode {
                GromovMode::Intermediate { i } => {
                    let zi = space.orbit(&path[*i]).map_err(wrap)?;
                    gromov_product(space, &zn, &z0, &zi)
                }
                GromovMode::Punctual { x } => gromov_product(space, &zn, x, &z0),
            };
            sum += value;
            for (cell, &r) in r_grid.iter().enumerate() {
                if value >= r {
                    hits[cell] += 1;
                }
            }
        }
        Ok(Tally { hits, sum })
    })?;
    let total = merge(tallies, r_grid.len());
    let (label, note): (Box<dyn Fn(f64) -> String>, _) = match mode {
        GromovMode::Intermediate { i } => (
            Box::new(move |r| format!("(z_{n}, z_0)_(z_{i}) >= {r}")),
            None,
        ),
        GromovMode::Punctual { .. } => (
            Box::new(move |r| format!("(z_{n}, x)_(z_0) >= {r}")),
            Some("the point x is chosen heuristically; uniformity in x is only sampled".to_string()),
        ),
    };
    let mut report = build_report("R", r_grid, label, &total.hits, run.samples)?;
    let mean = total.sum / run.samples as f64;
    report.mean_statistic = Some(match mode {
        GromovMode::Intermediate { .. } => mean,
        GromovMode::Punctual { .. } => mean / n as f64,
    });
    report.note = note;
    Ok(report)
}

/// Maximum over trajectories of the defect in
/// `d_{mj} = Σ d(z_{ij}, z_{(i−1)j}) − 2 Σ (z_0, z_{ij})_{z_{(i−1)j}}`,
/// with `n = mj` the run's horizon.
pub fn chop_identity_check<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    run: &WalkRun,
    j: usize,
    workers: Option<usize>,
) -> Result<f64> {
    if j == 0 || run.horizon % j != 0 {
        return Err(invalid(format!("block {j} must divide the horizon {}", run.horizon)));
    }
    let z0 = space.basepoint();
    let defects = map_chunks(run, workers, |mut chunk| {
        let mut worst = 0.0f64;
        for s in 0..chunk.len {
            let path = sample_path(space, measure, run.horizon, &mut chunk.rng);
            let points = (0..=run.horizon / j)
                .map(|i| space.orbit(&path[i * j]))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Sample {
                    sample: chunk.first_sample + s,
                    source: Box::new(e),
                })?;
            let mut blocks = 0.0;
            let mut products = 0.0;
            for w in points.windows(2) {
                blocks += space.dist(&w[1], &w[0]);
                products += gromov_product(space, &z0, &w[1], &w[0]);
            }
            let lhs = space.dist(&z0, points.last().expect("at least one block"));
            worst = worst.max((lhs - (blocks - 2.0 * products)).abs());
        }
        Ok(worst)
    })?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}
