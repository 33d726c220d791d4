use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{self, Side};
use crate::space::PointedAction;
use crate::stats::TailEstimate;
use crate::walk::FiniteMeasure;

/// Largest number of step sequences [`rate_curve_enum`] will enumerate.
pub const ENUM_BUDGET: u64 = 1 << 22;

/// Where the numbers in a curve came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    ExactDp { q: usize },
    ExactEnum { support: usize },
    Mc { samples: u64, seed: u64 },
    Analytic { q: usize },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::ExactDp { q } => write!(f, "exact-dp(q={q})"),
            Provenance::ExactEnum { support } => write!(f, "exact-enum(support={support})"),
            Provenance::Mc { samples, seed } => write!(f, "mc(samples={samples}, seed={seed})"),
            Provenance::Analytic { q } => write!(f, "analytic(q={q})"),
        }
    }
}

/// `Ψ_n(α)` for one horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub alpha: f64,
    /// `−(1/n)·ln P(event)`; `+∞` when the event is impossible. For a
    /// censored Monte Carlo cell this is the lower bound implied by the
    /// one-sided interval.
    pub rate: f64,
    /// Interval from the 95% bounds on the probability (equal to `rate` for
    /// exact sources).
    pub rate_lo: f64,
    pub rate_hi: f64,
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub cells: Vec<RateCell>,
}

/// Deviation rates on an α-grid for one or more horizons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub direction: Side,
    pub provenance: Provenance,
    pub alphas: Vec<f64>,
    pub rows: Vec<RateRow>,
}

impl RateCurve {
    /// The row with the largest horizon.
    pub fn last_row(&self) -> &RateRow {
        self.rows.iter().max_by_key(|r| r.n).expect("curves have rows")
    }

    /// Pointwise minimum over horizons of `Ψ_n(α)` (uncensored cells only).
    pub fn envelope(&self) -> Vec<f64> {
        (0..self.alphas.len())
            .map(|i| {
                self.rows
                    .iter()
                    .filter(|r| !r.cells[i].censored)
                    .map(|r| r.cells[i].rate)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Final-horizon values.
    pub fn values(&self) -> Vec<f64> {
        self.last_row().cells.iter().map(|c| c.rate).collect()
    }
}

fn neg_log_rate(log_p: f64, n: usize) -> f64 {
    if log_p == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (-log_p / n as f64).max(0.0)
    }
}

fn check_grid(alphas: &[f64], ns: &[usize]) -> Result<()> {
    if alphas.is_empty() || alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(invalid("alpha grid must be non-empty, finite and >= 0"));
    }
    if ns.is_empty() || ns.contains(&0) {
        return Err(invalid("horizon list must be non-empty and positive"));
    }
    Ok(())
}

fn exact_row(alphas: &[f64], n: usize, log_p: impl Fn(f64) -> f64) -> RateRow {
    RateRow {
        n,
        cells: alphas
            .iter()
            .map(|&a| {
                let r = neg_log_rate(log_p(a), n);
                RateCell {
                    alpha: a,
                    rate: r,
                    rate_lo: r,
                    rate_hi: r,
                    censored: false,
                }
            })
            .collect(),
    }
}

/// Rates from the exact law of `d_n` on `F_q`.
pub fn rate_curve_exact(q: usize, direction: Side, alphas: &[f64], ns: &[usize]) -> Result<RateCurve> {
    check_grid(alphas, ns)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let law = exact::dist_law(q, n)?;
            Ok(exact_row(alphas, n, |a| law.deviation(a, direction)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        direction,
        provenance: Provenance::ExactDp { q },
        alphas: alphas.to_vec(),
        rows,
    })
}

/// Rates from the exact law of `τ(γ_n)` on `F_q`.
pub fn rate_curve_tau_exact(q: usize, direction: Side, alphas: &[f64], ns: &[usize]) -> Result<RateCurve> {
    check_grid(alphas, ns)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let law = exact::tau_law(q, n)?;
            Ok(exact_row(alphas, n, |a| law.deviation(a, direction)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        direction,
        provenance: Provenance::ExactDp { q },
        alphas: alphas.to_vec(),
        rows,
    })
}

/// Rates of `values/n` from Monte Carlo samples at horizon `n`.
pub fn rate_row_from_samples(values: &[f64], n: usize, direction: Side, alphas: &[f64]) -> Result<RateRow> {
    check_grid(alphas, &[n])?;
    let samples = values.len() as u64;
    let slack = 1e-9 * n as f64;
    let cells = alphas
        .iter()
        .map(|&a| {
            let x = a * n as f64;
            let hits = values
                .iter()
                .filter(|&&v| match direction {
                    Side::Above => v >= x - slack,
                    Side::Below => v <= x + slack,
                })
                .count() as u64;
            let est = TailEstimate::new(format!("{direction:?} {a}"), hits, samples)?;
            let lo = neg_log_rate(est.upper.ln(), n);
            Ok(if est.censored {
                RateCell {
                    alpha: a,
                    rate: lo,
                    rate_lo: lo,
                    rate_hi: f64::INFINITY,
                    censored: true,
                }
            } else {
                RateCell {
                    alpha: a,
                    rate: neg_log_rate(est.log_prob.expect("uncensored"), n),
                    rate_lo: lo,
                    rate_hi: neg_log_rate(est.lower.ln(), n),
                    censored: false,
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRow { n, cells })
}

/// Rates of `d_n` estimated by simulation on any backend.
pub fn rate_curve_mc<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    direction: Side,
    alphas: &[f64],
    ns: &[usize],
    samples: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<RateCurve> {
    check_grid(alphas, ns)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let run = crate::walk::WalkRun::new(n, samples, seed)?;
            let records = crate::walk::simulate(space, measure, &run, &Default::default(), workers)?;
            let ds: Vec<f64> = records.iter().map(|r| r.d).collect();
            rate_row_from_samples(&ds, n, direction, alphas)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        direction,
        provenance: Provenance::Mc { samples, seed },
        alphas: alphas.to_vec(),
        rows,
    })
}

/// Exact law of `d_n` for any finite measure by enumerating all
/// `|supp μ|^n` step sequences: `(value, probability)` pairs.
pub fn enumerate_displacements<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    let paths = (measure.len() as u64)
        .checked_pow(n as u32)
        .filter(|&p| p <= ENUM_BUDGET)
        .ok_or_else(|| {
            Error::Budget(format!(
                "{}^{n} step sequences exceed the budget {ENUM_BUDGET}",
                measure.len()
            ))
        })?;
    let mut frontier = vec![(space.identity(), 1.0f64)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(frontier.len() * measure.len());
        for (g, p) in &frontier {
            for (s, ps) in measure.atoms() {
                next.push((space.compose(g, s), p * ps));
            }
        }
        frontier = next;
    }
    debug_assert_eq!(frontier.len() as u64, paths);
    frontier
        .iter()
        .map(|(g, p)| Ok((space.displacement(g)?, *p)))
        .collect()
}

/// Rates from the enumerated exact law of `d_n`.
pub fn rate_curve_enum<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    direction: Side,
    alphas: &[f64],
    ns: &[usize],
) -> Result<RateCurve> {
    check_grid(alphas, ns)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let law = enumerate_displacements(space, measure, n)?;
            let slack = 1e-9 * n as f64 + A::TOLERANCE;
            Ok(exact_row(alphas, n, |a| {
                let x = a * n as f64;
                let p: f64 = law
                    .iter()
                    .filter(|(v, _)| match direction {
                        Side::Above => *v >= x - slack,
                        Side::Below => *v <= x + slack,
                    })
                    .map(|(_, p)| p)
                    .sum();
                if p > 0.0 { p.min(1.0).ln() } else { f64::NEG_INFINITY }
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        direction,
        provenance: Provenance::ExactEnum { support: measure.len() },
        alphas: alphas.to_vec(),
        rows,
    })
}

/// The closed-form rate function of the simple random walk on `F_q`.
pub fn analytic_rate_free(q: usize, alpha: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::RankTooSmall(q));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Ok(f64::INFINITY);
    }
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let qf = q as f64;
    Ok(xlogx(1.0 + alpha) / 2.0 + xlogx(1.0 - alpha) / 2.0 + qf.ln()
        - (1.0 + alpha) / 2.0 * (2.0 * qf - 1.0).ln())
}

/// A rate function sampled on a grid, `+∞` outside its effective support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub drift: f64,
    pub provenance: String,
}

impl RateFunction {
    /// Largest violation of discrete convexity over consecutive finite
    /// triples, and the tolerance `1e−6 + 2h²` for the grid's largest step.
    pub fn convexity_violation(&self) -> (f64, f64) {
        convexity_violation(&self.alphas, &self.values)
    }

    /// Index of the smallest value (first one on ties).
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v < self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Endpoints of the finite part of the grid, if any.
    pub fn effective_support(&self) -> Option<(f64, f64)> {
        let finite: Vec<f64> = self
            .alphas
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.is_finite())
            .map(|(a, _)| *a)
            .collect();
        Some((*finite.first()?, *finite.last()?))
    }
}

/// See [`RateFunction::convexity_violation`]. An infinite value strictly
/// between finite ones counts as an infinite violation.
pub fn convexity_violation(alphas: &[f64], values: &[f64]) -> (f64, f64) {
    let h = alphas.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let tol = 1e-6 + 2.0 * h * h;
    let mut worst = 0.0f64;
    for i in 1..alphas.len().saturating_sub(1) {
        let (l, m, r) = (values[i - 1], values[i], values[i + 1]);
        if !(l.is_finite() && r.is_finite()) {
            continue;
        }
        let t = (alphas[i] - alphas[i - 1]) / (alphas[i + 1] - alphas[i - 1]);
        let chord = (1.0 - t) * l + t * r;
        worst = worst.max(m - chord);
    }
    (worst, tol)
}

/// Combine deviation curves: below-rates left of the drift, above-rates to
/// its right, zero at the drift. Fails if the result is not convex within
/// tolerance.
pub fn assemble_rate(above: &RateCurve, below: &RateCurve, drift: f64) -> Result<RateFunction> {
    if above.direction != Side::Above || below.direction != Side::Below {
        return Err(invalid("assemble_rate needs an above curve and a below curve"));
    }
    let above_vals = above.envelope();
    let below_vals = below.envelope();
    let lookup = |alphas: &[f64], vals: &[f64], a: f64| -> Option<f64> {
        alphas
            .iter()
            .position(|x| (x - a).abs() <= 1e-12)
            .map(|i| vals[i])
    };
    let mut grid: Vec<f64> = above
        .alphas
        .iter()
        .chain(&below.alphas)
        .copied()
        .chain(std::iter::once(drift))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let mut alphas = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    for a in grid {
        let v = if (a - drift).abs() <= 1e-12 {
            Some(0.0)
        } else if a < drift {
            lookup(&below.alphas, &below_vals, a)
        } else {
            lookup(&above.alphas, &above_vals, a)
        };
        if let Some(v) = v {
            alphas.push(a);
            values.push(v);
        }
    }
    // Interior infinities cannot occur in a convex function.
    let finite: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
    if let (Some(&lo), Some(&hi)) = (finite.first(), finite.last()) {
        if let Some(i) = (lo..=hi).find(|&i| !values[i].is_finite()) {
            return Err(Error::Diagnostic(format!(
                "assembled rate is infinite at alpha = {} inside its finite range",
                alphas[i]
            )));
        }
    }
    let rf = RateFunction {
        alphas,
        values,
        drift,
        provenance: if above.provenance == below.provenance {
            above.provenance.to_string()
        } else {
            format!("{} / {}", above.provenance, below.provenance)
        },
    };
    let (worst, tol) = rf.convexity_violation();
    if worst > tol {
        return Err(Error::Diagnostic(format!(
            "assembled rate violates convexity by {worst:.3e} (tolerance {tol:.3e})"
        )));
    }
    Ok(rf)
}

/// Discrete convex conjugate `f*(λ) = sup_x (λx − f(x))` over the finite
/// cells of `(xs, fs)`.
pub fn legendre(xs: &[f64], fs: &[f64], lambdas: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != fs.len() || xs.is_empty() {
        return Err(invalid("legendre needs a non-empty grid with one value per point"));
    }
    if !fs.iter().any(|f| f.is_finite()) {
        return Err(invalid("legendre needs at least one finite value"));
    }
    Ok(lambdas
        .iter()
        .map(|&l| {
            xs.iter()
                .zip(fs)
                .filter(|(_, f)| f.is_finite())
                .map(|(x, f)| l * x - f)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// `sup_{λ ≥ 0} (λa − Λ(λ))` over the grid points with `λ ≥ 0`.
pub fn chernoff_upper(a: f64, lambdas: &[f64], log_mgf: &[f64]) -> Result<f64> {
    if lambdas.len() != log_mgf.len() {
        return Err(invalid("chernoff_upper needs one Λ value per λ"));
    }
    let best = lambdas
        .iter()
        .zip(log_mgf)
        .filter(|(l, _)| **l >= 0.0)
        .map(|(l, m)| l * a - m)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(invalid("chernoff_upper needs at least one λ >= 0"));
    }
    Ok(best)
}

/// Central finite differences `(Λ′(0), Λ″(0))` of `Λ_n` with step `h`.
pub fn mgf_derivatives_at_zero(law: &exact::DistanceDistribution, h: f64) -> (f64, f64) {
    let (p, z, m) = (law.log_mgf(h), law.log_mgf(0.0), law.log_mgf(-h));
    ((p - m) / (2.0 * h), (p - 2.0 * z + m) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_examples() {
        assert!((analytic_rate_free(2, 0.0).unwrap() - 0.1438410362258904).abs() < 1e-12);
        assert!(analytic_rate_free(2, 0.5).unwrap().abs() < 1e-15);
        assert!((analytic_rate_free(2, 1.0).unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert_eq!(analytic_rate_free(2, 1.01).unwrap(), f64::INFINITY);
        assert!(analytic_rate_free(1, 0.5).is_err());
    }

    #[test]
    fn legendre_at_zero_is_minus_min() {
        let xs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let fs: Vec<f64> = xs.iter().map(|&x| analytic_rate_free(2, x).unwrap()).collect();
        let g = legendre(&xs, &fs, &[0.0]).unwrap();
        assert!(g[0].abs() < 1e-12);
    }

    #[test]
    fn chernoff_is_vacuous_below_mean() {
        let law = exact::dist_law(2, 200).unwrap();
        let lambdas: Vec<f64> = (0..=50).map(|i| i as f64 / 10.0).collect();
        let mgf: Vec<f64> = lambdas.iter().map(|&l| law.log_mgf(l)).collect();
        assert_eq!(chernoff_upper(0.3, &lambdas, &mgf).unwrap(), 0.0);
        assert!(chernoff_upper(0.8, &lambdas, &mgf).unwrap() > 0.0);
    }

    #[test]
    fn convexity_detects_bumps() {
        let xs = [0.0, 0.5, 1.0];
        assert!(convexity_violation(&xs, &[1.0, 0.0, 1.0]).0 <= 0.0);
        let (w, tol) = convexity_violation(&xs, &[0.0, 1.0, 0.0]);
        assert!(w > tol);
    }
}
