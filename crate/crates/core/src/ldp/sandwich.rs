use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::{self, DistanceDistribution, Side, TauMixer};

/// Relative rounding allowance when comparing two log-probabilities that are
/// each sums of many terms.
const LOG_SLACK: f64 = 1e-9;

/// `ln P(X ≥ x)` for integer `x = 0..=n` (and `0` for `x ≤ 0`).
struct UpperTails {
    tails: Vec<Vec<f64>>,
}

impl UpperTails {
    fn new(table: &[DistanceDistribution]) -> Self {
        let tails = table
            .iter()
            .map(|law| {
                let mut acc = f64::NEG_INFINITY;
                let mut t = vec![f64::NEG_INFINITY; law.n + 1];
                for k in (0..=law.n).rev() {
                    acc = crate::scalar::log_add(acc, law.log_probs[k]);
                    t[k] = acc;
                }
                t
            })
            .collect();
        UpperTails { tails }
    }

    fn ge(&self, m: usize, x: i64) -> f64 {
        let t = &self.tails[m];
        if x <= 0 {
            0.0
        } else if x as usize >= t.len() {
            f64::NEG_INFINITY
        } else {
            t[x as usize]
        }
    }
}

/// One horizon of the below-side sandwich.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BelowCell {
    pub n: usize,
    /// `ln P(τ(γ_n) ≤ αn)`.
    pub lhs: f64,
    /// `ln((n+1)·P(d_n ≤ (α+ε)n))`.
    pub rhs: f64,
    pub holds: bool,
}

/// Fitted constants for `c·P(d_n ≥ (α+ε)n) ≤ P(τ(γ_{n+p}) ≥ α(n+p))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AboveFit {
    pub p: usize,
    /// Largest `c` for which the inequality holds at every tested `n`.
    pub c: f64,
    pub log_c: f64,
    /// `(2q)^{−p}`: the mass of any fixed `p`-step continuation.
    pub floor: f64,
    pub passes: bool,
    /// `(p, ln c_p)` for every candidate `p`.
    pub per_p: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub q: usize,
    pub alpha: f64,
    pub eps: f64,
    pub below: Vec<BelowCell>,
    pub below_all_hold: bool,
    /// Smallest tested `N` such that the below inequality holds for every
    /// tested `n ≥ N`.
    pub below_smallest_passing_n: Option<usize>,
    pub above: Option<AboveFit>,
}

/// Evaluate both τ-versus-d sandwich inequalities from exact laws.
///
/// The below inequality is checked on `below_ns`; the above constant is
/// fitted over `above_ns` for `p = 0..=p_max`, choosing the `p` whose `c`
/// clears its floor by the widest margin (smallest `p` on ties).
pub fn tau_sandwich_check(
    q: usize,
    alpha: f64,
    eps: f64,
    below_ns: &[usize],
    above_ns: &[usize],
    p_max: usize,
) -> Result<SandwichReport> {
    if !(alpha >= 0.0) || !(eps > 0.0) {
        return Err(invalid("sandwich check needs alpha >= 0 and eps > 0"));
    }
    if below_ns.is_empty() && above_ns.is_empty() {
        return Err(invalid("sandwich check needs some horizons"));
    }
    let top = below_ns
        .iter()
        .copied()
        .chain(above_ns.iter().map(|n| n + p_max))
        .max()
        .unwrap_or(0);
    let table = exact::dist_law_table(q, top)?;
    let mixer = TauMixer::new(q, top)?;
    let mut needed: Vec<usize> = below_ns
        .iter()
        .copied()
        .chain(above_ns.iter().flat_map(|&n| (0..=p_max).map(move |p| n + p)))
        .collect();
    needed.sort_unstable();
    needed.dedup();
    let taus: Vec<(usize, DistanceDistribution)> = needed
        .par_iter()
        .map(|&m| Ok((m, mixer.mix(&table[m])?)))
        .collect::<Result<_>>()?;
    let tau = |m: usize| -> &DistanceDistribution {
        &taus[taus.binary_search_by_key(&m, |(k, _)| *k).expect("tau law computed")].1
    };

    let below: Vec<BelowCell> = below_ns
        .iter()
        .map(|&n| {
            let lhs = tau(n).deviation(alpha, Side::Below);
            let rhs = ((n + 1) as f64).ln() + table[n].deviation(alpha + eps, Side::Below);
            BelowCell {
                n,
                lhs,
                rhs,
                holds: lhs <= rhs + LOG_SLACK * rhs.abs().max(1.0),
            }
        })
        .collect();
    let mut sorted = below.clone();
    sorted.sort_by_key(|c| c.n);
    let below_smallest_passing_n = match sorted.iter().rposition(|c| !c.holds) {
        None => sorted.first().map(|c| c.n),
        Some(i) => sorted.get(i + 1).map(|c| c.n),
    };

    let above = if above_ns.is_empty() {
        None
    } else {
        let per_p: Vec<(usize, f64)> = (0..=p_max)
            .map(|p| {
                let log_c = above_ns
                    .iter()
                    .filter_map(|&n| {
                        let ld = table[n].deviation(alpha + eps, Side::Above);
                        (ld > f64::NEG_INFINITY).then(|| {
                            tau(n + p).log_tail_ge(alpha * (n + p) as f64 - 1e-9 * (n + p) as f64) - ld
                        })
                    })
                    .fold(f64::INFINITY, f64::min);
                (p, log_c)
            })
            .collect();
        let ln2q = ((2 * q) as f64).ln();
        let (p, log_c) = per_p
            .iter()
            .copied()
            .fold(None::<(usize, f64)>, |best, (p, lc)| match best {
                Some((bp, blc)) if blc + bp as f64 * ln2q >= lc + p as f64 * ln2q => Some((bp, blc)),
                _ => Some((p, lc)),
            })
            .expect("p range is non-empty");
        let floor = (-(p as f64) * ln2q).exp();
        Some(AboveFit {
            p,
            c: log_c.exp(),
            log_c,
            floor,
            passes: log_c >= -(p as f64) * ln2q,
            per_p,
        })
    };

    Ok(SandwichReport {
        q,
        alpha,
        eps,
        below_all_hold: below.iter().all(|c| c.holds),
        below,
        below_smallest_passing_n,
        above,
    })
}

/// Fitted constants for
/// `P(d_{m+n+p} ≥ x + y − c) ≥ c⁻¹·P(d_m ≥ x)·P(d_n ≥ y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperConstantFit {
    pub c: f64,
    pub p: usize,
    /// Smallest passing `c` for each `p` (`None` if none up to the shift
    /// cap).
    pub per_p: Vec<(usize, Option<f64>)>,
    pub grid: Vec<usize>,
}

/// Largest ratio `P(d_m ≥ x)·P(d_n ≥ y) / P(d_{m+n+p} ≥ x+y−k)` over the
/// grid and all integer thresholds.
fn worst_ratio(tails: &UpperTails, grid: &[usize], p: usize, k: i64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for &m in grid {
        for &n in grid {
            for x in 0..=m as i64 {
                let a = tails.ge(m, x);
                if a == f64::NEG_INFINITY {
                    continue;
                }
                for y in 0..=n as i64 {
                    let b = tails.ge(n, y);
                    if b == f64::NEG_INFINITY {
                        continue;
                    }
                    worst = worst.max(a + b - tails.ge(m + n + p, x + y - k));
                }
            }
        }
    }
    worst.exp()
}

/// Fit the smallest `c` (over `p = 0..=p_max`, smallest `p` on ties).
pub fn fit_upper_constant(q: usize, grid: &[usize], p_max: usize, shift_max: usize) -> Result<UpperConstantFit> {
    if grid.is_empty() || grid.contains(&0) {
        return Err(invalid("grid must be non-empty and positive"));
    }
    let top = 2 * grid.iter().max().expect("non-empty") + p_max;
    let table = exact::dist_law_table(q, top)?;
    let tails = UpperTails::new(&table);
    let per_p: Vec<(usize, Option<f64>)> = (0..=p_max)
        .into_par_iter()
        .map(|p| {
            let c = (0..=shift_max as i64).find_map(|k| {
                let r = worst_ratio(&tails, grid, p, k);
                (r < (k + 1) as f64).then(|| r.max(k as f64))
            });
            (p, c)
        })
        .collect();
    let (p, c) = per_p
        .iter()
        .filter_map(|(p, c)| c.map(|c| (*p, c)))
        .fold(None::<(usize, f64)>, |best, (p, c)| match best {
            Some((_, bc)) if bc <= c => best,
            _ => Some((p, c)),
        })
        .ok_or_else(|| crate::error::Error::Diagnostic("no (c, p) passes within the shift cap".into()))?;
    Ok(UpperConstantFit {
        c,
        p,
        per_p,
        grid: grid.to_vec(),
    })
}

/// Re-evaluate the almost-subadditivity inequality at given `(c, p)`;
/// returns the largest `ln(c⁻¹·P·P) − ln P(d_{m+n+p} ≥ x+y−c)` (≤ 0 when
/// it holds).
pub fn check_upper_inequality(q: usize, grid: &[usize], c: f64, p: usize) -> Result<f64> {
    if !(c > 0.0) {
        return Err(invalid("c must be positive"));
    }
    let top = 2 * grid.iter().max().ok_or_else(|| invalid("empty grid"))? + p;
    let table = exact::dist_law_table(q, top)?;
    let tails = UpperTails::new(&table);
    let mut worst = f64::NEG_INFINITY;
    for &m in grid {
        for &n in grid {
            for x in 0..=m {
                for y in 0..=n {
                    let rhs = tails.ge(m, x as i64) + tails.ge(n, y as i64) - c.ln();
                    if rhs == f64::NEG_INFINITY {
                        continue;
                    }
                    let lhs = table[m + n + p].log_tail_ge((x + y) as f64 - c);
                    worst = worst.max(rhs - lhs);
                }
            }
        }
    }
    Ok(worst)
}

/// Result of the exact below-subadditivity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubadditivityReport {
    pub n_max: usize,
    pub alphas: Vec<f64>,
    pub checked: usize,
    /// Largest `lhs − rhs` observed (≤ slack when the inequality holds).
    pub worst_excess: f64,
    pub worst_cell: (f64, usize, usize),
    pub slack: f64,
    pub holds: bool,
}

/// `−ln P(d_{n+m} ≤ a(n+m)) ≤ −ln P(d_n ≤ an) − ln P(d_m ≤ am)` for all
/// `1 ≤ n, m ≤ n_max`.
pub fn below_subadditivity(q: usize, n_max: usize, alphas: &[f64]) -> Result<SubadditivityReport> {
    if n_max == 0 || alphas.is_empty() {
        return Err(invalid("need n_max >= 1 and a non-empty alpha grid"));
    }
    let table = exact::dist_law_table(q, 2 * n_max)?;
    let slack = 1e-9;
    let rates: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&a| table.iter().map(|law| -law.deviation(a, Side::Below)).collect())
        .collect();
    let mut worst = (f64::NEG_INFINITY, (0.0, 0, 0));
    let mut checked = 0;
    for (ai, &a) in alphas.iter().enumerate() {
        let r = &rates[ai];
        for n in 1..=n_max {
            for m in 1..=n_max {
                checked += 1;
                let (lhs, rhs) = (r[n + m], r[n] + r[m]);
                let excess = if lhs == f64::INFINITY && rhs == f64::INFINITY { f64::NEG_INFINITY } else { lhs - rhs };
                if excess > worst.0 {
                    worst = (excess, (a, n, m));
                }
            }
        }
    }
    Ok(SubadditivityReport {
        n_max,
        alphas: alphas.to_vec(),
        checked,
        worst_excess: worst.0,
        worst_cell: worst.1,
        slack,
        holds: worst.0 <= slack,
    })
}
