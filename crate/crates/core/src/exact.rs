//! Exact laws of the simple random walk on `F_q`.
//!
//! The distance `d_n = |γ_n|` is a birth–death chain on `{0, 1, …}`: from
//! `k > 0` it moves up with probability `(2q−1)/2q` and down with `1/2q`; from
//! `0` it always moves up. The law of `γ_n` given `d_n = k` is uniform on the
//! sphere of radius `k`, so the law of the translation length `τ(γ_n)` mixes
//! the cyclic-reduction profiles of each sphere.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_group::{cyclic_profile, log_cyclic_count, log_sphere_count, sphere_count_exact};
use crate::scalar::{log_add, log_sum_exp, Weight};

/// Largest horizon accepted by the log-space recursions.
pub const DIST_CAP: usize = 200_000;

/// Largest horizon for which a full table of laws `d_0, …, d_N` is stored.
pub const TABLE_CAP: usize = 4096;

/// Largest horizon for the exact rational τ-law.
pub const RATIONAL_CAP: usize = 256;

const PAR_THRESHOLD: usize = 8192;

pub(crate) fn check_rank(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::RankTooSmall(q));
    }
    if q > crate::free_group::MAX_TEXT_RANK {
        return Err(Error::InvalidArgument(format!("rank {q} exceeds 26")));
    }
    Ok(())
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded {
            what,
            requested: n,
            cap,
        });
    }
    Ok(())
}

/// Which tail of the distance law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
}

/// `ln P(X = k)` for `k = 0..=n`, `−∞` off the support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceDistribution {
    pub q: usize,
    pub n: usize,
    pub log_probs: Vec<f64>,
}

/// The law of `τ(γ_n)`, same layout as [`DistanceDistribution`].
pub type TauDistribution = DistanceDistribution;

impl DistanceDistribution {
    pub fn log_prob(&self, k: usize) -> f64 {
        self.log_probs.get(k).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.log_prob(k).exp()
    }

    /// `ln Σ_k P(X = k)`, zero up to rounding.
    pub fn log_total(&self) -> f64 {
        log_sum_exp(&self.log_probs)
    }

    pub fn mean(&self) -> f64 {
        self.log_probs
            .iter()
            .enumerate()
            .map(|(k, lp)| k as f64 * lp.exp())
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.log_probs
            .iter()
            .enumerate()
            .map(|(k, lp)| (k as f64 - m).powi(2) * lp.exp())
            .sum()
    }

    /// `ln P(X ≥ x)`.
    pub fn log_tail_ge(&self, x: f64) -> f64 {
        let start = x.max(0.0).ceil() as usize;
        if start > self.n {
            return f64::NEG_INFINITY;
        }
        log_sum_exp(&self.log_probs[start..])
    }

    /// `ln P(X ≤ x)`.
    pub fn log_tail_le(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let end = (x.floor() as usize).min(self.n);
        log_sum_exp(&self.log_probs[..=end])
    }

    /// `ln P(X ≥ a·n)` or `ln P(X ≤ a·n)`. The threshold `a·n` is widened by
    /// `1e−9·n` so that rational rates land on their lattice cell.
    pub fn deviation(&self, a: f64, side: Side) -> f64 {
        let slack = 1e-9 * self.n.max(1) as f64;
        let x = a * self.n as f64;
        match side {
            Side::Above => self.log_tail_ge(x - slack),
            Side::Below => self.log_tail_le(x + slack),
        }
    }

    /// `Λ_n(λ) = (1/n) ln E[e^{λX}]`.
    pub fn log_mgf(&self, lambda: f64) -> f64 {
        if self.n == 0 || lambda == 0.0 {
            return 0.0;
        }
        let terms: Vec<f64> = self
            .log_probs
            .iter()
            .enumerate()
            .map(|(k, lp)| if *lp == f64::NEG_INFINITY { *lp } else { lp + lambda * k as f64 })
            .collect();
        log_sum_exp(&terms) / self.n as f64
    }
}

/// Log-space transition weights `(ln up, ln down)` away from the origin.
fn step_logs(q: usize) -> (f64, f64) {
    let two_q = (2 * q) as f64;
    (((two_q - 1.0) / two_q).ln(), -two_q.ln())
}

/// One step of the distance chain in log space, from horizon `n` to `n+1`.
fn advance(prev: &[f64], n: usize, up: f64, down: f64) -> Vec<f64> {
    let cell = |k: usize| -> f64 {
        if (k + n + 1) % 2 != 0 {
            return f64::NEG_INFINITY;
        }
        let from_below = match k {
            0 => f64::NEG_INFINITY,
            1 => prev[0],
            _ => prev[k - 1] + up,
        };
        let from_above = if k < n { prev[k + 1] + down } else { f64::NEG_INFINITY };
        log_add(from_below, from_above)
    };
    if n + 2 >= PAR_THRESHOLD {
        (0..n + 2).into_par_iter().with_min_len(1024).map(cell).collect()
    } else {
        (0..n + 2).map(cell).collect()
    }
}

/// Visit the laws of `d_0, d_1, …, d_{n_max}` in order.
pub fn for_each_dist_law<F>(q: usize, n_max: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&DistanceDistribution),
{
    check_rank(q)?;
    check_cap("distance law horizon", n_max, DIST_CAP)?;
    let (up, down) = step_logs(q);
    let mut law = DistanceDistribution {
        q,
        n: 0,
        log_probs: vec![0.0],
    };
    visit(&law);
    for n in 0..n_max {
        law.log_probs = advance(&law.log_probs, n, up, down);
        law.n = n + 1;
        visit(&law);
    }
    Ok(())
}

/// The exact law of `d_n` for the uniform-generator walk on `F_q`.
pub fn dist_law(q: usize, n: usize) -> Result<DistanceDistribution> {
    let mut out = None;
    for_each_dist_law(q, n, |law| {
        if law.n == n {
            out = Some(law.clone());
        }
    })?;
    Ok(out.expect("final horizon visited"))
}

/// Laws of `d_0, …, d_{n_max}`.
pub fn dist_law_table(q: usize, n_max: usize) -> Result<Vec<DistanceDistribution>> {
    check_cap("distance law table", n_max, TABLE_CAP)?;
    let mut table = Vec::with_capacity(n_max + 1);
    for_each_dist_law(q, n_max, |law| table.push(law.clone()))?;
    Ok(table)
}

/// The law of `d_n` in linear space over any [`Weight`]; with
/// `BigRational` the result is exact.
pub fn dist_law_linear<W: Weight>(q: usize, n: usize) -> Result<Vec<W>> {
    check_rank(q)?;
    check_cap("linear distance law horizon", n, DIST_CAP)?;
    let up = W::ratio(2 * q as u64 - 1, 2 * q as u64);
    let down = W::ratio(1, 2 * q as u64);
    let mut probs = vec![W::one()];
    for step in 0..n {
        let mut next = vec![W::zero(); step + 2];
        for (k, p) in probs.iter().enumerate() {
            if (k + step) % 2 != 0 {
                continue;
            }
            if k == 0 {
                next[1] = next[1].clone() + p.clone();
            } else {
                next[k + 1] = next[k + 1].clone() + p.clone() * up.clone();
                next[k - 1] = next[k - 1].clone() + p.clone() * down.clone();
            }
        }
        probs = next;
    }
    Ok(probs)
}

/// Profile lengths whose mixing weights are taken from exact counts.
const EXACT_WEIGHT_MAX: usize = 64;

/// Precomputed `ln(U(k, m)/|S(k)|)` for `k ≤ k_max`, turning distance laws
/// into τ-laws.
#[derive(Clone, Debug)]
pub struct TauMixer {
    q: usize,
    /// `weights[k][m]`.
    weights: Vec<Vec<f64>>,
}

impl TauMixer {
    pub fn new(q: usize, k_max: usize) -> Result<Self> {
        check_rank(q)?;
        check_cap("cyclic profile length", k_max, crate::free_group::PROFILE_CAP)?;
        let weights = (0..=k_max)
            .map(|k| {
                if k <= EXACT_WEIGHT_MAX {
                    let profile = cyclic_profile(q, k)?;
                    let sphere = BigInt::from(sphere_count_exact(q, k)?);
                    Ok(profile
                        .counts
                        .iter()
                        .map(|u| {
                            let ratio = BigRational::new(BigInt::from(u.clone()), sphere.clone());
                            ratio.to_f64().map_or(f64::NEG_INFINITY, f64::ln)
                        })
                        .collect())
                } else {
                    let sphere = log_sphere_count(q, k);
                    Ok((0..=k / 2).map(|m| log_cyclic_count(q, k, m) - sphere).collect())
                }
            })
            .collect::<Result<_>>()?;
        Ok(TauMixer { q, weights })
    }

    pub fn k_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// The τ-law matching a distance law of the same rank.
    pub fn mix(&self, law: &DistanceDistribution) -> Result<TauDistribution> {
        if law.q != self.q {
            return Err(Error::InvalidArgument(format!(
                "mixer built for rank {} applied to rank {}",
                self.q, law.q
            )));
        }
        check_cap("tau mixer length", law.n, self.k_max())?;
        let n = law.n;
        let cell = |j: usize| -> f64 {
            let mut acc = f64::NEG_INFINITY;
            let mut k = j;
            while k <= n {
                let lp = law.log_probs[k];
                if lp > f64::NEG_INFINITY {
                    acc = log_add(acc, lp + self.weights[k][(k - j) / 2]);
                }
                k += 2;
            }
            acc
        };
        let log_probs = if n >= PAR_THRESHOLD / 4 {
            (0..=n).into_par_iter().map(cell).collect()
        } else {
            (0..=n).map(cell).collect()
        };
        Ok(DistanceDistribution {
            q: self.q,
            n,
            log_probs,
        })
    }
}

/// Mix a distance law into the τ-law using the cyclic profiles.
pub fn tau_from_dist(law: &DistanceDistribution) -> Result<TauDistribution> {
    TauMixer::new(law.q, law.n)?.mix(law)
}

/// The exact law of `τ(γ_n)`.
pub fn tau_law(q: usize, n: usize) -> Result<TauDistribution> {
    check_cap("cyclic profile length", n, crate::free_group::PROFILE_CAP)?;
    tau_from_dist(&dist_law(q, n)?)
}

/// The τ-law as exact rationals, `n ≤ RATIONAL_CAP`.
pub fn tau_law_rational(q: usize, n: usize) -> Result<Vec<BigRational>> {
    check_cap("rational tau law horizon", n, RATIONAL_CAP)?;
    let dist: Vec<BigRational> = dist_law_linear(q, n)?;
    let mut tau = vec![BigRational::from_integer(BigInt::from(0)); n + 1];
    for (k, p) in dist.iter().enumerate() {
        if p == &BigRational::from_integer(BigInt::from(0)) {
            continue;
        }
        let profile = cyclic_profile(q, k)?;
        let sphere = BigInt::from(sphere_count_exact(q, k)?);
        for (m, count) in profile.counts.iter().enumerate() {
            if *count == BigUint::default() {
                continue;
            }
            let weight = BigRational::new(BigInt::from(count.clone()), sphere.clone());
            tau[k - 2 * m] = &tau[k - 2 * m] + p * weight;
        }
    }
    Ok(tau)
}

/// `−(1/2n)·ln P(d_{2n} = 0)` for `n = 1..=n_max`.
pub fn return_rate(q: usize, n_max: usize) -> Result<Vec<f64>> {
    check_rank(q)?;
    let horizon = n_max
        .checked_mul(2)
        .ok_or_else(|| Error::Overflow(format!("return horizon 2·{n_max}")))?;
    let mut out = Vec::with_capacity(n_max);
    for_each_dist_law(q, horizon, |law| {
        if law.n > 0 && law.n % 2 == 0 {
            out.push(-law.log_prob(0) / law.n as f64);
        }
    })?;
    Ok(out)
}

/// `−ln(√(2q−1)/q)`, the limit of [`return_rate`].
pub fn kesten_rate(q: usize) -> f64 {
    let q = q as f64;
    -((2.0 * q - 1.0).sqrt() / q).ln()
}

/// `(q−1)/q`, the linear drift of `d_n`.
pub fn drift(q: usize) -> f64 {
    (q as f64 - 1.0) / q as f64
}

/// `Λ_n(λ)` on a grid.
pub fn log_mgf(q: usize, n: usize, lambdas: &[f64]) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("log_mgf needs n >= 1".into()));
    }
    let law = dist_law(q, n)?;
    Ok(lambdas.iter().map(|&l| law.log_mgf(l)).collect())
}

/// `ln P(d_n ≥ a·n)` or `ln P(d_n ≤ a·n)`.
pub fn deviation_prob(q: usize, n: usize, a: f64, side: Side) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("rate a must be finite and >= 0, got {a}")));
    }
    Ok(dist_law(q, n)?.deviation(a, side))
}
