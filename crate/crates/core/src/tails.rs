//! Harmonic measure of boundary cylinders for the simple random walk on a
//! free group, and power-law fits of its decay with depth.
//!
//! A boundary cylinder is identified with the reduced word of length `k`
//! that all its points start with. The walk is run to a horizon after which
//! its first `k` letters are very unlikely to change, and the prefix of the
//! endpoint is read off as a sample from the harmonic measure.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exact::drift;
use crate::free_group::{Letter, Word};
use crate::stats::{linear_fit, wilson_interval, Z95};
use crate::walk::{map_chunks, WalkRun};

/// Largest number of prefix slots `(2q)^k` tallied in one run.
pub const CYLINDER_CAP: usize = 1 << 22;

/// How far to run the walk before reading a depth-`k` prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum HorizonRule {
    /// `ceil(factor·k / drift) + offset`.
    Linear { factor: f64, offset: usize },
    Fixed(usize),
}

impl Default for HorizonRule {
    fn default() -> Self {
        HorizonRule::Linear {
            factor: 20.0,
            offset: 50,
        }
    }
}

impl HorizonRule {
    pub fn horizon(&self, q: usize, k: usize) -> usize {
        match *self {
            HorizonRule::Linear { factor, offset } => {
                (factor * k as f64 / drift(q)).ceil() as usize + offset
            }
            HorizonRule::Fixed(n) => n,
        }
    }

    /// The same rule with every horizon doubled.
    pub fn doubled(&self) -> Self {
        match *self {
            HorizonRule::Linear { factor, offset } => HorizonRule::Linear {
                factor: 2.0 * factor,
                offset: 2 * offset,
            },
            HorizonRule::Fixed(n) => HorizonRule::Fixed(2 * n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicOptions {
    pub samples: u64,
    pub seed: u64,
    pub horizon: HorizonRule,
    /// Trajectories ending closer than `k + margin` to the identity keep
    /// walking for another horizon.
    pub margin: usize,
    pub chunk_size: u64,
    pub workers: Option<usize>,
}

impl HarmonicOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        HarmonicOptions {
            samples,
            seed,
            horizon: HorizonRule::default(),
            margin: 2,
            chunk_size: 4096,
            workers: None,
        }
    }
}

/// Estimated harmonic measure of one cylinder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderEstimate {
    pub prefix: String,
    pub depth: usize,
    pub hits: u64,
    pub samples: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CylinderEstimate {
    fn new(prefix: String, depth: usize, hits: u64, samples: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(hits, samples, Z95);
        CylinderEstimate {
            prefix,
            depth,
            hits,
            samples,
            estimate: hits as f64 / samples as f64,
            ci_lo,
            ci_hi,
        }
    }

    /// Binomial standard error at the estimate.
    pub fn std_error(&self) -> f64 {
        let p = self.estimate;
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// All cylinders of one depth from a single run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicRun {
    pub q: usize,
    pub depth: usize,
    pub horizon: usize,
    /// Trajectories that needed at least one extra horizon.
    pub resimulated: u64,
    pub cylinders: Vec<CylinderEstimate>,
}

impl HarmonicRun {
    /// Aggregates to a shallower depth by summing over extensions.
    pub fn coarsen(&self, depth: usize) -> Result<HarmonicRun> {
        if depth > self.depth {
            return Err(invalid(format!(
                "cannot refine depth {} to {depth}",
                self.depth
            )));
        }
        let samples = self.cylinders.first().map_or(0, |c| c.samples);
        let mut order: Vec<String> = Vec::new();
        let mut hits: std::collections::HashMap<String, u64> = Default::default();
        for c in &self.cylinders {
            let w: Word = c.prefix.parse()?;
            let prefix = Word::reduce(w.letters()[..depth].iter().copied()).to_string();
            let entry = hits.entry(prefix.clone()).or_insert_with(|| {
                order.push(prefix);
                0
            });
            *entry += c.hits;
        }
        Ok(HarmonicRun {
            q: self.q,
            depth,
            horizon: self.horizon,
            resimulated: self.resimulated,
            cylinders: order
                .into_iter()
                .map(|p| {
                    let h = hits[&p];
                    CylinderEstimate::new(p, depth, h, samples)
                })
                .collect(),
        })
    }

    /// Largest cylinder estimate.
    pub fn max_estimate(&self) -> f64 {
        self.cylinders.iter().map(|c| c.estimate).fold(0.0, f64::max)
    }
}

/// `ν(w) = 1/(2q) · (2q−1)^{1−k}` for every reduced `w` of length `k ≥ 1`.
pub fn cylinder_measure(q: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let m = 2.0 * q as f64;
    (m - 1.0).powi(1 - k as i32) / m
}

fn slot(letters: &[u8], k: usize, m: usize) -> usize {
    letters[..k].iter().fold(0, |acc, &c| acc * m + c as usize)
}

fn walk_tail<R: Rng + ?Sized>(stack: &mut Vec<u8>, m: u8, steps: usize, rng: &mut R) {
    for _ in 0..steps {
        let code = rng.gen_range(0..m);
        if stack.last() == Some(&(code ^ 1)) {
            stack.pop();
        } else {
            stack.push(code);
        }
    }
}

/// Estimates `ν` on every cylinder of depth `k` for the simple random walk
/// on `F_q`.
pub fn harmonic_cylinders(q: usize, k: usize, options: &HarmonicOptions) -> Result<HarmonicRun> {
    crate::exact::check_rank(q)?;
    let m = 2 * q;
    let slots = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if slots > CYLINDER_CAP as u128 {
        return Err(Error::CapExceeded {
            what: "cylinder slots",
            requested: slots.min(usize::MAX as u128) as usize,
            cap: CYLINDER_CAP,
        });
    }
    let slots = slots as usize;
    let horizon = options.horizon.horizon(q, k);
    let run = WalkRun::new(horizon, options.samples, options.seed)?
        .with_chunk_size(options.chunk_size)?;
    let need = k + options.margin;
    let per_chunk = map_chunks(&run, options.workers, |mut chunk| {
        let mut counts = vec![0u64; slots];
        let mut resimulated = 0u64;
        let mut stack = Vec::with_capacity(horizon + 1);
        for _ in 0..chunk.len {
            stack.clear();
            walk_tail(&mut stack, m as u8, horizon, &mut chunk.rng);
            let mut extended = false;
            let mut extra = horizon.max(1);
            while stack.len() < need {
                extended = true;
                walk_tail(&mut stack, m as u8, extra, &mut chunk.rng);
                extra *= 2;
            }
            resimulated += extended as u64;
            counts[slot(&stack, k, m)] += 1;
        }
        Ok((counts, resimulated))
    })?;
    let mut counts = vec![0u64; slots];
    let mut resimulated = 0;
    for (c, r) in per_chunk {
        for (total, x) in counts.iter_mut().zip(c) {
            *total += x;
        }
        resimulated += r;
    }
    let cylinders = reduced_words(q, k)
        .into_iter()
        .map(|codes| {
            let hits = counts[slot(&codes, k, m)];
            let word = Word::reduce(codes.iter().map(|&c| Letter::from_code(c as usize)));
            CylinderEstimate::new(word.to_string(), k, hits, options.samples)
        })
        .collect();
    Ok(HarmonicRun {
        q,
        depth: k,
        horizon,
        resimulated,
        cylinders,
    })
}

/// Reduced words of length `k` as letter codes, in lexicographic code order.
fn reduced_words(q: usize, k: usize) -> Vec<Vec<u8>> {
    let mut words = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(words.len() * (2 * q - 1));
        for w in &words {
            for c in 0..2 * q as u8 {
                if w.last() == Some(&(c ^ 1)) {
                    continue;
                }
                let mut v: Vec<u8> = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        words = next;
    }
    words
}

/// Least-squares fit `ln ν(k) ≈ ln C − D·k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub points: Vec<(usize, f64)>,
    /// Decay exponent `D` (minus the slope).
    pub d: f64,
    /// Intercept `ln C`.
    pub log_c: f64,
    pub residual: f64,
    pub r_squared: f64,
    /// Set when `D ≤ 0`: the data show no decay.
    pub degenerate: bool,
}

/// Fits the decay of `ν` from `(depth, ν̂)` pairs with `ν̂ > 0`.
pub fn power_law_fit(estimates: &[(usize, f64)]) -> Result<PowerLawFit> {
    if estimates.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "a power-law fit needs at least 3 depths, got {}",
            estimates.len()
        )));
    }
    if let Some((k, v)) = estimates.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::InsufficientData(format!(
            "depth {k} has estimate {v}; every depth needs a positive estimate"
        )));
    }
    let xs: Vec<f64> = estimates.iter().map(|(k, _)| *k as f64).collect();
    let ys: Vec<f64> = estimates.iter().map(|(_, v)| v.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    let d = -fit.slope;
    Ok(PowerLawFit {
        points: estimates.iter().zip(&ys).map(|((k, _), y)| (*k, *y)).collect(),
        d,
        log_c: fit.intercept,
        residual: fit.residual,
        r_squared: fit.r_squared,
        degenerate: !(d > 1e-12),
    })
}

/// Runs once at depth `k_max` and fits the largest cylinder mass at each
/// depth `1..=k_max`.
pub fn harmonic_decay(
    q: usize,
    k_max: usize,
    options: &HarmonicOptions,
) -> Result<(Vec<HarmonicRun>, PowerLawFit)> {
    if k_max < 3 {
        return Err(Error::InsufficientData(format!(
            "a decay fit needs depths up to at least 3, got {k_max}"
        )));
    }
    let deepest = harmonic_cylinders(q, k_max, options)?;
    let runs: Vec<HarmonicRun> = (1..=k_max)
        .map(|k| deepest.coarsen(k))
        .collect::<Result<_>>()?;
    let points: Vec<(usize, f64)> = runs.iter().map(|r| (r.depth, r.max_estimate())).collect();
    let fit = power_law_fit(&points)?;
    Ok((runs, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_is_whole_boundary() {
        let run = harmonic_cylinders(2, 0, &HarmonicOptions::new(100, 1)).unwrap();
        assert_eq!(run.cylinders.len(), 1);
        assert_eq!(run.cylinders[0].estimate, 1.0);
        assert_eq!(cylinder_measure(2, 0), 1.0);
    }

    #[test]
    fn cylinder_measure_sums_to_one() {
        for q in 2..5 {
            for k in 1..5 {
                let count = reduced_words(q, k).len() as f64;
                assert!((count * cylinder_measure(q, k) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_fit_is_flagged() {
        let f = power_law_fit(&[(1, 0.1), (2, 0.1), (3, 0.1)]).unwrap();
        assert!(f.degenerate);
        assert!(power_law_fit(&[(1, 0.1), (2, 0.1)]).is_err());
    }
}
