use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::{allowed_failures, Mode, SchottkyCertificate, Witness};
use crate::error::{invalid, Result};
use crate::space::PointedAction;

const AXIS_POWERS: u64 = 3;
const RANDOM_WORD_MAX: usize = 4;
const POOL_RANDOM: usize = 512;

/// Candidate points for `y` and `z`: the basepoint, far points along the
/// axes of the elements, and orbit points of short random words in `S ∪ S⁻¹`.
fn point_pool<A: PointedAction>(
    space: &A,
    set: &[A::Element],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(String, A::Point)>> {
    let mut pool = vec![("z0".to_string(), space.basepoint())];
    for (i, s) in set.iter().enumerate() {
        let inv = space.invert(s);
        for k in 1..=AXIS_POWERS {
            pool.push((format!("s{i}^{k}"), space.orbit(&space.power(s, k)?)?));
            pool.push((format!("s{i}^-{k}"), space.orbit(&space.power(&inv, k)?)?));
        }
    }
    for _ in 0..POOL_RANDOM {
        let len = rng.gen_range(1..=RANDOM_WORD_MAX);
        let mut g = space.identity();
        let mut label = String::new();
        for _ in 0..len {
            let i = rng.gen_range(0..set.len());
            let flip = rng.gen_bool(0.5);
            let h = if flip { space.invert(&set[i]) } else { set[i].clone() };
            space.right_multiply(&mut g, &h);
            label.push_str(&format!("s{i}{}", if flip { "'" } else { "" }));
        }
        pool.push((label, space.orbit(&g)?));
    }
    Ok(pool)
}

/// A point with its distance to the basepoint.
struct Placed<P> {
    point: P,
    radius: f64,
}

/// Values `(y, s·z)_{z0}` over `s ∈ S`, sorted in decreasing order.
fn products<A: PointedAction>(
    space: &A,
    moved: &[Vec<Placed<A::Point>>],
    z: usize,
    y: &Placed<A::Point>,
) -> Vec<f64> {
    let mut values: Vec<f64> = moved
        .iter()
        .map(|row| {
            let sz = &row[z];
            let raw = 0.5 * ((y.radius + sz.radius) - space.dist(&y.point, &sz.point));
            raw.clamp(0.0, y.radius.min(sz.radius))
        })
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Result of a sampled scan over pairs `(y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledScan {
    pub trials: u64,
    /// Largest over trials of the `(⌊|S|/3⌋+1)`-th largest product: the
    /// smallest constant at which every scanned pair passes.
    pub critical: f64,
    pub critical_witness: Witness,
    /// Worst failure count at the requested constant, if one was given.
    pub worst_failures: Option<(usize, Witness)>,
}

/// Draws `trials` pairs from a pool of random and axis points.
pub fn sampled_scan<A: PointedAction>(
    space: &A,
    set: &[A::Element],
    c: Option<f64>,
    trials: u64,
    seed: u64,
) -> Result<SampledScan> {
    if trials == 0 {
        return Err(invalid("sampled verification needs at least one trial"));
    }
    if set.is_empty() {
        return Err(invalid("a Schottky set must be non-empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = point_pool(space, set, &mut rng)?;
    let z0 = space.basepoint();
    let place = |point: A::Point| Placed {
        radius: space.dist(&z0, &point),
        point,
    };
    let moved: Vec<Vec<Placed<A::Point>>> = set
        .iter()
        .map(|s| pool.iter().map(|(_, p)| space.act(s, p).map(place)).collect())
        .collect::<Result<_>>()?;
    let placed: Vec<Placed<A::Point>> = pool.iter().map(|(_, p)| place(p.clone())).collect();
    let allowed = allowed_failures(set.len());
    let index: Vec<usize> = (0..pool.len()).collect();
    let witness = |y: usize, z: usize| Witness {
        y_class: pool[y].0.clone(),
        z_class: pool[z].0.clone(),
    };
    let pairs: Vec<(usize, usize)> = (0..trials)
        .map(|_| {
            let y = *index.choose(&mut rng).expect("pool is non-empty");
            let z = *index.choose(&mut rng).expect("pool is non-empty");
            (y, z)
        })
        .collect();
    let scored: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(y, z)| {
            let values = products(space, &moved, z, &placed[y]);
            let fails = c.map_or(0, |c| values.iter().take_while(|v| **v > c).count());
            (values[allowed], fails)
        })
        .collect();
    let mut critical = (f64::NEG_INFINITY, 0, 0);
    let mut worst: Option<(usize, usize, usize)> = None;
    for (&(y, z), &(crit, fails)) in pairs.iter().zip(&scored) {
        if crit > critical.0 {
            critical = (crit, y, z);
        }
        if c.is_some() && worst.map_or(true, |w| fails > w.0) {
            worst = Some((fails, y, z));
        }
    }
    Ok(SampledScan {
        trials,
        critical: critical.0,
        critical_witness: witness(critical.1, critical.2),
        worst_failures: worst.map(|(f, y, z)| (f, witness(y, z))),
    })
}

/// Sampled Schottky check at constant `c` for backends without an exact
/// checker. The certificate is labeled non-exhaustive.
pub fn verify_sampled<A: PointedAction>(
    space: &A,
    backend: &str,
    set: &[A::Element],
    labels: Vec<String>,
    c: f64,
    trials: u64,
    seed: u64,
) -> Result<SchottkyCertificate> {
    if labels.len() != set.len() {
        return Err(invalid("one label per element is required"));
    }
    if !(c >= 0.0) {
        return Err(invalid(format!("the constant must be >= 0, got {c}")));
    }
    let scan = sampled_scan(space, set, Some(c), trials, seed)?;
    let (fails, witness) = scan.worst_failures.expect("a constant was given");
    Ok(SchottkyCertificate::assemble(
        backend,
        labels,
        c,
        Mode::Sampled { trials },
        fails,
        Some(witness),
    ))
}

/// Smallest integer `C ≤ c_max` passing every sampled pair, with its
/// certificate; `None` if there is none.
pub fn minimal_constant_sampled<A: PointedAction>(
    space: &A,
    backend: &str,
    set: &[A::Element],
    labels: Vec<String>,
    c_max: u32,
    trials: u64,
    seed: u64,
) -> Result<Option<SchottkyCertificate>> {
    let scan = sampled_scan(space, set, None, trials, seed)?;
    let c = scan.critical.max(0.0).ceil();
    if c > c_max as f64 {
        return Ok(None);
    }
    verify_sampled(space, backend, set, labels, c, trials, seed).map(Some)
}
