use std::collections::HashSet;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::space::{Length, PointedAction};

/// Largest number of distinct products kept per level.
pub const JOINT_BUDGET: usize = 1 << 21;

/// Extremes over `B^n` for one `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub n: usize,
    /// Distinct elements of `B^n`.
    pub distinct: usize,
    /// Sorted distinct values of `(1/n)·d(g·z0, z0)`.
    pub values: Vec<f64>,
    pub min_disp: f64,
    pub max_disp: f64,
    pub min_tau: f64,
    pub max_tau: f64,
    /// Hausdorff distance from `values` to `[ℓ_sub, ℓ]` (upper bracket ends).
    pub hausdorff: f64,
}

/// A Fekete-type bracket `(best, last)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub best: f64,
    pub last: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointSpectrum {
    pub n_max: usize,
    pub levels: Vec<SpectrumLevel>,
    /// `ℓ_sub(B)`: inf over `n` of the normalized minimum displacement.
    pub ell_sub: Bracket,
    /// `ℓ(B)`: inf over `n` of the normalized maximum displacement.
    pub ell: Bracket,
    /// `ℓ_∞(B)`: sup over `n` of the normalized maximum translation length.
    pub ell_inf: Bracket,
    /// Set when the budget stopped enumeration before `n_max`.
    pub partial: bool,
}

/// Hausdorff distance between a finite set and the interval `[lo, hi]`.
pub fn hausdorff_to_interval(values: &[f64], lo: f64, hi: f64) -> f64 {
    if values.is_empty() {
        return f64::INFINITY;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let outward = v
        .iter()
        .map(|&x| (lo - x).max(x - hi).max(0.0))
        .fold(0.0, f64::max);
    // Farthest interval point from the set: an endpoint or a gap midpoint.
    let nearest = |t: f64| v.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min);
    let mut inward = nearest(lo).max(nearest(hi));
    for w in v.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if (lo..=hi).contains(&mid) {
            inward = inward.max(nearest(mid));
        }
    }
    outward.max(inward)
}

/// Exhaustive products `B^n`, `n = 1..=n_max`, deduplicated.
fn for_each_level<A, F>(space: &A, b: &[A::Element], n_max: usize, mut visit: F) -> Result<bool>
where
    A: PointedAction,
    A::Element: Eq + Hash,
    F: FnMut(usize, &[A::Element]) -> Result<()>,
{
    if b.is_empty() {
        return Err(invalid("the element set must be non-empty"));
    }
    if n_max == 0 {
        return Err(invalid("n_max must be >= 1"));
    }
    let mut level: Vec<A::Element> = {
        let mut seen = HashSet::new();
        b.iter().filter(|g| seen.insert((*g).clone())).cloned().collect()
    };
    visit(1, &level)?;
    for n in 2..=n_max {
        let mut seen = HashSet::with_capacity(level.len() * b.len());
        let mut next = Vec::new();
        for g in &level {
            for s in b {
                let h = space.compose(g, s);
                if seen.insert(h.clone()) {
                    next.push(h);
                    if next.len() > JOINT_BUDGET {
                        return Ok(true);
                    }
                }
            }
        }
        level = next;
        visit(n, &level)?;
    }
    Ok(false)
}

pub fn joint_spectrum<A>(space: &A, b: &[A::Element], n_max: usize) -> Result<JointSpectrum>
where
    A: PointedAction,
    A::Element: Eq + Hash,
{
    let mut levels = Vec::new();
    let partial = for_each_level(space, b, n_max, |n, elems| {
        let nf = n as f64;
        let mut values = Vec::with_capacity(elems.len());
        let (mut min_tau, mut max_tau) = (f64::INFINITY, f64::NEG_INFINITY);
        for g in elems {
            values.push(space.displacement(g)? / nf);
            let t = space.translation_length(g) / nf;
            min_tau = min_tau.min(t);
            max_tau = max_tau.max(t);
        }
        values.sort_by(f64::total_cmp);
        values.dedup_by(|x, y| (*x - *y).abs() <= A::TOLERANCE);
        levels.push(SpectrumLevel {
            n,
            distinct: elems.len(),
            min_disp: values[0],
            max_disp: *values.last().expect("non-empty level"),
            values,
            min_tau,
            max_tau,
            hausdorff: f64::NAN,
        });
        Ok(())
    })?;
    let last = levels.last().expect("at least one level");
    let ell_sub = Bracket {
        best: levels.iter().map(|l| l.min_disp).fold(f64::INFINITY, f64::min),
        last: last.min_disp,
    };
    let ell = Bracket {
        best: levels.iter().map(|l| l.max_disp).fold(f64::INFINITY, f64::min),
        last: last.max_disp,
    };
    let ell_inf = Bracket {
        best: levels.iter().map(|l| l.max_tau).fold(f64::NEG_INFINITY, f64::max),
        last: last.max_tau,
    };
    for level in &mut levels {
        level.hausdorff = hausdorff_to_interval(&level.values, ell_sub.best, ell.best);
    }
    Ok(JointSpectrum {
        n_max: levels.last().map_or(0, |l| l.n),
        levels,
        ell_sub,
        ell,
        ell_inf,
        partial,
    })
}

/// Outcome of the arithmeticity search.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Arithmeticity<E> {
    /// Two elements of `B^n` with different stable lengths.
    NonArithmetic { n: usize, g1: E, g2: E, ell1: Length, ell2: Length },
    /// Every `B^n`, `n ≤ n_max`, has a single stable length.
    Arithmetic { n_max: usize },
}

pub fn non_arithmetic<A>(space: &A, b: &[A::Element], n_max: usize) -> Result<Arithmeticity<A::Element>>
where
    A: PointedAction,
    A::Element: Eq + Hash,
{
    let mut witness = None;
    for_each_level(space, b, n_max, |n, elems| {
        if witness.is_some() {
            return Ok(());
        }
        let first = &elems[0];
        let ell1 = space.translation_length(first);
        if let Some(g2) = elems
            .iter()
            .find(|g| (space.translation_length(g) - ell1).abs() > A::TOLERANCE)
        {
            witness = Some(Arithmeticity::NonArithmetic {
                n,
                g1: first.clone(),
                g2: g2.clone(),
                ell1,
                ell2: space.translation_length(g2),
            });
        }
        Ok(())
    })?;
    Ok(witness.unwrap_or(Arithmeticity::Arithmetic { n_max }))
}

/// `(ℓ_∞ bracket, ℓ bracket)` from the joint spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BergerWang {
    pub ell_inf: Bracket,
    pub ell: Bracket,
    /// `ℓ.best − ℓ_∞.best`.
    pub gap: f64,
}

pub fn berger_wang<A>(space: &A, b: &[A::Element], n_max: usize) -> Result<BergerWang>
where
    A: PointedAction,
    A::Element: Eq + Hash,
{
    let js = joint_spectrum(space, b, n_max)?;
    Ok(BergerWang {
        ell_inf: js.ell_inf,
        ell: js.ell,
        gap: js.ell.best - js.ell_inf.best,
    })
}
