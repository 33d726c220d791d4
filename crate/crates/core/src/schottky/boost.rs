use serde::Serialize;

use crate::error::{invalid, Result};
use crate::free_group::{Letter, Word};
use crate::space::PointedAction;

/// The element of `S` maximizing `τ(s·g)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Boost {
    pub index: usize,
    pub tau: f64,
    pub displacement: f64,
    /// `d(z0, g·z0) − τ(s*·g)`.
    pub deficit: f64,
}

/// `argmax_{s ∈ S} τ(s·g)`; ties go to the earliest element.
pub fn boost_translation<A: PointedAction>(
    space: &A,
    set: &[A::Element],
    g: &A::Element,
) -> Result<Boost> {
    if set.is_empty() {
        return Err(invalid("boosting needs a non-empty set"));
    }
    let displacement = space.displacement(g)?;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in set.iter().enumerate() {
        let tau = space.translation_length(&space.compose(s, g));
        if tau > best.1 {
            best = (i, tau);
        }
    }
    Ok(Boost {
        index: best.0,
        tau: best.1,
        displacement,
        deficit: displacement - best.1,
    })
}

/// Running maximum of boost deficits over many calls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DeficitTracker {
    pub calls: u64,
    pub max_deficit: f64,
}

impl DeficitTracker {
    pub fn record(&mut self, boost: &Boost) {
        self.max_deficit = if self.calls == 0 {
            boost.deficit
        } else {
            self.max_deficit.max(boost.deficit)
        };
        self.calls += 1;
    }
}

/// Reduced lengths of the rotations `b_{i+1}…b_n b_1…b_i` for `i = 1..=n`.
pub fn rotation_lengths(letters: &[Letter]) -> Vec<usize> {
    let n = letters.len();
    (1..=n)
        .map(|i| {
            Word::reduce(letters[i..].iter().chain(letters[..i].iter()).copied()).len()
        })
        .collect()
}

/// Best cyclic split for a target displacement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MovingTau {
    /// Rotation index in `1..=n`.
    pub index: usize,
    pub length: usize,
    pub gap: f64,
}

/// For a step sequence `b_1…b_n` with product `g_n`, finds the rotation
/// whose displacement is closest to `r ∈ [τ(g_n), d(e, g_n)]`.
pub fn moving_tau_search(letters: &[Letter], r: f64) -> Result<MovingTau> {
    let lengths = rotation_lengths(letters);
    moving_tau_from_lengths(letters, &lengths, r)
}

/// [`moving_tau_search`] with precomputed [`rotation_lengths`].
pub fn moving_tau_from_lengths(letters: &[Letter], lengths: &[usize], r: f64) -> Result<MovingTau> {
    if letters.is_empty() || lengths.len() != letters.len() {
        return Err(invalid("moving-tau search needs a non-empty word and one length per rotation"));
    }
    let g = Word::reduce(letters.iter().copied());
    let (tau, d) = (g.translation_length() as f64, g.len() as f64);
    if !(r >= tau && r <= d) {
        return Err(invalid(format!("target {r} lies outside [{tau}, {d}]")));
    }
    let mut best = MovingTau {
        index: 0,
        length: 0,
        gap: f64::INFINITY,
    };
    for (i, &len) in lengths.iter().enumerate() {
        let gap = (len as f64 - r).abs();
        if gap < best.gap {
            best = MovingTau {
                index: i + 1,
                length: len,
                gap,
            };
        }
    }
    Ok(best)
}
