//! Schottky sets: the two-thirds checker (exact on trees, sampled
//! elsewhere), the ping-pong construction from two loxodromic elements, and
//! the translation-length boosting and cyclic-rotation searches that use a
//! Schottky set.

mod boost;
mod certificate;
mod pingpong;
mod sampled;
mod tree;

pub use boost::{
    boost_translation, moving_tau_from_lengths, moving_tau_search, rotation_lengths, Boost,
    DeficitTracker, MovingTau,
};
pub use certificate::{allowed_failures, Mode, SchottkyCertificate, Witness};
pub use pingpong::{
    construct_pingpong, shadow_conditions, PingPong, PingPongAttempt, PingPongOptions,
    ShadowCheck, LOXODROMIC_THRESHOLD, WORD_LENGTH,
};
pub use sampled::{minimal_constant_sampled, sampled_scan, verify_sampled, SampledScan};
pub use tree::{minimal_constant, verify_tree, NODE_BUDGET};

use crate::error::Result;
use crate::free_group::{FreeGroup, Word};

/// Ping-pong construction on the Cayley tree, certified exactly with the
/// smallest constant `C ≤ c_max`.
pub fn construct_pingpong_tree(
    group: &FreeGroup,
    g1: &Word,
    g2: &Word,
    options: &PingPongOptions,
    c_max: usize,
) -> Result<PingPong<Word>> {
    construct_pingpong(group, g1, g2, options, |set, _| {
        minimal_constant(group, set, c_max)
    })
}
