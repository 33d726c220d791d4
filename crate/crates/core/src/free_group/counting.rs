//! Sphere sizes, cyclic-reduction profiles and uniform sphere sampling.
//!
//! Let `c_0 = 0`, `c_{r+1} = (2q−1)c_r + (−1)^r`, and `K(j) = c_j + [j even]`
//! for `j ≥ 1`: `K(j)` is the number of cyclically reduced words of length
//! `j` whose first letter is a fixed letter. Then
//!
//! * `U(k, 0) = 2q·K(k)`,
//! * `U(k, m) = 2q(2q−1)^{m−1}(2q−2)·K(k−2m)` for `m ≥ 1`, `k − 2m ≥ 1`,
//!
//! and all other entries vanish except `U(0, 0) = 1`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use super::{Letter, Word};
use crate::error::{invalid, Error, Result};

/// Largest word length accepted by [`cyclic_profile`].
pub const PROFILE_CAP: usize = 1 << 14;

fn check_rank(q: usize) -> Result<()> {
    if q == 0 || q > super::MAX_TEXT_RANK {
        return Err(invalid(format!("free group rank must lie in 1..=26, got {q}")));
    }
    Ok(())
}

/// `|S(k)|` in `F_q`, exactly; errors when it does not fit in `u128`.
pub fn sphere_count(q: usize, k: usize) -> Result<u128> {
    check_rank(q)?;
    if k == 0 {
        return Ok(1);
    }
    let branch = (2 * q - 1) as u128;
    let exp = u32::try_from(k - 1).map_err(|_| Error::Overflow(format!("sphere length {k}")))?;
    branch
        .checked_pow(exp)
        .and_then(|p| p.checked_mul(2 * q as u128))
        .ok_or_else(|| Error::Overflow(format!("sphere_count({q}, {k}) exceeds u128")))
}

/// `|S(k)|` as an arbitrary-precision integer.
pub fn sphere_count_exact(q: usize, k: usize) -> Result<BigUint> {
    check_rank(q)?;
    if k == 0 {
        return Ok(BigUint::one());
    }
    Ok(BigUint::from(2 * q) * BigUint::from(2 * q - 1).pow((k - 1) as u32))
}

/// `ln |S(k)|`.
pub fn log_sphere_count(q: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let q = q as f64;
    (2.0 * q).ln() + (k - 1) as f64 * (2.0 * q - 1.0).ln()
}

/// `U(k, ·)` for one word length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicProfile {
    pub q: usize,
    pub k: usize,
    /// `counts[m] = U(k, m)` for `m = 0..=k/2`.
    pub counts: Vec<BigUint>,
}

impl CyclicProfile {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `U(k, m)`, zero outside the stored range.
    pub fn get(&self, m: usize) -> BigUint {
        self.counts.get(m).cloned().unwrap_or_default()
    }
}

pub fn cyclic_profile(q: usize, k: usize) -> Result<CyclicProfile> {
    check_rank(q)?;
    if k > PROFILE_CAP {
        return Err(Error::CapExceeded {
            what: "cyclic profile length",
            requested: k,
            cap: PROFILE_CAP,
        });
    }
    let two_q = BigUint::from(2 * q);
    let branch = BigUint::from(2 * q - 1);
    let mut counts = vec![BigUint::zero(); k / 2 + 1];
    if k == 0 {
        counts[0] = BigUint::one();
        return Ok(CyclicProfile { q, k, counts });
    }
    // c_j for j = 0..=k, built by the recursion.
    let mut c = Vec::with_capacity(k + 1);
    c.push(BigUint::zero());
    for r in 0..k {
        let next = &c[r] * &branch;
        c.push(if r % 2 == 0 { next + 1u32 } else { next - 1u32 });
    }
    let core = |j: usize| -> BigUint {
        if j % 2 == 0 {
            &c[j] + 1u32
        } else {
            c[j].clone()
        }
    };
    counts[0] = &two_q * core(k);
    let mut prefix = &two_q * BigUint::from(2 * q - 2);
    for m in 1..=k / 2 {
        if k - 2 * m >= 1 {
            counts[m] = &prefix * core(k - 2 * m);
        }
        prefix *= &branch;
    }
    Ok(CyclicProfile { q, k, counts })
}

/// `ln K(j)` for `j ≥ 1`.
pub fn log_core_count(q: usize, j: usize) -> f64 {
    assert!(j >= 1);
    let b = (2 * q - 1) as f64;
    if b == 1.0 {
        return 0.0;
    }
    let excess = if j % 2 == 0 { b } else { 1.0 };
    j as f64 * b.ln() + (excess * (-(j as f64) * b.ln()).exp()).ln_1p() - (2.0 * q as f64).ln()
}

/// `ln U(k, m)`, `−∞` where the count vanishes.
pub fn log_cyclic_count(q: usize, k: usize, m: usize) -> f64 {
    if k == 0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if 2 * m > k || (m >= 1 && k == 2 * m) {
        return f64::NEG_INFINITY;
    }
    let two_q = (2 * q) as f64;
    let rest = log_core_count(q, k - 2 * m);
    if m == 0 {
        two_q.ln() + rest
    } else {
        two_q.ln() + (m - 1) as f64 * (two_q - 1.0).ln() + (two_q - 2.0).ln() + rest
    }
}

/// A uniformly random reduced word of length `k`.
pub fn uniform_sphere_sample<R: Rng + ?Sized>(q: usize, k: usize, rng: &mut R) -> Result<Word> {
    check_rank(q)?;
    let mut letters = Vec::with_capacity(k);
    let mut prev: Option<Letter> = None;
    for _ in 0..k {
        let l = match prev {
            None => Letter::from_code(rng.gen_range(0..2 * q)),
            Some(p) => {
                let r = rng.gen_range(0..2 * q - 1);
                let forbidden = p.inv().code();
                Letter::from_code(if r >= forbidden { r + 1 } else { r })
            }
        };
        letters.push(l);
        prev = Some(l);
    }
    Ok(Word { letters })
}
