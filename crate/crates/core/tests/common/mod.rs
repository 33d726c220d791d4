//! Independent brute-force oracles shared by the integration tests.
//!
//! Everything here works on raw letter codes (`2·generator + inverse`) and
//! avoids the library's own reduction and counting routines.

#![allow(dead_code)]

use hyperwalk::{Letter, Word};
use num_complex::Complex64;

/// Removes adjacent inverse pairs by repeated scanning until nothing changes.
pub fn naive_reduce(codes: &[u8]) -> Vec<u8> {
    let mut w = codes.to_vec();
    loop {
        let pos = (0..w.len().saturating_sub(1)).find(|&i| w[i] ^ 1 == w[i + 1]);
        match pos {
            Some(i) => {
                w.drain(i..i + 2);
            }
            None => return w,
        }
    }
}

/// Strips matching first/last inverse pairs of a reduced word.
pub fn naive_cyclic_reduce(codes: &[u8]) -> Vec<u8> {
    let mut w = naive_reduce(codes);
    while w.len() >= 2 && w[0] ^ 1 == w[w.len() - 1] {
        w.remove(0);
        w.pop();
    }
    w
}

pub fn to_word(codes: &[u8]) -> Word {
    Word::reduce(codes.iter().map(|&c| Letter::from_code(c as usize)))
}

pub fn codes_of(w: &Word) -> Vec<u8> {
    w.letters().iter().map(|l| l.code() as u8).collect()
}

/// Every letter sequence of length `n` over `2q` letters.
pub fn all_sequences(q: usize, n: usize) -> Vec<Vec<u8>> {
    let m = 2 * q as u8;
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..m).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Reduced words of length exactly `k`, by filtering all sequences.
pub fn all_reduced_words(q: usize, k: usize) -> Vec<Vec<u8>> {
    all_sequences(q, k)
        .into_iter()
        .filter(|w| w.windows(2).all(|p| p[0] ^ 1 != p[1]))
        .collect()
}

/// Reduced words of length at most `k`.
pub fn ball(q: usize, k: usize) -> Vec<Vec<u8>> {
    (0..=k).flat_map(|j| all_reduced_words(q, j)).collect()
}

/// Counts of `d_n = k` and `τ(γ_n) = k` over all `(2q)^n` step sequences.
pub fn brute_laws(q: usize, n: usize) -> (Vec<u64>, Vec<u64>) {
    let mut d = vec![0u64; n + 1];
    let mut t = vec![0u64; n + 1];
    for seq in all_sequences(q, n) {
        d[naive_reduce(&seq).len()] += 1;
        t[naive_cyclic_reduce(&seq).len()] += 1;
    }
    (d, t)
}

/// Cyclic profile `U(k, m)` by brute force.
pub fn brute_profile(q: usize, k: usize) -> Vec<u64> {
    let mut u = vec![0u64; k / 2 + 1];
    for w in all_reduced_words(q, k) {
        let m = (k - naive_cyclic_reduce(&w).len()) / 2;
        u[m] += 1;
    }
    u
}

/// Reduced lengths of all rotations `b_{i+1}…b_n b_1…b_i`, `i = 1..=n`.
pub fn brute_rotations(codes: &[u8]) -> Vec<usize> {
    let n = codes.len();
    (1..=n)
        .map(|i| {
            let rot: Vec<u8> = codes[i..].iter().chain(&codes[..i]).copied().collect();
            naive_reduce(&rot).len()
        })
        .collect()
}

/// Uniform random step sequence of length `n`.
pub fn random_steps(q: usize, n: usize, rng: &mut impl rand::Rng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2 * q as u8)).collect()
}

/// Hyperbolic distance in the disc from the arccosh formula.
pub fn disc_dist(p: Complex64, q: Complex64) -> f64 {
    let num = 2.0 * (p - q).norm_sqr();
    let den = (1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr());
    (1.0 + num / den).acosh()
}

/// Action of the real matrix `[a b; c d]` on the disc, computed through the
/// upper half-plane by the Cayley transform.
pub fn disc_action(m: [f64; 4], w: Complex64) -> Complex64 {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let z = i * (one + w) / (one - w);
    let z2 = (m[0] * z + m[1]) / (m[2] * z + m[3]);
    (z2 - i) / (z2 + i)
}

/// Largest singular value of a 2×2 matrix from the eigenvalues of `MᵀM`.
pub fn operator_norm(m: [f64; 4]) -> f64 {
    let [a, b, c, d] = m;
    let (p, r, s) = (a * a + c * c, a * b + c * d, b * b + d * d);
    let tr = p + s;
    let det = p * s - r * r;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    (tr / 2.0 + disc).sqrt()
}

/// `ln ρ(M)` as `lim ln‖M^{2^k}‖ / 2^k`, squaring with renormalization.
pub fn log_spectral_radius_by_squaring(m: [f64; 4], squarings: u32) -> f64 {
    let mut cur = m;
    let mut log_scale = 0.0f64;
    let mut power = 1.0f64;
    for _ in 0..squarings {
        let [a, b, c, d] = cur;
        let sq = [a * a + b * c, a * b + b * d, c * a + d * c, c * b + d * d];
        log_scale *= 2.0;
        let s = sq.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        cur = sq.map(|x| x / s);
        log_scale += s.ln();
        power *= 2.0;
    }
    (log_scale + operator_norm(cur).ln()) / power
}

/// Closed-form `−ln(√(2q−1)/q)`.
pub fn kesten(q: usize) -> f64 {
    -(((2 * q - 1) as f64).sqrt() / q as f64).ln()
}
