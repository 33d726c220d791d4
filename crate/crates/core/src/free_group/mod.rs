//! The free group `F_q` acting on its Cayley tree.
//!
//! Words are stored reduced. The tree metric is `d(u, v) = |u⁻¹v|`, which for
//! reduced words is `|u| + |v| − 2·(common prefix length)`, so every quantity
//! on this backend is an exact integer.

mod counting;

pub use counting::{
    cyclic_profile, log_core_count, log_cyclic_count, log_sphere_count, sphere_count,
    sphere_count_exact, uniform_sphere_sample, CyclicProfile, PROFILE_CAP,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::space::{Length, PointedAction};

/// Largest rank representable in the text format (`a..z` / `A..Z`).
pub const MAX_TEXT_RANK: usize = 26;

/// A generator or its inverse: `code = 2·index + inverse`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        assert!(index < 128, "generator index {index} out of range");
        Letter((index as u8) << 1 | inverse as u8)
    }

    /// Letter with code `c` in `0..2q`, in the order `a, A, b, B, …`.
    pub fn from_code(code: usize) -> Self {
        assert!(code < 256, "letter code {code} out of range");
        Letter(code as u8)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inv(self) -> Self {
        Letter(self.0 ^ 1)
    }

    fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.index() as u8) as char
    }
}

/// A reduced word: no letter is adjacent to its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inv()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    /// A single generator (or inverse) as a word.
    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// `x_index^{exp}` for a signed exponent.
    pub fn generator_power(index: usize, exp: i64) -> Self {
        let l = Letter::new(index, exp < 0);
        Word {
            letters: vec![l; exp.unsigned_abs() as usize],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used plus one (0 for the identity).
    pub fn rank_needed(&self) -> usize {
        self.letters.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }

    /// Number of letters cancelled when forming `self · other`.
    pub fn junction_cancellation(&self, other: &Word) -> usize {
        self.letters
            .iter()
            .rev()
            .zip(other.letters.iter())
            .take_while(|(a, b)| **a == b.inv())
            .count()
    }

    /// The reduced product `self · other`; only the junction is inspected.
    pub fn concat(&self, other: &Word) -> Word {
        let t = self.junction_cancellation(other);
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * t);
        letters.extend_from_slice(&self.letters[..self.len() - t]);
        letters.extend_from_slice(&other.letters[t..]);
        Word { letters }
    }

    /// Right-multiply by a single letter in place.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inv()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// Number of matched first/last inverse pairs stripped by cyclic
    /// reduction.
    pub fn cyclic_strip_count(&self) -> usize {
        let n = self.len();
        let mut m = 0;
        while 2 * m + 1 < n && self.letters[m] == self.letters[n - 1 - m].inv() {
            m += 1;
        }
        m
    }

    /// Strip matching first/last inverse pairs until the word is cyclically
    /// reduced. The result's length is the translation length on the tree.
    pub fn cyclic_reduce(&self) -> Word {
        let m = self.cyclic_strip_count();
        Word {
            letters: self.letters[m..self.len() - m].to_vec(),
        }
    }

    /// `τ(w)`: the cyclically reduced length.
    pub fn translation_length(&self) -> usize {
        self.len() - 2 * self.cyclic_strip_count()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.cyclic_strip_count() == 0
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.letters
            .iter()
            .zip(other.letters.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// The length-`depth` prefix, identifying the boundary cylinder of depth
    /// `depth` that the word (or any ray extending it) lies in.
    pub fn cylinder_of(&self, depth: usize) -> Result<Word> {
        if depth > self.len() {
            return Err(invalid(format!(
                "word {self} has length {} < cylinder depth {depth}",
                self.len()
            )));
        }
        Ok(Word {
            letters: self.letters[..depth].to_vec(),
        })
    }

    /// `w^n` using the conjugate decomposition `w = u c u⁻¹`.
    pub fn pow(&self, n: usize) -> Word {
        if n == 0 || self.is_empty() {
            return Word::identity();
        }
        let m = self.cyclic_strip_count();
        let core = &self.letters[m..self.len() - m];
        let mut letters = Vec::with_capacity(2 * m + core.len() * n);
        letters.extend_from_slice(&self.letters[..m]);
        for _ in 0..n {
            letters.extend_from_slice(core);
        }
        letters.extend_from_slice(&self.letters[self.len() - m..]);
        Word { letters }
    }

    /// Letters must index generators below `rank`.
    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.index() >= rank) {
            Some(l) => Err(invalid(format!(
                "letter {} outside the free group of rank {rank}",
                l.to_char()
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Parses `a`, `A` (= a⁻¹), `b`, …; whitespace is ignored, `1`, `e` alone or the
/// empty string is the identity, and a letter may be followed by `⁻¹` or `^-1`
/// to invert it. The result is reduced.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "ε" {
            return Ok(Word::identity());
        }
        let chars: Vec<char> = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        let mut raw = Vec::with_capacity(chars.len());
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let mut l = if c.is_ascii_lowercase() {
                Letter::new((c as u8 - b'a') as usize, false)
            } else if c.is_ascii_uppercase() {
                Letter::new((c as u8 - b'A') as usize, true)
            } else {
                return Err(Error::Parse(format!("unexpected character {c:?} in word {s:?}")));
            };
            i += 1;
            let rest: String = chars[i..].iter().take(3).collect();
            if rest.starts_with("⁻¹") {
                l = l.inv();
                i += 2;
            } else if rest.starts_with("^-1") {
                l = l.inv();
                i += 3;
            }
            raw.push(l);
        }
        Ok(Word::reduce(raw))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `F_q` acting on its Cayley tree by left multiplication, basepoint `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_TEXT_RANK {
            return Err(invalid(format!("free group rank must lie in 1..=26, got {rank}")));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `a, A, b, B, …` as words.
    pub fn generators(&self) -> Vec<Word> {
        (0..2 * self.rank)
            .map(|c| Word::letter(Letter::from_code(c)))
            .collect()
    }

    /// Parse and check the rank.
    pub fn word(&self, s: &str) -> Result<Word> {
        let w: Word = s.parse()?;
        w.check_rank(self.rank)?;
        Ok(w)
    }
}

impl PointedAction for FreeGroup {
    type Element = Word;
    type Point = Word;

    const TOLERANCE: f64 = 0.0;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn basepoint(&self) -> Word {
        Word::identity()
    }

    fn compose(&self, g: &Word, h: &Word) -> Word {
        g.concat(h)
    }

    fn invert(&self, g: &Word) -> Word {
        g.inverse()
    }

    fn right_multiply(&self, g: &mut Word, h: &Word) {
        for &l in h.letters() {
            g.push(l);
        }
    }

    fn act(&self, g: &Word, p: &Word) -> Result<Word> {
        Ok(g.concat(p))
    }

    fn dist(&self, p: &Word, q: &Word) -> Length {
        (p.len() + q.len() - 2 * p.common_prefix_len(q)) as f64
    }

    fn translation_length(&self, g: &Word) -> Length {
        g.translation_length() as f64
    }

    fn displacement(&self, g: &Word) -> Result<Length> {
        Ok(g.len() as f64)
    }

    fn power(&self, g: &Word, n: u64) -> Result<Word> {
        let steps = usize::try_from(n).map_err(|_| Error::Overflow(format!("power {n}")))?;
        g.len()
            .checked_mul(steps)
            .filter(|&len| len <= 1 << 32)
            .ok_or_else(|| Error::Overflow(format!("{g}^{n} is too long to store")))?;
        Ok(g.pow(steps))
    }

    fn orbit(&self, g: &Word) -> Result<Word> {
        Ok(g.clone())
    }
}
