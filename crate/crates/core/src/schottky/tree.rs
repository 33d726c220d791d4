use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::certificate::{Mode, SchottkyCertificate, Witness};
use crate::error::{invalid, Error, Result};
use crate::free_group::{FreeGroup, Letter, Word};

/// Largest number of `z`-prefix classes visited by [`verify_tree`].
pub const NODE_BUDGET: u64 = 50_000_000;

struct Search<'a> {
    set: &'a [Word],
    depth: usize,
    q: usize,
    nodes: &'a AtomicU64,
}

/// Best failure count seen: `(count, y prefix, z)`.
type Best = Option<(usize, Vec<Letter>, Vec<Letter>)>;

fn better(a: Best, b: Best) -> Best {
    match (&a, &b) {
        (Some(x), Some(y)) if y.0 > x.0 => b,
        (None, _) => b,
        _ => a,
    }
}

impl Search<'_> {
    /// Failure multiplicities for `z = p` and whether every product's
    /// prefix is fixed for all extensions of `p`.
    fn evaluate(&self, p: &[Letter]) -> (Best, bool) {
        let mut classes: HashMap<Vec<Letter>, usize> = HashMap::new();
        let mut all_determined = true;
        for s in self.set {
            let sl = s.letters();
            let t = sl
                .iter()
                .rev()
                .zip(p.iter())
                .take_while(|(a, b)| **a == b.inv())
                .count();
            let kept = sl.len() - t;
            let rest = p.len() - t;
            let known = kept + rest;
            let determined = if t < sl.len().min(p.len()) {
                known >= self.depth
            } else if t == sl.len() {
                rest >= self.depth
            } else {
                false
            };
            all_determined &= determined;
            if known >= self.depth {
                let prefix: Vec<Letter> = sl[..kept]
                    .iter()
                    .chain(p[t..].iter())
                    .take(self.depth)
                    .copied()
                    .collect();
                *classes.entry(prefix).or_default() += 1;
            }
        }
        let best = classes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
            .map(|(prefix, count)| (count, prefix, p.to_vec()));
        (best, all_determined)
    }

    fn dfs(&self, p: &mut Vec<Letter>) -> Result<Best> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= NODE_BUDGET {
            return Err(Error::Budget(format!(
                "tree verification visited more than {NODE_BUDGET} prefix classes"
            )));
        }
        let (mut best, done) = self.evaluate(p);
        if done {
            return Ok(best);
        }
        let last = p.last().copied();
        for code in 0..2 * self.q {
            let l = Letter::from_code(code);
            if Some(l.inv()) == last {
                continue;
            }
            p.push(l);
            let child = self.dfs(p)?;
            p.pop();
            best = better(best, child);
        }
        Ok(best)
    }
}

fn render(letters: &[Letter]) -> String {
    Word::reduce(letters.iter().copied()).to_string()
}

/// Exact Schottky check on the Cayley tree of `F_q` over all pairs of
/// vertices `(y, z)`.
///
/// `(y, s·z)_e > C` iff `y` and `s·z` share their first `C+1` letters, so
/// the worst `y` for a given `z` picks the most common `(C+1)`-prefix among
/// the products `s·z`. The search walks `z`-prefixes `p` and stops as soon
/// as every product's `(C+1)`-prefix is the same for all `z` extending `p`.
pub fn verify_tree(group: &FreeGroup, set: &[Word], c: usize) -> Result<SchottkyCertificate> {
    if set.is_empty() {
        return Err(invalid("a Schottky set must be non-empty"));
    }
    for s in set {
        s.check_rank(group.rank())?;
    }
    let nodes = AtomicU64::new(0);
    let search = Search {
        set,
        depth: c + 1,
        q: group.rank(),
        nodes: &nodes,
    };
    let (root_best, root_done) = search.evaluate(&[]);
    let mut best = root_best;
    if !root_done {
        let children: Vec<Best> = (0..2 * group.rank())
            .into_par_iter()
            .map(|code| search.dfs(&mut vec![Letter::from_code(code)]))
            .collect::<Result<_>>()?;
        for child in children {
            best = better(best, child);
        }
    }
    let (worst, witness) = match best {
        Some((count, y, z)) => (
            count,
            Some(Witness {
                y_class: render(&y),
                z_class: render(&z),
            }),
        ),
        None => (0, None),
    };
    Ok(SchottkyCertificate::assemble(
        format!("free:q={}", group.rank()),
        set.iter().map(|s| s.to_string()).collect(),
        c as f64,
        Mode::TreeExact {
            depth: set.iter().map(Word::len).max().unwrap_or(0) + c + 1,
            nodes: nodes.load(Ordering::Relaxed) + 1,
        },
        worst,
        witness,
    ))
}

/// Smallest `C ≤ c_max` with a valid tree certificate, together with that
/// certificate; `None` if there is none.
pub fn minimal_constant(
    group: &FreeGroup,
    set: &[Word],
    c_max: usize,
) -> Result<Option<SchottkyCertificate>> {
    if set.is_empty() {
        return Err(invalid("a Schottky set must be non-empty"));
    }
    for c in 0..=c_max {
        let cert = verify_tree(group, set, c)?;
        if cert.valid {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}
