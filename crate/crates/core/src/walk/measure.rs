use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{invalid, Result};
use crate::free_group::{FreeGroup, Word};

/// Largest allowed deviation of the total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finitely supported probability measure on group elements.
#[derive(Clone, Debug)]
pub struct FiniteMeasure<E> {
    atoms: Vec<(E, f64)>,
    index: WeightedIndex<f64>,
    uniform: bool,
}

impl<E: Clone + PartialEq> FiniteMeasure<E> {
    /// Atoms with equal elements are merged; every probability must be
    /// positive and the total must be one within [`MASS_TOLERANCE`].
    pub fn new(atoms: Vec<(E, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("a measure needs at least one atom"));
        }
        let mut merged: Vec<(E, f64)> = Vec::with_capacity(atoms.len());
        for (e, p) in atoms {
            if !(p > 0.0) || !p.is_finite() {
                return Err(invalid(format!("atom probabilities must be positive, got {p}")));
            }
            match merged.iter_mut().find(|(f, _)| *f == e) {
                Some(slot) => slot.1 += p,
                None => merged.push((e, p)),
            }
        }
        let total: f64 = merged.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(format!("atom probabilities sum to {total}, not 1")));
        }
        let index = WeightedIndex::new(merged.iter().map(|(_, p)| *p))
            .map_err(|e| invalid(format!("bad weights: {e}")))?;
        let uniform = merged.iter().all(|(_, p)| *p == merged[0].1);
        Ok(FiniteMeasure {
            atoms: merged,
            index,
            uniform,
        })
    }

    /// Equal mass on each listed element (after merging duplicates the
    /// weights reflect multiplicity).
    pub fn uniform(elements: Vec<E>) -> Result<Self> {
        let k = elements.len();
        if k == 0 {
            return Err(invalid("a measure needs at least one atom"));
        }
        let p = 1.0 / k as f64;
        let mut atoms: Vec<(E, f64)> = elements.into_iter().map(|e| (e, p)).collect();
        // Renormalize away the rounding of 1/k.
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        for a in &mut atoms {
            a.1 /= total;
        }
        Self::new(atoms)
    }

    pub fn point_mass(e: E) -> Self {
        Self::new(vec![(e, 1.0)]).expect("a point mass is a valid measure")
    }
}

impl<E> FiniteMeasure<E> {
    pub fn atoms(&self) -> &[(E, f64)] {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &E> {
        self.atoms.iter().map(|(e, _)| e)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &E {
        let i = if self.uniform {
            rng.gen_range(0..self.atoms.len())
        } else {
            self.index.sample(rng)
        };
        &self.atoms[i].0
    }
}

/// The simple random walk on `F_q`: mass `1/2q` on each generator and
/// inverse.
pub fn uniform_generators(group: &FreeGroup) -> FiniteMeasure<Word> {
    FiniteMeasure::uniform(group.generators()).expect("generators are distinct")
}
