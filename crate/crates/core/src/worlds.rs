//! The world space: every truth assignment to the declared atoms.
//!
//! World `w` assigns atom `i` the value of bit `i` of `w` (atom 0 is the least
//! significant bit). With atoms `[D, F]` the worlds are, in order,
//! `!D!F`, `D!F`, `!DF`, `DF`.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::kb::{Atom, Sentence};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct WorldTable {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
    /// `atom_sets[i]`: worlds in which atom `i` is true.
    atom_sets: Vec<WorldSet>,
}

/// A set of worlds, stored as a bitset of length `world_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldSet {
    bits: FixedBitSet,
}

impl WorldSet {
    pub fn empty(world_count: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(world_count),
        }
    }

    pub fn full(world_count: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(world_count);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.count_ones(..) == self.bits.len()
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn contains(&self, world: usize) -> bool {
        self.bits.contains(world)
    }

    pub fn insert(&mut self, world: usize) {
        self.bits.insert(world);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Self { bits }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Self { bits }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Self { bits }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// 0/1 indicator vector, one entry per world.
    pub fn indicator(&self) -> Vec<f64> {
        (0..self.len())
            .map(|w| if self.contains(w) { 1.0 } else { 0.0 })
            .collect()
    }
}

/// Builds the table for `atoms` in declaration order.
pub fn build_world_table(atoms: &[Atom], cap: usize) -> Result<WorldTable> {
    if atoms.len() > cap {
        return Err(Error::CapExceeded {
            count: atoms.len(),
            cap,
        });
    }
    let world_count = 1usize << atoms.len();
    let atom_sets = (0..atoms.len())
        .map(|i| {
            let mut set = WorldSet::empty(world_count);
            for w in (0..world_count).filter(|w| (w >> i) & 1 == 1) {
                set.insert(w);
            }
            set
        })
        .collect();
    let index = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name().to_owned(), i))
        .collect();
    Ok(WorldTable {
        atoms: atoms.to_vec(),
        index,
        atom_sets,
    })
}

impl WorldTable {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn world_count(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Truth value of atom `atom` in world `world`.
    pub fn value(&self, world: usize, atom: usize) -> bool {
        (world >> atom) & 1 == 1
    }

    /// Assignment bits of `world`, most significant (last atom) first, so the
    /// string reads as `world` in binary.
    pub fn assignment_bits(&self, world: usize) -> String {
        (0..self.atom_count())
            .rev()
            .map(|i| if self.value(world, i) { '1' } else { '0' })
            .collect()
    }

    pub fn satisfying_set(&self, s: &Sentence) -> Result<WorldSet> {
        let n = self.world_count();
        Ok(match s {
            Sentence::True => WorldSet::full(n),
            Sentence::False => WorldSet::empty(n),
            Sentence::Atom(name) => {
                let i = self
                    .atom_index(name)
                    .ok_or_else(|| Error::UnknownAtom(name.clone()))?;
                self.atom_sets[i].clone()
            }
            Sentence::Not(c) => self.satisfying_set(c)?.complement(),
            Sentence::And(a, b) => self.satisfying_set(a)?.intersection(&self.satisfying_set(b)?),
            Sentence::Or(a, b) => self.satisfying_set(a)?.union(&self.satisfying_set(b)?),
            Sentence::Implies(a, b) => self
                .satisfying_set(a)?
                .complement()
                .union(&self.satisfying_set(b)?),
            Sentence::Iff(a, b) => {
                let (sa, sb) = (self.satisfying_set(a)?, self.satisfying_set(b)?);
                let both = sa.intersection(&sb);
                let neither = sa.complement().intersection(&sb.complement());
                both.union(&neither)
            }
        })
    }

    /// True iff `s` holds in every world.
    pub fn is_valid(&self, s: &Sentence) -> Result<bool> {
        Ok(self.satisfying_set(s)?.is_full())
    }

    /// True iff `a` and `b` hold in exactly the same worlds.
    pub fn equivalent(&self, a: &Sentence, b: &Sentence) -> Result<bool> {
        Ok(self.satisfying_set(a)? == self.satisfying_set(b)?)
    }

    /// Reference semantics: evaluates `s` recursively in a single world.
    pub fn satisfies(&self, world: usize, s: &Sentence) -> Result<bool> {
        for name in s.atoms() {
            if self.atom_index(name).is_none() {
                return Err(Error::UnknownAtom(name.to_owned()));
            }
        }
        Ok(s.eval(|name| self.value(world, self.index[name])))
    }
}
