//! A small fixed-capacity bit set used for value lists.
//!
//! Template domains stay small (a few dozen elements at most), so a
//! handful of `u64` words with inline storage for the one-word case
//! would be overkill; a `Vec<u64>` keeps the code simple.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A set of `usize` values below a fixed capacity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    capacity: usize,
}

impl BitSet {
    pub fn empty(capacity: usize) -> Self {
        BitSet { words: vec![0; capacity.div_ceil(64).max(1)], capacity }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for v in 0..capacity {
            s.insert(v);
        }
        s
    }

    pub fn singleton(capacity: usize, value: usize) -> Self {
        let mut s = Self::empty(capacity);
        s.insert(value);
        s
    }

    pub fn from_iter(capacity: usize, values: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(capacity);
        for v in values {
            s.insert(v);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, value: usize) {
        debug_assert!(value < self.capacity);
        self.words[value / 64] |= 1 << (value % 64);
    }

    pub fn remove(&mut self, value: usize) -> bool {
        let present = self.contains(value);
        self.words[value / 64] &= !(1 << (value % 64));
        present
    }

    pub fn contains(&self, value: usize) -> bool {
        value < self.capacity && self.words[value / 64] >> (value % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Intersects in place; reports whether anything was removed.
    pub fn intersect_with(&mut self, other: &BitSet) -> bool {
        let mut changed = false;
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            let new = *w & *o;
            changed |= new != *w;
            *w = new;
        }
        changed
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= *o;
        }
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(w, o)| w & !o == 0)
    }

    /// The single element of a one-element set.
    pub fn sole(&self) -> Option<usize> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, w)| {
            let mut w = *w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
