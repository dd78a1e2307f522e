//! Occupation-count vectors.
//!
//! The walk's one-step law depends on its history only through how many
//! times each direction (or, for the axis process, each axis) has been used.
//! [`CountVector`] is that sufficient statistic, parameterised by the number
//! of slots so the six-direction walk and the three-colour urn share code.

use std::fmt;
use std::ops::{Add, Index};

/// Non-negative occupation counts over `K` labelled slots.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountVector<const K: usize>([u64; K]);

/// Counts of the six lattice directions, indexed by `k` in `ζ^k`.
pub type CountVector6 = CountVector<6>;

/// Counts of the three axes `ω¹, ω², ω³`, stored at indices 0, 1, 2.
pub type CountVector3 = CountVector<3>;

impl<const K: usize> CountVector<K> {
    pub const fn zero() -> Self {
        CountVector([0; K])
    }

    pub const fn new(counts: [u64; K]) -> Self {
        CountVector(counts)
    }

    /// Number of steps (balls) accounted for.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn as_array(&self) -> &[u64; K] {
        &self.0
    }

    pub fn get(&self, slot: usize) -> u64 {
        self.0[slot]
    }

    /// Adds one unit to `slot`.
    pub fn increment(&mut self, slot: usize) {
        self.0[slot] += 1;
    }

    /// Returns a copy with one unit added to `slot`.
    pub fn incremented(mut self, slot: usize) -> Self {
        self.0[slot] += 1;
        self
    }

    /// Returns a copy with one unit removed from `slot`, or `None` if that
    /// slot is empty.
    pub fn decremented(mut self, slot: usize) -> Option<Self> {
        self.0[slot] = self.0[slot].checked_sub(1)?;
        Some(self)
    }

    /// Relabels slot `i` as slot `(i + shift) mod K`.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut out = [0; K];
        for (i, &c) in self.0.iter().enumerate() {
            out[(i + shift) % K] = c;
        }
        CountVector(out)
    }

    /// Packs the counts into a single key, `bits` bits per slot, slot 0 most
    /// significant so that key order is lexicographic order.
    pub(crate) fn pack(&self, bits: u32) -> u64 {
        self.0.iter().fold(0u64, |acc, &c| (acc << bits) | c)
    }

    pub(crate) fn unpack(mut key: u64, bits: u32) -> Self {
        let mask = (1u64 << bits) - 1;
        let mut out = [0; K];
        for slot in out.iter_mut().rev() {
            *slot = key & mask;
            key >>= bits;
        }
        CountVector(out)
    }
}

impl<const K: usize> Default for CountVector<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const K: usize> Index<usize> for CountVector<K> {
    type Output = u64;

    fn index(&self, slot: usize) -> &u64 {
        &self.0[slot]
    }
}

impl<const K: usize> Add for CountVector<K> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const K: usize> From<[u64; K]> for CountVector<K> {
    fn from(counts: [u64; K]) -> Self {
        CountVector(counts)
    }
}

impl<const K: usize> fmt::Debug for CountVector<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountVector{:?}", self.0)
    }
}
