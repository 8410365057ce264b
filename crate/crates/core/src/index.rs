//! Packed lexicographic indexing of symmetric 2- and 3-tensors.
//!
//! Storage is 0-based: a pair `(i, j)` with `i <= j < n` maps to a slot in
//! `0..s_n` and a triple `(i, j, k)` with `i <= j <= k < n` to a slot in
//! `0..c_n`, both in lexicographic order. These functions are the only
//! place where tuples and packed positions are converted.

use serde::{Deserialize, Serialize};

use crate::dims::{sym2_count, sym3_count};

/// An ordered pair `i <= j`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymIndex2 {
    pub i: usize,
    pub j: usize,
}

/// An ordered triple `i <= j <= k`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymIndex3 {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl SymIndex2 {
    /// Sorts the arguments, so `new(2, 0) == new(0, 2)`.
    pub fn new(a: usize, b: usize) -> Self {
        let (i, j) = if a <= b { (a, b) } else { (b, a) };
        SymIndex2 { i, j }
    }

    pub fn position(self, n: usize) -> usize {
        debug_assert!(self.j < n);
        sym2_count(n) - sym2_count(n - self.i) + (self.j - self.i)
    }

    pub fn from_position(n: usize, pos: usize) -> Self {
        debug_assert!(pos < sym2_count(n));
        let mut i = 0;
        let mut start = 0;
        while start + (n - i) <= pos {
            start += n - i;
            i += 1;
        }
        SymIndex2 { i, j: i + pos - start }
    }
}

impl SymIndex3 {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        SymIndex3 {
            i: v[0],
            j: v[1],
            k: v[2],
        }
    }

    pub fn position(self, n: usize) -> usize {
        debug_assert!(self.k < n);
        let m = n - self.i;
        sym3_count(n) - sym3_count(m) + SymIndex2::new(self.j - self.i, self.k - self.i).position(m)
    }

    pub fn from_position(n: usize, pos: usize) -> Self {
        debug_assert!(pos < sym3_count(n));
        let mut i = 0;
        let mut start = 0;
        while start + sym2_count(n - i) <= pos {
            start += sym2_count(n - i);
            i += 1;
        }
        let p = SymIndex2::from_position(n - i, pos - start);
        SymIndex3 {
            i,
            j: p.i + i,
            k: p.j + i,
        }
    }
}

/// All pairs `i <= j < n` in storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = SymIndex2> {
    (0..n).flat_map(move |i| (i..n).map(move |j| SymIndex2 { i, j }))
}

/// All triples `i <= j <= k < n` in storage order.
pub fn triples(n: usize) -> impl Iterator<Item = SymIndex3> {
    (0..n).flat_map(move |i| (i..n).flat_map(move |j| (j..n).map(move |k| SymIndex3 { i, j, k })))
}
