//! Dense indexing of per-(InP, BS, subcarrier, user) quantities.
//!
//! Channels, beams and scheduling indicators are all keyed by the tuple
//! `(i, b, n, k)`. They are stored as flat vectors with the layout
//! `(((i * B + b) * N + n) * K + k)`; antenna elements of a channel or beam
//! vector are contiguous at the end (`... * M_T + m`).

use alloc::vec::Vec;

/// Dimensions of the entry grid plus iteration helpers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryIndex {
    /// Number of InPs `I`.
    pub inps: usize,
    /// BSs per InP `B` (uniform; index 0 is the macro BS).
    pub bs_per_inp: usize,
    /// Subcarriers per InP `N`.
    pub subcarriers: usize,
    /// Users `K` (global across InPs).
    pub users: usize,
    /// Transmit antennas `M_T`.
    pub antennas: usize,
}

impl EntryIndex {
    /// Number of scalar entries `(i, b, n, k)`.
    #[inline]
    pub fn entries(&self) -> usize {
        self.inps * self.bs_per_inp * self.subcarriers * self.users
    }

    /// Number of complex coefficients of all channel/beam vectors.
    #[inline]
    pub fn coeffs(&self) -> usize {
        self.entries() * self.antennas
    }

    #[inline]
    pub fn of(&self, i: usize, b: usize, n: usize, k: usize) -> usize {
        debug_assert!(
            i < self.inps && b < self.bs_per_inp && n < self.subcarriers && k < self.users
        );
        ((i * self.bs_per_inp + b) * self.subcarriers + n) * self.users + k
    }

    /// Start of the antenna block of entry `(i, b, n, k)`.
    #[inline]
    pub fn vec_of(&self, i: usize, b: usize, n: usize, k: usize) -> usize {
        self.of(i, b, n, k) * self.antennas
    }

    /// Decompose a flat entry index back into `(i, b, n, k)`.
    #[inline]
    pub fn split(&self, e: usize) -> (usize, usize, usize, usize) {
        let k = e % self.users;
        let r = e / self.users;
        let n = r % self.subcarriers;
        let r = r / self.subcarriers;
        let b = r % self.bs_per_inp;
        let i = r / self.bs_per_inp;
        (i, b, n, k)
    }

    /// Iterate all `(i, b, n, k)` tuples in flat order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let s = *self;
        (0..s.entries()).map(move |e| s.split(e))
    }

    /// Flat index over `(i, b)` pairs.
    #[inline]
    pub fn bs_of(&self, i: usize, b: usize) -> usize {
        i * self.bs_per_inp + b
    }

    /// Flat index over `(i, b, n)` triples.
    #[inline]
    pub fn cell_of(&self, i: usize, b: usize, n: usize) -> usize {
        (i * self.bs_per_inp + b) * self.subcarriers + n
    }

    /// Flat index over `(i, n, k)` triples (viewpoint-uniqueness keys).
    #[inline]
    pub fn user_sub_of(&self, i: usize, n: usize, k: usize) -> usize {
        (i * self.subcarriers + n) * self.users + k
    }

    /// Flat index over `(i, n)` pairs (SIC-ordering keys).
    #[inline]
    pub fn sub_of(&self, i: usize, n: usize) -> usize {
        i * self.subcarriers + n
    }

    pub fn zeros(&self) -> Vec<f64> {
        alloc::vec![0.0; self.entries()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_split() {
        let idx = EntryIndex {
            inps: 2,
            bs_per_inp: 3,
            subcarriers: 4,
            users: 5,
            antennas: 2,
        };
        for (e, (i, b, n, k)) in idx.iter().enumerate() {
            assert_eq!(idx.of(i, b, n, k), e);
        }
        assert_eq!(idx.entries(), 120);
        assert_eq!(idx.coeffs(), 240);
    }
}
