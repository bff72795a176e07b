//! Enumeration of GL(k, 2).
//!
//! Matrices are produced in lexicographic order of their row-major bit
//! strings by a depth-first search that only ever extends a prefix of
//! linearly independent rows, so no candidate is ever rejected after the
//! fact. Rows are handled internally as `k`-bit masks with column 0 in the
//! most significant position, which makes numeric order on a row equal to
//! lexicographic order on its bit string.

use super::BitMatrix;
use crate::error::{Error, Result};

/// Largest `k` the enumerator accepts; beyond this the span tables alone get silly.
pub const MAX_INVERTIBLE_DIM: usize = 16;

/// `|GL(k,2)| = ∏_{i<k} (2^k − 2^i)`, or `None` on overflow.
pub fn gl_count(k: usize) -> Option<u128> {
    if k >= 64 {
        return None;
    }
    let full = 1u128 << k;
    (0..k).try_fold(1u128, |acc, i| acc.checked_mul(full - (1u128 << i)))
}

/// Every invertible `k×k` matrix over GF(2), each exactly once, in lexicographic
/// row-major order. Refuses up front when the count exceeds `limit`.
pub fn enumerate_invertible(k: usize, limit: u128) -> Result<InvertibleMatrices> {
    InvertibleRows::new(k, limit).map(|rows| InvertibleMatrices { rows })
}

/// Iterator returned by [`enumerate_invertible`].
pub struct InvertibleMatrices {
    rows: InvertibleRows,
}

impl Iterator for InvertibleMatrices {
    type Item = BitMatrix;

    fn next(&mut self) -> Option<BitMatrix> {
        let k = self.rows.k;
        self.rows.next().map(|masks| mask_rows_to_matrix(k, &masks))
    }
}

pub(crate) fn mask_rows_to_matrix(k: usize, masks: &[u32]) -> BitMatrix {
    let mut m = BitMatrix::zeros(masks.len(), k);
    for (i, &row) in masks.iter().enumerate() {
        for j in 0..k {
            if (row >> (k - 1 - j)) & 1 == 1 {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// The same enumeration as bare row masks (column 0 = most significant bit).
pub(crate) struct InvertibleRows {
    k: usize,
    rows: Vec<u32>,
    // spans[l][v] is true iff v lies in the span of rows[..l]
    spans: Vec<Vec<bool>>,
    started: bool,
    done: bool,
}

impl InvertibleRows {
    pub(crate) fn new(k: usize, limit: u128) -> Result<Self> {
        if k == 0 || k > MAX_INVERTIBLE_DIM {
            return Err(Error::InvalidParameters(format!(
                "invertible matrix size must be in 1..={MAX_INVERTIBLE_DIM}, got {k}"
            )));
        }
        let count = gl_count(k).unwrap_or(u128::MAX);
        if count > limit {
            return Err(Error::SizeGuard {
                what: "GL(k,2) enumeration",
                count,
                limit,
            });
        }
        let size = 1usize << k;
        let mut spans = vec![vec![false; size]; k + 1];
        spans[0][0] = true;
        Ok(InvertibleRows {
            k,
            rows: vec![0; k],
            spans,
            started: false,
            done: false,
        })
    }

    fn extend_span(&mut self, level: usize) {
        let v = self.rows[level] as usize;
        let (lo, hi) = self.spans.split_at_mut(level + 1);
        let prev = &lo[level];
        let next = &mut hi[0];
        next.copy_from_slice(prev);
        for (x, &inside) in prev.iter().enumerate() {
            if inside {
                next[x ^ v] = true;
            }
        }
    }

    /// Smallest candidate `>= from` for row `level` that is outside the current span.
    fn next_candidate(&self, level: usize, from: usize) -> Option<u32> {
        let span = &self.spans[level];
        (from..span.len()).find(|&v| !span[v]).map(|v| v as u32)
    }

    fn fill_from(&mut self, level: usize) {
        for l in level..self.k {
            let v = self
                .next_candidate(l, 0)
                .expect("a proper subspace never covers the whole space");
            self.rows[l] = v;
            self.extend_span(l);
        }
    }
}

impl Iterator for InvertibleRows {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            return Some(self.rows.clone());
        }
        let mut level = self.k;
        while level > 0 {
            level -= 1;
            if let Some(v) = self.next_candidate(level, self.rows[level] as usize + 1) {
                self.rows[level] = v;
                self.extend_span(level);
                self.fill_from(level + 1);
                return Some(self.rows.clone());
            }
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(gl_count(1), Some(1));
        assert_eq!(gl_count(2), Some(6));
        assert_eq!(gl_count(4), Some(20160));
    }

    #[test]
    fn k1_is_single_identity() {
        let all: Vec<_> = enumerate_invertible(1, u128::MAX).unwrap().collect();
        assert_eq!(all, vec![BitMatrix::identity(1)]);
    }

    #[test]
    fn exhaustive_against_brute_force_up_to_4() {
        for k in 1..=4usize {
            let listed: Vec<BitMatrix> = enumerate_invertible(k, u128::MAX).unwrap().collect();
            assert_eq!(listed.len() as u128, gl_count(k).unwrap());
            // brute force: every k×k bit pattern with full rank, in numeric
            // order of the row-major bit string (entry (0,0) most significant)
            let mut brute = Vec::new();
            for code in 0u64..(1u64 << (k * k)) {
                let mut m = BitMatrix::zeros(k, k);
                for pos in 0..k * k {
                    if (code >> (k * k - 1 - pos)) & 1 == 1 {
                        m.set(pos / k, pos % k, true);
                    }
                }
                if m.rank() == k {
                    brute.push(m);
                }
            }
            assert_eq!(listed, brute, "k = {k}");
            let distinct: HashSet<_> = listed.iter().collect();
            assert_eq!(distinct.len(), listed.len());
        }
    }

    #[test]
    fn size_guard_refuses() {
        match enumerate_invertible(4, 1000) {
            Err(Error::SizeGuard { count, .. }) => assert_eq!(count, 20160),
            other => panic!("expected size guard, got {:?}", other.map(|_| ())),
        }
        assert!(enumerate_invertible(0, u128::MAX).is_err());
    }
}
