use std::cmp::Ordering;
use std::fmt;

use super::vector::{for_each_one, words_for, BitVector, WORD_BITS};
use crate::error::{Error, Result};

/// Dense matrix over GF(2) with bit-packed rows.
///
/// Row `i` occupies `data[i * stride .. (i + 1) * stride]`; column `j` of a row
/// is bit `j % 64` of word `j / 64`. Padding bits are kept at zero so rows can
/// be compared and hashed word-wise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl BitMatrix {
    /// All-zero matrix.
    ///
    /// # Panics
    ///
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidParameters("matrix needs at least one row".into()))?;
        let cols = first.len();
        if cols == 0 {
            return Err(Error::InvalidParameters(
                "matrix needs at least one column".into(),
            ));
        }
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "from_rows",
                    expected: cols,
                    actual: r.len(),
                });
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Builds a matrix from nested 0/1 literals. Panics on ragged input;
    /// meant for tests and small fixed tables.
    pub fn from_bits(rows: &[&[u8]]) -> Self {
        let vs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bits(r)).collect();
        BitMatrix::from_rows(&vs).expect("well-formed literal matrix")
    }

    pub fn from_columns(columns: &[BitVector]) -> Result<Self> {
        Ok(BitMatrix::from_rows(columns)?.transpose())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, w) in b.iter_mut().zip(a) {
            *d ^= w;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for_each_one(self.row_words(i), |j| t.set(j, i, true));
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "mat_mul",
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u64; rhs.stride];
            for_each_one(self.row_words(i), |k| {
                for (a, b) in acc.iter_mut().zip(rhs.row_words(k)) {
                    *a ^= b;
                }
            });
            out.row_words_mut(i).copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                expected: self.cols,
                actual: x.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>();
            if parity & 1 == 1 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `u · self` for a row vector `u`: the XOR of the rows selected by `u`.
    pub fn vec_mul(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch {
                op: "vec_mul",
                expected: self.rows,
                actual: u.len(),
            });
        }
        let mut acc = vec![0u64; self.stride];
        for_each_one(u.words(), |i| {
            for (a, b) in acc.iter_mut().zip(self.row_words(i)) {
                *a ^= b;
            }
        });
        Ok(BitVector::from_words(self.cols, acc))
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows {
                break;
            }
            let (w, bit) = (col / WORD_BITS, 1u64 << (col % WORD_BITS));
            let Some(p) = (next..self.rows).find(|&i| m.data[i * m.stride + w] & bit != 0) else {
                continue;
            };
            m.swap_rows(p, next);
            for i in 0..self.rows {
                if i != next && m.data[i * m.stride + w] & bit != 0 {
                    m.xor_row_into(next, i);
                }
            }
            pivots.push(col);
            next += 1;
        }
        Echelon { matrix: m, pivots }
    }

    /// Reduced row echelon form and the (strictly increasing) pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let e = self.echelon();
        (e.matrix, e.pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Canonical basis of the row space: the nonzero rows of the RREF.
    /// `None` when the matrix is zero.
    pub fn row_space_basis(&self) -> Option<BitMatrix> {
        let e = self.echelon();
        if e.rank() == 0 {
            return None;
        }
        Some(e.matrix.select_rows(&(0..e.rank()).collect::<Vec<_>>()))
    }

    /// True when both matrices have the same number of columns and the same row space.
    pub fn same_row_space(&self, other: &BitMatrix) -> bool {
        self.cols == other.cols && self.row_space_basis() == other.row_space_basis()
    }

    /// Some `x` with `self · x = b`, free variables set to zero; `None` if inconsistent.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                op: "solve",
                expected: self.rows,
                actual: b.len(),
            });
        }
        let aug = self.hstack(&BitMatrix::from_columns(std::slice::from_ref(b))?)?;
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVector::zeros(self.cols);
        for (r, &p) in e.pivots.iter().enumerate() {
            if e.matrix.get(r, self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of `{x : self · x = 0}`, one vector per non-pivot column.
    pub fn right_kernel_basis(&self) -> Vec<BitVector> {
        let e = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVector::unit(self.cols, f);
                for (r, &p) in e.pivots.iter().enumerate() {
                    if e.matrix.get(r, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Columns `indices` of `self`, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, indices.len());
        for i in 0..self.rows {
            for (t, &j) in indices.iter().enumerate() {
                if self.get(i, j) {
                    out.set(i, t, true);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(indices.len(), self.cols);
        for (t, &i) in indices.iter().enumerate() {
            out.row_words_mut(t).copy_from_slice(self.row_words(i));
        }
        out
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                expected: self.rows,
                actual: rhs.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for_each_one(self.row_words(i), |j| out.set(i, j, true));
            for_each_one(rhs.row_words(i), |j| out.set(i, self.cols + j, true));
        }
        Ok(out)
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                op: "vstack",
                expected: self.cols,
                actual: rhs.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.rows + rhs.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&rhs.data);
        Ok(out)
    }

    /// Block-diagonal matrix with the given blocks along the diagonal.
    pub fn block_diagonal(blocks: &[&BitMatrix]) -> Result<BitMatrix> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameters(
                "block_diagonal needs at least one block".into(),
            ));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for_each_one(b.row_words(i), |j| out.set(r0 + i, c0 + j, true));
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn place(&mut self, row: usize, col: usize, block: &BitMatrix) {
        assert!(
            row + block.rows <= self.rows && col + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            for_each_one(block.row_words(i), |j| self.set(row + i, col + j, true));
        }
    }

    pub fn column_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    /// Row indices where column `j` is nonzero.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    /// Lexicographic order on the row-major bit strings (entry (0,0) most significant).
    pub fn lex_cmp(&self, other: &BitMatrix) -> Ordering {
        (self.rows, self.cols)
            .cmp(&(other.rows, other.cols))
            .then_with(|| {
                for (a, b) in self.data.iter().zip(&other.data) {
                    let diff = a ^ b;
                    if diff != 0 {
                        // Lowest differing bit is the earliest column.
                        let bit = diff & diff.wrapping_neg();
                        return if a & bit != 0 {
                            Ordering::Greater
                        } else {
                            Ordering::Less
                        };
                    }
                }
                Ordering::Equal
            })
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{self}")
    }
}
