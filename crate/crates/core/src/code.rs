//! Binary linear block codes and the structural operations on them.
//!
//! Two codes are equal when their row spaces are equal; the generator matrix
//! is just one presentation. Coordinates are 0-indexed.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf2::{for_each_one, BitMatrix, BitVector};

/// Default cap on `k` for exhaustive minimum-distance computation.
pub const DEFAULT_K_LIMIT: usize = 24;

/// An `[n, k]` binary code given by a full-rank `k×n` generator matrix.
#[derive(Clone)]
pub struct LinearCode {
    generator: BitMatrix,
    min_distance: OnceLock<usize>,
    dual_distance: OnceLock<Option<usize>>,
}

impl std::fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearCode")
            .field("n", &self.n())
            .field("k", &self.k())
            .field("d", &self.min_distance.get())
            .finish()
    }
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.same_code(other)
    }
}

impl Eq for LinearCode {}

/// Sorts and validates an index set against length `n`.
pub(crate) fn normalize_index_set(s: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = s.to_vec();
    v.sort_unstable();
    if let Some(&bad) = v.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidIndexSet(format!(
            "index {bad} out of range for length {n}"
        )));
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidIndexSet("repeated index".into()));
    }
    Ok(v)
}

impl LinearCode {
    /// Wraps `generator` verbatim; its rows must be linearly independent.
    pub fn from_generator(generator: BitMatrix) -> Result<Self> {
        let rank = generator.rank();
        if rank < generator.rows() {
            return Err(Error::DependentRows {
                rank,
                rows: generator.rows(),
            });
        }
        Ok(LinearCode {
            generator,
            min_distance: OnceLock::new(),
            dual_distance: OnceLock::new(),
        })
    }

    /// The `[n, 1, n]` repetition code.
    pub fn repetition(n: usize) -> Self {
        let mut g = BitMatrix::zeros(1, n);
        for j in 0..n {
            g.set(0, j, true);
        }
        LinearCode::from_generator(g).expect("a single nonzero row is independent")
    }

    /// The whole space `F_2^n`.
    pub fn full_space(n: usize) -> Self {
        LinearCode::from_generator(BitMatrix::identity(n)).expect("identity has full rank")
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Cached minimum distance, if it has been computed.
    pub fn cached_min_distance(&self) -> Option<usize> {
        self.min_distance.get().copied()
    }

    /// Row-space equality.
    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.n() == other.n()
            && self.k() == other.k()
            && self.generator.same_row_space(&other.generator)
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        x.len() == self.n()
            && self
                .generator
                .transpose()
                .solve(x)
                .map(|s| s.is_some())
                .unwrap_or(false)
    }

    /// Exact minimum distance. Walks all `2^k − 1` nonzero messages in Gray
    /// code order when `k ≤ k_limit`; otherwise, if `n − k ≤ k_limit`, takes
    /// the weight distribution of the dual and applies the MacWilliams
    /// transform. Refuses when both dimensions are too large.
    pub fn min_distance(&self, k_limit: usize) -> Result<usize> {
        if let Some(&d) = self.min_distance.get() {
            return Ok(d);
        }
        let d = if self.k() <= k_limit.min(63) {
            gray_code_min_weight(&self.generator)
        } else {
            let dist = self.weight_distribution(k_limit)?;
            (1..dist.len())
                .find(|&w| dist[w] > 0)
                .expect("a nonzero code has a nonzero word")
        };
        Ok(*self.min_distance.get_or_init(|| d))
    }

    /// Number of codewords of each weight `0..=n`.
    ///
    /// Computed directly when `k ≤ k_limit`, and from the dual through the
    /// MacWilliams identity when `n − k ≤ k_limit`.
    pub fn weight_distribution(&self, k_limit: usize) -> Result<Vec<u128>> {
        let (n, k) = (self.n(), self.k());
        let k_limit = k_limit.min(63);
        if k <= k_limit {
            return Ok(gray_code_weight_distribution(&self.generator));
        }
        let guard = Error::SizeGuard {
            what: "weight distribution",
            count: 1u128.checked_shl(k.min(n - k) as u32).unwrap_or(u128::MAX),
            limit: 1u128 << k_limit,
        };
        if n - k > k_limit {
            return Err(guard);
        }
        let dual_dist = if k == n {
            let mut d = vec![0u128; n + 1];
            d[0] = 1;
            d
        } else {
            gray_code_weight_distribution(self.dual()?.generator())
        };
        macwilliams(&dual_dist, n - k).ok_or(guard)
    }

    /// Minimum distance of the dual code; `None` when `k = n` (the dual is
    /// the zero code and has no nonzero words).
    pub fn dual_distance(&self, k_limit: usize) -> Result<Option<usize>> {
        if let Some(&d) = self.dual_distance.get() {
            return Ok(d);
        }
        let d = if self.k() == self.n() {
            None
        } else {
            Some(self.dual()?.min_distance(k_limit)?)
        };
        Ok(*self.dual_distance.get_or_init(|| d))
    }

    /// The `[n, n−k]` dual code.
    pub fn dual(&self) -> Result<LinearCode> {
        if self.k() == self.n() {
            return Err(Error::TrivialDual { n: self.n() });
        }
        let basis = self.generator.right_kernel_basis();
        LinearCode::from_generator(BitMatrix::from_rows(&basis)?)
    }

    /// Projection onto the coordinates in `s` (taken in increasing order).
    pub fn puncture(&self, s: &[usize]) -> Result<CodeSpace> {
        let s = normalize_index_set(s, self.n())?;
        if s.is_empty() {
            return Err(Error::InvalidIndexSet(
                "puncturing onto an empty set".into(),
            ));
        }
        Ok(CodeSpace::spanned_by(&self.generator.select_columns(&s)))
    }

    /// Codewords supported inside `s`, projected onto `s`. May be the zero code.
    pub fn shorten(&self, s: &[usize]) -> Result<CodeSpace> {
        let s = normalize_index_set(s, self.n())?;
        let complement: Vec<usize> = (0..self.n())
            .filter(|j| s.binary_search(j).is_err())
            .collect();
        if complement.is_empty() {
            return Ok(CodeSpace::Code(self.clone()));
        }
        if s.is_empty() {
            return Ok(CodeSpace::Zero { n: 0 });
        }
        // messages u with u · G[:, S^c] = 0
        let messages = self
            .generator
            .select_columns(&complement)
            .transpose()
            .right_kernel_basis();
        if messages.is_empty() {
            return Ok(CodeSpace::Zero { n: s.len() });
        }
        let rows: Vec<BitVector> = messages
            .iter()
            .map(|u| self.generator.vec_mul(u).map(|x| x.select(&s)))
            .collect::<Result<_>>()?;
        Ok(CodeSpace::Code(LinearCode::from_generator(
            BitMatrix::from_rows(&rows)?,
        )?))
    }

    /// True iff the generator columns in `s` form an invertible `k×k` matrix.
    pub fn is_information_set(&self, s: &[usize]) -> Result<bool> {
        if s.len() != self.k() {
            return Err(Error::InvalidIndexSet(format!(
                "information set must have {} positions, got {}",
                self.k(),
                s.len()
            )));
        }
        let s = normalize_index_set(s, self.n())?;
        Ok(self.generator.select_columns(&s).rank() == self.k())
    }

    /// Lexicographically first information set (the RREF pivot columns).
    pub fn first_information_set(&self) -> Vec<usize> {
        self.generator.echelon().pivots
    }

    /// `u · G`.
    pub fn encode(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.k() {
            return Err(Error::DimensionMismatch {
                op: "encode",
                expected: self.k(),
                actual: u.len(),
            });
        }
        self.generator.vec_mul(u)
    }

    /// The message whose codeword takes the values `vals` on the positions `s`
    /// (in the order given).
    pub fn decode_from_positions(&self, s: &[usize], vals: &BitVector) -> Result<BitVector> {
        if vals.len() != s.len() {
            return Err(Error::DimensionMismatch {
                op: "decode_from_positions",
                expected: s.len(),
                actual: vals.len(),
            });
        }
        if !self.is_information_set(s)? {
            return Err(Error::NotInformationSet);
        }
        // u · G_S = vals  <=>  G_S^T · u^T = vals^T
        let gs = self.generator.select_columns(s);
        gs.transpose().solve(vals)?.ok_or(Error::NotInformationSet)
    }
}

fn gray_code_min_weight(g: &BitMatrix) -> usize {
    let k = g.rows();
    let n = g.cols();
    let rows: Vec<&[u64]> = (0..k).map(|i| g.row_words(i)).collect();
    let mut word = vec![0u64; rows.first().map_or(0, |r| r.len())];
    let mut best = n;
    for i in 1u64..(1u64 << k) {
        let flip = i.trailing_zeros() as usize;
        let mut weight = 0u32;
        for (w, r) in word.iter_mut().zip(rows[flip]) {
            *w ^= r;
            weight += w.count_ones();
        }
        let weight = weight as usize;
        if weight < best {
            best = weight;
            if best <= 1 {
                break;
            }
        }
    }
    best
}

fn gray_code_weight_distribution(g: &BitMatrix) -> Vec<u128> {
    let k = g.rows();
    let rows: Vec<&[u64]> = (0..k).map(|i| g.row_words(i)).collect();
    let mut word = vec![0u64; rows.first().map_or(0, |r| r.len())];
    let mut dist = vec![0u128; g.cols() + 1];
    dist[0] = 1;
    for i in 1u64..(1u64 << k) {
        let flip = i.trailing_zeros() as usize;
        let mut weight = 0u32;
        for (w, r) in word.iter_mut().zip(rows[flip]) {
            *w ^= r;
            weight += w.count_ones();
        }
        dist[weight as usize] += 1;
    }
    dist
}

/// Weight distribution of a code from that of its dual (`2^dual_k` words),
/// `A_w = 2^{−dual_k} Σ_i B_i K_w(i)` with Krawtchouk polynomials `K_w`.
/// `None` if an intermediate value overflows `i128`.
fn macwilliams(dual_dist: &[u128], dual_k: usize) -> Option<Vec<u128>> {
    let n = dual_dist.len() - 1;
    let mut binom = vec![vec![0i128; n + 1]; n + 1];
    for a in 0..=n {
        binom[a][0] = 1;
        for b in 1..=a {
            binom[a][b] = binom[a - 1][b - 1].checked_add(binom[a - 1][b])?;
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=n {
        let mut total = 0i128;
        for (i, &b_i) in dual_dist.iter().enumerate() {
            if b_i == 0 {
                continue;
            }
            let mut kraw = 0i128;
            for j in 0..=w.min(i) {
                if w - j > n - i {
                    continue;
                }
                let term = binom[i][j].checked_mul(binom[n - i][w - j])?;
                kraw = if j % 2 == 0 {
                    kraw.checked_add(term)?
                } else {
                    kraw.checked_sub(term)?
                };
            }
            total = total.checked_add(i128::try_from(b_i).ok()?.checked_mul(kraw)?)?;
        }
        debug_assert!(total >= 0 && total % (1i128 << dual_k) == 0);
        out.push((total >> dual_k) as u128);
    }
    Some(out)
}

/// A subspace of `F_2^n` that may be the zero code.
///
/// Puncturing and shortening can collapse a code to `{0}`, which a
/// [`LinearCode`] (with `k ≥ 1`) cannot represent.
#[derive(Clone, Debug)]
pub enum CodeSpace {
    Zero { n: usize },
    Code(LinearCode),
}

impl CodeSpace {
    /// Row space of an arbitrary (possibly rank-deficient) matrix.
    pub fn spanned_by(m: &BitMatrix) -> CodeSpace {
        match m.row_space_basis() {
            None => CodeSpace::Zero { n: m.cols() },
            Some(b) => {
                CodeSpace::Code(LinearCode::from_generator(b).expect("RREF rows are independent"))
            }
        }
    }

    pub fn n(&self) -> usize {
        match self {
            CodeSpace::Zero { n } => *n,
            CodeSpace::Code(c) => c.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            CodeSpace::Zero { .. } => 0,
            CodeSpace::Code(c) => c.k(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CodeSpace::Zero { .. })
    }

    pub fn as_code(&self) -> Option<&LinearCode> {
        match self {
            CodeSpace::Zero { .. } => None,
            CodeSpace::Code(c) => Some(c),
        }
    }

    pub fn into_code(self) -> Option<LinearCode> {
        match self {
            CodeSpace::Zero { .. } => None,
            CodeSpace::Code(c) => Some(c),
        }
    }

    /// Dual within `F_2^n`; the zero code and the full space swap.
    pub fn dual(&self) -> CodeSpace {
        match self {
            CodeSpace::Zero { n } if *n == 0 => CodeSpace::Zero { n: 0 },
            CodeSpace::Zero { n } => CodeSpace::Code(LinearCode::full_space(*n)),
            CodeSpace::Code(c) if c.k() == c.n() => CodeSpace::Zero { n: c.n() },
            CodeSpace::Code(c) => CodeSpace::Code(c.dual().expect("k < n")),
        }
    }

    pub fn same_space(&self, other: &CodeSpace) -> bool {
        match (self, other) {
            (CodeSpace::Zero { n: a }, CodeSpace::Zero { n: b }) => a == b,
            (CodeSpace::Code(a), CodeSpace::Code(b)) => a.same_code(b),
            _ => false,
        }
    }
}

/// Hamming weight of every codeword, indexed by message (bit `i` = row `i`).
/// Test helper for small `k`.
#[doc(hidden)]
pub fn all_codeword_weights(code: &LinearCode) -> Vec<usize> {
    let k = code.k();
    let mut out = Vec::with_capacity(1 << k);
    for msg in 0u64..(1u64 << k) {
        let mut acc = vec![0u64; code.generator.row_words(0).len()];
        for_each_one(&[msg], |i| {
            for (a, b) in acc.iter_mut().zip(code.generator.row_words(i)) {
                *a ^= b;
            }
        });
        out.push(acc.iter().map(|w| w.count_ones() as usize).sum());
    }
    out
}
