//! Reed–Muller codes by monomial evaluation.
//!
//! Points of `F_2^m` are listed in lexicographic order, so the point at index
//! `j` is the big-endian binary expansion of `j`: variable `X_1` is the most
//! significant coordinate. A square-free monomial is a subset of the
//! variables; it evaluates to 1 at a point exactly when every one of its
//! variables is 1 there. With `X_i` mapped to bit `m − i` of the point index,
//! that test is `j & mask == mask`.

use itertools::Itertools;

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Largest supported number of variables.
pub const MAX_VARIABLES: usize = 20;
/// Refuse generator matrices with more entries than this.
pub const MAX_GENERATOR_BITS: usize = 1 << 28;

/// The `2^m` points of `F_2^m` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointList {
    m: usize,
}

pub fn points(m: usize) -> Result<PointList> {
    if m == 0 || m > MAX_VARIABLES {
        return Err(Error::SizeGuard {
            what: "point list",
            count: 1u128 << m.min(127),
            limit: 1u128 << MAX_VARIABLES,
        });
    }
    Ok(PointList { m })
}

impl PointList {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of point `j`, `X_1` first.
    pub fn point(&self, j: usize) -> Vec<u8> {
        (1..=self.m)
            .map(|i| ((j >> (self.m - i)) & 1) as u8)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        (0..self.len()).map(|j| self.point(j))
    }

    /// Indices of the points of Hamming weight at most `w`, increasing.
    pub fn indices_with_weight_at_most(&self, w: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|j| (j.count_ones() as usize) <= w)
            .collect()
    }
}

/// A square-free monomial in `X_1..X_m`, stored as the set of its variables
/// (1-based, increasing).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    vars: Vec<usize>,
}

impl Monomial {
    pub fn new(vars: &[usize], m: usize) -> Result<Self> {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        if vars.iter().any(|&v| v == 0 || v > m) || vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters(format!(
                "monomial {vars:?} is not a subset of the variables 1..={m}"
            )));
        }
        Ok(Monomial { vars })
    }

    pub fn variables(&self) -> &[usize] {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    fn mask(&self, m: usize) -> usize {
        self.vars.iter().fold(0, |acc, &v| acc | (1 << (m - v)))
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.vars.is_empty() {
            return f.write_str("1");
        }
        for v in &self.vars {
            write!(f, "X{v}")?;
        }
        Ok(())
    }
}

/// Square-free monomials of degree at most `r` in `m` variables, ordered by
/// degree and then lexicographically (`1, X1, X2, X3, X1X2, X1X3, X2X3`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub m: usize,
    pub r: usize,
    pub monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(r: usize, m: usize) -> Self {
        let monomials = (0..=r.min(m))
            .flat_map(|deg| (1..=m).combinations(deg).map(|vars| Monomial { vars }))
            .collect();
        MonomialBasis { m, r, monomials }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim RM(r, m) = Σ_{i ≤ r} C(m, i)`.
pub fn rm_dimension(r: usize, m: usize) -> usize {
    (0..=r.min(m)).map(|i| binomial(m, i)).sum()
}

fn eval_mask(mask: usize, n: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    for j in 0..n {
        if j & mask == mask {
            v.set(j, true);
        }
    }
    v
}

/// Evaluation vector of the monomial `∏_{i ∈ vars} X_i` over `pts`.
pub fn evaluate_monomial(vars: &[usize], pts: &PointList) -> Result<BitVector> {
    let mono = Monomial::new(vars, pts.m)?;
    Ok(eval_mask(mono.mask(pts.m), pts.len()))
}

fn check_rm_params(r: usize, m: usize) -> Result<()> {
    if m == 0 || m > MAX_VARIABLES || r > m {
        return Err(Error::InvalidParameters(format!(
            "Reed-Muller parameters need 0 <= r <= m and 1 <= m <= {MAX_VARIABLES}, got r={r}, m={m}"
        )));
    }
    let bits = rm_dimension(r, m).saturating_mul(1 << m);
    if bits > MAX_GENERATOR_BITS {
        return Err(Error::SizeGuard {
            what: "Reed-Muller generator",
            count: bits as u128,
            limit: MAX_GENERATOR_BITS as u128,
        });
    }
    Ok(())
}

fn evaluation_matrix(monomials: &[Monomial], m: usize) -> BitMatrix {
    let n = 1 << m;
    let rows: Vec<BitVector> = monomials
        .iter()
        .map(|mono| eval_mask(mono.mask(m), n))
        .collect();
    BitMatrix::from_rows(&rows).expect("at least the constant monomial")
}

/// Generator of `RM(r, m)`: one evaluation row per basis monomial.
pub fn rm_generator(r: usize, m: usize) -> Result<BitMatrix> {
    check_rm_params(r, m)?;
    Ok(evaluation_matrix(&MonomialBasis::new(r, m).monomials, m))
}

/// `RM(r, m)` with its monomial basis and point list.
#[derive(Clone, Debug)]
pub struct RmCode {
    pub r: usize,
    pub m: usize,
    pub code: LinearCode,
    pub basis: MonomialBasis,
    pub points: PointList,
}

impl RmCode {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        let g = rm_generator(r, m)?;
        Ok(RmCode {
            r,
            m,
            code: LinearCode::from_generator(g)?,
            basis: MonomialBasis::new(r, m),
            points: points(m)?,
        })
    }

    /// `2^{m−r}`.
    pub fn designed_distance(&self) -> usize {
        1 << (self.m - self.r)
    }

    /// Evaluation of `X_1 X_2 ⋯ X_r`, a codeword of weight `2^{m−r}`.
    pub fn minimum_weight_witness(&self) -> BitVector {
        let vars: Vec<usize> = (1..=self.r).collect();
        evaluate_monomial(&vars, &self.points).expect("valid subset")
    }

    /// The information set of points of Hamming weight at most `r`.
    pub fn low_weight_information_set(&self) -> Vec<usize> {
        self.points.indices_with_weight_at_most(self.r)
    }
}

/// `{(x, x + y) : x ∈ C, y ∈ D}` with generator `[[G_C, G_C], [0, G_D]]`.
pub fn plotkin_sum(c: &LinearCode, d: &LinearCode) -> Result<LinearCode> {
    if c.n() != d.n() {
        return Err(Error::DimensionMismatch {
            op: "plotkin_sum",
            expected: c.n(),
            actual: d.n(),
        });
    }
    let n = c.n();
    let mut g = BitMatrix::zeros(c.k() + d.k(), 2 * n);
    g.place(0, 0, c.generator());
    g.place(0, n, c.generator());
    g.place(c.k(), n, d.generator());
    LinearCode::from_generator(g)
}

fn check_split_params(r: usize, m: usize) -> Result<()> {
    if r == 0 || m < 2 || r > m - 1 {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= r <= m-1, got r={r}, m={m}"
        )));
    }
    check_rm_params(r, m)
}

/// Evaluations of the degree-exactly-`r` monomials in `m − 1` variables at
/// the points of `F_2^{m−1}`: a `C(m−1, r) × 2^{m−1}` matrix.
pub fn degree_block_a(r: usize, m: usize) -> Result<BitMatrix> {
    check_split_params(r, m)?;
    let monomials: Vec<Monomial> = (1..m)
        .combinations(r)
        .map(|vars| Monomial { vars })
        .collect();
    Ok(evaluation_matrix(&monomials, m - 1))
}

/// Indices of the all-zero columns of `a`.
pub fn zero_columns(a: &BitMatrix) -> Vec<usize> {
    (0..a.cols()).filter(|&j| a.column_weight(j) == 0).collect()
}

/// Row counts of the three blocks of the transformed generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowBlocks {
    pub sizes: [usize; 3],
}

/// Row-transformed generator of `RM(r, m)`:
///
/// ```text
/// [ G_{RM(r−1,m−1)}   0               ]
/// [ A                 A               ]
/// [ 0                 G_{RM(r−1,m−1)} ]
/// ```
///
/// The first two blocks restricted to the left half stack to `G_{RM(r,m−1)}`.
pub fn rm_transformed_generator(r: usize, m: usize) -> Result<(BitMatrix, RowBlocks)> {
    check_split_params(r, m)?;
    let low = rm_generator(r - 1, m - 1)?;
    let a = degree_block_a(r, m)?;
    let half = 1 << (m - 1);
    let sizes = [low.rows(), a.rows(), low.rows()];
    let mut g = BitMatrix::zeros(sizes.iter().sum(), 2 * half);
    g.place(0, 0, &low);
    g.place(sizes[0], 0, &a);
    g.place(sizes[0], half, &a);
    g.place(sizes[0] + sizes[1], half, &low);
    Ok((g, RowBlocks { sizes }))
}
