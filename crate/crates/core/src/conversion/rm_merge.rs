//! Merging `RM(r, m−1)` and `RM(r−1, m−1)` into `RM(r, m)`.
//!
//! In the transformed generator of `RM(r, m)` the final codeword is
//! `(c1, w·A + c2)`, where `w` holds the degree-`r` coefficients of the
//! polynomial behind `c1`. So:
//!
//! * every symbol of `c1` stays where it is (the left half);
//! * at zero columns of `A` the right half is just `c2`, so those symbols of
//!   `c2` stay as well;
//! * every other right-half symbol is written as `(w·A)_j + (c2)_j`.
//!
//! `w` is recovered from the values of `c1` on the points of weight `≤ r`,
//! which form an information set. The needed `c2` values are either read
//! directly (when there are at most `k_{I_2}` of them) or decoded from the
//! `k_{I_2}` unchanged positions, whichever touches fewer symbols.
//!
//! The conversion matrix is assembled with generic decoding (linear solves
//! against the generator); [`rm_merge_apply`] runs the same procedure at
//! the symbol level through Möbius inversion, so the two can be checked
//! against each other.

use std::cell::RefCell;
use std::collections::BTreeSet;

use super::{classify_symbols, ConversionMatrix, ConvertibleInstance, CostReport};
use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::reed_muller::{degree_block_a, rm_generator, zero_columns};

/// An instance, its conversion matrix, and the resulting classification.
#[derive(Clone, Debug)]
pub struct MergeConstruction {
    pub instance: ConvertibleInstance,
    pub conversion: ConversionMatrix,
    pub report: CostReport,
}

fn check_params(r: usize, m: usize) -> Result<()> {
    if r == 0 || m < 2 || r > m - 1 {
        return Err(Error::InvalidParameters(format!(
            "the merge construction needs 1 <= r <= m-1, got r={r}, m={m}"
        )));
    }
    Ok(())
}

/// True when the right-half `c2` values are cheaper to read directly than to decode.
fn reads_c2_directly(n2: usize, k2: usize) -> bool {
    n2 - k2 <= k2
}

fn merge_matrix(r: usize, m: usize) -> Result<(BitMatrix, BitMatrix, BitMatrix)> {
    let g1 = rm_generator(r, m - 1)?;
    let g2 = rm_generator(r - 1, m - 1)?;
    let a = degree_block_a(r, m)?;
    let n = g1.cols();
    let (k1, k2) = (g1.rows(), g2.rows());
    debug_assert_eq!(g1, g2.vstack(&a)?);

    let info1: Vec<usize> = (0..n).filter(|j| j.count_ones() as usize <= r).collect();
    let zeros = zero_columns(&a);
    debug_assert_eq!(info1.len(), k1);
    debug_assert_eq!(zeros.len(), k2);
    let g1_info = g1.select_columns(&info1);
    let g2_zero = g2.select_columns(&zeros);
    let direct = reads_c2_directly(n, k2);

    let mut y = BitMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        y.set(j, j, true);
    }
    for j in 0..n {
        if zeros.binary_search(&j).is_ok() {
            y.set(n + j, n + j, true);
            continue;
        }
        // (w·A)_j as a functional of c1 on info1
        let mut e = BitVector::zeros(k1);
        for t in 0..a.rows() {
            if a.get(t, j) {
                e.set(k2 + t, true);
            }
        }
        let coeffs = g1_info
            .solve(&e)?
            .expect("information set columns are invertible");
        for t in coeffs.support() {
            y.set(info1[t], n + j, true);
        }
        if direct {
            y.set(n + j, n + j, true);
        } else {
            let coeffs = g2_zero
                .solve(&g2.column(j))?
                .expect("zero columns of A are an information set");
            for t in coeffs.support() {
                y.set(n + zeros[t], n + j, true);
            }
        }
    }
    Ok((g1, g2, y))
}

/// The explicit two-code merge into `RM(r, m)`.
pub fn rm_merge_procedure(r: usize, m: usize) -> Result<MergeConstruction> {
    check_params(r, m)?;
    let (g1, g2, y) = merge_matrix(r, m)?;
    let n = g1.cols();
    let instance = ConvertibleInstance::new(
        vec![
            LinearCode::from_generator(g1)?,
            LinearCode::from_generator(g2)?,
        ],
        LinearCode::from_generator(rm_generator(r, m)?)?,
    )?;
    let conversion = ConversionMatrix::new(y, vec![n, n])?;
    let report = classify_symbols(&instance, &conversion)?;
    Ok(MergeConstruction {
        instance,
        conversion,
        report,
    })
}

/// Positions (local to each initial codeword) read while computing new symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReadTrace {
    pub code1: BTreeSet<usize>,
    pub code2: BTreeSet<usize>,
}

struct Tracked<'a> {
    values: &'a BitVector,
    touched: RefCell<BTreeSet<usize>>,
}

impl<'a> Tracked<'a> {
    fn new(values: &'a BitVector) -> Self {
        Tracked {
            values,
            touched: RefCell::new(BTreeSet::new()),
        }
    }

    fn read(&self, i: usize) -> bool {
        self.touched.borrow_mut().insert(i);
        self.values.get(i)
    }
}

/// Iterates the submasks of `mask` (including 0 and `mask` itself).
fn submasks(mask: usize) -> impl Iterator<Item = usize> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// Runs the merge symbol by symbol on `c1 ∈ RM(r, m−1)`, `c2 ∈ RM(r−1, m−1)`.
pub fn rm_merge_apply(r: usize, m: usize, c1: &BitVector, c2: &BitVector) -> Result<BitVector> {
    rm_merge_apply_traced(r, m, c1, c2).map(|(out, _)| out)
}

/// As [`rm_merge_apply`], also reporting which input symbols were read.
pub fn rm_merge_apply_traced(
    r: usize,
    m: usize,
    c1: &BitVector,
    c2: &BitVector,
) -> Result<(BitVector, ReadTrace)> {
    check_params(r, m)?;
    let n = 1usize << (m - 1);
    for (index, (c, deg)) in [(c1, r), (c2, r - 1)].into_iter().enumerate() {
        if c.len() != n || !LinearCode::from_generator(rm_generator(deg, m - 1)?)?.contains(c) {
            return Err(Error::NotACodeword { index });
        }
    }
    let k2 = crate::reed_muller::rm_dimension(r - 1, m - 1);
    let direct = reads_c2_directly(n, k2);
    let weight = |x: usize| x.count_ones() as usize;

    let t1 = Tracked::new(c1);
    let t2 = Tracked::new(c2);

    let mut out = BitVector::zeros(2 * n);
    for j in 0..n {
        out.set(j, c1.get(j));
    }

    // Degree-r coefficients of c1: w_S = Σ_{T ⊆ S} c1(T).
    let mut w = vec![false; n];
    for s in (0..n).filter(|&s| weight(s) == r) {
        w[s] = submasks(s).fold(false, |acc, t| acc ^ t1.read(t));
    }
    // Coefficients of c2 up to degree r−1, only needed when decoding.
    let mut c2_coeff = vec![false; n];
    if !direct {
        for t in (0..n).filter(|&t| weight(t) < r) {
            c2_coeff[t] = submasks(t).fold(false, |acc, u| acc ^ t2.read(u));
        }
    }

    for j in 0..n {
        if weight(j) < r {
            // zero column of A: unchanged symbol of c2
            out.set(n + j, c2.get(j));
            continue;
        }
        let wa = submasks(j)
            .filter(|&s| weight(s) == r)
            .fold(false, |acc, s| acc ^ w[s]);
        let c2j = if direct {
            t2.read(j)
        } else {
            submasks(j)
                .filter(|&t| weight(t) < r)
                .fold(false, |acc, t| acc ^ c2_coeff[t])
        };
        out.set(n + j, wa ^ c2j);
    }

    let trace = ReadTrace {
        code1: t1.touched.into_inner(),
        code2: t2.touched.into_inner(),
    };
    Ok((out, trace))
}

/// Repeated merge: the highest-order initial code is split again at each
/// stage, giving `λ = depth + 1` initial codes
/// `RM(r, m−depth), RM(r−1, m−depth), RM(r−1, m−depth+1), …, RM(r−1, m−1)`.
/// The composite conversion matrix is the product of the per-stage matrices,
/// each lifted by an identity on the codes it leaves alone.
pub fn rm_merge_chain(r: usize, m: usize, depth: usize) -> Result<MergeConstruction> {
    if depth == 0 || r == 0 || m <= depth || r > m - depth {
        return Err(Error::InvalidParameters(format!(
            "merge chain needs depth >= 1 and 1 <= r <= m-depth, got r={r}, m={m}, depth={depth}"
        )));
    }
    let first = rm_merge_procedure(r, m)?;
    let mut codes: Vec<LinearCode> = first.instance.initial_codes().to_vec();
    let final_code = first.instance.final_code().clone();
    let mut y = first.conversion.y;
    for stage in 2..=depth {
        let mm = m - stage + 1;
        let (g1, g2, ys) = merge_matrix(r, mm)?;
        let rest: usize = codes[1..].iter().map(LinearCode::n).sum();
        let lifted = BitMatrix::block_diagonal(&[&ys, &BitMatrix::identity(rest)])?;
        y = lifted.mul(&y)?;
        let mut next = vec![
            LinearCode::from_generator(g1)?,
            LinearCode::from_generator(g2)?,
        ];
        next.extend(codes.drain(1..));
        codes = next;
    }
    let instance = ConvertibleInstance::new(codes, final_code)?;
    let conversion = ConversionMatrix::new(y, instance.initial_lengths())?;
    let report = classify_symbols(&instance, &conversion)?;
    Ok(MergeConstruction {
        instance,
        conversion,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conversion::{apply_conversion, verify_conversion};
    use crate::reed_muller::rm_dimension;

    #[test]
    fn small_merge_matches_hand_computation() {
        let mc = rm_merge_procedure(1, 2).unwrap();
        assert_eq!(mc.report.unchanged_counts(), vec![2, 1]);
        assert_eq!(mc.report.write_cost(), 1);
        assert_eq!(mc.report.read_counts(), vec![2, 1]);
        assert_eq!(mc.report.access_cost(), 4);

        let c1: BitVector = "10".parse().unwrap();
        let c2: BitVector = "11".parse().unwrap();
        let out =
            apply_conversion(&mc.instance, &mc.conversion, &[c1.clone(), c2.clone()]).unwrap();
        assert_eq!(out.to_string(), "1010");
        assert_eq!(rm_merge_apply(1, 2, &c1, &c2).unwrap().to_string(), "1010");
    }

    #[test]
    fn r2_m4_costs() {
        let mc = rm_merge_procedure(2, 4).unwrap();
        assert_eq!(mc.report.unchanged_counts(), vec![8, 4]);
        assert_eq!(mc.report.write_cost(), 4);
        assert_eq!(mc.report.read_counts(), vec![7, 4]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(rm_merge_procedure(0, 3).is_err());
        assert!(rm_merge_procedure(3, 3).is_err());
        let z = BitVector::zeros(2);
        assert!(rm_merge_apply(2, 2, &z, &z).is_err());
        let c1: BitVector = "10".parse().unwrap();
        let not_in_rep: BitVector = "10".parse().unwrap();
        assert!(matches!(
            rm_merge_apply(1, 2, &c1, &not_in_rep),
            Err(Error::NotACodeword { index: 1 })
        ));
    }

    #[test]
    fn zero_inputs() {
        for (r, m) in [(1, 2), (2, 4), (1, 4)] {
            let n = 1 << (m - 1);
            let out = rm_merge_apply(r, m, &BitVector::zeros(n), &BitVector::zeros(n)).unwrap();
            assert!(out.is_zero());
        }
    }

    #[test]
    fn decoded_c2_branch_reads_only_unchanged_positions() {
        // r = 1, m = 5: k2 = 1 < n2 − k2 = 15, so c2 is decoded from its one unchanged symbol
        let mc = rm_merge_procedure(1, 5).unwrap();
        assert_eq!(mc.report.read_counts()[1], 1);
        let c2 = BitVector::from_bits(&[1; 16]);
        let c1 = BitVector::zeros(16);
        let (out, trace) = rm_merge_apply_traced(1, 5, &c1, &c2).unwrap();
        assert_eq!(trace.code2.iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(out.slice(16, 16), c2);
    }

    #[test]
    fn chain_depth_one_is_the_single_merge() {
        let a = rm_merge_chain(2, 4, 1).unwrap();
        let b = rm_merge_procedure(2, 4).unwrap();
        assert_eq!(a.conversion, b.conversion);
        assert_eq!(a.report, b.report);
    }

    #[test]
    fn chain_depth_two() {
        let mc = rm_merge_chain(2, 4, 2).unwrap();
        let ks = mc.instance.initial_dimensions();
        assert_eq!(
            ks,
            vec![rm_dimension(2, 2), rm_dimension(1, 2), rm_dimension(1, 3)]
        );
        assert_eq!(mc.instance.initial_lengths(), vec![4, 4, 8]);
        assert!(verify_conversion(&mc.instance, &mc.conversion).unwrap());
        assert!(rm_merge_chain(2, 4, 0).is_err());
        assert!(rm_merge_chain(2, 4, 3).is_err());
    }
}
