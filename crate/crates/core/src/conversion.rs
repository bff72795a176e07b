//! Linear conversion between codes in the merge regime.
//!
//! A conversion is described by a matrix `Y` with one row per coordinate of
//! the stacked initial codewords and one column per final coordinate: the
//! final codeword is `(x_1 | x_2 | … | x_λ) · Y`. A column of weight one copies
//! an initial symbol verbatim (an *unchanged* symbol); any other column is a
//! *new* symbol that must be written, and the rows in its support are *read*.

mod rm_merge;

pub use rm_merge::{
    rm_merge_apply, rm_merge_apply_traced, rm_merge_chain, rm_merge_procedure, MergeConstruction,
    ReadTrace,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// λ initial codes merged into one final code, with `Σ k_{I_i} = k_F`.
#[derive(Clone, Debug)]
pub struct ConvertibleInstance {
    initial: Vec<LinearCode>,
    final_code: LinearCode,
    offsets: Vec<usize>,
}

impl ConvertibleInstance {
    pub fn new(initial: Vec<LinearCode>, final_code: LinearCode) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::InvalidParameters(
                "need at least one initial code".into(),
            ));
        }
        let sum: usize = initial.iter().map(LinearCode::k).sum();
        if sum != final_code.k() {
            return Err(Error::MergeDimension {
                sum,
                k_final: final_code.k(),
            });
        }
        let mut offsets = vec![0];
        for c in &initial {
            offsets.push(offsets.last().unwrap() + c.n());
        }
        Ok(ConvertibleInstance {
            initial,
            final_code,
            offsets,
        })
    }

    pub fn lambda(&self) -> usize {
        self.initial.len()
    }

    pub fn initial_codes(&self) -> &[LinearCode] {
        &self.initial
    }

    pub fn final_code(&self) -> &LinearCode {
        &self.final_code
    }

    pub fn initial_lengths(&self) -> Vec<usize> {
        self.initial.iter().map(LinearCode::n).collect()
    }

    pub fn initial_dimensions(&self) -> Vec<usize> {
        self.initial.iter().map(LinearCode::k).collect()
    }

    /// `Σ n_{I_i}`, the number of rows of a conversion matrix.
    pub fn stacked_length(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Start of block `i` in the stacked coordinate space.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// `(code index, local coordinate)` of a stacked coordinate.
    pub fn owner(&self, global: usize) -> (usize, usize) {
        let i = self.offsets.partition_point(|&o| o <= global) - 1;
        (i, global - self.offsets[i])
    }

    /// Block-diagonal `G_I`.
    pub fn stacked_generator(&self) -> BitMatrix {
        let blocks: Vec<&BitMatrix> = self.initial.iter().map(LinearCode::generator).collect();
        BitMatrix::block_diagonal(&blocks).expect("at least one block")
    }
}

/// A candidate conversion matrix together with the initial block lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConversionMatrix {
    pub y: BitMatrix,
    pub blocks: Vec<usize>,
}

impl ConversionMatrix {
    pub fn new(y: BitMatrix, blocks: Vec<usize>) -> Result<Self> {
        let total: usize = blocks.iter().sum();
        if total != y.rows() {
            return Err(Error::DimensionMismatch {
                op: "conversion matrix blocks",
                expected: y.rows(),
                actual: total,
            });
        }
        Ok(ConversionMatrix { y, blocks })
    }

    fn check_shape(&self, inst: &ConvertibleInstance) -> Result<()> {
        if self.blocks != inst.initial_lengths() {
            return Err(Error::InvalidParameters(format!(
                "conversion blocks {:?} do not match initial lengths {:?}",
                self.blocks,
                inst.initial_lengths()
            )));
        }
        if self.y.rows() != inst.stacked_length() {
            return Err(Error::DimensionMismatch {
                op: "conversion matrix rows",
                expected: inst.stacked_length(),
                actual: self.y.rows(),
            });
        }
        if self.y.cols() != inst.final_code().n() {
            return Err(Error::DimensionMismatch {
                op: "conversion matrix columns",
                expected: inst.final_code().n(),
                actual: self.y.cols(),
            });
        }
        Ok(())
    }
}

/// True iff `G_I · Y` has rank `k_F` and spans the final code.
///
/// This is a row-space check: `G_I · Y` only has to equal *some* generator of
/// the final code, not the particular one stored in the instance.
pub fn verify_conversion(inst: &ConvertibleInstance, y: &ConversionMatrix) -> Result<bool> {
    y.check_shape(inst)?;
    let product = inst.stacked_generator().mul(&y.y)?;
    let basis = product.row_space_basis();
    Ok(match basis {
        Some(b) => {
            b.rows() == inst.final_code().k()
                && Some(b) == inst.final_code().generator().row_space_basis()
        }
        None => false,
    })
}

/// Symbol classification and access cost of a conversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    /// Per initial code: final coordinates that copy one of its symbols. Only
    /// the first copy of a symbol counts; later copies are new symbols.
    pub unchanged: Vec<Vec<usize>>,
    /// Final coordinates that must be written.
    pub new_symbols: Vec<usize>,
    /// Per initial code: its coordinates (local indices) read to compute new symbols.
    pub read: Vec<Vec<usize>>,
    n_final: usize,
}

impl CostReport {
    pub fn lambda(&self) -> usize {
        self.unchanged.len()
    }

    pub fn n_final(&self) -> usize {
        self.n_final
    }

    pub fn unchanged_counts(&self) -> Vec<usize> {
        self.unchanged.iter().map(Vec::len).collect()
    }

    pub fn unchanged_total(&self) -> usize {
        self.unchanged.iter().map(Vec::len).sum()
    }

    pub fn read_counts(&self) -> Vec<usize> {
        self.read.iter().map(Vec::len).collect()
    }

    pub fn write_cost(&self) -> usize {
        self.new_symbols.len()
    }

    pub fn read_cost(&self) -> usize {
        self.read.iter().map(Vec::len).sum()
    }

    pub fn access_cost(&self) -> usize {
        self.read_cost() + self.write_cost()
    }

    pub fn summary(&self) -> CostSummary {
        CostSummary {
            unchanged: self.unchanged_counts(),
            written: self.write_cost(),
            read: self.read_counts(),
            access: self.access_cost(),
        }
    }
}

/// Flat `key=value` record, one field per line, codes numbered from 1.
impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, u) in self.unchanged.iter().enumerate() {
            writeln!(f, "U{}={}", i + 1, u.len())?;
        }
        writeln!(f, "W={}", self.write_cost())?;
        for (i, r) in self.read.iter().enumerate() {
            writeln!(f, "R{}={}", i + 1, r.len())?;
        }
        writeln!(f, "read_cost={}", self.read_cost())?;
        writeln!(f, "write_cost={}", self.write_cost())?;
        write!(f, "access_cost={}", self.access_cost())
    }
}

/// Set sizes of a [`CostReport`]; this is what gets serialized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostSummary {
    #[serde(rename = "U")]
    pub unchanged: Vec<usize>,
    #[serde(rename = "W")]
    pub written: usize,
    #[serde(rename = "R")]
    pub read: Vec<usize>,
    pub access: usize,
}

/// Classifies every final coordinate of `Y`, column by column. Fails if `Y`
/// is not a valid conversion for `inst`.
pub fn classify_symbols(inst: &ConvertibleInstance, y: &ConversionMatrix) -> Result<CostReport> {
    if !verify_conversion(inst, y)? {
        return Err(Error::NotAConversion);
    }
    Ok(classify_unchecked(inst, &y.y))
}

pub(crate) fn classify_unchecked(inst: &ConvertibleInstance, y: &BitMatrix) -> CostReport {
    let lambda = inst.lambda();
    let mut unchanged = vec![Vec::new(); lambda];
    let mut new_symbols = Vec::new();
    let mut read_flags: Vec<Vec<bool>> = inst
        .initial_lengths()
        .into_iter()
        .map(|n| vec![false; n])
        .collect();
    // an initial symbol stays in place at most once; further copies are written
    let mut kept = vec![false; y.rows()];
    for j in 0..y.cols() {
        let support = y.column_support(j);
        if support.len() == 1 && !kept[support[0]] {
            kept[support[0]] = true;
            unchanged[inst.owner(support[0]).0].push(j);
        } else {
            new_symbols.push(j);
            for s in support {
                let (i, local) = inst.owner(s);
                read_flags[i][local] = true;
            }
        }
    }
    let read = read_flags
        .into_iter()
        .map(|flags| {
            flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(t, _)| t)
                .collect()
        })
        .collect();
    CostReport {
        unchanged,
        new_symbols,
        read,
        n_final: y.cols(),
    }
}

/// The decode-and-re-encode procedure: read an information set of every
/// initial code, copy those `k_F` symbols onto an information set of the
/// final code, and recompute the remaining `n_F − k_F` symbols from them.
/// Information sets are the lexicographically first ones.
pub fn default_conversion(inst: &ConvertibleInstance) -> ConversionMatrix {
    let fin = inst.final_code();
    // stacked positions of the symbols that are read and kept
    let kept: Vec<usize> = inst
        .initial_codes()
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            let off = inst.offset(i);
            c.first_information_set().into_iter().map(move |p| off + p)
        })
        .collect();
    let info_f = fin.first_information_set();
    // G_F in systematic form on info_f: S^{-1} · G_F with S = G_F[:, info_f]
    let s = fin.generator().select_columns(&info_f);
    let columns: Vec<BitVector> = (0..fin.n())
        .map(|j| {
            s.solve(&fin.generator().column(j))
                .expect("shapes agree")
                .expect("information set columns span the column space")
        })
        .collect();
    let mut y = BitMatrix::zeros(inst.stacked_length(), fin.n());
    for (j, coeffs) in columns.iter().enumerate() {
        for t in coeffs.support() {
            y.set(kept[t], j, true);
        }
    }
    ConversionMatrix {
        y,
        blocks: inst.initial_lengths(),
    }
}

/// `(x_1 | … | x_λ) · Y` after checking that each `x_i` lies in its code.
pub fn apply_conversion(
    inst: &ConvertibleInstance,
    y: &ConversionMatrix,
    codewords: &[BitVector],
) -> Result<BitVector> {
    y.check_shape(inst)?;
    if codewords.len() != inst.lambda() {
        return Err(Error::DimensionMismatch {
            op: "apply_conversion inputs",
            expected: inst.lambda(),
            actual: codewords.len(),
        });
    }
    for (i, (x, c)) in codewords.iter().zip(inst.initial_codes()).enumerate() {
        if !c.contains(x) {
            return Err(Error::NotACodeword { index: i });
        }
    }
    apply_matrix(&y.y, codewords)
}

/// `(x_1 | … | x_λ) · Y` without membership checks.
pub fn apply_matrix(y: &BitMatrix, codewords: &[BitVector]) -> Result<BitVector> {
    let stacked = codewords.iter().skip(1).fold(
        codewords
            .first()
            .cloned()
            .unwrap_or_else(|| BitVector::zeros(0)),
        |acc, x| acc.concat(x),
    );
    y.vec_mul(&stacked)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_instance() -> ConvertibleInstance {
        let c1 =
            LinearCode::from_generator(BitMatrix::from_bits(&[&[1, 0, 1], &[0, 1, 1]])).unwrap();
        let c2 =
            LinearCode::from_generator(BitMatrix::from_bits(&[&[1, 1, 0], &[0, 1, 1]])).unwrap();
        let f = LinearCode::from_generator(BitMatrix::from_bits(&[
            &[1, 0, 0, 0, 1],
            &[0, 1, 0, 0, 1],
            &[0, 0, 1, 0, 1],
            &[0, 0, 0, 1, 1],
        ]))
        .unwrap();
        ConvertibleInstance::new(vec![c1, c2], f).unwrap()
    }

    /// σ(x) = (x1, x2, x4, x5, x3 + x6), 1-based.
    pub(crate) fn example_y() -> ConversionMatrix {
        let cols = [vec![0], vec![1], vec![3], vec![4], vec![2, 5]];
        let mut y = BitMatrix::zeros(6, 5);
        for (j, rows) in cols.iter().enumerate() {
            for &r in rows {
                y.set(r, j, true);
            }
        }
        ConversionMatrix::new(y, vec![3, 3]).unwrap()
    }

    #[test]
    fn instance_validation() {
        let inst = example_instance();
        assert_eq!(inst.lambda(), 2);
        assert_eq!(inst.stacked_length(), 6);
        assert_eq!(inst.owner(4), (1, 1));
        let c =
            LinearCode::from_generator(BitMatrix::from_bits(&[&[1, 0, 1], &[0, 1, 1]])).unwrap();
        let f = LinearCode::from_generator(BitMatrix::from_bits(&[
            &[1, 0, 0, 0, 1],
            &[0, 1, 0, 0, 1],
            &[0, 0, 1, 0, 1],
        ]))
        .unwrap();
        assert!(matches!(
            ConvertibleInstance::new(vec![c], f),
            Err(Error::MergeDimension { sum: 2, k_final: 3 })
        ));
    }

    #[test]
    fn example_conversion_verifies_and_costs_three() {
        let inst = example_instance();
        let y = example_y();
        assert!(verify_conversion(&inst, &y).unwrap());
        // literal G_I·Y differs from G_F; only the row spaces agree
        assert_ne!(
            &inst.stacked_generator().mul(&y.y).unwrap(),
            inst.final_code().generator()
        );
        let rep = classify_symbols(&inst, &y).unwrap();
        assert_eq!(rep.unchanged_counts(), vec![2, 2]);
        assert_eq!(rep.write_cost(), 1);
        assert_eq!(rep.read_counts(), vec![1, 1]);
        assert_eq!(rep.access_cost(), 3);
    }

    #[test]
    fn zero_matrix_is_not_a_conversion() {
        let inst = example_instance();
        let y = ConversionMatrix::new(BitMatrix::zeros(6, 5), vec![3, 3]).unwrap();
        assert!(!verify_conversion(&inst, &y).unwrap());
        assert!(matches!(
            classify_symbols(&inst, &y),
            Err(Error::NotAConversion)
        ));
        let bad = ConversionMatrix::new(BitMatrix::zeros(6, 4), vec![3, 3]).unwrap();
        assert!(verify_conversion(&inst, &bad).is_err());
    }

    #[test]
    fn identity_conversion() {
        let c =
            LinearCode::from_generator(BitMatrix::from_bits(&[&[1, 0, 1], &[0, 1, 1]])).unwrap();
        let inst = ConvertibleInstance::new(vec![c.clone()], c).unwrap();
        let y = ConversionMatrix::new(BitMatrix::identity(3), vec![3]).unwrap();
        let rep = classify_symbols(&inst, &y).unwrap();
        assert_eq!(rep.unchanged_counts(), vec![3]);
        assert!(rep.new_symbols.is_empty());
        assert_eq!(rep.access_cost(), 0);
        // default procedure reads k, keeps k, writes n − k
        let d = classify_symbols(&inst, &default_conversion(&inst)).unwrap();
        assert_eq!(d.access_cost(), 3);
    }

    #[test]
    fn second_copy_of_a_symbol_is_written() {
        let c = LinearCode::full_space(1);
        let rep = LinearCode::from_generator(BitMatrix::from_bits(&[&[1, 1]])).unwrap();
        let inst = ConvertibleInstance::new(vec![c], rep).unwrap();
        let y = ConversionMatrix::new(BitMatrix::from_bits(&[&[1, 1]]), vec![1]).unwrap();
        let r = classify_symbols(&inst, &y).unwrap();
        assert_eq!(r.unchanged, vec![vec![0]]);
        assert_eq!(r.new_symbols, vec![1]);
        assert_eq!(r.read, vec![vec![0]]);
        assert_eq!(r.access_cost(), 2);
    }

    #[test]
    fn default_conversion_costs_n_final() {
        let inst = example_instance();
        let y = default_conversion(&inst);
        let rep = classify_symbols(&inst, &y).unwrap();
        assert_eq!(rep.access_cost(), 5);
        assert_eq!(rep.unchanged_total(), 4);
    }

    #[test]
    fn apply_example() {
        let inst = example_instance();
        let y = example_y();
        let x1: BitVector = "101".parse().unwrap();
        let x2: BitVector = "110".parse().unwrap();
        let out = apply_conversion(&inst, &y, &[x1, x2]).unwrap();
        assert_eq!(out.to_string(), "10111");
        assert!(inst.final_code().contains(&out));

        let zeros = [BitVector::zeros(3), BitVector::zeros(3)];
        assert!(apply_conversion(&inst, &y, &zeros).unwrap().is_zero());

        let bad = [BitVector::from_bits(&[1, 0, 0]), BitVector::zeros(3)];
        assert!(matches!(
            apply_conversion(&inst, &y, &bad),
            Err(Error::NotACodeword { index: 0 })
        ));
    }

    #[test]
    fn report_record_format() {
        let rep = classify_symbols(&example_instance(), &example_y()).unwrap();
        let text = rep.to_string();
        assert!(text.contains("U1=2\nU2=2\nW=1\nR1=1\nR2=1\n"));
        assert!(text.ends_with("access_cost=3"));
    }
}
