//! Exhaustive search over all linear conversions of a small instance.
//!
//! Every valid `Y` satisfies `G_I · Y = M · G_F` for exactly one invertible
//! `M`: `G_I · Y` must be a generator of the final code, and any two
//! generators of the same code differ by an invertible change of basis.
//! Since `G_I` has full row rank, the solutions of `G_I · y_j = (M · G_F)_j`
//! for a column `j` form a coset of the right kernel of `G_I`. Running over
//! all `M` and all coset choices per column therefore visits every
//! conversion exactly once.
//!
//! Internally the stacked initial coordinates are packed into one `u64`, so
//! the stacked length is capped at 64.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::conversion::{
    classify_unchecked, default_conversion, ConversionMatrix, ConvertibleInstance, CostReport,
};
use crate::error::{Error, Result};
use crate::gf2::{gl_count, BitMatrix, InvertibleRows};

/// Most candidate conversions any search will agree to look at.
pub const MAX_CANDIDATES: u128 = 1_000_000_000;

/// Size limits for [`min_access_cost`] and [`enumerate_conversions`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchLimits {
    pub max_k_f: usize,
    pub max_kernel_dim: usize,
    pub max_n_f: usize,
    /// Wall-clock budget; `None` means unlimited.
    pub time_budget: Option<Duration>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_k_f: 5,
            max_kernel_dim: 6,
            max_n_f: 8,
            time_budget: Some(Duration::from_secs(600)),
        }
    }
}

impl SearchLimits {
    fn validate(&self) -> Result<()> {
        if self.max_k_f == 0 || self.max_kernel_dim == 0 || self.max_n_f == 0 {
            return Err(Error::InvalidParameters(
                "search limits must be positive".into(),
            ));
        }
        if self.time_budget.is_some_and(|t| t.is_zero()) {
            return Err(Error::InvalidParameters(
                "time budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Number of `(M, coset choice)` pairs an exhaustive search visits, or `None` on overflow.
pub fn search_space_size(inst: &ConvertibleInstance) -> Option<u128> {
    let k_f = inst.final_code().k();
    let kernel_dim = inst.stacked_length() - k_f;
    let shift = kernel_dim.checked_mul(inst.final_code().n())?;
    let cosets = 1u128.checked_shl(u32::try_from(shift).ok()?)?;
    gl_count(k_f)?.checked_mul(cosets)
}

/// Data shared by every `M`: particular solutions for unit targets, the
/// kernel span, and `G_F` by columns.
struct Setup {
    n_stacked: usize,
    k_f: usize,
    n_f: usize,
    // unit_solutions[a] solves G_I · y = e_a; bit s of a mask is stacked row s
    unit_solutions: Vec<u64>,
    kernel_span: Vec<u64>,
    // gf_columns[j] has bit (k_f − 1 − a) set iff G_F[a][j] = 1, matching the row masks of M
    gf_columns: Vec<u32>,
}

impl Setup {
    fn new(inst: &ConvertibleInstance, lim: &SearchLimits) -> Result<Self> {
        lim.validate()?;
        let fin = inst.final_code();
        let (k_f, n_f, n_stacked) = (fin.k(), fin.n(), inst.stacked_length());
        if k_f > lim.max_k_f {
            return Err(Error::InvalidParameters(format!(
                "k_F = {k_f} exceeds the limit {}",
                lim.max_k_f
            )));
        }
        if n_f > lim.max_n_f {
            return Err(Error::InvalidParameters(format!(
                "n_F = {n_f} exceeds the limit {}",
                lim.max_n_f
            )));
        }
        let kernel_dim = n_stacked - k_f;
        if kernel_dim > lim.max_kernel_dim {
            return Err(Error::InvalidParameters(format!(
                "kernel dimension {kernel_dim} exceeds the limit {}",
                lim.max_kernel_dim
            )));
        }
        if n_stacked > 64 {
            return Err(Error::InvalidParameters(format!(
                "stacked initial length {n_stacked} exceeds 64"
            )));
        }
        let count = search_space_size(inst).unwrap_or(u128::MAX);
        if count > MAX_CANDIDATES {
            return Err(Error::SizeGuard {
                what: "conversion search",
                count,
                limit: MAX_CANDIDATES,
            });
        }

        let g_i = inst.stacked_generator();
        let to_mask = |v: &crate::gf2::BitVector| v.support().iter().fold(0u64, |m, &s| m | 1 << s);
        let unit_solutions = (0..k_f)
            .map(|a| {
                let e = crate::gf2::BitVector::unit(k_f, a);
                let y = g_i
                    .solve(&e)?
                    .expect("a block-diagonal generator has full row rank");
                Ok(to_mask(&y))
            })
            .collect::<Result<Vec<_>>>()?;
        let kernel: Vec<u64> = g_i.right_kernel_basis().iter().map(to_mask).collect();
        debug_assert_eq!(kernel.len(), kernel_dim);
        let mut kernel_span = vec![0u64; 1 << kernel.len()];
        for c in 1..kernel_span.len() {
            let low = c.trailing_zeros() as usize;
            kernel_span[c] = kernel_span[c & (c - 1)] ^ kernel[low];
        }
        let gf = fin.generator();
        let gf_columns = (0..n_f)
            .map(|j| {
                (0..k_f)
                    .filter(|&a| gf.get(a, j))
                    .fold(0u32, |m, a| m | 1 << (k_f - 1 - a))
            })
            .collect();
        Ok(Setup {
            n_stacked,
            k_f,
            n_f,
            unit_solutions,
            kernel_span,
            gf_columns,
        })
    }

    /// Candidate columns of `Y` for column `j` under the change of basis `m_rows`.
    fn column_coset(&self, m_rows: &[u32], j: usize) -> impl Iterator<Item = u64> + '_ {
        let g = self.gf_columns[j];
        let particular = m_rows
            .iter()
            .enumerate()
            .filter(|(_, &row)| (row & g).count_ones() & 1 == 1)
            .fold(0u64, |acc, (a, _)| acc ^ self.unit_solutions[a]);
        self.kernel_span.iter().map(move |&k| particular ^ k)
    }

    fn to_matrix(&self, columns: &[u64]) -> BitMatrix {
        let mut y = BitMatrix::zeros(self.n_stacked, self.n_f);
        for (j, &col) in columns.iter().enumerate() {
            let mut c = col;
            while c != 0 {
                y.set(c.trailing_zeros() as usize, j, true);
                c &= c - 1;
            }
        }
        y
    }

    /// Row-major key: comparing keys compares the matrices lexicographically.
    fn lex_key(&self, columns: &[u64]) -> Vec<u64> {
        (0..self.n_stacked)
            .map(|s| {
                columns
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c >> s & 1 == 1)
                    .fold(0u64, |acc, (j, _)| acc | 1 << (63 - j))
            })
            .collect()
    }
}

/// Best conversion found under one `M`.
#[derive(Clone, Debug)]
struct Best {
    access: usize,
    writes: usize,
    key: Vec<u64>,
    columns: Vec<u64>,
}

impl Best {
    fn order(&self, other: &Best) -> Ordering {
        (self.access, self.writes)
            .cmp(&(other.access, other.writes))
            .then_with(|| self.key.cmp(&other.key))
    }
}

struct Column {
    candidates: Vec<u64>,
    must_write: bool,
}

struct Search<'a> {
    setup: &'a Setup,
    columns: Vec<Column>,
    // suffix_writes[j] = forced writes among columns j..
    suffix_writes: Vec<usize>,
    chosen: Vec<u64>,
    global_best: &'a AtomicUsize,
    best: Option<Best>,
}

impl<'a> Search<'a> {
    fn new(setup: &'a Setup, m_rows: &[u32], global_best: &'a AtomicUsize) -> Self {
        let columns: Vec<Column> = (0..setup.n_f)
            .map(|j| {
                let mut candidates: Vec<u64> = setup.column_coset(m_rows, j).collect();
                // cheap columns first so good incumbents show up early
                candidates.sort_by_key(|c| (c.count_ones() != 1, c.count_ones()));
                let must_write = candidates[0].count_ones() != 1;
                Column {
                    candidates,
                    must_write,
                }
            })
            .collect();
        let mut suffix_writes = vec![0; setup.n_f + 1];
        for j in (0..setup.n_f).rev() {
            suffix_writes[j] = suffix_writes[j + 1] + columns[j].must_write as usize;
        }
        Search {
            setup,
            columns,
            suffix_writes,
            chosen: vec![0; setup.n_f],
            global_best,
            best: None,
        }
    }

    fn bound(&self) -> usize {
        let global = self.global_best.load(AtomicOrdering::Relaxed);
        self.best.as_ref().map_or(global, |b| b.access.min(global))
    }

    fn run(mut self) -> Option<Best> {
        self.dfs(0, 0, 0, 0);
        self.best
    }

    // kept: initial symbols already left in place by an earlier column
    fn dfs(&mut self, j: usize, writes: usize, reads: u64, kept: u64) {
        if writes + reads.count_ones() as usize + self.suffix_writes[j] > self.bound() {
            return;
        }
        if j == self.setup.n_f {
            let access = writes + reads.count_ones() as usize;
            let cand = Best {
                access,
                writes,
                key: self.setup.lex_key(&self.chosen),
                columns: self.chosen.clone(),
            };
            if self
                .best
                .as_ref()
                .is_none_or(|b| cand.order(b) == Ordering::Less)
            {
                self.global_best.fetch_min(access, AtomicOrdering::Relaxed);
                self.best = Some(cand);
            }
            return;
        }
        for t in 0..self.columns[j].candidates.len() {
            let c = self.columns[j].candidates[t];
            self.chosen[j] = c;
            if c.count_ones() == 1 && c & kept == 0 {
                self.dfs(j + 1, writes, reads, kept | c);
            } else {
                self.dfs(j + 1, writes + 1, reads | c, kept);
            }
        }
    }
}

/// A minimum-access-cost linear conversion, found by exhaustive search.
///
/// Ties are broken by write cost and then by the lexicographic order of `Y`,
/// so the answer does not depend on how the parallel search is scheduled.
pub fn min_access_cost(
    inst: &ConvertibleInstance,
    lim: &SearchLimits,
) -> Result<(ConversionMatrix, CostReport)> {
    let setup = Setup::new(inst, lim)?;
    let start = Instant::now();
    let seed = classify_unchecked(inst, &default_conversion(inst).y).access_cost();
    let global_best = AtomicUsize::new(seed);
    let timed_out = AtomicBool::new(false);
    let winner: Mutex<Option<Best>> = Mutex::new(None);

    InvertibleRows::new(setup.k_f, u128::MAX)?
        .par_bridge()
        .for_each(|m_rows| {
            if timed_out.load(AtomicOrdering::Relaxed) {
                return;
            }
            if lim.time_budget.is_some_and(|t| start.elapsed() > t) {
                timed_out.store(true, AtomicOrdering::Relaxed);
                return;
            }
            if let Some(best) = Search::new(&setup, &m_rows, &global_best).run() {
                let mut w = winner.lock().expect("no panics while holding the lock");
                if w.as_ref().is_none_or(|b| best.order(b) == Ordering::Less) {
                    *w = Some(best);
                }
            }
        });

    if timed_out.into_inner() {
        return Err(Error::TimeBudget {
            seconds: lim.time_budget.map_or(0.0, |t| t.as_secs_f64()),
        });
    }
    let best = winner
        .into_inner()
        .expect("no panics while holding the lock")
        .expect("the default conversion is always reachable");
    let y = setup.to_matrix(&best.columns);
    let report = classify_unchecked(inst, &y);
    debug_assert_eq!(report.access_cost(), best.access);
    Ok((ConversionMatrix::new(y, inst.initial_lengths())?, report))
}

/// Every linear conversion of `inst`, each exactly once, with its cost report.
///
/// Order: invertible `M` in lexicographic order, then coset choices as an
/// odometer with the last column fastest.
pub fn enumerate_conversions<'a>(
    inst: &'a ConvertibleInstance,
    lim: &SearchLimits,
) -> Result<Conversions<'a>> {
    let setup = Setup::new(inst, lim)?;
    let ms = InvertibleRows::new(setup.k_f, u128::MAX)?;
    Ok(Conversions {
        inst,
        setup,
        ms,
        cosets: Vec::new(),
        digits: Vec::new(),
        exhausted: true,
    })
}

/// Iterator returned by [`enumerate_conversions`].
pub struct Conversions<'a> {
    inst: &'a ConvertibleInstance,
    setup: Setup,
    ms: InvertibleRows,
    cosets: Vec<Vec<u64>>,
    digits: Vec<usize>,
    exhausted: bool,
}

impl Conversions<'_> {
    fn advance(&mut self) -> bool {
        for j in (0..self.digits.len()).rev() {
            self.digits[j] += 1;
            if self.digits[j] < self.cosets[j].len() {
                return true;
            }
            self.digits[j] = 0;
        }
        false
    }
}

impl Iterator for Conversions<'_> {
    type Item = (ConversionMatrix, CostReport);

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted || !self.advance() {
            let m_rows = self.ms.next()?;
            self.cosets = (0..self.setup.n_f)
                .map(|j| self.setup.column_coset(&m_rows, j).collect())
                .collect();
            self.digits = vec![0; self.setup.n_f];
            self.exhausted = false;
        }
        let columns: Vec<u64> = self
            .digits
            .iter()
            .enumerate()
            .map(|(j, &d)| self.cosets[j][d])
            .collect();
        let y = self.setup.to_matrix(&columns);
        let report = classify_unchecked(self.inst, &y);
        let blocks = self.inst.initial_lengths();
        Some((ConversionMatrix { y, blocks }, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::LinearCode;
    use crate::conversion::verify_conversion;

    fn code(rows: &[&[u8]]) -> LinearCode {
        LinearCode::from_generator(BitMatrix::from_bits(rows)).unwrap()
    }

    fn example() -> ConvertibleInstance {
        ConvertibleInstance::new(
            vec![
                code(&[&[1, 0, 1], &[0, 1, 1]]),
                code(&[&[1, 1, 0], &[0, 1, 1]]),
            ],
            code(&[
                &[1, 0, 0, 0, 1],
                &[0, 1, 0, 0, 1],
                &[0, 0, 1, 0, 1],
                &[0, 0, 0, 1, 1],
            ]),
        )
        .unwrap()
    }

    #[test]
    fn space_size() {
        assert_eq!(search_space_size(&example()), Some(20160 * 1024));
    }

    #[test]
    fn identity_instance_costs_nothing() {
        let c = code(&[&[1, 0, 1], &[0, 1, 1]]);
        let inst = ConvertibleInstance::new(vec![c.clone()], c).unwrap();
        let (y, rep) = min_access_cost(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(rep.access_cost(), 0);
        assert!(verify_conversion(&inst, &y).unwrap());
    }

    #[test]
    fn repetition_enumeration() {
        let c = LinearCode::repetition(2);
        let inst = ConvertibleInstance::new(vec![c.clone()], c).unwrap();
        let all: Vec<_> = enumerate_conversions(&inst, &SearchLimits::default())
            .unwrap()
            .collect();
        // G_I = [1 1]: each column of Y is (1,0) or (0,1)
        assert_eq!(all.len(), 4);
        assert!(all
            .iter()
            .all(|(y, _)| verify_conversion(&inst, y).unwrap()));
        let mut ys: Vec<_> = all.iter().map(|(y, _)| y.y.clone()).collect();
        ys.sort_by(|a, b| a.lex_cmp(b));
        ys.dedup();
        assert_eq!(ys.len(), 4);
    }

    #[test]
    fn enumeration_count_matches_space_size() {
        let inst = ConvertibleInstance::new(
            vec![code(&[&[1, 1]]), code(&[&[1, 1]])],
            code(&[&[1, 0, 1], &[0, 1, 1]]),
        )
        .unwrap();
        let n = enumerate_conversions(&inst, &SearchLimits::default())
            .unwrap()
            .count();
        assert_eq!(n as u128, search_space_size(&inst).unwrap());
    }

    #[test]
    fn limits_are_enforced() {
        let lim = SearchLimits {
            max_k_f: 3,
            ..SearchLimits::default()
        };
        assert!(matches!(
            min_access_cost(&example(), &lim),
            Err(Error::InvalidParameters(_))
        ));
        let lim = SearchLimits {
            max_kernel_dim: 1,
            ..SearchLimits::default()
        };
        assert!(min_access_cost(&example(), &lim).is_err());
        let zero = SearchLimits {
            max_n_f: 0,
            ..SearchLimits::default()
        };
        assert!(enumerate_conversions(&example(), &zero).is_err());
    }

    #[test]
    fn example_optimum_is_three_and_deterministic() {
        let inst = example();
        let (y, rep) = min_access_cost(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(rep.access_cost(), 3);
        assert_eq!(rep.write_cost(), 1);
        assert!(verify_conversion(&inst, &y).unwrap());
        let (y2, rep2) = min_access_cost(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(y, y2);
        assert_eq!(rep, rep2);
    }
}
