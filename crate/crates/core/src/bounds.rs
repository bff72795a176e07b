//! Closed-form bounds on unchanged and read symbols for linear merges, and an
//! auditor that checks a [`CostSummary`] against all of them.
//!
//! Everything works on integer parameters only. Lower bounds are clamped at
//! zero. A bound whose precondition fails is still reported, marked
//! inapplicable.
//!
//! The lower bounds on unchanged symbols only hold for the best conversion,
//! not for every conversion: rewriting a symbol that could have been kept is
//! always allowed. For `C_1 = C_2 = F_2` merged into `F_2^2`, the conversion
//! `(x_1, x_2) ↦ (x_1, x_1 + x_2)` keeps one symbol while `k_F = 2`. Such
//! records have [`BoundScope::Best`], and falling short of them is reported
//! as a shortfall, not a violation.

use serde::{Deserialize, Serialize};

use crate::code::LinearCode;
use crate::conversion::{ConvertibleInstance, CostSummary};
use crate::error::{Error, Result};

/// Parameters of a merge: lengths, dimensions, and the two distances of the final code.
///
/// When the final code is the whole space its dual is `{0}`; `d_f_dual` is
/// then taken to be `n_f + 1`, larger than any length the bounds compare it with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSet {
    pub lambda: usize,
    #[serde(rename = "nI")]
    pub n_i: Vec<usize>,
    #[serde(rename = "kI")]
    pub k_i: Vec<usize>,
    #[serde(rename = "nF")]
    pub n_f: usize,
    #[serde(rename = "kF")]
    pub k_f: usize,
    #[serde(rename = "dF")]
    pub d_f: usize,
    #[serde(rename = "dFdual")]
    pub d_f_dual: usize,
}

impl ParamSet {
    pub fn new(
        n_i: Vec<usize>,
        k_i: Vec<usize>,
        n_f: usize,
        k_f: usize,
        d_f: usize,
        d_f_dual: usize,
    ) -> Result<Self> {
        let p = ParamSet {
            lambda: n_i.len(),
            n_i,
            k_i,
            n_f,
            k_f,
            d_f,
            d_f_dual,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if self.lambda == 0 || self.n_i.len() != self.lambda || self.k_i.len() != self.lambda {
            return bad(format!(
                "lambda={} but {} lengths and {} dimensions",
                self.lambda,
                self.n_i.len(),
                self.k_i.len()
            ));
        }
        if let Some(i) = (0..self.lambda).find(|&i| self.k_i[i] == 0 || self.k_i[i] > self.n_i[i]) {
            return bad(format!("need 1 <= kI <= nI for code {}", i + 1));
        }
        let sum: usize = self.k_i.iter().sum();
        if sum != self.k_f {
            return Err(Error::MergeDimension {
                sum,
                k_final: self.k_f,
            });
        }
        if self.k_f == 0 || self.k_f > self.n_f {
            return bad(format!(
                "need 1 <= kF <= nF, got kF={}, nF={}",
                self.k_f, self.n_f
            ));
        }
        if self.d_f == 0 || self.d_f > self.n_f - self.k_f + 1 {
            return bad(format!(
                "dF={} violates the Singleton bound for [{}, {}]",
                self.d_f, self.n_f, self.k_f
            ));
        }
        if self.d_f_dual == 0 {
            return bad("dFdual must be positive".into());
        }
        Ok(())
    }

    /// Computes both distances of the final code exhaustively.
    pub fn from_instance(inst: &ConvertibleInstance, k_limit: usize) -> Result<Self> {
        let f = inst.final_code();
        let (d, d_dual) = final_distances(f, k_limit)?;
        ParamSet::new(
            inst.initial_lengths(),
            inst.initial_dimensions(),
            f.n(),
            f.k(),
            d,
            d_dual,
        )
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.lambda {
            return Err(Error::InvalidParameters(format!(
                "code index {} out of range for lambda={}",
                i + 1,
                self.lambda
            )));
        }
        Ok(())
    }

    fn k_others(&self, i: usize) -> usize {
        self.k_f - self.k_i[i]
    }
}

/// `(d_F, d_F^⊥)`, with the `n + 1` convention for a zero dual.
pub fn final_distances(f: &LinearCode, k_limit: usize) -> Result<(usize, usize)> {
    let d = f.min_distance(k_limit)?;
    let d_dual = f.dual_distance(k_limit)?.unwrap_or(f.n() + 1);
    Ok((d, d_dual))
}

/// `|U_i| ≤ min{n_{I_i}, n_F − d_F − Σ_{j≠i} k_{I_j} + 1}` (clamped at 0).
pub fn unchanged_upper_singleton(p: &ParamSet, i: usize) -> Result<usize> {
    p.check_index(i)?;
    let rhs = (p.n_f + 1).saturating_sub(p.d_f + p.k_others(i));
    Ok(p.n_i[i].min(rhs))
}

/// `|U_i| ≤ k_{I_i}` whenever `d_F^⊥ > k_{I_i} + 1`.
pub fn unchanged_upper_dual(p: &ParamSet, i: usize) -> Result<Option<usize>> {
    p.check_index(i)?;
    Ok((p.d_f_dual > p.k_i[i] + 1).then_some(p.k_i[i]))
}

/// `Σ_{j≠i} |U_j| ≥ Σ_{j≠i} k_{I_j}` for the conversion keeping the most
/// symbols; needs `λ ≥ 2`.
pub fn unchanged_lower_complement(p: &ParamSet, i: usize) -> Result<Option<usize>> {
    p.check_index(i)?;
    Ok((p.lambda >= 2).then(|| p.k_others(i)))
}

/// `|U| ≥ k_F` for the conversion keeping the most symbols; needs `λ ≥ 2`.
/// The default conversion already attains it.
pub fn unchanged_total_lower(p: &ParamSet) -> Option<usize> {
    (p.lambda >= 2).then_some(p.k_f)
}

/// `δ_i = u_i − d_F + 1`.
pub fn delta(p: &ParamSet, u_i: usize) -> i64 {
    u_i as i64 - p.d_f as i64 + 1
}

/// Read lower bound from `δ_i`: `k_{I_i}` if `δ_i ≤ 0`, else `k_{I_i} − δ_i`.
pub fn read_lower_delta(p: &ParamSet, i: usize, u_i: usize) -> Result<usize> {
    p.check_index(i)?;
    if u_i > p.n_i[i] {
        return Err(Error::InvalidParameters(format!(
            "u_{} = {u_i} exceeds n_I = {}",
            i + 1,
            p.n_i[i]
        )));
    }
    let d = delta(p, u_i);
    Ok(if d <= 0 {
        p.k_i[i]
    } else {
        p.k_i[i].saturating_sub(d as usize)
    })
}

/// `ω_i = n_F − 2 d_F − Σ_{j≠i} k_{I_j} + 2`.
pub fn omega(p: &ParamSet, i: usize) -> i64 {
    p.n_f as i64 - 2 * p.d_f as i64 - p.k_others(i) as i64 + 2
}

/// Read lower bound from `ω_i`: `k_{I_i}` if `ω_i ≤ 0`, else `k_{I_i} − ω_i`.
pub fn read_lower_omega(p: &ParamSet, i: usize) -> Result<usize> {
    p.check_index(i)?;
    let w = omega(p, i);
    Ok(if w <= 0 {
        p.k_i[i]
    } else {
        p.k_i[i].saturating_sub(w as usize)
    })
}

/// True iff `d_F > n_{I_i} − k_{I_i} + 1`.
///
/// This alone does not force `δ_i ≤ 0`: `RM(2,4)` from `RM(2,3)` and
/// `RM(1,3)` satisfies it for `i = 1` with `δ_1 = 5`. See
/// [`delta_sign_guaranteed`] for the condition that does.
pub fn delta_sign_check(p: &ParamSet, i: usize) -> Result<bool> {
    p.check_index(i)?;
    Ok(p.d_f > p.n_i[i] - p.k_i[i] + 1)
}

/// True iff `d_F > n_F − k_{I_i} + 1`, under which every conversion has `δ_i ≤ 0`.
///
/// By the Singleton bound `d_F ≤ n_F − k_F + 1 ≤ n_F − k_{I_i} + 1` this never
/// holds for a valid parameter set, so the corresponding audit entry is
/// always inapplicable.
pub fn delta_sign_guaranteed(p: &ParamSet, i: usize) -> Result<bool> {
    p.check_index(i)?;
    Ok(p.d_f + p.k_i[i] > p.n_f + 1)
}

/// True iff `d_F^⊥ > k_{I_i} + 1` for every `i` and `λ ≥ 2`. Then every
/// conversion has `|U| ≤ k_F`, with equality for the best one.
pub fn pinch_regime(p: &ParamSet) -> bool {
    p.lambda >= 2 && p.k_i.iter().all(|&k| p.d_f_dual > k + 1)
}

/// Direction of a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
    Equal,
}

/// Which conversions a bound constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundScope {
    /// Holds for every valid conversion.
    Every,
    /// Holds for the conversion that keeps the most symbols unchanged.
    Best,
}

/// One evaluated bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    /// 1-based code index, `None` for bounds on totals.
    pub i: Option<usize>,
    pub kind: BoundKind,
    pub scope: BoundScope,
    /// Bound value; `None` only when it cannot be evaluated.
    pub value: Option<i64>,
    pub applicable: bool,
    /// The quantity the bound constrains, when a report was audited.
    pub observed: Option<i64>,
    pub satisfied: Option<bool>,
    pub tight: Option<bool>,
    /// `|observed − value|` for satisfied bounds.
    pub slack: Option<i64>,
}

impl BoundRecord {
    fn new(
        name: &str,
        i: Option<usize>,
        kind: BoundKind,
        value: Option<i64>,
        applicable: bool,
    ) -> Self {
        BoundRecord {
            name: name.to_string(),
            i: i.map(|i| i + 1),
            kind,
            scope: BoundScope::Every,
            value,
            applicable,
            observed: None,
            satisfied: None,
            tight: None,
            slack: None,
        }
    }

    fn observe(&mut self, observed: i64) {
        self.observed = Some(observed);
        if !self.applicable {
            return;
        }
        let Some(v) = self.value else { return };
        let ok = match self.kind {
            BoundKind::Upper => observed <= v,
            BoundKind::Lower => observed >= v,
            BoundKind::Equal => observed == v,
        };
        self.satisfied = Some(ok);
        self.tight = Some(observed == v);
        if ok {
            self.slack = Some((observed - v).abs());
        }
    }

    fn best_only(mut self) -> Self {
        self.scope = BoundScope::Best;
        self
    }

    /// A failed bound that holds for every conversion: this indicates a bug.
    pub fn is_violation(&self) -> bool {
        self.satisfied == Some(false) && self.scope == BoundScope::Every
    }

    /// A failed bound that only constrains the best conversion: the observed
    /// conversion keeps fewer symbols than it could.
    pub fn is_shortfall(&self) -> bool {
        self.satisfied == Some(false) && self.scope == BoundScope::Best
    }
}

/// Every bound, evaluated (and optionally checked) for one parameter set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub records: Vec<BoundRecord>,
}

impl BoundReport {
    pub fn violations(&self) -> Vec<&BoundRecord> {
        self.records.iter().filter(|r| r.is_violation()).collect()
    }

    pub fn shortfalls(&self) -> Vec<&BoundRecord> {
        self.records.iter().filter(|r| r.is_shortfall()).collect()
    }

    pub fn find(&self, name: &str, i: Option<usize>) -> Option<&BoundRecord> {
        self.records.iter().find(|r| r.name == name && r.i == i)
    }
}

pub const SINGLETON: &str = "unchanged_upper_singleton";
pub const DUAL: &str = "unchanged_upper_dual";
pub const COMPLEMENT: &str = "unchanged_lower_complement";
pub const TOTAL: &str = "unchanged_total_lower";
pub const PINCH: &str = "unchanged_total_pinch";
pub const DELTA_READ: &str = "read_lower_delta";
pub const OMEGA_READ: &str = "read_lower_omega";
pub const DELTA_SIGN: &str = "delta_nonpositive";

/// Best upper bound on `|U_i|` that holds for every conversion.
pub fn unchanged_upper(p: &ParamSet, i: usize) -> Result<usize> {
    let s = unchanged_upper_singleton(p, i)?;
    Ok(unchanged_upper_dual(p, i)?.map_or(s, |d| d.min(s)))
}

/// Evaluates every bound. `unchanged` supplies the `|U_i|` used by the `δ`
/// bound; without it the largest admissible `|U_i|` is used, which keeps
/// the bound valid for every conversion.
fn evaluate(p: &ParamSet, unchanged: Option<&[usize]>) -> Result<BoundReport> {
    p.validate()?;
    let mut records = Vec::new();
    for i in 0..p.lambda {
        records.push(BoundRecord::new(
            SINGLETON,
            Some(i),
            BoundKind::Upper,
            Some(unchanged_upper_singleton(p, i)? as i64),
            true,
        ));
        let dual = unchanged_upper_dual(p, i)?;
        records.push(BoundRecord::new(
            DUAL,
            Some(i),
            BoundKind::Upper,
            Some(p.k_i[i] as i64),
            dual.is_some(),
        ));
        let comp = unchanged_lower_complement(p, i)?;
        records.push(
            BoundRecord::new(
                COMPLEMENT,
                Some(i),
                BoundKind::Lower,
                comp.map(|v| v as i64),
                comp.is_some(),
            )
            .best_only(),
        );
        let u_i = match unchanged {
            Some(u) => u[i],
            None => unchanged_upper(p, i)?,
        };
        records.push(BoundRecord::new(
            DELTA_READ,
            Some(i),
            BoundKind::Lower,
            Some(read_lower_delta(p, i, u_i)? as i64),
            true,
        ));
        records.push(BoundRecord::new(
            OMEGA_READ,
            Some(i),
            BoundKind::Lower,
            Some(read_lower_omega(p, i)? as i64),
            true,
        ));
        records.push(BoundRecord::new(
            DELTA_SIGN,
            Some(i),
            BoundKind::Upper,
            Some(0),
            delta_sign_guaranteed(p, i)?,
        ));
    }
    let total = unchanged_total_lower(p);
    records.push(
        BoundRecord::new(
            TOTAL,
            None,
            BoundKind::Lower,
            total.map(|v| v as i64),
            total.is_some(),
        )
        .best_only(),
    );
    records.push(
        BoundRecord::new(
            PINCH,
            None,
            BoundKind::Equal,
            Some(p.k_f as i64),
            pinch_regime(p),
        )
        .best_only(),
    );
    Ok(BoundReport { records })
}

/// Bound table for `p` alone, with nothing observed.
pub fn bound_table(p: &ParamSet) -> Result<BoundReport> {
    evaluate(p, None)
}

/// Checks `costs` against every bound. A violation means a bug somewhere; a
/// shortfall means the conversion is not the one keeping the most symbols.
pub fn audit(p: &ParamSet, costs: &CostSummary) -> Result<BoundReport> {
    if costs.unchanged.len() != p.lambda || costs.read.len() != p.lambda {
        return Err(Error::DimensionMismatch {
            op: "audit",
            expected: p.lambda,
            actual: costs.unchanged.len(),
        });
    }
    let mut report = evaluate(p, Some(&costs.unchanged))?;
    let u_total: usize = costs.unchanged.iter().sum();
    for rec in &mut report.records {
        let observed = match (rec.name.as_str(), rec.i) {
            (SINGLETON | DUAL, Some(i)) => costs.unchanged[i - 1] as i64,
            (COMPLEMENT, Some(i)) => (u_total - costs.unchanged[i - 1]) as i64,
            (DELTA_READ | OMEGA_READ, Some(i)) => costs.read[i - 1] as i64,
            (DELTA_SIGN, Some(i)) => delta(p, costs.unchanged[i - 1]),
            (TOTAL | PINCH, None) => u_total as i64,
            _ => unreachable!("unknown bound record {}", rec.name),
        };
        rec.observe(observed);
    }
    Ok(report)
}
