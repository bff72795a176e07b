//! Cost-versus-bound reports for conversions, and the Reed-Muller comparison
//! table at `r = m − 2`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{audit, BoundRecord, BoundReport, ParamSet};
use crate::conversion::{rm_merge_procedure, ConvertibleInstance, CostSummary};
use crate::error::Result;

/// Cap on the dimension enumerated when computing distances for reports.
/// Covers `RM(3,5)` directly; larger codes go through their duals.
pub const REPORT_K_LIMIT: usize = 26;

/// `(r, m)` of a Reed-Muller merge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmParams {
    pub r: usize,
    pub m: usize,
}

/// Parameters, costs of one conversion, and every bound checked against them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rm: Option<RmParams>,
    pub params: ParamSet,
    pub costs: CostSummary,
    pub bounds: Vec<BoundRecord>,
}

impl ReportRecord {
    pub fn new(params: ParamSet, costs: CostSummary) -> Result<Self> {
        let BoundReport { records } = audit(&params, &costs)?;
        Ok(ReportRecord {
            rm: None,
            params,
            costs,
            bounds: records,
        })
    }

    /// Report for a conversion of `inst`; distances are computed from the final code.
    pub fn for_instance(
        inst: &ConvertibleInstance,
        costs: CostSummary,
        k_limit: usize,
    ) -> Result<Self> {
        ReportRecord::new(ParamSet::from_instance(inst, k_limit)?, costs)
    }

    pub fn violations(&self) -> Vec<&BoundRecord> {
        self.bounds.iter().filter(|b| b.is_violation()).collect()
    }

    pub fn shortfalls(&self) -> Vec<&BoundRecord> {
        self.bounds.iter().filter(|b| b.is_shortfall()).collect()
    }

    pub fn bound(&self, name: &str, i: Option<usize>) -> Option<&BoundRecord> {
        self.bounds.iter().find(|b| b.name == name && b.i == i)
    }

    /// Human-readable rendering: parameters, costs, then one aligned line per bound.
    pub fn render_text(&self) -> String {
        let p = &self.params;
        let c = &self.costs;
        let mut out = String::new();
        if let Some(RmParams { r, m }) = self.rm {
            let _ = writeln!(out, "RM merge r={r} m={m}");
        }
        let _ = writeln!(
            out,
            "lambda={} nI={:?} kI={:?} nF={} kF={} dF={} dFdual={}",
            p.lambda, p.n_i, p.k_i, p.n_f, p.k_f, p.d_f, p.d_f_dual
        );
        let _ = writeln!(
            out,
            "U={:?} W={} R={:?} access={}",
            c.unchanged, c.written, c.read, c.access
        );
        let _ = writeln!(
            out,
            "{:<28} {:>2} {:<6} {:<6} {:>6} {:>8} {:>8}  verdict",
            "bound", "i", "kind", "scope", "value", "observed", "slack"
        );
        for b in &self.bounds {
            let _ = writeln!(
                out,
                "{:<28} {:>2} {:<6} {:<6} {:>6} {:>8} {:>8}  {}",
                b.name,
                b.i.map_or("-".to_string(), |i| i.to_string()),
                format!("{:?}", b.kind).to_lowercase(),
                format!("{:?}", b.scope).to_lowercase(),
                opt(b.value),
                opt(b.observed),
                opt(b.slack),
                verdict(b)
            );
        }
        out
    }
}

fn opt(v: Option<i64>) -> String {
    v.map_or("-".to_string(), |v| v.to_string())
}

/// One word summarizing a bound record.
pub fn verdict(b: &BoundRecord) -> &'static str {
    if !b.applicable {
        return "n/a";
    }
    match (b.satisfied, b.tight) {
        (Some(false), _) if b.is_shortfall() => "short",
        (Some(false), _) => "VIOLATED",
        (Some(true), Some(true)) => "tight",
        (Some(true), _) => "slack",
        _ => "-",
    }
}

/// Report for the Reed-Muller merge into `RM(r, m)`, with `d_F` and `d_F^⊥`
/// computed from the codes.
pub fn merge_report(r: usize, m: usize, k_limit: usize) -> Result<ReportRecord> {
    let c = rm_merge_procedure(r, m)?;
    let mut rec = ReportRecord::for_instance(&c.instance, c.report.summary(), k_limit)?;
    rec.rm = Some(RmParams { r, m });
    Ok(rec)
}

/// Rows of the comparison table at `r = m − 2`, one per `m`. Values of `m`
/// below 4 are skipped, each with a warning.
pub fn comparison_rows(
    ms: impl IntoIterator<Item = usize>,
) -> Result<(Vec<ReportRecord>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for m in ms {
        if m < 4 {
            warnings.push(format!(
                "skipping m={m}: the comparison assumes m = r + 2 >= 4"
            ));
            continue;
        }
        rows.push(merge_report(m - 2, m, REPORT_K_LIMIT)?);
    }
    Ok((rows, warnings))
}
