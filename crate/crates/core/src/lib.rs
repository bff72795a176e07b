//! Convertible codes over GF(2) in the merge regime.
//!
//! Bit-packed linear algebra, linear codes, Reed-Muller codes, conversion
//! matrices with their access costs, closed-form bounds, and an exhaustive
//! search for the cheapest conversion on small instances.
//!
//! ```
//! use rmconv::conversion::rm_merge_procedure;
//!
//! let c = rm_merge_procedure(2, 4).unwrap();
//! assert_eq!(c.report.unchanged_counts(), vec![8, 4]);
//! assert_eq!(c.report.write_cost(), 4);
//! ```

pub mod bounds;
pub mod code;
pub mod conversion;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod reed_muller;
pub mod report;
pub mod text;

pub use bounds::{BoundReport, ParamSet};
pub use code::{CodeSpace, LinearCode};
pub use conversion::{ConversionMatrix, ConvertibleInstance, CostReport, CostSummary};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use report::ReportRecord;
