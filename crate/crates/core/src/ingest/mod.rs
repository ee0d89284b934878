//! Reading and writing tables and analysis results.
//!
//! Tables come in two equivalent shapes: a flat CSV file with one row per
//! failure mode, and a nested JSON document mirroring the part / subpart /
//! failure mode hierarchy. Analysis results are emitted as JSON, Markdown or
//! CSV.

mod csv_table;
mod json_table;
mod report;

pub use csv_table::{emit_csv, parse_csv, CSV_COLUMNS};
pub use json_table::{emit_json, parse_json, FORMAT_VERSION};
pub use report::{emit_result, result_to_json, OutputFormat};

use crate::error::Result;
use crate::model::FmedaTable;

/// Parses `text` as JSON when it starts with `{`, as CSV otherwise.
pub fn parse_auto(text: &str) -> Result<FmedaTable> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

/// Rounds `x` to 12 significant digits.
pub(crate) fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` rounded to 12 significant digits.
pub(crate) fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}
