//! JSON emission for [`Report`] with a fixed field order.

use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::verifier::Report;

pub const SCHEMA_VERSION: u32 = 1;

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

/// 17 significant digits; non-finite values become `null`.
fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn opt_string(s: Option<&str>) -> String {
    s.map_or_else(|| "null".to_string(), string)
}

/// Seconds since the Unix epoch.
pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn report_to_json(report: &Report, timestamp: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"schema_version\": {SCHEMA_VERSION},");
    let _ = writeln!(out, "  \"manifold\": {},", string(&report.manifold));
    let _ = writeln!(out, "  \"seed\": {},", report.seed);
    let _ = writeln!(out, "  \"points\": {},", report.points);
    let _ = writeln!(out, "  \"jet_order\": {},", report.jet_order);
    let _ = writeln!(out, "  \"checks\": [");
    for (k, c) in report.checks.iter().enumerate() {
        let reason = c
            .skipped_reason
            .clone()
            .or_else(|| (!c.errors.is_empty()).then(|| c.errors.join("; ")).map(|e| format!("error: {e}")));
        let _ = write!(
            out,
            "    {{\"id\": {}, \"description\": {}, \"paper_ref\": {}, \"max_abs_residual\": {}, \
             \"max_rel_residual\": {}, \"tolerance\": {}, \"pass\": {}, \"skipped_reason\": {}}}",
            string(c.id),
            string(c.description),
            string(c.paper_ref),
            number(c.max_abs_residual),
            number(c.max_rel_residual),
            number(c.tolerance),
            c.pass,
            opt_string(reason.as_deref()),
        );
        let _ = writeln!(out, "{}", if k + 1 < report.checks.len() { "," } else { "" });
    }
    let _ = writeln!(out, "  ],");
    let warnings: Vec<String> = report.warnings.iter().map(|w| string(w)).collect();
    let _ = writeln!(out, "  \"warnings\": [{}],", warnings.join(", "));
    let _ = writeln!(out, "  \"timestamp\": {timestamp}");
    let _ = writeln!(out, "}}");
    out
}
