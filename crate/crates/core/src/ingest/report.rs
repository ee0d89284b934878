//! Analysis result documents.
//!
//! JSON output has sorted keys and numbers rounded to 12 significant digits,
//! so identical inputs produce byte-identical documents. Percentages in the
//! Markdown and CSV reports are rendered with two decimals.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Value};

use super::{fmt_num, round_sig, FORMAT_VERSION};
use crate::analysis::AnalysisResult;
use crate::eii::EiiInput;
use crate::error::{Error, Result};
use crate::uncertainty::{Interval, ModeSigmas};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Markdown,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::out_of_range("output format", s)),
        }
    }
}

fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn sigmas_json(s: &ModeSigmas) -> Value {
    json!({ "full": num(s.full), "dc_only": num(s.dc_only), "lambda_only": num(s.lambda_only) })
}

fn interval_json(i: &Interval) -> Value {
    json!({ "lo": num(i.lo), "hi": num(i.hi), "clamped": i.clamped })
}

pub fn result_to_json(r: &AnalysisResult) -> Value {
    let failure_modes: Vec<Value> = r
        .modes
        .iter()
        .map(|m| {
            json!({
                "id": m.id, "part": m.part, "subpart": m.subpart,
                "lambda_fit": num(m.lambda), "sigma_lambda_fit": num(m.sigma_lambda),
                "dc": num(m.dc), "sigma_dc": num(m.sigma_dc),
                "dc_latent": num(m.dc_latent), "sigma_dc_latent": num(m.sigma_dc_latent),
            })
        })
        .collect();
    let entries: Vec<Value> = r
        .eii
        .entries
        .iter()
        .map(|e| {
            json!({
                "failure_mode": e.failure_mode_id, "input": e.input.to_string(),
                "raw_eii": num(e.raw_eii), "variance_share": num(e.variance_share),
                "percent": num(e.percent),
            })
        })
        .collect();
    let totals: Vec<Value> = r
        .eii_totals
        .iter()
        .map(|(id, p)| json!({ "failure_mode": id, "percent": num(*p) }))
        .collect();
    let lfm = match (r.lfm, r.sigma_lfm, r.interval_lfm) {
        (Some(v), Some(s), Some(i)) => {
            json!({ "value": num(v), "sigma": sigmas_json(&s), "interval": interval_json(&i) })
        }
        _ => Value::Null,
    };
    let asil = r.asil.as_ref().map_or(Value::Null, |a| {
        json!({
            "target": a.target.to_string(),
            "overall": a.overall.to_string(),
            "metrics": a.metrics.iter().map(|m| json!({
                "metric": m.kind.to_string(), "threshold": num(m.threshold),
                "lower_bound": num(m.lower_bound), "verdict": m.verdict.to_string(),
            })).collect::<Vec<_>>(),
        })
    });
    json!({
        "version": FORMAT_VERSION,
        "lambda_tot": num(r.lambda_tot),
        "confidence_level": num(r.confidence.as_f64()),
        "k": num(r.k),
        "propagation_mode": r.mode.to_string(),
        "spfm": {
            "value": num(r.spfm),
            "sigma": sigmas_json(&r.sigma_spfm),
            "interval": interval_json(&r.interval_spfm),
        },
        "lfm": lfm,
        "lfm_note": r.lfm_note,
        "eii": { "entries": entries, "note": r.eii.note },
        "eii_totals": totals,
        "failure_modes": failure_modes,
        "asil": asil,
    })
}

pub fn emit_result(r: &AnalysisResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&result_to_json(r)).expect("json value");
            s.push('\n');
            s
        }
        OutputFormat::Markdown => markdown(r),
        OutputFormat::Csv => csv(r),
    }
}

struct ModeRow<'a> {
    part: &'a str,
    subpart: &'a str,
    id: &'a str,
    lambda: f64,
    sigma_lambda: f64,
    dc: f64,
    sigma_dc: f64,
    eii_dc: f64,
    eii_lambda: f64,
}

fn mode_rows(r: &AnalysisResult) -> Vec<ModeRow<'_>> {
    r.modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let share = |input| {
                r.eii
                    .entries
                    .iter()
                    .find(|e| e.mode_index == i && e.input == input)
                    .map_or(0.0, |e| e.percent)
            };
            ModeRow {
                part: &m.part,
                subpart: &m.subpart,
                id: &m.id,
                lambda: m.lambda,
                sigma_lambda: m.sigma_lambda,
                dc: m.dc,
                sigma_dc: m.sigma_dc,
                eii_dc: share(EiiInput::Dc),
                eii_lambda: share(EiiInput::LambdaFm),
            }
        })
        .collect()
}

fn interval_text(i: &Interval) -> String {
    let mut s = format!("[{:.6}, {:.6}]", i.lo, i.hi);
    if i.clamped {
        s.push_str(" (clamped)");
    }
    s
}

fn summary(r: &AnalysisResult) -> Vec<(String, String)> {
    let pct = (r.confidence.as_f64() * 100.0).round();
    let mut rows = vec![
        ("λ_tot (FIT)".to_string(), fmt_num(r.lambda_tot)),
        ("SPFM".into(), format!("{:.6}", r.spfm)),
        ("σ_SPFM (full)".into(), format!("{:.6}", r.sigma_spfm.full)),
        ("σ_SPFM (DC only)".into(), format!("{:.6}", r.sigma_spfm.dc_only)),
        ("σ_SPFM (λ only)".into(), format!("{:.6}", r.sigma_spfm.lambda_only)),
        (
            format!("SPFM interval ({pct}%, {}, k = {})", r.mode, r.k),
            interval_text(&r.interval_spfm),
        ),
    ];
    match (r.lfm, r.sigma_lfm, r.interval_lfm) {
        (Some(v), Some(s), Some(i)) => {
            rows.push(("LFM".into(), format!("{v:.6}")));
            rows.push(("σ_LFM (full)".into(), format!("{:.6}", s.full)));
            rows.push(("σ_LFM (DC only)".into(), format!("{:.6}", s.dc_only)));
            rows.push(("σ_LFM (λ only)".into(), format!("{:.6}", s.lambda_only)));
            rows.push((
                format!("LFM interval ({pct}%, {}, k = {})", r.mode, r.k),
                interval_text(&i),
            ));
        }
        _ => rows.push((
            "LFM".into(),
            r.lfm_note.clone().unwrap_or_else(|| "undefined".into()),
        )),
    }
    match &r.asil {
        Some(a) => {
            rows.push(("ASIL target".into(), a.target.to_string()));
            for m in &a.metrics {
                rows.push((
                    format!("{} verdict (≥ {})", m.kind, m.threshold),
                    format!("{} (lower bound {:.6})", m.verdict, m.lower_bound),
                ));
            }
            rows.push(("ASIL verdict".into(), a.overall.to_string()));
        }
        None => rows.push(("ASIL target".into(), "none".into())),
    }
    rows
}

fn markdown(r: &AnalysisResult) -> String {
    let mut s = String::new();
    s.push_str("# FMEDA uncertainty report\n\n");
    s.push_str(
        "| Part | Subpart | Failure mode | λfm (FIT) | σ_λfm (FIT) | DC | σ_DC | EII σ_DC (%) | EII σ_λfm (%) | Total EII (%) |\n",
    );
    s.push_str("|---|---|---|---:|---:|---:|---:|---:|---:|---:|\n");
    for row in mode_rows(r) {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {:.2} | {:.2} | {:.2} |",
            row.part,
            row.subpart,
            row.id,
            fmt_num(row.lambda),
            fmt_num(row.sigma_lambda),
            fmt_num(row.dc),
            fmt_num(row.sigma_dc),
            row.eii_dc,
            row.eii_lambda,
            row.eii_dc + row.eii_lambda,
        );
    }
    if let Some(note) = &r.eii.note {
        let _ = writeln!(s, "\n_{note}_");
    }
    s.push_str("\n## Summary\n\n| Quantity | Value |\n|---|---|\n");
    for (k, v) in summary(r) {
        let _ = writeln!(s, "| {k} | {v} |");
    }
    s
}

fn csv(r: &AnalysisResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |fields: &[String]| w.write_record(fields).expect("writing to memory");
    put(&[
        "part", "subpart", "failure_mode", "lambda_fit", "sigma_lambda_fit", "dc", "sigma_dc",
        "eii_dc_percent", "eii_lambda_percent", "eii_total_percent",
    ]
    .map(String::from));
    for row in mode_rows(r) {
        put(&[
            row.part.to_string(),
            row.subpart.to_string(),
            row.id.to_string(),
            fmt_num(row.lambda),
            fmt_num(row.sigma_lambda),
            fmt_num(row.dc),
            fmt_num(row.sigma_dc),
            format!("{:.2}", row.eii_dc),
            format!("{:.2}", row.eii_lambda),
            format!("{:.2}", row.eii_dc + row.eii_lambda),
        ]);
    }
    let mut out = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
    out.push('\n');
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"]).expect("writing to memory");
    for (k, v) in summary(r) {
        w.write_record([k, v]).expect("writing to memory");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
    out
}
