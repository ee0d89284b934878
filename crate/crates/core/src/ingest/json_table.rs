//! Nested JSON table format, `fmeda-uq/1`.
//!
//! ```json
//! {"version":"fmeda-uq/1","asil_target":"B","parts":[{"name":"CPU","subparts":[
//!   {"name":"EXEC","lambda_fit":200,"fmd_mode":"Distribution","failure_modes":[
//!     {"id":"FM1","fmd_fraction":0.25,"sigma_fmd":0.01,"dc":0.9,"sigma_dc":0.02,
//!      "dc_source":"expert","safety_mechanisms":["SM1"]}]}]}]}
//! ```
//!
//! `fmd_mode` defaults to the kind of rate on the first failure mode and a
//! missing `name` defaults to the id.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    validate, Asil, DcSource, FailureModeRow, FailureRate, FmdMode, FmedaTable, Part, Subpart,
};

pub const FORMAT_VERSION: &str = "fmeda-uq/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    asil_target: Option<String>,
    parts: Vec<PartDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartDoc {
    name: String,
    subparts: Vec<SubpartDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubpartDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_fit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fmd_mode: Option<FmdModeDoc>,
    failure_modes: Vec<FailureModeDoc>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum FmdModeDoc {
    DirectLambda,
    Distribution,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FailureModeDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_fit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_lambda_fit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fmd_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_fmd: Option<f64>,
    dc: f64,
    #[serde(default)]
    sigma_dc: f64,
    #[serde(default)]
    dc_latent: f64,
    #[serde(default)]
    sigma_dc_latent: f64,
    dc_source: String,
    #[serde(default)]
    safety_mechanisms: Vec<String>,
}

fn schema(path: String, message: impl Into<String>) -> Error {
    Error::Schema {
        path,
        message: message.into(),
    }
}

/// Parses and validates a JSON table.
pub fn parse_json(text: &str) -> Result<FmedaTable> {
    let doc: TableDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(schema(
            "version".into(),
            format!("expected `{FORMAT_VERSION}`, found `{}`", doc.version),
        ));
    }
    let asil_target = doc
        .asil_target
        .as_deref()
        .map(|s| s.parse::<Asil>().map_err(|e| schema("asil_target".into(), e.to_string())))
        .transpose()?;

    let mut parts = Vec::with_capacity(doc.parts.len());
    for (pi, p) in doc.parts.into_iter().enumerate() {
        let mut subparts = Vec::with_capacity(p.subparts.len());
        for (si, s) in p.subparts.into_iter().enumerate() {
            let mut failure_modes = Vec::with_capacity(s.failure_modes.len());
            for (fi, f) in s.failure_modes.into_iter().enumerate() {
                let path = format!("parts[{pi}].subparts[{si}].failure_modes[{fi}]");
                let rate = match (f.lambda_fit, f.fmd_fraction) {
                    (Some(lambda), None) => {
                        if f.sigma_fmd.is_some() {
                            return Err(schema(path, "sigma_fmd given on a lambda_fit row"));
                        }
                        FailureRate::Fit {
                            lambda,
                            sigma: f.sigma_lambda_fit.unwrap_or(0.0),
                        }
                    }
                    (None, Some(fmd)) => {
                        if f.sigma_lambda_fit.is_some() {
                            return Err(schema(path, "sigma_lambda_fit given on an fmd_fraction row"));
                        }
                        FailureRate::Fraction {
                            fmd,
                            sigma: f.sigma_fmd.unwrap_or(0.0),
                        }
                    }
                    _ => return Err(schema(path, "exactly one of lambda_fit and fmd_fraction is required")),
                };
                let dc_source = f
                    .dc_source
                    .parse::<DcSource>()
                    .map_err(|m| schema(format!("{path}.dc_source"), m))?;
                failure_modes.push(FailureModeRow {
                    name: f.name.unwrap_or_else(|| f.id.clone()),
                    id: f.id,
                    rate,
                    dc: f.dc,
                    sigma_dc: f.sigma_dc,
                    dc_latent: f.dc_latent,
                    sigma_dc_latent: f.sigma_dc_latent,
                    dc_source,
                    safety_mechanisms: f.safety_mechanisms,
                });
            }
            let fmd_mode = match s.fmd_mode {
                Some(FmdModeDoc::DirectLambda) => FmdMode::DirectLambda,
                Some(FmdModeDoc::Distribution) => FmdMode::Distribution,
                None => match failure_modes.first().map(|f| f.rate) {
                    Some(FailureRate::Fraction { .. }) => FmdMode::Distribution,
                    _ => FmdMode::DirectLambda,
                },
            };
            subparts.push(Subpart {
                name: s.name,
                lambda_subpart: s.lambda_fit,
                fmd_mode,
                failure_modes,
            });
        }
        parts.push(Part {
            name: p.name,
            subparts,
        });
    }

    let table = FmedaTable { parts, asil_target };
    let violations = validate(&table);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    Ok(table)
}

/// Writes `table` as pretty-printed JSON at full numeric precision.
pub fn emit_json(table: &FmedaTable) -> String {
    let doc = TableDoc {
        version: FORMAT_VERSION.into(),
        asil_target: table.asil_target.map(|a| a.to_string()),
        parts: table
            .parts
            .iter()
            .map(|p| PartDoc {
                name: p.name.clone(),
                subparts: p
                    .subparts
                    .iter()
                    .map(|s| SubpartDoc {
                        name: s.name.clone(),
                        lambda_fit: s.lambda_subpart,
                        fmd_mode: Some(match s.fmd_mode {
                            FmdMode::DirectLambda => FmdModeDoc::DirectLambda,
                            FmdMode::Distribution => FmdModeDoc::Distribution,
                        }),
                        failure_modes: s.failure_modes.iter().map(failure_mode_doc).collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("table serializes")
}

fn failure_mode_doc(f: &FailureModeRow) -> FailureModeDoc {
    let (lambda_fit, sigma_lambda_fit, fmd_fraction, sigma_fmd) = match f.rate {
        FailureRate::Fit { lambda, sigma } => (Some(lambda), Some(sigma), None, None),
        FailureRate::Fraction { fmd, sigma } => (None, None, Some(fmd), Some(sigma)),
    };
    FailureModeDoc {
        id: f.id.clone(),
        name: Some(f.name.clone()),
        lambda_fit,
        sigma_lambda_fit,
        fmd_fraction,
        sigma_fmd,
        dc: f.dc,
        sigma_dc: f.sigma_dc,
        dc_latent: f.dc_latent,
        sigma_dc_latent: f.sigma_dc_latent,
        dc_source: f.dc_source.to_string(),
        safety_mechanisms: f.safety_mechanisms.clone(),
    }
}
