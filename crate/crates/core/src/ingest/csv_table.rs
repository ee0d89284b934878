//! Flat CSV table format.
//!
//! One row per failure mode, with part and subpart repeated as labels.
//! Exactly one of `lambda_fit` and `fmd_fraction` is set per row. On a
//! fraction row `sigma_lambda_fit` is the standard deviation of the fraction
//! itself. A row with an empty `failure_mode`, a `lambda_fit` and nothing
//! else declares the subpart rate, which distribution subparts need.
//!
//! The `failure_mode` column is the failure mode id; the name equals the id.

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};

use crate::error::{Error, Result};
use crate::model::{
    validate, DcSource, FailureModeRow, FailureRate, FmdMode, FmedaTable, Part, Subpart,
};

pub const CSV_COLUMNS: [&str; 12] = [
    "part",
    "subpart",
    "failure_mode",
    "lambda_fit",
    "sigma_lambda_fit",
    "fmd_fraction",
    "dc",
    "sigma_dc",
    "dc_latent",
    "sigma_dc_latent",
    "dc_source",
    "sm_list",
];

const PART: usize = 0;
const SUBPART: usize = 1;
const FAILURE_MODE: usize = 2;
const LAMBDA: usize = 3;
const SIGMA_LAMBDA: usize = 4;
const FMD: usize = 5;
const DC: usize = 6;
const SIGMA_DC: usize = 7;
const DC_LATENT: usize = 8;
const SIGMA_DC_LATENT: usize = 9;
const DC_SOURCE: usize = 10;
const SM_LIST: usize = 11;

struct Row<'a> {
    record: &'a StringRecord,
    line: u64,
}

impl Row<'_> {
    fn err(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: CSV_COLUMNS[col].into(),
            message: message.into(),
        }
    }

    fn text(&self, col: usize) -> &str {
        self.record.get(col).unwrap_or("")
    }

    fn required_text(&self, col: usize) -> Result<&str> {
        match self.text(col) {
            "" => Err(self.err(col, "value required")),
            s => Ok(s),
        }
    }

    fn number(&self, col: usize) -> Result<Option<f64>> {
        match self.text(col) {
            "" => Ok(None),
            s => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.err(col, format!("`{s}` is not a number"))),
        }
    }

    fn required_number(&self, col: usize) -> Result<f64> {
        self.number(col)?.ok_or_else(|| self.err(col, "value required"))
    }
}

/// Parses and validates a CSV table. Row order is preserved; parts and
/// subparts appear in order of first mention.
pub fn parse_csv(text: &str) -> Result<FmedaTable> {
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .trim(Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader.headers()?.clone();
    if header.iter().all(str::is_empty) {
        return Err(Error::NoDataRows);
    }
    for (i, name) in header.iter().enumerate() {
        if CSV_COLUMNS.get(i) != Some(&name) {
            let message = if CSV_COLUMNS.contains(&name) {
                format!("column out of order; expected `{}`", CSV_COLUMNS.get(i).unwrap_or(&""))
            } else {
                "unknown column".to_string()
            };
            return Err(Error::Parse {
                line: 1,
                column: name.into(),
                message,
            });
        }
    }
    if header.len() < CSV_COLUMNS.len() {
        return Err(Error::Parse {
            line: 1,
            column: CSV_COLUMNS[header.len()].into(),
            message: "missing column".into(),
        });
    }

    let mut table = FmedaTable::default();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != CSV_COLUMNS.len() {
            return Err(Error::Parse {
                line,
                column: CSV_COLUMNS[record.len().min(CSV_COLUMNS.len() - 1)].into(),
                message: format!("expected {} fields, found {}", CSV_COLUMNS.len(), record.len()),
            });
        }
        rows += 1;
        let row = Row {
            record: &record,
            line,
        };
        let part = row.required_text(PART)?;
        let subpart = row.required_text(SUBPART)?;
        let sub = subpart_entry(&mut table, part, subpart);

        if row.text(FAILURE_MODE).is_empty() {
            let lambda = row.required_number(LAMBDA)?;
            for col in [SIGMA_LAMBDA, FMD, DC, SIGMA_DC, DC_LATENT, SIGMA_DC_LATENT, DC_SOURCE, SM_LIST] {
                if !row.text(col).is_empty() {
                    return Err(row.err(col, "must be empty on a subpart rate row"));
                }
            }
            if sub.lambda_subpart.is_some() {
                return Err(row.err(LAMBDA, "subpart rate declared twice"));
            }
            sub.lambda_subpart = Some(lambda);
            continue;
        }

        let sigma_rate = row.number(SIGMA_LAMBDA)?.unwrap_or(0.0);
        let rate = match (row.number(LAMBDA)?, row.number(FMD)?) {
            (Some(lambda), None) => FailureRate::Fit {
                lambda,
                sigma: sigma_rate,
            },
            (None, Some(fmd)) => FailureRate::Fraction {
                fmd,
                sigma: sigma_rate,
            },
            (Some(_), Some(_)) => {
                return Err(row.err(FMD, "set either lambda_fit or fmd_fraction, not both"))
            }
            (None, None) => return Err(row.err(LAMBDA, "either lambda_fit or fmd_fraction is required")),
        };
        let dc_source = row
            .required_text(DC_SOURCE)?
            .parse::<DcSource>()
            .map_err(|m| row.err(DC_SOURCE, m))?;
        let safety_mechanisms = row
            .text(SM_LIST)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        let id = row.text(FAILURE_MODE).to_string();
        if sub.failure_modes.is_empty() {
            sub.fmd_mode = match rate {
                FailureRate::Fit { .. } => FmdMode::DirectLambda,
                FailureRate::Fraction { .. } => FmdMode::Distribution,
            };
        }
        sub.failure_modes.push(FailureModeRow {
            name: id.clone(),
            id,
            rate,
            dc: row.required_number(DC)?,
            sigma_dc: row.number(SIGMA_DC)?.unwrap_or(0.0),
            dc_latent: row.number(DC_LATENT)?.unwrap_or(0.0),
            sigma_dc_latent: row.number(SIGMA_DC_LATENT)?.unwrap_or(0.0),
            dc_source,
            safety_mechanisms,
        });
    }
    if rows == 0 {
        return Err(Error::NoDataRows);
    }

    let violations = validate(&table);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    Ok(table)
}

fn subpart_entry<'t>(table: &'t mut FmedaTable, part: &str, subpart: &str) -> &'t mut Subpart {
    let pi = match table.parts.iter().position(|p| p.name == part) {
        Some(i) => i,
        None => {
            table.parts.push(Part {
                name: part.into(),
                subparts: Vec::new(),
            });
            table.parts.len() - 1
        }
    };
    let subs = &mut table.parts[pi].subparts;
    let si = match subs.iter().position(|s| s.name == subpart) {
        Some(i) => i,
        None => {
            subs.push(Subpart::direct(subpart, Vec::new()));
            subs.len() - 1
        }
    };
    &mut subs[si]
}

/// Writes `table` as CSV. Failure mode names are not part of the format.
pub fn emit_csv(table: &FmedaTable) -> String {
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, fields: [String; 12]| {
        w.write_record(&fields).expect("writing to memory");
    };
    write(&mut w, CSV_COLUMNS.map(String::from));
    for part in &table.parts {
        for sub in &part.subparts {
            if let Some(l) = sub.lambda_subpart {
                let mut fields: [String; 12] = Default::default();
                fields[PART] = part.name.clone();
                fields[SUBPART] = sub.name.clone();
                fields[LAMBDA] = l.to_string();
                write(&mut w, fields);
            }
            for fm in &sub.failure_modes {
                let mut fields: [String; 12] = Default::default();
                fields[PART] = part.name.clone();
                fields[SUBPART] = sub.name.clone();
                fields[FAILURE_MODE] = fm.id.clone();
                match fm.rate {
                    FailureRate::Fit { lambda, sigma } => {
                        fields[LAMBDA] = lambda.to_string();
                        fields[SIGMA_LAMBDA] = sigma.to_string();
                    }
                    FailureRate::Fraction { fmd, sigma } => {
                        fields[FMD] = fmd.to_string();
                        fields[SIGMA_LAMBDA] = sigma.to_string();
                    }
                }
                fields[DC] = fm.dc.to_string();
                fields[SIGMA_DC] = fm.sigma_dc.to_string();
                fields[DC_LATENT] = fm.dc_latent.to_string();
                fields[SIGMA_DC_LATENT] = fm.sigma_dc_latent.to_string();
                fields[DC_SOURCE] = fm.dc_source.to_string();
                fields[SM_LIST] = fm.safety_mechanisms.join(";");
                write(&mut w, fields);
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}
