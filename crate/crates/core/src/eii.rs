//! Error Importance Identifier: which input uncertainty drives σ_SPFM.
//!
//! For a coverage input the raw identifier is
//! `EII_DC_i = λ_i²·σ_DC_i² / (λ_tot²·σ_SPFM)` and for a rate input
//! `EII_λ_i = (1 - DC_i)²·σ_λ_i² / (λ_tot²·σ_SPFM)`. Because the denominator
//! carries σ_SPFM to the first power the raw values do not add up to anything
//! meaningful, so every entry also carries its share of the SPFM variance
//! (same numerator over `λ_tot²·σ_SPFM²`). Shares sum to one and rank the
//! entries in the same order as the raw values.

use std::cmp::Ordering;
use std::fmt;

use crate::error::Result;
use crate::model::FlatTable;
use crate::uncertainty::{self, PropagationMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EiiInput {
    Dc,
    LambdaFm,
}

impl fmt::Display for EiiInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EiiInput::Dc => "dc",
            EiiInput::LambdaFm => "lambda_fm",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EiiEntry {
    /// Position of the failure mode in table order.
    pub mode_index: usize,
    pub failure_mode_id: String,
    pub input: EiiInput,
    pub raw_eii: f64,
    pub variance_share: f64,
    pub percent: f64,
    numerator: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EiiTable {
    /// Sorted by descending variance share, ties in table order.
    pub entries: Vec<EiiEntry>,
    pub sigma_spfm: f64,
    /// Explains an empty table.
    pub note: Option<String>,
}

pub const NO_UNCERTAINTY_NOTE: &str = "no uncertainty to attribute: σ_SPFM is zero";

/// One entry per failure mode and input kind with a nonzero σ.
pub fn eii_table(table: &FlatTable) -> Result<EiiTable> {
    let sigma = uncertainty::sigma_spfm(table, PropagationMode::Full)?;
    if sigma == 0.0 {
        return Ok(EiiTable {
            entries: Vec::new(),
            sigma_spfm: 0.0,
            note: Some(NO_UNCERTAINTY_NOTE.into()),
        });
    }
    let tot2 = table.lambda_tot * table.lambda_tot;
    let var_num: f64 = uncertainty::spfm_variance_terms(table)
        .iter()
        .map(|(d, l)| d + l)
        .sum();

    let mut entries = Vec::new();
    for (i, ((dc_term, rate_term), m)) in uncertainty::spfm_variance_terms(table)
        .into_iter()
        .zip(&table.modes)
        .enumerate()
    {
        for (input, num, input_sigma) in [
            (EiiInput::Dc, dc_term, m.sigma_dc),
            (EiiInput::LambdaFm, rate_term, m.sigma_lambda),
        ] {
            if input_sigma == 0.0 {
                continue;
            }
            let share = num / var_num;
            entries.push(EiiEntry {
                mode_index: i,
                failure_mode_id: m.id.clone(),
                input,
                raw_eii: num / (tot2 * sigma),
                variance_share: share,
                percent: share * 100.0,
                numerator: num,
            });
        }
    }
    // Ordering on the shared numerator is the ordering of both the raw values
    // and the shares; it avoids ties introduced by rounding either division.
    entries.sort_by(|a, b| {
        b.numerator
            .partial_cmp(&a.numerator)
            .unwrap_or(Ordering::Equal)
            .then(a.mode_index.cmp(&b.mode_index))
            .then((a.input == EiiInput::LambdaFm).cmp(&(b.input == EiiInput::LambdaFm)))
    });
    Ok(EiiTable {
        entries,
        sigma_spfm: sigma,
        note: None,
    })
}

/// Total percentage per failure mode (coverage plus rate contribution), in
/// table order.
pub fn total_per_failure_mode(entries: &[EiiEntry]) -> Vec<(String, f64)> {
    let mut totals: Vec<(usize, String, f64)> = Vec::new();
    for e in entries {
        match totals.iter_mut().find(|(i, _, _)| *i == e.mode_index) {
            Some((_, _, p)) => *p += e.percent,
            None => totals.push((e.mode_index, e.failure_mode_id.clone(), e.percent)),
        }
    }
    totals.sort_by_key(|(i, _, _)| *i);
    totals.into_iter().map(|(_, id, p)| (id, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FlatMode;

    fn mode(id: &str, lambda: f64, dc: f64, sigma_dc: f64, sigma_lambda: f64) -> FlatMode {
        FlatMode {
            id: id.into(),
            sigma_dc,
            sigma_lambda,
            ..FlatMode::new(lambda, dc)
        }
    }

    #[test]
    fn two_mode_shares() {
        let t = FlatTable::new(vec![
            mode("FM1", 50.0, 0.9, 0.02, 0.0),
            mode("FM2", 50.0, 0.99, 0.001, 0.0),
        ]);
        let eii = eii_table(&t).unwrap();
        assert_eq!(eii.entries.len(), 2);
        assert_eq!(eii.entries[0].failure_mode_id, "FM1");
        // 0.0004 / (0.0004 + 1e-6) and 1e-6 / (0.0004 + 1e-6)
        assert!((eii.entries[0].variance_share - 0.0004 / 0.000401).abs() < 1e-15);
        assert!((eii.entries[0].percent - 99.75).abs() < 0.01);
        assert!((eii.entries[1].percent - 0.25).abs() < 0.01);

        let totals = total_per_failure_mode(&eii.entries);
        assert_eq!(totals[0].0, "FM1");
        assert!((totals[0].1 - 99.7506).abs() < 1e-4);
        assert!((totals[1].1 - 0.2494).abs() < 1e-4);
    }

    #[test]
    fn raw_value_uses_first_power_of_sigma() {
        let t = FlatTable::new(vec![mode("a", 50.0, 0.9, 0.02, 0.0), mode("b", 50.0, 0.99, 0.001, 0.0)]);
        let eii = eii_table(&t).unwrap();
        let sigma = eii.sigma_spfm;
        let expected = 50.0f64.powi(2) * 0.02f64.powi(2) / (100.0f64.powi(2) * sigma);
        assert!((eii.entries[0].raw_eii - expected).abs() < 1e-12);
    }

    #[test]
    fn sole_contributor_takes_everything() {
        let t = FlatTable::new(vec![mode("a", 10.0, 0.5, 0.0, 1.0), mode("b", 30.0, 0.5, 0.0, 0.0)]);
        let eii = eii_table(&t).unwrap();
        assert_eq!(eii.entries.len(), 1);
        assert_eq!(eii.entries[0].input, EiiInput::LambdaFm);
        assert_eq!(eii.entries[0].variance_share, 1.0);
    }

    #[test]
    fn symmetric_table_splits_evenly() {
        let t = FlatTable::new(vec![mode("a", 40.0, 0.9, 0.01, 0.0), mode("b", 40.0, 0.9, 0.01, 0.0)]);
        let eii = eii_table(&t).unwrap();
        assert_eq!(eii.entries[0].percent, 50.0);
        assert_eq!(eii.entries[1].percent, 50.0);
        assert_eq!(eii.entries[0].failure_mode_id, "a");
    }

    #[test]
    fn no_uncertainty_yields_note() {
        let t = FlatTable::new(vec![mode("a", 40.0, 0.9, 0.0, 0.0)]);
        let eii = eii_table(&t).unwrap();
        assert!(eii.entries.is_empty());
        assert_eq!(eii.note.as_deref(), Some(NO_UNCERTAINTY_NOTE));
    }

    #[test]
    fn totals_add_both_inputs() {
        let e = |input, percent| EiiEntry {
            mode_index: 0,
            failure_mode_id: "x".into(),
            input,
            raw_eii: 0.0,
            variance_share: percent / 100.0,
            percent,
            numerator: 0.0,
        };
        let totals = total_per_failure_mode(&[e(EiiInput::Dc, 30.0), e(EiiInput::LambdaFm, 10.0)]);
        assert_eq!(totals, vec![("x".to_string(), 40.0)]);
    }

    #[test]
    fn removing_an_input_rescales_the_rest() {
        let mut modes = vec![
            mode("a", 10.0, 0.5, 0.02, 1.0),
            mode("b", 30.0, 0.8, 0.01, 2.0),
            mode("c", 60.0, 0.95, 0.03, 0.0),
        ];
        let before = eii_table(&FlatTable::new(modes.clone())).unwrap();
        modes[1].sigma_lambda = 0.0;
        let after = eii_table(&FlatTable::new(modes)).unwrap();
        let removed = before
            .entries
            .iter()
            .find(|e| e.failure_mode_id == "b" && e.input == EiiInput::LambdaFm)
            .unwrap()
            .variance_share;
        for e in &after.entries {
            let old = before
                .entries
                .iter()
                .find(|o| o.failure_mode_id == e.failure_mode_id && o.input == e.input)
                .unwrap();
            assert!((e.variance_share - old.variance_share / (1.0 - removed)).abs() < 1e-12);
        }
    }
}
