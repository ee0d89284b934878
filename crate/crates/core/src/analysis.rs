//! One-call analysis of a table: metrics, σ under every propagation mode,
//! intervals, error importance and the ASIL verdict.

use crate::eii::{self, EiiTable};
use crate::error::{Error, Result};
use crate::metrics::{self, AsilThresholds, AsilVerdict, Estimate};
use crate::model::{Asil, ConfidenceLevel, FlatMode, FmedaTable};
use crate::uncertainty::{confidence_interval, Interval, ModeSigmas, PropagationMode};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub confidence: ConfidenceLevel,
    /// Propagation mode whose σ drives the intervals and the verdict.
    pub mode: PropagationMode,
    /// Overrides the table's own target.
    pub asil: Option<Asil>,
    pub thresholds: AsilThresholds,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            confidence: ConfidenceLevel::P95,
            mode: PropagationMode::Full,
            asil: None,
            thresholds: AsilThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    /// Failure modes in table order, rates in FIT.
    pub modes: Vec<FlatMode>,
    pub lambda_tot: f64,
    pub spfm: f64,
    pub sigma_spfm: ModeSigmas,
    pub lfm: Option<f64>,
    pub sigma_lfm: Option<ModeSigmas>,
    /// Why the LFM is missing, when it is.
    pub lfm_note: Option<String>,
    pub mode: PropagationMode,
    pub confidence: ConfidenceLevel,
    pub k: f64,
    pub interval_spfm: Interval,
    pub interval_lfm: Option<Interval>,
    pub eii: EiiTable,
    /// Total EII percentage per failure mode id, table order.
    pub eii_totals: Vec<(String, f64)>,
    pub asil: Option<AsilVerdict>,
}

impl AnalysisResult {
    pub fn spfm_estimate(&self) -> Estimate {
        Estimate {
            value: self.spfm,
            sigma: self.sigma_spfm.get(self.mode),
        }
    }

    pub fn lfm_estimate(&self) -> Option<Estimate> {
        Some(Estimate {
            value: self.lfm?,
            sigma: self.sigma_lfm?.get(self.mode),
        })
    }
}

pub fn analyze(table: &FmedaTable, options: &AnalysisOptions) -> Result<AnalysisResult> {
    let flat = table.flatten()?;
    let spfm = metrics::spfm(&flat)?.value;
    let sigma_spfm = ModeSigmas::spfm(&flat)?;
    let (lfm, sigma_lfm, lfm_note) = match metrics::lfm(&flat) {
        Ok(v) => (Some(v.value), Some(ModeSigmas::lfm(&flat)?), None),
        Err(Error::UndefinedMetric(msg)) => (None, None, Some(msg)),
        Err(e) => return Err(e),
    };
    let eii = eii::eii_table(&flat)?;
    let eii_totals = eii::total_per_failure_mode(&eii.entries);

    let mode = options.mode;
    let confidence = options.confidence;
    let interval_spfm = confidence_interval(spfm, sigma_spfm.get(mode), confidence)?;
    let interval_lfm = match (lfm, sigma_lfm) {
        (Some(v), Some(s)) => Some(confidence_interval(v, s.get(mode), confidence)?),
        _ => None,
    };

    let mut result = AnalysisResult {
        lambda_tot: flat.lambda_tot,
        modes: flat.modes,
        spfm,
        sigma_spfm,
        lfm,
        sigma_lfm,
        lfm_note,
        mode,
        confidence,
        k: confidence.cutoff(),
        interval_spfm,
        interval_lfm,
        eii,
        eii_totals,
        asil: None,
    };
    result.asil = options.asil.or(table.asil_target).map(|target| {
        metrics::asil_verdict(
            result.spfm_estimate(),
            result.lfm_estimate(),
            target,
            &options.thresholds,
            confidence,
        )
    });
    Ok(result)
}
