//! Sizing of statistical fault-injection campaigns and conversion of a
//! campaign's margin of error into a coverage standard deviation.
//!
//! The number of faults to inject out of a fault list of `N` is
//!
//! ```text
//! n = N / (1 + e²·(N - 1) / (t²·p·(1 - p)))
//! ```
//!
//! rounded up (never undersample) and capped at `N`. `p = 0.5` maximizes
//! `n`, which makes it the safe default when the proportion is unknown.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ConfidenceLevel, DcSource, FmedaTable};

pub const DEFAULT_PROPORTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSizePlan {
    pub population: u64,
    pub proportion: f64,
    pub margin: f64,
    #[serde(serialize_with = "serialize_level")]
    pub confidence_level: ConfidenceLevel,
    pub cutoff: f64,
    pub sample_size: u64,
}

fn serialize_level<S: serde::Serializer>(c: &ConfidenceLevel, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(c.as_f64())
}

pub fn sample_size(
    population: u64,
    margin: f64,
    confidence_level: ConfidenceLevel,
    proportion: f64,
) -> Result<SampleSizePlan> {
    if population < 1 {
        return Err(Error::out_of_range("population", population));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::out_of_range("margin", margin));
    }
    if !(proportion > 0.0 && proportion < 1.0) {
        return Err(Error::out_of_range("proportion", proportion));
    }
    let t = confidence_level.cutoff();
    let n_pop = population as f64;
    let exact = n_pop / (1.0 + margin * margin * (n_pop - 1.0) / (t * t * proportion * (1.0 - proportion)));
    let mut n = exact.ceil();
    // Round-off must not push an exact integer up by one.
    if n - exact > 1.0 - 1e-9 * exact.max(1.0) {
        n -= 1.0;
    }
    let sample_size = (n as u64).clamp(1, population);
    Ok(SampleSizePlan {
        population,
        proportion,
        margin,
        confidence_level,
        cutoff: t,
        sample_size,
    })
}

/// Standard deviation of a coverage measured with margin of error `margin`
/// at `confidence_level`: the margin is read as a `t·σ` half-width, so
/// `σ = e / t`.
pub fn margin_to_sigma(margin: f64, confidence_level: ConfidenceLevel) -> Result<f64> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::out_of_range("margin", margin));
    }
    Ok(margin / confidence_level.cutoff())
}

/// Fills in σ_DC for rows whose coverage was measured by fault simulation
/// and that carry no explicit σ_DC.
pub fn apply_faultsim_sigmas(table: &FmedaTable) -> FmedaTable {
    let mut out = table.clone();
    for fm in out.failure_modes_mut() {
        if let DcSource::FaultSimulation { margin, confidence } = fm.dc_source {
            if fm.sigma_dc == 0.0 {
                if let Ok(sigma) = margin_to_sigma(margin, confidence) {
                    fm.sigma_dc = sigma;
                }
            }
        }
    }
    out
}
