//! First-order propagation of input standard deviations into σ_SPFM and
//! σ_LFM.
//!
//! Inputs are treated as uncorrelated, so the variance of a metric `M` is
//! `Σ_u (∂M/∂u)²·σ_u²` over every coverage and rate input `u`. The total rate
//! λ_tot is held at its nominal value while the individual rates vary. For the
//! SPFM this gives
//!
//! ```text
//! σ_SPFM = (1/λ_tot)·sqrt( Σ λ_i²·σ_DC_i² + Σ (1 - DC_i)²·σ_λ_i² )
//! ```
//!
//! where [`PropagationMode::DcOnly`] keeps only the first sum and
//! [`PropagationMode::LambdaOnly`] only the second.

use std::fmt;

use crate::error::{Error, Result};
use crate::metrics::{self, Estimate};
use crate::model::{ConfidenceLevel, FlatTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PropagationMode {
    /// Coverage and rate uncertainties.
    #[default]
    Full,
    /// Coverage uncertainties only (rates exact).
    DcOnly,
    /// Rate uncertainties only (coverages exact).
    LambdaOnly,
}

impl PropagationMode {
    pub const ALL: [PropagationMode; 3] = [
        PropagationMode::Full,
        PropagationMode::DcOnly,
        PropagationMode::LambdaOnly,
    ];

    fn weights(self) -> (f64, f64) {
        match self {
            PropagationMode::Full => (1.0, 1.0),
            PropagationMode::DcOnly => (1.0, 0.0),
            PropagationMode::LambdaOnly => (0.0, 1.0),
        }
    }
}

impl fmt::Display for PropagationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropagationMode::Full => "full",
            PropagationMode::DcOnly => "dc-only",
            PropagationMode::LambdaOnly => "lambda-only",
        })
    }
}

/// Per-mode SPFM variance numerators `(λ_i²·σ_DC_i², (1 - DC_i)²·σ_λ_i²)`,
/// before division by λ_tot².
pub fn spfm_variance_terms(table: &FlatTable) -> Vec<(f64, f64)> {
    table
        .modes
        .iter()
        .map(|m| {
            let dc = m.lambda * m.sigma_dc;
            let rate = (1.0 - m.dc) * m.sigma_lambda;
            (dc * dc, rate * rate)
        })
        .collect()
}

fn require_total(table: &FlatTable) -> Result<()> {
    if table.lambda_tot > 0.0 {
        Ok(())
    } else {
        Err(Error::UndefinedMetric(format!(
            "σ_SPFM needs a positive total failure rate, got {}",
            table.lambda_tot
        )))
    }
}

pub fn sigma_spfm(table: &FlatTable, mode: PropagationMode) -> Result<f64> {
    require_total(table)?;
    let (wd, wl) = mode.weights();
    let sum: f64 = spfm_variance_terms(table)
        .into_iter()
        .map(|(d, l)| wd * d + wl * l)
        .sum();
    Ok(sum.sqrt() / table.lambda_tot)
}

/// Partial derivatives of a metric with respect to one mode's inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Partials {
    pub dc: f64,
    pub lambda: f64,
    pub dc_latent: f64,
}

/// ∂SPFM/∂DC_i = λ_i/λ_tot, ∂SPFM/∂λ_i = -(1 - DC_i)/λ_tot.
pub fn spfm_partials(table: &FlatTable) -> Result<Vec<Partials>> {
    require_total(table)?;
    let tot = table.lambda_tot;
    Ok(table
        .modes
        .iter()
        .map(|m| Partials {
            dc: m.lambda / tot,
            lambda: -(1.0 - m.dc) / tot,
            dc_latent: 0.0,
        })
        .collect())
}

/// Analytic LFM partials. With `D = λ_tot - Σ r_j` the non-residual pool:
///
/// ```text
/// ∂LFM/∂DCL_i = DC_i·λ_i / D
/// ∂LFM/∂DC_i  = λ_i·(DCL_i - LFM) / D
/// ∂LFM/∂λ_i   = -((1 - DCL_i)·DC_i + (1 - LFM)·(1 - DC_i)) / D
/// ```
pub fn lfm_partials(table: &FlatTable) -> Result<Vec<Partials>> {
    let lfm = metrics::lfm(table)?.value;
    let pool = table.lambda_tot - metrics::residual_rate(&table.modes);
    Ok(table
        .modes
        .iter()
        .map(|m| Partials {
            dc: m.lambda * (m.dc_latent - lfm) / pool,
            lambda: -((1.0 - m.dc_latent) * m.dc + (1.0 - lfm) * (1.0 - m.dc)) / pool,
            dc_latent: m.dc * m.lambda / pool,
        })
        .collect())
}

/// σ_LFM restricted to `mode`: `DcOnly` covers both coverage inputs (DC and
/// DCL), `LambdaOnly` the rates.
pub fn sigma_lfm_with(table: &FlatTable, mode: PropagationMode) -> Result<f64> {
    let (wd, wl) = mode.weights();
    let var: f64 = lfm_partials(table)?
        .iter()
        .zip(&table.modes)
        .map(|(p, m)| {
            let dc = p.dc * m.sigma_dc;
            let dcl = p.dc_latent * m.sigma_dc_latent;
            let rate = p.lambda * m.sigma_lambda;
            wd * (dc * dc + dcl * dcl) + wl * rate * rate
        })
        .sum();
    Ok(var.sqrt())
}

pub fn sigma_lfm(table: &FlatTable) -> Result<f64> {
    sigma_lfm_with(table, PropagationMode::Full)
}

/// σ of one metric under every propagation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSigmas {
    pub full: f64,
    pub dc_only: f64,
    pub lambda_only: f64,
}

impl ModeSigmas {
    pub fn get(&self, mode: PropagationMode) -> f64 {
        match mode {
            PropagationMode::Full => self.full,
            PropagationMode::DcOnly => self.dc_only,
            PropagationMode::LambdaOnly => self.lambda_only,
        }
    }

    fn compute(f: impl Fn(PropagationMode) -> Result<f64>) -> Result<Self> {
        Ok(ModeSigmas {
            full: f(PropagationMode::Full)?,
            dc_only: f(PropagationMode::DcOnly)?,
            lambda_only: f(PropagationMode::LambdaOnly)?,
        })
    }

    pub fn spfm(table: &FlatTable) -> Result<Self> {
        Self::compute(|m| sigma_spfm(table, m))
    }

    pub fn lfm(table: &FlatTable) -> Result<Self> {
        Self::compute(|m| sigma_lfm_with(table, m))
    }
}

/// `value ± k·σ`, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Set when either bound was moved by the clamp.
    pub clamped: bool,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

pub fn confidence_interval(value: f64, sigma: f64, level: ConfidenceLevel) -> Result<Interval> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::out_of_range("sigma", sigma));
    }
    let k = level.cutoff();
    let (lo, hi) = (value - k * sigma, value + k * sigma);
    let (clo, chi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
    Ok(Interval {
        lo: clo,
        hi: chi,
        clamped: clo != lo || chi != hi,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyResult {
    pub sigma_spfm: f64,
    /// `None` when the LFM itself is undefined.
    pub sigma_lfm: Option<f64>,
    pub mode: PropagationMode,
    pub confidence_level: ConfidenceLevel,
    pub k: f64,
    pub interval_spfm: Interval,
    pub interval_lfm: Option<Interval>,
}

/// σ and confidence intervals of both metrics under one propagation mode.
pub fn propagate(
    table: &FlatTable,
    mode: PropagationMode,
    confidence_level: ConfidenceLevel,
) -> Result<UncertaintyResult> {
    let spfm = Estimate {
        value: metrics::spfm(table)?.value,
        sigma: sigma_spfm(table, mode)?,
    };
    let lfm = match metrics::lfm(table) {
        Ok(v) => Some(Estimate {
            value: v.value,
            sigma: sigma_lfm_with(table, mode)?,
        }),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(UncertaintyResult {
        sigma_spfm: spfm.sigma,
        sigma_lfm: lfm.map(|e| e.sigma),
        mode,
        confidence_level,
        k: confidence_level.cutoff(),
        interval_spfm: confidence_interval(spfm.value, spfm.sigma, confidence_level)?,
        interval_lfm: lfm
            .map(|e| confidence_interval(e.value, e.sigma, confidence_level))
            .transpose()?,
    })
}
