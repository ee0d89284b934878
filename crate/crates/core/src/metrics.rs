//! Nominal SPFM / LFM and ASIL target verdicts.
//!
//! With `r_i = (1 - DC_i)·λ_i` the residual (single point) rate of mode `i`:
//!
//! ```text
//! SPFM = 1 - Σ r_i / λ_tot
//! LFM  = 1 - Σ (1 - DCL_i)·(λ_i - r_i) / (λ_tot - Σ r_i)
//! ```
//!
//! The LFM is the latent residue measured over the pool of faults that are
//! not single point faults.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Asil, ConfidenceLevel, FlatMode, FlatTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Spfm,
    Lfm,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Spfm => "SPFM",
            MetricKind::Lfm => "LFM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub kind: MetricKind,
    pub value: f64,
}

/// Σ (1 - DC_i)·λ_i
pub fn residual_rate(modes: &[FlatMode]) -> f64 {
    modes.iter().map(|m| (1.0 - m.dc) * m.lambda).sum()
}

/// SPFM of `modes` against an explicit total rate. Returns `None` when
/// `lambda_tot` is not positive.
pub fn spfm_value(modes: &[FlatMode], lambda_tot: f64) -> Option<f64> {
    (lambda_tot > 0.0).then(|| 1.0 - residual_rate(modes) / lambda_tot)
}

/// LFM of `modes` against an explicit total rate. Returns `None` when the
/// non-residual pool `lambda_tot - Σ r_i` is not positive.
pub fn lfm_value(modes: &[FlatMode], lambda_tot: f64) -> Option<f64> {
    let pool = lambda_tot - residual_rate(modes);
    if pool.is_nan() || pool <= 0.0 {
        return None;
    }
    let latent: f64 = modes
        .iter()
        .map(|m| (1.0 - m.dc_latent) * (m.lambda - (1.0 - m.dc) * m.lambda))
        .sum();
    Some(1.0 - latent / pool)
}

pub fn spfm(table: &FlatTable) -> Result<MetricValue> {
    let value = spfm_value(&table.modes, table.lambda_tot).ok_or_else(|| {
        Error::UndefinedMetric(format!(
            "SPFM needs a positive total failure rate, got {}",
            table.lambda_tot
        ))
    })?;
    Ok(MetricValue {
        kind: MetricKind::Spfm,
        value,
    })
}

pub fn lfm(table: &FlatTable) -> Result<MetricValue> {
    let value = lfm_value(&table.modes, table.lambda_tot).ok_or_else(|| {
        Error::UndefinedMetric(
            "LFM is undefined: every fault is a residual single point fault, \
             so no multi-point fault remains to be latent"
                .into(),
        )
    })?;
    Ok(MetricValue {
        kind: MetricKind::Lfm,
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Target met even at the lower end of the confidence interval.
    PassRobust,
    /// Nominal value meets the target but the interval reaches below it.
    PassFragile,
    Fail,
}

impl Verdict {
    fn severity(self) -> u8 {
        match self {
            Verdict::PassRobust => 0,
            Verdict::PassFragile => 1,
            Verdict::Fail => 2,
        }
    }

    pub fn worst(self, other: Verdict) -> Verdict {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PassRobust => "PassRobust",
            Verdict::PassFragile => "PassFragile",
            Verdict::Fail => "Fail",
        })
    }
}

/// Minimum SPFM / LFM per ASIL. `None` means the level sets no target.
#[derive(Debug, Clone, PartialEq)]
pub struct AsilThresholds {
    pub a: (Option<f64>, Option<f64>),
    pub b: (Option<f64>, Option<f64>),
    pub c: (Option<f64>, Option<f64>),
    pub d: (Option<f64>, Option<f64>),
}

impl Default for AsilThresholds {
    /// ISO 26262-5 hardware architectural metric targets.
    fn default() -> Self {
        AsilThresholds {
            a: (None, None),
            b: (Some(0.90), Some(0.60)),
            c: (Some(0.97), Some(0.80)),
            d: (Some(0.99), Some(0.90)),
        }
    }
}

impl AsilThresholds {
    /// `(spfm, lfm)` targets for `asil`.
    pub fn targets(&self, asil: Asil) -> (Option<f64>, Option<f64>) {
        match asil {
            Asil::A => self.a,
            Asil::B => self.b,
            Asil::C => self.c,
            Asil::D => self.d,
        }
    }
}

/// A metric value with its standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

pub fn metric_verdict(estimate: Estimate, threshold: f64, k: f64) -> Verdict {
    if estimate.value - k * estimate.sigma >= threshold {
        Verdict::PassRobust
    } else if estimate.value >= threshold {
        Verdict::PassFragile
    } else {
        Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricVerdict {
    pub kind: MetricKind,
    pub threshold: f64,
    pub lower_bound: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsilVerdict {
    pub target: Asil,
    pub metrics: Vec<MetricVerdict>,
    pub overall: Verdict,
}

/// Judges both metrics against the targets of `target`. A metric whose value
/// is unavailable (undefined LFM) or whose level sets no target is skipped.
pub fn asil_verdict(
    spfm: Estimate,
    lfm: Option<Estimate>,
    target: Asil,
    thresholds: &AsilThresholds,
    confidence: ConfidenceLevel,
) -> AsilVerdict {
    let k = confidence.cutoff();
    let (spfm_min, lfm_min) = thresholds.targets(target);
    let metrics: Vec<_> = [
        (MetricKind::Spfm, Some(spfm), spfm_min),
        (MetricKind::Lfm, lfm, lfm_min),
    ]
    .into_iter()
    .filter_map(|(kind, est, min)| {
        let (est, threshold) = (est?, min?);
        Some(MetricVerdict {
            kind,
            threshold,
            lower_bound: est.value - k * est.sigma,
            verdict: metric_verdict(est, threshold, k),
        })
    })
    .collect();
    let overall = metrics
        .iter()
        .fold(Verdict::PassRobust, |acc, m| acc.worst(m.verdict));
    AsilVerdict {
        target,
        metrics,
        overall,
    }
}
