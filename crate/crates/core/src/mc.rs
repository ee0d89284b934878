//! Monte Carlo check of the closed-form propagation.
//!
//! Every sample perturbs each uncertain input independently with a normal
//! draw around its nominal value, evaluates the metric with λ_tot held at its
//! nominal value, and the sample standard deviation of the metric is compared
//! with the analytic σ.
//!
//! Samples are drawn in fixed-size batches. Batch `b` uses a ChaCha8 stream
//! seeded from the configured seed with stream number `b`, and batch
//! statistics are merged in batch order, so the result is bit-identical no
//! matter how many threads run the batches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{self, MetricKind};
use crate::model::{FlatMode, FlatTable};
use crate::uncertainty::{self, PropagationMode};

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), one stream per 8192-sample batch; ziggurat standard normal";

/// Relative tolerance for the SPFM check.
pub const SPFM_TOLERANCE: f64 = 0.03;
/// The LFM is nonlinear in its inputs, so first-order propagation carries a
/// genuine truncation error.
pub const LFM_TOLERANCE: f64 = 0.05;
/// Minimum sample count for a verdict.
pub const MIN_SAMPLES: u64 = 1000;
/// Truncation rate above which the verdict carries a warning.
pub const TRUNCATION_WARNING_RATE: f64 = 1e-3;

const BATCH: u64 = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Clamp coverage draws to `[0, 1]` and rate draws to `[0, ∞)`.
    pub truncate: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            seed: 42,
            truncate: true,
        }
    }
}

/// Empirical spread of a metric under random input perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Empirical {
    /// Sample standard deviation (n - 1 denominator).
    pub sigma: f64,
    /// Fraction of individual draws moved by the clamp.
    pub truncation_rate: f64,
    /// Samples where the metric was undefined and that were skipped.
    pub discarded: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McVerdict {
    pub metric: String,
    pub empirical_sigma: f64,
    pub analytic_sigma: f64,
    pub relative_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub truncation_rate: f64,
    pub discarded_samples: u64,
    pub samples: u64,
    pub seed: u64,
    pub truncate: bool,
    pub rng: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl McVerdict {
    pub fn compare(
        kind: MetricKind,
        empirical: Empirical,
        analytic_sigma: f64,
        tolerance: f64,
        config: &McConfig,
    ) -> Self {
        let gap = if analytic_sigma == 0.0 {
            if empirical.sigma == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (empirical.sigma - analytic_sigma).abs() / analytic_sigma
        };
        let warning = (empirical.truncation_rate >= TRUNCATION_WARNING_RATE).then(|| {
            format!(
                "{:.3}% of draws were clamped at a physical boundary; the comparison is biased",
                empirical.truncation_rate * 100.0
            )
        });
        McVerdict {
            metric: kind.to_string(),
            empirical_sigma: empirical.sigma,
            analytic_sigma,
            relative_gap: gap,
            tolerance,
            pass: gap <= tolerance,
            truncation_rate: empirical.truncation_rate,
            discarded_samples: empirical.discarded,
            samples: config.samples,
            seed: config.seed,
            truncate: config.truncate,
            rng: RNG_ALGORITHM,
            warning,
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    draws: u64,
    clamped: u64,
    discarded: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        let n = self.n + o.n;
        let (mean, m2) = if n == 0 {
            (0.0, 0.0)
        } else {
            let d = o.mean - self.mean;
            (
                self.mean + d * o.n as f64 / n as f64,
                self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
            )
        };
        Moments {
            n,
            mean,
            m2,
            draws: self.draws + o.draws,
            clamped: self.clamped + o.clamped,
            discarded: self.discarded + o.discarded,
        }
    }
}

fn perturb(rng: &mut ChaCha8Rng, mean: f64, sigma: f64, bounds: Option<(f64, f64)>, m: &mut Moments) -> f64 {
    if sigma == 0.0 {
        return mean;
    }
    let z: f64 = rng.sample(StandardNormal);
    let x = mean + sigma * z;
    m.draws += 1;
    match bounds {
        Some((lo, hi)) if x < lo || x > hi => {
            m.clamped += 1;
            x.clamp(lo, hi)
        }
        _ => x,
    }
}

/// Standard deviation of `metric(modes, λ_tot)` over random perturbations
/// of `table`'s inputs. `metric` returns `None` for undefined samples.
pub fn empirical_sigma<F>(table: &FlatTable, config: &McConfig, metric: F) -> Empirical
where
    F: Fn(&[FlatMode], f64) -> Option<f64> + Sync,
{
    let unit = config.truncate.then_some((0.0, 1.0));
    let rate = config.truncate.then_some((0.0, f64::INFINITY));
    let batches = config.samples.div_ceil(BATCH);
    let run_batch = |b: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(b);
        let count = BATCH.min(config.samples - b * BATCH);
        let mut modes = table.modes.clone();
        let mut mom = Moments::default();
        for _ in 0..count {
            for (draw, nominal) in modes.iter_mut().zip(&table.modes) {
                draw.dc = perturb(&mut rng, nominal.dc, nominal.sigma_dc, unit, &mut mom);
                draw.lambda = perturb(&mut rng, nominal.lambda, nominal.sigma_lambda, rate, &mut mom);
                draw.dc_latent =
                    perturb(&mut rng, nominal.dc_latent, nominal.sigma_dc_latent, unit, &mut mom);
            }
            match metric(&modes, table.lambda_tot) {
                Some(v) => mom.push(v),
                None => mom.discarded += 1,
            }
        }
        mom
    };
    let parts: Vec<Moments> = (0..batches).into_par_iter().map(run_batch).collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Empirical {
        sigma: if total.n > 1 {
            (total.m2 / (total.n - 1) as f64).sqrt()
        } else {
            0.0
        },
        truncation_rate: if total.draws > 0 {
            total.clamped as f64 / total.draws as f64
        } else {
            0.0
        },
        discarded: total.discarded,
    }
}

fn check_config(config: &McConfig) -> Result<()> {
    if config.samples < MIN_SAMPLES {
        return Err(Error::out_of_range("samples", config.samples));
    }
    Ok(())
}

pub fn empirical_sigma_spfm(table: &FlatTable, config: &McConfig) -> Empirical {
    empirical_sigma(table, config, metrics::spfm_value)
}

pub fn empirical_sigma_lfm(table: &FlatTable, config: &McConfig) -> Empirical {
    empirical_sigma(table, config, metrics::lfm_value)
}

/// Compares the empirical σ_SPFM with the full closed form.
pub fn mc_sigma_spfm(table: &FlatTable, config: &McConfig) -> Result<McVerdict> {
    check_config(config)?;
    let analytic = uncertainty::sigma_spfm(table, PropagationMode::Full)?;
    let emp = empirical_sigma_spfm(table, config);
    Ok(McVerdict::compare(MetricKind::Spfm, emp, analytic, SPFM_TOLERANCE, config))
}

/// Compares the empirical σ_LFM with the first-order propagation.
pub fn mc_sigma_lfm(table: &FlatTable, config: &McConfig) -> Result<McVerdict> {
    check_config(config)?;
    let analytic = uncertainty::sigma_lfm(table)?;
    let emp = empirical_sigma_lfm(table, config);
    Ok(McVerdict::compare(MetricKind::Lfm, emp, analytic, LFM_TOLERANCE, config))
}
