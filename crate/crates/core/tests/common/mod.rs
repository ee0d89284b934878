//! Shared generators and exact-arithmetic oracles for the integration tests.
//!
//! The oracles evaluate the metric definitions in exact rational arithmetic,
//! independently of the library's floating point code paths.
#![allow(dead_code)]

use fmeda_uq::{FlatMode, FlatTable};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random table in the acceptance envelope: 2–50 modes, λ ∈ [0.1, 500] FIT,
/// σ_DC ∈ [0, 0.05], σ_λ ∈ [0, 0.1·λ], coverages anywhere in [0, 1].
pub fn random_table(rng: &mut ChaCha8Rng) -> FlatTable {
    let n = rng.random_range(2..=50);
    let modes = (0..n)
        .map(|i| {
            let lambda = rng.random_range(0.1..=500.0);
            FlatMode {
                id: format!("FM{i}"),
                part: "P".into(),
                subpart: format!("S{}", i % 4),
                lambda,
                sigma_lambda: rng.random_range(0.0..=0.1 * lambda),
                dc: rng.random_range(0.0..=1.0),
                sigma_dc: rng.random_range(0.0..=0.05),
                dc_latent: rng.random_range(0.0..=1.0),
                sigma_dc_latent: rng.random_range(0.0..=0.05),
            }
        })
        .collect();
    FlatTable::new(modes)
}

/// Random table whose every uncertain input sits at least 4σ inside its
/// physical range.
pub fn small_sigma_table(rng: &mut ChaCha8Rng, max_modes: usize) -> FlatTable {
    let n = rng.random_range(2..=max_modes);
    let modes = (0..n)
        .map(|i| {
            let lambda = rng.random_range(0.1..=500.0);
            let dc: f64 = rng.random_range(0.05..=0.995);
            let room = dc.min(1.0 - dc) / 4.0;
            let dcl: f64 = rng.random_range(0.05..=0.95);
            FlatMode {
                id: format!("FM{i}"),
                part: "P".into(),
                subpart: "S".into(),
                lambda,
                sigma_lambda: rng.random_range(0.0..=0.1 * lambda),
                dc,
                sigma_dc: rng.random_range(0.0..=room.min(0.05)),
                dc_latent: dcl,
                sigma_dc_latent: rng.random_range(0.0..=(dcl.min(1.0 - dcl) / 4.0).min(0.02)),
            }
        })
        .collect();
    FlatTable::new(modes)
}

pub fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn q_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact-arithmetic inputs of one failure mode.
#[derive(Clone)]
pub struct ExactMode {
    pub lambda: BigRational,
    pub dc: BigRational,
    pub dc_latent: BigRational,
}

impl ExactMode {
    /// (1 − DC)·λ
    fn residual(&self) -> BigRational {
        (BigRational::one() - &self.dc) * &self.lambda
    }

    /// (1 − DCL)·(λ − (1 − DC)·λ)
    fn latent(&self) -> BigRational {
        (BigRational::one() - &self.dc_latent) * (&self.lambda - self.residual())
    }
}

/// Table in exact arithmetic with its residual and latent sums.
pub struct ExactTable {
    pub modes: Vec<ExactMode>,
    pub lambda_tot: BigRational,
    pub residual: BigRational,
    pub latent: BigRational,
}

impl ExactTable {
    /// λ_tot is taken as the nominal total of `t`, held fixed.
    pub fn new(t: &FlatTable) -> Self {
        let modes: Vec<ExactMode> = t
            .modes
            .iter()
            .map(|m| ExactMode {
                lambda: q(m.lambda),
                dc: q(m.dc),
                dc_latent: q(m.dc_latent),
            })
            .collect();
        let residual = modes.iter().fold(BigRational::zero(), |a, m| a + m.residual());
        let latent = modes.iter().fold(BigRational::zero(), |a, m| a + m.latent());
        ExactTable { modes, lambda_tot: q(t.lambda_tot), residual, latent }
    }

    /// Residual and latent sums with mode `i` replaced by `m`.
    fn sums_with(&self, i: usize, m: &ExactMode) -> (BigRational, BigRational) {
        let old = &self.modes[i];
        (
            &self.residual - old.residual() + m.residual(),
            &self.latent - old.latent() + m.latent(),
        )
    }
}

pub type ExactMetric = fn(&BigRational, &BigRational, &BigRational) -> BigRational;

/// SPFM = 1 − Σ(1 − DC)·λ / λ_tot, from (residual, latent, λ_tot).
pub fn exact_spfm(residual: &BigRational, _latent: &BigRational, tot: &BigRational) -> BigRational {
    BigRational::one() - residual / tot
}

/// LFM = 1 − Σ(1 − DCL)·(λ − (1 − DC)·λ) / (λ_tot − Σ(1 − DC)·λ).
pub fn exact_lfm(residual: &BigRational, latent: &BigRational, tot: &BigRational) -> BigRational {
    BigRational::one() - latent / (tot - residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Input {
    Dc,
    Lambda,
    DcLatent,
}

/// Central finite difference of `metric` with respect to one input, step
/// `1e-6·max(1, |u|)`, evaluated exactly.
pub fn central_difference(metric: ExactMetric, t: &ExactTable, index: usize, input: Input) -> f64 {
    let base = &t.modes[index];
    let u = match input {
        Input::Dc => &base.dc,
        Input::Lambda => &base.lambda,
        Input::DcLatent => &base.dc_latent,
    };
    let u_f = u.to_f64().expect("finite");
    let h = q(1e-6 * u_f.abs().max(1.0));
    let at = |delta: &BigRational| {
        let mut m = base.clone();
        let slot = match input {
            Input::Dc => &mut m.dc,
            Input::Lambda => &mut m.lambda,
            Input::DcLatent => &mut m.dc_latent,
        };
        *slot = &*slot + delta;
        let (r, l) = t.sums_with(index, &m);
        metric(&r, &l, &t.lambda_tot)
    };
    let d = (at(&h) - at(&-h.clone())) / (q_ratio(2, 1) * &h);
    d.to_f64().expect("representable")
}

/// Fault-injection sample size by exact rational evaluation:
/// ceil(N·t²p(1−p) / (t²p(1−p) + e²(N − 1))), capped at N.
pub fn exact_sample_size(population: u64, margin: &BigRational, t: &BigRational, p: &BigRational) -> u64 {
    let one = BigRational::one();
    let n = BigRational::from_integer(BigInt::from(population));
    let core = t * t * p * (&one - p);
    let value = &n * &core / (&core + margin * margin * (&n - &one));
    let ceil = value.ceil().to_integer();
    ceil.to_u64().expect("fits").min(population).max(1)
}

/// Cut-offs as exact decimals.
pub fn exact_cutoff(level: f64) -> BigRational {
    match (level * 100.0).round() as i64 {
        90 => q_ratio(16449, 10000),
        95 => q_ratio(196, 100),
        99 => q_ratio(25758, 10000),
        _ => panic!("unsupported level {level}"),
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * b.abs().max(a.abs())
}
