//! Hierarchical FMEDA table: parts contain subparts, subparts contain failure
//! modes. Failure rates are in FIT (failures per 10^9 device hours);
//! coverages and their standard deviations are dimensionless fractions.
//!
//! Tables are plain data. [`validate`] reports every broken invariant as a
//! [`Violation`], and [`FmedaTable::flatten`] turns a valid table into the
//! canonical [`FlatTable`] that all computations run on: one row per failure
//! mode with its rate materialized in FIT.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on the sum of failure mode distribution fractions of a subpart.
pub const FMD_SUM_TOLERANCE: f64 = 1e-9;

/// Relative tolerance between a declared subpart rate and the sum of its
/// failure mode rates.
pub const SUBPART_RATE_TOLERANCE: f64 = 1e-9;

/// Two-sided confidence level supported for intervals and sample sizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfidenceLevel {
    P90,
    P95,
    P99,
}

impl ConfidenceLevel {
    pub const ALL: [ConfidenceLevel; 3] =
        [ConfidenceLevel::P90, ConfidenceLevel::P95, ConfidenceLevel::P99];

    pub fn as_f64(self) -> f64 {
        match self {
            ConfidenceLevel::P90 => 0.90,
            ConfidenceLevel::P95 => 0.95,
            ConfidenceLevel::P99 => 0.99,
        }
    }

    /// Two-sided standard normal cut-off, five significant digits.
    pub fn cutoff(self) -> f64 {
        match self {
            ConfidenceLevel::P90 => 1.6449,
            ConfidenceLevel::P95 => 1.9600,
            ConfidenceLevel::P99 => 2.5758,
        }
    }
}

impl TryFrom<f64> for ConfidenceLevel {
    type Error = Error;

    fn try_from(level: f64) -> Result<Self> {
        ConfidenceLevel::ALL
            .into_iter()
            .find(|c| (c.as_f64() - level).abs() < 1e-9)
            .ok_or(Error::UnsupportedConfidence(level))
    }
}

impl std::str::FromStr for ConfidenceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let level: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::out_of_range("confidence level", s))?;
        ConfidenceLevel::try_from(level)
    }
}

impl fmt::Display for ConfidenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.as_f64())
    }
}

/// Automotive safety integrity level of the safety goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Asil {
    A,
    B,
    C,
    D,
}

impl std::str::FromStr for Asil {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Asil::A),
            "B" => Ok(Asil::B),
            "C" => Ok(Asil::C),
            "D" => Ok(Asil::D),
            _ => Err(Error::out_of_range("ASIL", s)),
        }
    }
}

impl fmt::Display for Asil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Asil::A => "A",
            Asil::B => "B",
            Asil::C => "C",
            Asil::D => "D",
        };
        f.write_str(s)
    }
}

/// Where a diagnostic coverage estimate came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DcSource {
    ExpertJudgment,
    /// Measured by a statistical fault-injection campaign with margin of
    /// error `margin` at the given confidence.
    FaultSimulation {
        margin: f64,
        confidence: ConfidenceLevel,
    },
}

impl fmt::Display for DcSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DcSource::ExpertJudgment => f.write_str("expert"),
            DcSource::FaultSimulation { margin, confidence } => {
                write!(f, "faultsim:e={margin}:cl={confidence}")
            }
        }
    }
}

impl std::str::FromStr for DcSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "expert" {
            return Ok(DcSource::ExpertJudgment);
        }
        let rest = s
            .strip_prefix("faultsim:")
            .ok_or_else(|| format!("expected `expert` or `faultsim:e=<float>:cl=<level>`, got `{s}`"))?;
        let mut margin = None;
        let mut confidence = None;
        for field in rest.split(':') {
            match field.split_once('=') {
                Some(("e", v)) => {
                    margin = Some(v.parse::<f64>().map_err(|_| format!("bad margin `{v}`"))?)
                }
                Some(("cl", v)) => {
                    confidence = Some(v.parse::<ConfidenceLevel>().map_err(|e| e.to_string())?)
                }
                _ => return Err(format!("unexpected fault simulation field `{field}`")),
            }
        }
        match (margin, confidence) {
            (Some(margin), Some(confidence)) => Ok(DcSource::FaultSimulation { margin, confidence }),
            _ => Err(format!("fault simulation source needs both e= and cl=, got `{s}`")),
        }
    }
}

/// How a failure mode's rate is authored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailureRate {
    /// Rate and its standard deviation in FIT.
    Fit { lambda: f64, sigma: f64 },
    /// Fraction of the subpart rate and its standard deviation, both
    /// dimensionless.
    Fraction { fmd: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmdMode {
    DirectLambda,
    Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureModeRow {
    pub id: String,
    pub name: String,
    pub rate: FailureRate,
    /// Residual (single point) diagnostic coverage.
    pub dc: f64,
    pub sigma_dc: f64,
    /// Latent-fault diagnostic coverage.
    pub dc_latent: f64,
    pub sigma_dc_latent: f64,
    pub dc_source: DcSource,
    pub safety_mechanisms: Vec<String>,
}

impl FailureModeRow {
    /// Row with a direct FIT rate, expert-judged coverage and no latent data.
    pub fn new(id: impl Into<String>, lambda: f64, dc: f64) -> Self {
        let id = id.into();
        FailureModeRow {
            name: id.clone(),
            id,
            rate: FailureRate::Fit { lambda, sigma: 0.0 },
            dc,
            sigma_dc: 0.0,
            dc_latent: 0.0,
            sigma_dc_latent: 0.0,
            dc_source: DcSource::ExpertJudgment,
            safety_mechanisms: Vec::new(),
        }
    }

    pub fn with_sigma_dc(mut self, sigma_dc: f64) -> Self {
        self.sigma_dc = sigma_dc;
        self
    }

    /// Sets the rate uncertainty, in the unit of the row's rate.
    pub fn with_sigma_rate(mut self, sigma_rate: f64) -> Self {
        match &mut self.rate {
            FailureRate::Fit { sigma, .. } | FailureRate::Fraction { sigma, .. } => {
                *sigma = sigma_rate
            }
        }
        self
    }

    pub fn with_latent(mut self, dc_latent: f64, sigma_dc_latent: f64) -> Self {
        self.dc_latent = dc_latent;
        self.sigma_dc_latent = sigma_dc_latent;
        self
    }

    pub fn with_source(mut self, source: DcSource) -> Self {
        self.dc_source = source;
        self
    }

    /// Turns the row into a distribution row carrying fraction `fmd`.
    pub fn with_fraction(mut self, fmd: f64, sigma: f64) -> Self {
        self.rate = FailureRate::Fraction { fmd, sigma };
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subpart {
    pub name: String,
    pub lambda_subpart: Option<f64>,
    pub fmd_mode: FmdMode,
    pub failure_modes: Vec<FailureModeRow>,
}

impl Subpart {
    pub fn direct(name: impl Into<String>, failure_modes: Vec<FailureModeRow>) -> Self {
        Subpart {
            name: name.into(),
            lambda_subpart: None,
            fmd_mode: FmdMode::DirectLambda,
            failure_modes,
        }
    }

    pub fn distribution(
        name: impl Into<String>,
        lambda_subpart: f64,
        failure_modes: Vec<FailureModeRow>,
    ) -> Self {
        Subpart {
            name: name.into(),
            lambda_subpart: Some(lambda_subpart),
            fmd_mode: FmdMode::Distribution,
            failure_modes,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub name: String,
    pub subparts: Vec<Subpart>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FmedaTable {
    pub parts: Vec<Part>,
    pub asil_target: Option<Asil>,
}

/// A broken table invariant. Violations are data: validation collects all
/// of them instead of stopping at the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// `part/subpart/failure_mode[.field]` path of the offending item.
    pub location: String,
    pub rule: Rule,
    pub observed: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    DcRange,
    DcLatentRange,
    NegativeRate,
    NegativeSigma,
    NonFinite,
    FaultSimMargin,
    FmdFractionRange,
    FmdSum,
    MissingSubpartRate,
    SubpartRateMismatch,
    RateModeMismatch,
    DuplicateId,
    ZeroTotalRate,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::DcRange => "dc must lie in [0, 1]",
            Rule::DcLatentRange => "dc_latent must lie in [0, 1]",
            Rule::NegativeRate => "failure rate must be non-negative",
            Rule::NegativeSigma => "standard deviation must be non-negative",
            Rule::NonFinite => "value must be finite",
            Rule::FaultSimMargin => "fault simulation margin must lie in (0, 1)",
            Rule::FmdFractionRange => "fmd fraction must lie in [0, 1]",
            Rule::FmdSum => "fmd fractions of a subpart must sum to 1",
            Rule::MissingSubpartRate => "distribution subpart needs a subpart rate",
            Rule::SubpartRateMismatch => "subpart rate must equal the sum of its failure mode rates",
            Rule::RateModeMismatch => "failure mode rate kind must match the subpart fmd mode",
            Rule::DuplicateId => "failure mode ids must be unique",
            Rule::ZeroTotalRate => "total failure rate must be positive",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (observed {})",
            self.location,
            self.rule.describe(),
            self.observed
        )
    }
}

/// Checks every structural invariant of `table`. An empty result means the
/// table is analyzable.
pub fn validate(table: &FmedaTable) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |location: String, rule: Rule, observed: String| {
        out.push(Violation {
            location,
            rule,
            observed,
        })
    };

    for part in &table.parts {
        for sub in &part.subparts {
            let sub_loc = format!("{}/{}", part.name, sub.name);
            if let Some(l) = sub.lambda_subpart {
                if !l.is_finite() {
                    push(format!("{sub_loc}.lambda_subpart"), Rule::NonFinite, l.to_string());
                } else if l < 0.0 {
                    push(format!("{sub_loc}.lambda_subpart"), Rule::NegativeRate, l.to_string());
                }
            }
            if sub.fmd_mode == FmdMode::Distribution && sub.lambda_subpart.is_none() {
                push(format!("{sub_loc}.lambda_subpart"), Rule::MissingSubpartRate, "none".into());
            }

            for fm in &sub.failure_modes {
                let loc = format!("{sub_loc}/{}", fm.id);
                if !seen.insert(fm.id.as_str()) {
                    push(loc.clone(), Rule::DuplicateId, fm.id.clone());
                }

                let mut check_unit = |field: &str, v: f64, rule: Rule| {
                    if !v.is_finite() {
                        push(format!("{loc}.{field}"), Rule::NonFinite, v.to_string());
                    } else if !(0.0..=1.0).contains(&v) {
                        push(format!("{loc}.{field}"), rule, v.to_string());
                    }
                };
                check_unit("dc", fm.dc, Rule::DcRange);
                check_unit("dc_latent", fm.dc_latent, Rule::DcLatentRange);

                let (rate_field, rate, sigma_field, sigma_rate) = match fm.rate {
                    FailureRate::Fit { lambda, sigma } => {
                        ("lambda_fit", lambda, "sigma_lambda_fit", sigma)
                    }
                    FailureRate::Fraction { fmd, sigma } => ("fmd_fraction", fmd, "sigma_fmd", sigma),
                };
                match fm.rate {
                    FailureRate::Fit { .. } => {
                        if !rate.is_finite() {
                            push(format!("{loc}.{rate_field}"), Rule::NonFinite, rate.to_string());
                        } else if rate < 0.0 {
                            push(format!("{loc}.{rate_field}"), Rule::NegativeRate, rate.to_string());
                        }
                    }
                    FailureRate::Fraction { .. } => {
                        check_unit(rate_field, rate, Rule::FmdFractionRange)
                    }
                }

                for (field, v) in [
                    (sigma_field, sigma_rate),
                    ("sigma_dc", fm.sigma_dc),
                    ("sigma_dc_latent", fm.sigma_dc_latent),
                ] {
                    if !v.is_finite() {
                        push(format!("{loc}.{field}"), Rule::NonFinite, v.to_string());
                    } else if v < 0.0 {
                        push(format!("{loc}.{field}"), Rule::NegativeSigma, v.to_string());
                    }
                }

                if let DcSource::FaultSimulation { margin, .. } = fm.dc_source {
                    if !(margin > 0.0 && margin < 1.0) {
                        push(format!("{loc}.dc_source"), Rule::FaultSimMargin, margin.to_string());
                    }
                }

                let mode_ok = matches!(
                    (sub.fmd_mode, fm.rate),
                    (FmdMode::DirectLambda, FailureRate::Fit { .. })
                        | (FmdMode::Distribution, FailureRate::Fraction { .. })
                );
                if !mode_ok {
                    let observed = match fm.rate {
                        FailureRate::Fit { .. } => "lambda_fit",
                        FailureRate::Fraction { .. } => "fmd_fraction",
                    };
                    push(loc.clone(), Rule::RateModeMismatch, observed.into());
                }
            }

            match sub.fmd_mode {
                FmdMode::Distribution => {
                    let sum: f64 = sub
                        .failure_modes
                        .iter()
                        .filter_map(|fm| match fm.rate {
                            FailureRate::Fraction { fmd, .. } => Some(fmd),
                            FailureRate::Fit { .. } => None,
                        })
                        .sum();
                    if (sum - 1.0).abs() > FMD_SUM_TOLERANCE {
                        push(sub_loc.clone(), Rule::FmdSum, sum.to_string());
                    }
                }
                FmdMode::DirectLambda => {
                    if let Some(declared) = sub.lambda_subpart {
                        let sum: f64 = sub
                            .failure_modes
                            .iter()
                            .filter_map(|fm| match fm.rate {
                                FailureRate::Fit { lambda, .. } => Some(lambda),
                                FailureRate::Fraction { .. } => None,
                            })
                            .sum();
                        let scale = declared.abs().max(sum.abs());
                        if (declared - sum).abs() > SUBPART_RATE_TOLERANCE * scale {
                            push(sub_loc.clone(), Rule::SubpartRateMismatch, sum.to_string());
                        }
                    }
                }
            }
        }
    }

    let total = raw_total(table);
    if total.is_nan() || total <= 0.0 {
        push("table".into(), Rule::ZeroTotalRate, total.to_string());
    }
    out
}

fn raw_total(table: &FmedaTable) -> f64 {
    table
        .parts
        .iter()
        .flat_map(|p| &p.subparts)
        .flat_map(|s| s.failure_modes.iter().map(move |fm| resolve_rate(s, fm).0))
        .sum()
}

/// λfm and σ_λfm of one row in FIT.
fn resolve_rate(sub: &Subpart, fm: &FailureModeRow) -> (f64, f64) {
    match fm.rate {
        FailureRate::Fit { lambda, sigma } => (lambda, sigma),
        FailureRate::Fraction { fmd, sigma } => {
            let l = sub.lambda_subpart.unwrap_or(0.0);
            (l * fmd, l * sigma)
        }
    }
}

/// Sum of all failure mode rates of a valid table, in FIT.
pub fn total_lambda(table: &FmedaTable) -> Result<f64> {
    Ok(table.flatten()?.lambda_tot)
}

impl FmedaTable {
    pub fn new(parts: Vec<Part>) -> Self {
        FmedaTable {
            parts,
            asil_target: None,
        }
    }

    /// Table with a single part holding the given subparts.
    pub fn single_part(name: impl Into<String>, subparts: Vec<Subpart>) -> Self {
        FmedaTable::new(vec![Part {
            name: name.into(),
            subparts,
        }])
    }

    pub fn failure_modes(&self) -> impl Iterator<Item = &FailureModeRow> {
        self.parts
            .iter()
            .flat_map(|p| &p.subparts)
            .flat_map(|s| &s.failure_modes)
    }

    pub fn failure_modes_mut(&mut self) -> impl Iterator<Item = &mut FailureModeRow> {
        self.parts
            .iter_mut()
            .flat_map(|p| &mut p.subparts)
            .flat_map(|s| &mut s.failure_modes)
    }

    /// Validates the table and produces its canonical flat form.
    pub fn flatten(&self) -> Result<FlatTable> {
        let violations = validate(self);
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let modes = self
            .parts
            .iter()
            .flat_map(|p| p.subparts.iter().map(move |s| (p, s)))
            .flat_map(|(p, s)| {
                s.failure_modes.iter().map(move |fm| {
                    let (lambda, sigma_lambda) = resolve_rate(s, fm);
                    FlatMode {
                        id: fm.id.clone(),
                        part: p.name.clone(),
                        subpart: s.name.clone(),
                        lambda,
                        sigma_lambda,
                        dc: fm.dc,
                        sigma_dc: fm.sigma_dc,
                        dc_latent: fm.dc_latent,
                        sigma_dc_latent: fm.sigma_dc_latent,
                    }
                })
            })
            .collect();
        Ok(FlatTable::new(modes))
    }

    /// Copy of the table where every distribution subpart is rewritten with
    /// direct FIT rates (λfm = λ_subpart·fmd, σ_λfm = λ_subpart·σ_fmd).
    pub fn materialized(&self) -> FmedaTable {
        let mut out = self.clone();
        for sub in out.parts.iter_mut().flat_map(|p| &mut p.subparts) {
            if sub.fmd_mode != FmdMode::Distribution {
                continue;
            }
            let rates: Vec<_> = sub.failure_modes.iter().map(|fm| resolve_rate(sub, fm)).collect();
            for (fm, (lambda, sigma)) in sub.failure_modes.iter_mut().zip(rates) {
                fm.rate = FailureRate::Fit { lambda, sigma };
            }
            sub.fmd_mode = FmdMode::DirectLambda;
            sub.lambda_subpart = None;
        }
        out
    }
}

/// One failure mode in canonical form: rate in FIT plus the coverage inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMode {
    pub id: String,
    pub part: String,
    pub subpart: String,
    pub lambda: f64,
    pub sigma_lambda: f64,
    pub dc: f64,
    pub sigma_dc: f64,
    pub dc_latent: f64,
    pub sigma_dc_latent: f64,
}

impl FlatMode {
    /// Anonymous mode for numeric work; only the inputs matter.
    pub fn new(lambda: f64, dc: f64) -> Self {
        FlatMode {
            id: String::new(),
            part: String::new(),
            subpart: String::new(),
            lambda,
            sigma_lambda: 0.0,
            dc,
            sigma_dc: 0.0,
            dc_latent: 0.0,
            sigma_dc_latent: 0.0,
        }
    }
}

/// Failure modes in table order with the derived total rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTable {
    pub modes: Vec<FlatMode>,
    pub lambda_tot: f64,
}

impl FlatTable {
    /// λ_tot is always the sum of the mode rates.
    pub fn new(modes: Vec<FlatMode>) -> Self {
        let lambda_tot = modes.iter().map(|m| m.lambda).sum();
        FlatTable { modes, lambda_tot }
    }
}
