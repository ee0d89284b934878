//! Command-line front end.
//!
//! ```text
//! fmeda-uq analyze --input <path> [--format json|markdown|csv] [--confidence 0.90|0.95|0.99]
//!                  [--asil A|B|C|D] [--mode full|dc-only|lambda-only] [--stamp]
//! fmeda-uq sample-size --population <int> --margin <float> --confidence <float>
//!                      [--proportion <float>] [--format json|text]
//! fmeda-uq verify --input <path> [--samples <int>] [--seed <int>] [--no-truncate]
//! ```
//!
//! Standard output carries only the requested document; diagnostics go to
//! standard error. Exit codes: 0 success (or robust pass), 1 input error,
//! 2 fragile pass, 3 fail, 4 Monte Carlo mismatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{analyze, AnalysisOptions};
use crate::error::{Error, Result};
use crate::ingest::{self, OutputFormat};
use crate::mc::{self, McConfig, McVerdict};
use crate::metrics::{MetricKind, Verdict};
use crate::model::{Asil, ConfidenceLevel, FlatTable, FmedaTable};
use crate::sampling;
use crate::uncertainty::{self, PropagationMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FRAGILE: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "fmeda-uq", version, about = "FMEDA metrics with uncertainty propagation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute SPFM/LFM, their σ, intervals, error importance and the ASIL verdict.
    Analyze(AnalyzeArgs),
    /// Size a statistical fault-injection campaign.
    SampleSize(SampleSizeArgs),
    /// Check the analytic σ against a Monte Carlo run.
    Verify(VerifyArgs),
}

#[derive(clap::Args, Debug)]
pub struct AnalyzeArgs {
    /// Table in CSV or JSON (`.json` extension or leading `{`).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    #[arg(long, default_value = "0.95", value_parser = parse_confidence)]
    pub confidence: ConfidenceLevel,
    /// Overrides the table's ASIL target.
    #[arg(long, value_parser = parse_asil)]
    pub asil: Option<Asil>,
    /// Propagation mode used for intervals and the verdict.
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    /// Add tool version and input path to the document.
    #[arg(long)]
    pub stamp: bool,
}

#[derive(clap::Args, Debug)]
pub struct SampleSizeArgs {
    #[arg(long)]
    pub population: u64,
    #[arg(long)]
    pub margin: f64,
    #[arg(long, value_parser = parse_confidence)]
    pub confidence: ConfidenceLevel,
    #[arg(long, default_value_t = sampling::DEFAULT_PROPORTION)]
    pub proportion: f64,
    #[arg(long, value_enum, default_value_t = PlanFormat::Json)]
    pub format: PlanFormat,
}

#[derive(clap::Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Let draws leave the physical range instead of clamping them.
    #[arg(long)]
    pub no_truncate: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Json,
    Markdown,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Markdown => OutputFormat::Markdown,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanFormat {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Full,
    DcOnly,
    LambdaOnly,
}

impl From<ModeArg> for PropagationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => PropagationMode::Full,
            ModeArg::DcOnly => PropagationMode::DcOnly,
            ModeArg::LambdaOnly => PropagationMode::LambdaOnly,
        }
    }
}

fn parse_confidence(s: &str) -> std::result::Result<ConfidenceLevel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_asil(s: &str) -> std::result::Result<Asil, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Source of the analytic σ values that `verify` checks. Tests swap in a
/// deliberately wrong implementation to exercise the mismatch path.
pub trait AnalyticSigma {
    fn sigma_spfm(&self, table: &FlatTable) -> Result<f64>;
    fn sigma_lfm(&self, table: &FlatTable) -> Result<f64>;
}

/// The closed-form first-order propagation.
pub struct FirstOrder;

impl AnalyticSigma for FirstOrder {
    fn sigma_spfm(&self, table: &FlatTable) -> Result<f64> {
        uncertainty::sigma_spfm(table, PropagationMode::Full)
    }

    fn sigma_lfm(&self, table: &FlatTable) -> Result<f64> {
        uncertainty::sigma_lfm(table)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, out, err, &FirstOrder)
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, analytic: &dyn AnalyticSigma) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::SampleSize(a) => cmd_sample_size(&a, out),
        Command::Verify(a) => cmd_verify(&a, out, analytic),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            report_error(&e, err);
            EXIT_INPUT
        }
    }
}

fn report_error(e: &Error, err: &mut dyn Write) {
    let _ = writeln!(err, "error: {e}");
    if let Error::Invalid(violations) = e {
        for v in violations {
            let _ = writeln!(err, "  {v}");
        }
    }
}

fn load_table(path: &PathBuf) -> Result<FmedaTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        ingest::parse_json(&text)
    } else {
        ingest::parse_auto(&text)
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let table = sampling::apply_faultsim_sigmas(&load_table(&args.input)?);
    let options = AnalysisOptions {
        confidence: args.confidence,
        mode: args.mode.into(),
        asil: args.asil,
        ..Default::default()
    };
    let result = analyze(&table, &options)?;
    let format: OutputFormat = args.format.into();
    let stamp = format!(
        "fmeda-uq {} on {}",
        env!("CARGO_PKG_VERSION"),
        args.input.display()
    );
    let doc = match format {
        OutputFormat::Json if args.stamp => {
            let mut v = ingest::result_to_json(&result);
            v["stamp"] = json!(stamp);
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s
        }
        OutputFormat::Markdown if args.stamp => {
            format!("{}\n_{stamp}_\n", ingest::emit_result(&result, format))
        }
        OutputFormat::Csv if args.stamp => {
            format!("# {stamp}\n{}", ingest::emit_result(&result, format))
        }
        _ => ingest::emit_result(&result, format),
    };
    write_doc(out, &doc)?;
    Ok(match result.asil.map(|a| a.overall) {
        None | Some(Verdict::PassRobust) => EXIT_OK,
        Some(Verdict::PassFragile) => EXIT_FRAGILE,
        Some(Verdict::Fail) => EXIT_FAIL,
    })
}

pub fn cmd_sample_size(args: &SampleSizeArgs, out: &mut dyn Write) -> Result<i32> {
    let plan = sampling::sample_size(args.population, args.margin, args.confidence, args.proportion)?;
    let doc = match args.format {
        PlanFormat::Json => format!("{}\n", serde_json::to_string_pretty(&plan)?),
        PlanFormat::Text => format!(
            "population {}\nmargin {}\nconfidence {}\ncutoff {}\nproportion {}\nsample size {}\n",
            plan.population,
            plan.margin,
            plan.confidence_level,
            plan.cutoff,
            plan.proportion,
            plan.sample_size
        ),
    };
    write_doc(out, &doc)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, analytic: &dyn AnalyticSigma) -> Result<i32> {
    let table = sampling::apply_faultsim_sigmas(&load_table(&args.input)?);
    let flat = table.flatten()?;
    let config = McConfig {
        samples: args.samples,
        seed: args.seed,
        truncate: !args.no_truncate,
    };
    if config.samples < mc::MIN_SAMPLES {
        return Err(Error::out_of_range("samples", config.samples));
    }
    let spfm = McVerdict::compare(
        MetricKind::Spfm,
        mc::empirical_sigma_spfm(&flat, &config),
        analytic.sigma_spfm(&flat)?,
        mc::SPFM_TOLERANCE,
        &config,
    );
    let lfm = match analytic.sigma_lfm(&flat) {
        Ok(sigma) => Some(McVerdict::compare(
            MetricKind::Lfm,
            mc::empirical_sigma_lfm(&flat, &config),
            sigma,
            mc::LFM_TOLERANCE,
            &config,
        )),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    let pass = spfm.pass && lfm.as_ref().is_none_or(|v| v.pass);
    let doc = json!({ "spfm": spfm, "lfm": lfm, "pass": pass });
    write_doc(out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
    Ok(if pass { EXIT_OK } else { EXIT_MISMATCH })
}

fn write_doc(out: &mut dyn Write, doc: &str) -> Result<()> {
    out.write_all(doc.as_bytes()).map_err(|e| Error::Schema {
        path: "stdout".into(),
        message: e.to_string(),
    })
}
