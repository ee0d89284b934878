//! Analyze a table file and print the headline numbers.
//!
//! cargo run --example analyze_table -- tests/fixtures/core_exec_stage.csv C

use fmeda_uq::analysis::{analyze, AnalysisOptions};
use fmeda_uq::ingest;
use fmeda_uq::sampling::apply_faultsim_sigmas;
use fmeda_uq::Asil;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/worked_two_fm.csv").into());
    let asil: Option<Asil> = args.next().map(|a| a.parse()).transpose()?;

    let text = std::fs::read_to_string(&path)?;
    let table = apply_faultsim_sigmas(&ingest::parse_auto(&text)?);
    let result = analyze(&table, &AnalysisOptions { asil, ..Default::default() })?;

    println!("{path}");
    println!("  λ_tot  {:.3} FIT over {} failure modes", result.lambda_tot, result.modes.len());
    println!(
        "  SPFM   {:.4} ± {:.4}  {:.0}% interval [{:.4}, {:.4}]",
        result.spfm,
        result.sigma_spfm.full,
        result.confidence.as_f64() * 100.0,
        result.interval_spfm.lo,
        result.interval_spfm.hi
    );
    match (result.lfm, result.sigma_lfm, result.interval_lfm) {
        (Some(v), Some(s), Some(i)) => println!("  LFM    {v:.4} ± {:.4}  interval [{:.4}, {:.4}]", s.full, i.lo, i.hi),
        _ => println!("  LFM    undefined: {}", result.lfm_note.unwrap_or_default()),
    }
    match result.asil {
        Some(v) => println!("  ASIL {}: {:?}", v.target, v.overall),
        None => println!("  no ASIL target"),
    }
    Ok(())
}
