//! Rank which inputs dominate the SPFM uncertainty of a table.
//!
//! cargo run --example eii_ranking -- tests/fixtures/core_exec_stage.csv

use fmeda_uq::eii::{eii_table, total_per_failure_mode};
use fmeda_uq::ingest;
use fmeda_uq::sampling::apply_faultsim_sigmas;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/core_exec_stage.csv").into());
    let table = apply_faultsim_sigmas(&ingest::parse_auto(&std::fs::read_to_string(&path)?)?);
    let flat = table.flatten()?;
    let eii = eii_table(&flat)?;
    if let Some(note) = &eii.note {
        println!("{note}");
        return Ok(());
    }

    println!("σ_SPFM = {:.6}\n", eii.sigma_spfm);
    println!("{:<24} {:<9} {:>12} {:>8}", "failure mode", "input", "raw EII", "share");
    for e in &eii.entries {
        println!("{:<24} {:<9} {:>12.6} {:>7.2}%", e.failure_mode_id, e.input.to_string(), e.raw_eii, e.percent);
    }

    println!("\nper failure mode");
    let mut totals = total_per_failure_mode(&eii.entries);
    totals.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut cumulative = 0.0;
    for (id, pct) in totals {
        cumulative += pct;
        println!("{id:<24} {pct:>7.2}%  cumulative {cumulative:>7.2}%");
    }
    Ok(())
}
