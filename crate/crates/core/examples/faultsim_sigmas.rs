//! Turn the margin of error of a fault-injection campaign into a coverage
//! standard deviation and watch the SPFM interval narrow as the campaign
//! grows.

use fmeda_uq::analysis::{analyze, AnalysisOptions};
use fmeda_uq::sampling::{apply_faultsim_sigmas, margin_to_sigma, sample_size};
use fmeda_uq::{ConfidenceLevel, DcSource, FailureModeRow, FmedaTable, Subpart};

fn main() -> Result<(), fmeda_uq::Error> {
    let level = ConfidenceLevel::P95;
    let fault_list = 2_000_000;
    println!("{:>8} {:>8} {:>10} {:>22}", "margin", "faults", "σ_DC", "SPFM 95% interval");
    for margin in [0.05, 0.02, 0.01, 0.005, 0.002] {
        let table = FmedaTable::single_part(
            "CORE",
            vec![Subpart::direct(
                "LSU",
                vec![
                    FailureModeRow::new("lsu_addr", 80.0, 0.96)
                        .with_source(DcSource::FaultSimulation { margin, confidence: level }),
                    FailureModeRow::new("lsu_data", 120.0, 0.98)
                        .with_source(DcSource::FaultSimulation { margin, confidence: level }),
                ],
            )],
        );
        let result = analyze(&apply_faultsim_sigmas(&table), &AnalysisOptions::default())?;
        let faults = sample_size(fault_list, margin, level, 0.5)?.sample_size;
        println!(
            "{margin:>8} {faults:>8} {:>10.6} {:>22}",
            margin_to_sigma(margin, level)?,
            format!("[{:.4}, {:.4}]", result.interval_spfm.lo, result.interval_spfm.hi)
        );
    }
    Ok(())
}
