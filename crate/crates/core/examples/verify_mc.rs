//! Check the closed-form σ against the Monte Carlo oracle, and show the
//! standard error shrinking with the sample count.

use fmeda_uq::mc::{mc_sigma_lfm, mc_sigma_spfm, McConfig};
use fmeda_uq::{FailureModeRow, FmedaTable, Subpart};

fn main() -> Result<(), fmeda_uq::Error> {
    let table = FmedaTable::single_part(
        "CPU",
        vec![Subpart::direct(
            "EXEC",
            vec![
                FailureModeRow::new("FM1", 50.0, 0.9).with_sigma_dc(0.02).with_latent(0.6, 0.02),
                FailureModeRow::new("FM2", 50.0, 0.99).with_sigma_dc(0.001).with_latent(0.8, 0.02),
            ],
        )],
    );
    let flat = table.flatten()?;

    for samples in [1_000, 10_000, 100_000, 1_000_000] {
        let config = McConfig { samples, ..Default::default() };
        let spfm = mc_sigma_spfm(&flat, &config)?;
        let lfm = mc_sigma_lfm(&flat, &config)?;
        println!(
            "{samples:>8} samples  SPFM σ {:.6} vs {:.6} ({:.2}%)  LFM σ {:.6} vs {:.6} ({:.2}%)",
            spfm.empirical_sigma,
            spfm.analytic_sigma,
            spfm.relative_gap * 100.0,
            lfm.empirical_sigma,
            lfm.analytic_sigma,
            lfm.relative_gap * 100.0
        );
    }

    let verdict = mc_sigma_spfm(&flat, &McConfig::default())?;
    println!("\n{}", serde_json::to_string_pretty(&verdict).expect("serializes"));
    Ok(())
}
