//! Build a table in code, including a subpart whose rate is split by a
//! failure mode distribution, and write it out in both file formats.

use fmeda_uq::ingest::{emit_csv, emit_json, parse_csv};
use fmeda_uq::{Asil, ConfidenceLevel, DcSource, FailureModeRow, FmedaTable, Part, Subpart};

fn main() -> Result<(), fmeda_uq::Error> {
    let sram = Subpart::distribution(
        "SRAM",
        400.0,
        vec![
            FailureModeRow::new("sram_single_bit", 0.0, 0.99)
                .with_fraction(0.8, 0.02)
                .with_latent(0.95, 0.01)
                .with_source(DcSource::FaultSimulation { margin: 0.005, confidence: ConfidenceLevel::P99 }),
            FailureModeRow::new("sram_multi_bit", 0.0, 0.9)
                .with_fraction(0.2, 0.02)
                .with_sigma_dc(0.03)
                .with_latent(0.8, 0.05),
        ],
    );
    let clock = Subpart::direct(
        "CLOCK",
        vec![FailureModeRow::new("clk_drift", 12.0, 0.9)
            .with_sigma_rate(1.5)
            .with_sigma_dc(0.04)
            .with_latent(0.6, 0.1)],
    );
    let mut table = FmedaTable::new(vec![Part { name: "MCU".into(), subparts: vec![sram, clock] }]);
    table.asil_target = Some(Asil::B);

    let flat = table.flatten()?;
    for m in &flat.modes {
        println!("{:<16} λ = {:>7.2} FIT  DC = {}", m.id, m.lambda, m.dc);
    }

    let csv = emit_csv(&table);
    println!("\n{csv}");
    println!("{}", emit_json(&table));

    // CSV carries no ASIL target, everything else survives
    let mut back = parse_csv(&csv)?;
    back.asil_target = table.asil_target;
    assert_eq!(back, table);
    Ok(())
}
