//! Render one analysis as Markdown, CSV and JSON, comparing the three
//! propagation modes.

use fmeda_uq::analysis::{analyze, AnalysisOptions};
use fmeda_uq::ingest::{emit_result, parse_auto, OutputFormat};
use fmeda_uq::uncertainty::PropagationMode;
use fmeda_uq::{Asil, ConfidenceLevel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fragile_b.json");
    let table = parse_auto(&std::fs::read_to_string(path)?)?;

    for mode in PropagationMode::ALL {
        let options = AnalysisOptions {
            mode,
            confidence: ConfidenceLevel::P99,
            asil: Some(Asil::B),
            ..Default::default()
        };
        let r = analyze(&table, &options)?;
        println!(
            "{:<12} σ_SPFM {:.5}  99% lower bound {:.4}  verdict {:?}",
            mode.to_string(),
            r.sigma_spfm.get(mode),
            r.interval_spfm.lo,
            r.asil.map(|a| a.overall)
        );
    }

    let result = analyze(&table, &AnalysisOptions::default())?;
    for format in [OutputFormat::Markdown, OutputFormat::Csv, OutputFormat::Json] {
        println!("\n----- {format:?}\n{}", emit_result(&result, format));
    }
    Ok(())
}
