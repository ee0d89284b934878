//! FMEDA hardware architectural metrics with quantified uncertainty.
//!
//! The crate computes the single point fault metric (SPFM) and latent fault
//! metric (LFM) of a hierarchical part / subpart / failure-mode table,
//! propagates the standard deviations of diagnostic coverages and failure
//! rates into standard deviations and confidence intervals of both metrics,
//! and attributes the SPFM variance to its individual sources (the Error
//! Importance Identifier). Statistical fault-injection campaigns can be sized
//! with [`sampling::sample_size`], and [`mc`] provides a seeded Monte Carlo
//! oracle that checks the closed-form propagation empirically.
//!
//! ```
//! use fmeda_uq::{analysis, ingest};
//!
//! let csv = "part,subpart,failure_mode,lambda_fit,sigma_lambda_fit,fmd_fraction,dc,sigma_dc,dc_latent,sigma_dc_latent,dc_source,sm_list\n\
//!            CPU,EXEC,FM1,50,0,,0.90,0.02,0.6,0,expert,\n\
//!            CPU,EXEC,FM2,50,0,,0.99,0.001,0.8,0,expert,\n";
//! let table = ingest::parse_csv(csv).unwrap();
//! let result = analysis::analyze(&table, &analysis::AnalysisOptions::default()).unwrap();
//! assert!((result.spfm - 0.945).abs() < 1e-12);
//! assert!((result.sigma_spfm.dc_only - 0.0100125).abs() < 1e-7);
//! ```

pub mod analysis;
pub mod cli;
pub mod eii;
mod error;
pub mod ingest;
pub mod mc;
pub mod metrics;
pub mod model;
pub mod sampling;
pub mod uncertainty;

pub use error::{Error, Result};
pub use model::{
    Asil, ConfidenceLevel, DcSource, FailureModeRow, FailureRate, FlatMode, FlatTable, FmdMode,
    FmedaTable, Part, Subpart, Violation,
};
