//! Streaming estimation of the global clustering coefficient by naive edge
//! sampling, with sample-side estimators of its relative standard error and
//! relative bias, a bias-corrected estimator, an exact structural oracle and a
//! Monte-Carlo harness.
//!
//! ```
//! use clustream_core::{ingest, nes, estimators, synth};
//!
//! let g = synth::holme_kim(500, 3, 0.5, 1);
//! let stream = ingest::shuffle_stream(&g, 7).unwrap();
//! let state = nes::run_stream(&stream, nes::NesConfig::new(0.5, 7).unwrap()).unwrap();
//! let report = estimators::estimate_report(&state.summary()).unwrap();
//! assert!(report.c_hat > 0.0);
//! ```

pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod ingest;
pub mod moments;
pub mod nes;
pub mod oracle;
pub mod seed;
pub mod synth;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::EstimateReport;
pub use graph::{Edge, Graph, NodeId};
pub use harness::{ExperimentReport, ExperimentSpec};
pub use ingest::{EdgeStream, IngestReport};
pub use nes::{NesConfig, NesCounters, NesState};
pub use oracle::ExactStats;
pub use theory::TheoryReport;
