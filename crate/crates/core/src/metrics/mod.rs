//! Observations collected during a run and their aggregation.

pub mod export;
pub mod ledger;
pub mod stats;

pub use ledger::{LossCause, MetricsLedger, SignalKind, Sink};
pub use stats::Estimate;
