//! Environmental-quality assessment toolkit.
//!
//! - [`ahp`]: judgment-matrix weights and consistency testing
//! - [`pipeline`]: weather CSV ingestion, derived features, normalization, aggregation
//! - [`indices`]: the EI, H and EH composite indices and threshold classification
//! - [`carbon`]: forest carbon stocks and the CO₂ ledger
//! - [`planning`]: reserve sizing arithmetic
//! - [`sensitivity`]: analytic and finite-difference slopes of the expanded H form
//! - [`stats`]: correlation and a least-squares trend forecaster

pub mod ahp;
pub mod carbon;
mod error;
pub mod indices;
pub mod pipeline;
pub mod planning;
pub mod sensitivity;
pub mod stats;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
