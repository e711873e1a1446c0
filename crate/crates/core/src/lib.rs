//! Sparse, frequency-invariant transient representation built on a two-layer
//! wavelet scattering network, with unsupervised detection on top.
//!
//! ```text
//! x ──► S₂x ──► Rx = ρ(S₂x) ──► Lx (PCA or max-pool over λ₁) ──► clustering ──► intervals
//! ```

pub mod cli;
pub mod config;
pub mod detection;
pub mod error;
pub mod filterbank;
pub mod numerics;
pub mod pipeline;
pub mod representation;
pub mod scattering;
pub mod signal;

pub use config::{ClusterInput, PipelineConfig};
pub use error::{Error, Result};
pub use pipeline::{Analysis, Pipeline};
pub use representation::Reducer;
pub use signal::Signal;
