//! Command implementations behind the `tscatter` binary: file formats,
//! manifests, the synthetic fixture generator and the self-check table.

mod commands;
pub mod io;
pub mod manifest;
pub mod selfcheck;
pub mod synth;

pub use commands::{
    cmd_analyze, cmd_detect, cmd_monitor, cmd_synth, truth_path, AnalyzeOptions, ChannelSummary, MonitorChannel,
};
pub use io::SignalFile;
pub use manifest::{Manifest, OutputDir, MANIFEST_NAME};
pub use selfcheck::{run_selfcheck, CheckResult};
pub use synth::{synthesize, GroundTruth, SynthKind, SynthParams};
