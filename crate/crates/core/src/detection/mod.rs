//! Application layer: sliding-window `θ` trajectories, feature vectors,
//! frame clustering and transient interval extraction.

mod cluster;
mod features;
mod intervals;
mod windows;

pub use cluster::{
    canonical_labels, cluster_frames, k_medoids, l1_distance_matrix, mean_silhouette, Clustering, KMedoids,
    IDENTICAL_DISTANCE, MAX_ITER, MIN_SILHOUETTE,
};
pub use features::{assemble_features, feature_dimension, frame_average, frame_features, FeatureVector};
pub use intervals::{
    extract_intervals, frame_energies, frames_to_samples, robust_zscores, significant_intervals, transient_cluster,
    Interval,
};
pub use windows::{plan_windows, theta_trajectory, WindowPlan};

use ndarray::Array2;

use crate::config::ClusterInput;
use crate::error::Result;
use crate::pipeline::{Analysis, Pipeline};

#[derive(Clone, Debug)]
pub struct DetectionResult {
    /// Cluster id per frame.
    pub labels: Vec<usize>,
    pub k: usize,
    pub frame_len: usize,
    /// Transient-cluster intervals in samples, inclusive.
    pub intervals: Vec<Interval>,
    pub silhouettes: Vec<(usize, f64)>,
    /// `(windows, |Λ₂|)`; only set by windowed analysis.
    pub theta_trajectory: Option<Array2<f64>>,
}

/// Clusters the frames of an existing analysis and extracts the transient
/// intervals.
pub fn detect_from_analysis(analysis: &Analysis, pipeline: &Pipeline) -> Result<DetectionResult> {
    let cfg = pipeline.config();
    let n = analysis.coeffs.n();
    let lx_frames = frame_average(analysis.rep.lx.view(), cfg.frame_len);
    let clustering = match cfg.cluster_input {
        ClusterInput::Lx => cluster_frames(lx_frames.view(), cfg.k_max, cfg.seed)?,
        ClusterInput::Features => {
            let frames = frame_features(&analysis.coeffs, &analysis.rep, cfg.frame_len)?;
            cluster_frames(frames.view(), cfg.k_max, cfg.seed)?
        }
    };
    let runs = extract_intervals(&clustering.labels, lx_frames.view(), 1);
    let frame_intervals = significant_intervals(&runs, lx_frames.view(), cfg.min_peak_z);
    let intervals = frames_to_samples(&frame_intervals, cfg.frame_len, n, cfg.min_duration);
    Ok(DetectionResult {
        labels: clustering.labels,
        k: clustering.k,
        frame_len: cfg.frame_len,
        intervals,
        silhouettes: clustering.silhouettes,
        theta_trajectory: None,
    })
}

/// Full pipeline plus clustering on one channel.
pub fn detect(x: &[f64], pipeline: &Pipeline) -> Result<(Analysis, DetectionResult)> {
    let analysis = pipeline.analyze(x)?;
    let result = detect_from_analysis(&analysis, pipeline)?;
    Ok((analysis, result))
}
