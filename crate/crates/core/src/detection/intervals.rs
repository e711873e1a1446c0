use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::numerics::quickselect_median;

/// Consistency constant turning a MAD into a Gaussian standard deviation.
const MAD_TO_SIGMA: f64 = 1.4826;

/// Inclusive range `[start, end]` assigned to `cluster`. Units are frames or
/// samples depending on where it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
    pub cluster: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.start <= end && start <= self.end
    }
}

/// The cluster with the largest ratio of mean `Lx` row L1-norm to
/// occupancy fraction: energetic and rare. `None` with fewer than two
/// distinct labels.
pub fn transient_cluster(labels: &[usize], lx_frames: ArrayView2<f64>) -> Option<usize> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut energy = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (&l, row) in labels.iter().zip(lx_frames.outer_iter()) {
        energy[l] += row.iter().map(|v| v.abs()).sum::<f64>();
        count[l] += 1;
    }
    if count.iter().filter(|c| **c > 0).count() < 2 {
        return None;
    }
    let total = labels.len() as f64;
    let mut best: Option<(f64, usize)> = None;
    for c in 0..k {
        if count[c] == 0 {
            continue;
        }
        let mean = energy[c] / count[c] as f64;
        let score = mean / (count[c] as f64 / total);
        // Ties go to the cluster whose first frame comes first.
        let first = labels.iter().position(|&l| l == c).unwrap_or(usize::MAX);
        let better = match best {
            None => true,
            Some((s, b)) => {
                score > s || (score == s && first < labels.iter().position(|&l| l == b).unwrap_or(usize::MAX))
            }
        };
        if better {
            best = Some((score, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Maximal runs of the transient cluster's label, in frame units, dropping
/// runs shorter than `min_frames`.
pub fn extract_intervals(labels: &[usize], lx_frames: ArrayView2<f64>, min_frames: usize) -> Vec<Interval> {
    let Some(target) = transient_cluster(labels, lx_frames) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        if labels[i] != target {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < labels.len() && labels[i + 1] == target {
            i += 1;
        }
        if i - start + 1 >= min_frames {
            out.push(Interval {
                start,
                end: i,
                cluster: target,
            });
        }
        i += 1;
    }
    out
}

/// L1 norm of each frame's `Lx` row.
pub fn frame_energies(lx_frames: ArrayView2<f64>) -> Vec<f64> {
    lx_frames
        .outer_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum())
        .collect()
}

/// `(e - median) / (1.4826 · MAD)` for each entry. With zero MAD, entries
/// above the median score `+∞` and the rest `0`.
pub fn robust_zscores(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let median = quickselect_median(values).unwrap_or(0.0);
    let deviations: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
    let mad = quickselect_median(&deviations).unwrap_or(0.0);
    values
        .iter()
        .map(|&v| {
            if mad > 0.0 {
                (v - median) / (MAD_TO_SIGMA * mad)
            } else if v > median {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect()
}

/// Keeps the frame-unit intervals whose loudest frame reaches a robust
/// z-score of `min_z` among all frame energies.
pub fn significant_intervals(intervals: &[Interval], lx_frames: ArrayView2<f64>, min_z: f64) -> Vec<Interval> {
    let z = robust_zscores(&frame_energies(lx_frames));
    intervals
        .iter()
        .filter(|iv| z[iv.start..=iv.end].iter().any(|&v| v >= min_z))
        .copied()
        .collect()
}

/// Converts frame-unit intervals to samples, clipping the last frame to the
/// signal, and drops those shorter than `min_duration` samples.
pub fn frames_to_samples(intervals: &[Interval], frame_len: usize, n: usize, min_duration: usize) -> Vec<Interval> {
    intervals
        .iter()
        .filter_map(|iv| {
            let start = iv.start * frame_len;
            let end = ((iv.end + 1) * frame_len).min(n).checked_sub(1)?;
            let out = Interval {
                start,
                end,
                cluster: iv.cluster,
            };
            (start < n && out.len() >= min_duration).then_some(out)
        })
        .collect()
}
