//! k-medoids clustering under the city-block (L1) distance, with the number
//! of clusters chosen by mean silhouette.

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ITER: usize = 100;
/// Below this best mean silhouette the data is reported as a single cluster.
pub const MIN_SILHOUETTE: f64 = 0.2;
/// Pairwise distances all below this mean every frame is the same point.
pub const IDENTICAL_DISTANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Clustering {
    /// Cluster id per frame, numbered by first appearance.
    pub labels: Vec<usize>,
    pub k: usize,
    /// Frame index of each cluster's medoid, by cluster id.
    pub medoids: Vec<usize>,
    /// Mean silhouette for each `k` that was tried.
    pub silhouettes: Vec<(usize, f64)>,
}

/// Result of one k-medoids run.
#[derive(Clone, Debug)]
pub struct KMedoids {
    pub medoids: Vec<usize>,
    pub labels: Vec<usize>,
    /// Total distance to the nearest medoid after initialization and after
    /// every accepted swap.
    pub objective: Vec<f64>,
}

pub fn l1_distance_matrix(frames: ArrayView2<f64>) -> Array2<f64> {
    let n = frames.nrows();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v: f64 = frames
                .row(i)
                .iter()
                .zip(frames.row(j).iter())
                .map(|(a, b)| (a - b).abs())
                .sum();
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    d
}

/// PAM-style k-medoids on a precomputed distance matrix.
///
/// The first medoid is drawn from `seed`; the rest are added farthest-point
/// first. Then the single best medoid/non-medoid swap is applied while it
/// lowers the objective, up to [`MAX_ITER`] swaps.
///
/// # Panics
///
/// If `k` is zero or larger than the number of points.
pub fn k_medoids(dist: ArrayView2<f64>, k: usize, seed: u64) -> KMedoids {
    let n = dist.nrows();
    assert!(k >= 1 && k <= n, "k = {k} with {n} points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = vec![rng.random_range(0..n)];
    let mut is_medoid = vec![false; n];
    is_medoid[medoids[0]] = true;
    let mut nearest: Vec<f64> = (0..n).map(|o| dist[[o, medoids[0]]]).collect();
    while medoids.len() < k {
        let mut pick = None;
        for o in 0..n {
            if !is_medoid[o] && pick.is_none_or(|p: usize| nearest[o] > nearest[p]) {
                pick = Some(o);
            }
        }
        let pick = pick.expect("k <= n leaves a candidate");
        medoids.push(pick);
        is_medoid[pick] = true;
        for o in 0..n {
            nearest[o] = nearest[o].min(dist[[o, pick]]);
        }
    }

    let mut assignment = Assignment::compute(dist, &medoids);
    let mut objective = vec![assignment.total()];
    for _ in 0..MAX_ITER {
        if k == n {
            break;
        }
        let current = assignment.total();
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..k {
            for h in 0..n {
                if is_medoid[h] {
                    continue;
                }
                let delta = assignment.swap_delta(dist, slot, h);
                if best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, slot, h));
                }
            }
        }
        match best {
            Some((delta, slot, h)) if delta < -1e-12 * current => {
                is_medoid[medoids[slot]] = false;
                is_medoid[h] = true;
                medoids[slot] = h;
                assignment = Assignment::compute(dist, &medoids);
                objective.push(assignment.total());
            }
            _ => break,
        }
    }
    KMedoids {
        labels: assignment.slot,
        medoids,
        objective,
    }
}

/// Nearest and second-nearest medoid of every point.
struct Assignment {
    slot: Vec<usize>,
    near: Vec<f64>,
    second: Vec<f64>,
}

impl Assignment {
    fn compute(dist: ArrayView2<f64>, medoids: &[usize]) -> Self {
        let n = dist.nrows();
        let mut slot = vec![0; n];
        let mut near = vec![f64::INFINITY; n];
        let mut second = vec![f64::INFINITY; n];
        for o in 0..n {
            for (s, &m) in medoids.iter().enumerate() {
                let d = dist[[o, m]];
                if d < near[o] {
                    second[o] = near[o];
                    near[o] = d;
                    slot[o] = s;
                } else if d < second[o] {
                    second[o] = d;
                }
            }
        }
        Self { slot, near, second }
    }

    fn total(&self) -> f64 {
        self.near.iter().sum()
    }

    /// Change in objective when medoid `slot` is replaced by point `h`.
    fn swap_delta(&self, dist: ArrayView2<f64>, slot: usize, h: usize) -> f64 {
        let mut delta = 0.0;
        for o in 0..self.near.len() {
            let to_h = dist[[o, h]];
            let next = if self.slot[o] == slot {
                to_h.min(self.second[o])
            } else {
                to_h.min(self.near[o])
            };
            delta += next - self.near[o];
        }
        delta
    }
}

/// Mean silhouette of a labelling. Points alone in their cluster score 0.
pub fn mean_silhouette(dist: ArrayView2<f64>, labels: &[usize], k: usize) -> f64 {
    let n = labels.len();
    if n == 0 {
        return 0.0;
    }
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            sums[labels[j]] += dist[[i, j]];
        }
        let own = labels[i];
        if sizes[own] <= 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 && b.is_finite() {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

/// Renumbers labels in order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut mapping: Vec<Option<usize>> = Vec::new();
    let mut order = Vec::new();
    let relabelled = labels
        .iter()
        .map(|&l| {
            if l >= mapping.len() {
                mapping.resize(l + 1, None);
            }
            *mapping[l].get_or_insert_with(|| {
                order.push(l);
                order.len() - 1
            })
        })
        .collect();
    (relabelled, order)
}

/// Clusters frames (rows) for every `k` in `2..=k_max` and keeps the best
/// mean silhouette; falls back to `k = 1` when no split scores at least
/// [`MIN_SILHOUETTE`] or all frames coincide.
pub fn cluster_frames(frames: ArrayView2<f64>, k_max: usize, seed: u64) -> Result<Clustering> {
    let n = frames.nrows();
    if n < 2 {
        return Err(Error::Pipeline(format!("clustering needs at least 2 frames, got {n}")));
    }
    if k_max == 0 {
        return Err(Error::Config("k_max must be positive".into()));
    }
    let dist = l1_distance_matrix(frames);
    let single = Clustering {
        labels: vec![0; n],
        k: 1,
        medoids: vec![k_medoids(dist.view(), 1, seed).medoids[0]],
        silhouettes: Vec::new(),
    };
    if dist.iter().all(|d| *d < IDENTICAL_DISTANCE) {
        return Ok(single);
    }

    let mut silhouettes = Vec::new();
    let mut best: Option<(f64, usize, KMedoids)> = None;
    for k in 2..=k_max.min(n - 1) {
        let run = k_medoids(dist.view(), k, seed);
        let score = mean_silhouette(dist.view(), &run.labels, k);
        silhouettes.push((k, score));
        if best.as_ref().is_none_or(|(b, _, _)| score > *b) {
            best = Some((score, k, run));
        }
    }
    match best {
        Some((score, k, run)) if score >= MIN_SILHOUETTE => {
            let (labels, order) = canonical_labels(&run.labels);
            Ok(Clustering {
                labels,
                k,
                medoids: order.iter().map(|&slot| run.medoids[slot]).collect(),
                silhouettes,
            })
        }
        _ => Ok(Clustering { silhouettes, ..single }),
    }
}
