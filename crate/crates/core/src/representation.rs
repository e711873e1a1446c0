//! Sparse transient representation.
//!
//! Per band `(λ₁, λ₂)`, `S₂x` is thresholded at its median over time and
//! passed through the power nonlinearity `ρ`, giving `Rx`. The `λ₁` axis is
//! then collapsed, either by projecting onto the top principal component of
//! each `λ₂` slice or by max-pooling, giving the `(λ₂, t)` map `Lx`.

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2, Array3, ArrayView2, ArrayView3, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigh, quickselect_median};
use crate::scattering::ScatteringPlan;

/// Default exponent of `ρ`.
pub const DEFAULT_EXPONENT: f64 = 2.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reducer {
    #[default]
    Pca,
    #[serde(rename = "maxpool")]
    MaxPool,
}

impl fmt::Display for Reducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reducer::Pca => "pca",
            Reducer::MaxPool => "maxpool",
        })
    }
}

impl FromStr for Reducer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pca" => Ok(Reducer::Pca),
            "maxpool" => Ok(Reducer::MaxPool),
            other => Err(Error::Config(format!(
                "unknown reducer {other:?} (expected pca or maxpool)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransientRep {
    /// Median thresholds, shape `(|Λ₁|, |Λ₂|)`.
    pub m: Array2<f64>,
    /// Shape `(|Λ₁|, |Λ₂|, n)`.
    pub rx: Array3<f64>,
    /// Shape `(|Λ₂|, n)`.
    pub lx: Array2<f64>,
    /// Variance fraction of the top component per `λ₂`; PCA only.
    pub theta: Option<Vec<f64>>,
    /// Top eigenvector per `λ₂` as columns, shape `(|Λ₁|, |Λ₂|)`; PCA only.
    pub eigvecs: Option<Array2<f64>>,
    pub reducer: Reducer,
    pub p: f64,
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `ρ`: zero at or below `threshold`, `(x - threshold)^p` above, then rescaled
/// so the output's maximum equals the input's largest magnitude. An all-zero
/// result is returned unscaled.
pub fn rho(x: &[f64], threshold: f64, p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    let mut out = vec![0.0; x.len()];
    rho_into(x, threshold, p, &mut out);
    Ok(out)
}

fn rho_into(x: &[f64], threshold: f64, p: f64, out: &mut [f64]) {
    let mut raw_max = 0.0f64;
    let mut in_max = 0.0f64;
    for (o, &v) in out.iter_mut().zip(x) {
        in_max = in_max.max(v.abs());
        *o = if v <= threshold { 0.0 } else { (v - threshold).powf(p) };
        raw_max = raw_max.max(*o);
    }
    if raw_max == 0.0 {
        return;
    }
    let scale = in_max / raw_max;
    for o in out.iter_mut() {
        // The peak is pinned so the infinity norm is preserved exactly.
        *o = if *o == raw_max { in_max } else { *o * scale };
    }
}

/// Median over time of every `(λ₁, λ₂)` band.
pub fn compute_thresholds(s2: ArrayView3<f64>) -> Result<Array2<f64>> {
    let (l1, l2, n) = s2.dim();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let mut m = Array2::zeros((l1, l2));
    let mut lane = Vec::with_capacity(n);
    for i in 0..l1 {
        for j in 0..l2 {
            lane.clear();
            lane.extend(s2.slice(s![i, j, ..]).iter());
            m[[i, j]] = quickselect_median(&lane)?;
        }
    }
    Ok(m)
}

/// `Rx = ρ_{m(λ₁,λ₂)}(S₂x)` band by band. Returns `(rx, m)`.
pub fn compute_rx(s2: ArrayView3<f64>, p: f64) -> Result<(Array3<f64>, Array2<f64>)> {
    check_exponent(p)?;
    let m = compute_thresholds(s2)?;
    let (l1, l2, n) = s2.dim();
    let mut rx = Array3::zeros((l1, l2, n));
    let mut lane = vec![0.0; n];
    let mut out = vec![0.0; n];
    for i in 0..l1 {
        for j in 0..l2 {
            lane.iter_mut().zip(s2.slice(s![i, j, ..])).for_each(|(d, v)| *d = *v);
            rho_into(&lane, m[[i, j]], p, &mut out);
            rx.slice_mut(s![i, j, ..])
                .iter_mut()
                .zip(&out)
                .for_each(|(d, v)| *d = *v);
        }
    }
    Ok((rx, m))
}

#[derive(Clone, Debug)]
pub struct PcaReduction {
    /// Shape `(|Λ₂|, n)`.
    pub lx: Array2<f64>,
    pub theta: Vec<f64>,
    /// Shape `(|Λ₁|, |Λ₂|)`.
    pub eigvecs: Array2<f64>,
}

/// Per-`λ₂` PCA over the `λ₁` axis.
///
/// The covariance is centered over time; the projection onto the top
/// eigenvector uses the uncentered rows. `theta` is the top eigenvalue over
/// the covariance trace, and a slice with zero trace gives `theta = 0` and a
/// zero `Lx` column.
pub fn reduce_pca(rx: ArrayView3<f64>) -> Result<PcaReduction> {
    let (l1, l2, n) = rx.dim();
    if n < 2 {
        return Err(Error::CovarianceUndefined);
    }
    let mut lx = Array2::zeros((l2, n));
    let mut theta = vec![0.0; l2];
    let mut eigvecs = Array2::zeros((l1, l2));

    for j in 0..l2 {
        let slice = rx.slice(s![.., j, ..]);
        let cov = covariance(slice);
        let trace: f64 = cov.diag().sum();
        if trace == 0.0 {
            continue;
        }
        let eig = eigh(cov.view())?;
        let top = eig.eigenvectors.column(0);
        theta[j] = (eig.eigenvalues[0] / trace).clamp(0.0, 1.0);
        eigvecs.column_mut(j).assign(&top);
        let mut out = lx.row_mut(j);
        for (i, row) in slice.outer_iter().enumerate() {
            let w = top[i];
            out.iter_mut().zip(row.iter()).for_each(|(o, v)| *o += w * v);
        }
    }
    Ok(PcaReduction { lx, theta, eigvecs })
}

/// Sample covariance (normalized by `n - 1`) between the rows of `x`.
fn covariance(x: ArrayView2<f64>) -> Array2<f64> {
    let (k, n) = x.dim();
    let centered: Vec<Vec<f64>> = x
        .outer_iter()
        .map(|row| {
            let mean = row.iter().sum::<f64>() / n as f64;
            row.iter().map(|v| v - mean).collect()
        })
        .collect();
    let mut cov = Array2::zeros((k, k));
    for a in 0..k {
        for b in a..k {
            let dot: f64 = centered[a].iter().zip(&centered[b]).map(|(p, q)| p * q).sum();
            cov[[a, b]] = dot / (n - 1) as f64;
            cov[[b, a]] = cov[[a, b]];
        }
    }
    cov
}

/// `Lx(t, λ₂) = max_λ₁ Rx(t, λ₁, λ₂)`.
pub fn reduce_maxpool(rx: ArrayView3<f64>) -> Array2<f64> {
    let (_, l2, n) = rx.dim();
    let mut lx = Array2::from_elem((l2, n), f64::NEG_INFINITY);
    for band in rx.outer_iter() {
        lx.zip_mut_with(&band, |acc, v| *acc = acc.max(*v));
    }
    if rx.len_of(Axis(0)) == 0 {
        lx.fill(0.0);
    }
    lx
}

/// Scales row `λ₂` of `lx` by `theta[λ₂]`.
pub fn weight_by_theta(lx: ArrayView2<f64>, theta: &[f64]) -> Result<Array2<f64>> {
    if lx.nrows() != theta.len() {
        return Err(Error::ShapeMismatch(format!(
            "lx has {} bands but theta has {}",
            lx.nrows(),
            theta.len()
        )));
    }
    let mut out = lx.to_owned();
    for (mut row, &w) in out.outer_iter_mut().zip(theta) {
        row.mapv_inplace(|v| v * w);
    }
    Ok(out)
}

/// Local maxima of `theta` along `λ₂`. A plateau counts as one maximum,
/// reported at its leftmost index, when every existing neighbour of the
/// plateau is strictly smaller.
pub fn select_representatives(theta: &[f64]) -> Vec<usize> {
    let n = theta.len();
    let mut picks = Vec::new();
    let mut start = 0;
    while start < n {
        let v = theta[start];
        let mut end = start;
        while end + 1 < n && theta[end + 1] == v {
            end += 1;
        }
        let left_ok = start == 0 || theta[start - 1] < v;
        let right_ok = end + 1 == n || theta[end + 1] < v;
        if left_ok && right_ok {
            picks.push(start);
        }
        start = end + 1;
    }
    picks
}

/// Thresholding plus reduction of a second-layer tensor.
pub fn transient_representation(s2: ArrayView3<f64>, p: f64, reducer: Reducer) -> Result<TransientRep> {
    let (rx, m) = compute_rx(s2, p)?;
    let (lx, theta, eigvecs) = match reducer {
        Reducer::Pca => {
            let r = reduce_pca(rx.view())?;
            (r.lx, Some(r.theta), Some(r.eigvecs))
        }
        Reducer::MaxPool => (reduce_maxpool(rx.view()), None, None),
    };
    Ok(TransientRep {
        m,
        rx,
        lx,
        theta,
        eigvecs,
        reducer,
        p,
    })
}

/// Outcome of recomputing `Lx` after permuting the `λ₁` bands of `U₁x`.
#[derive(Clone, Debug, Serialize)]
pub struct PermutationReport {
    pub reducer: Reducer,
    /// Every `Lx` (and `θ`) value matches bit for bit.
    pub bit_identical: bool,
    /// Largest `|Lx - Lx'|`, taking the better of the two signs per `λ₂`.
    pub max_lx_deviation: f64,
    pub lx_sup_norm: f64,
    pub max_theta_deviation: f64,
}

impl PermutationReport {
    /// Max-pooling must be bit-exact; PCA must agree up to column sign within
    /// `1e-8` relative, with `θ` within `1e-10`.
    pub fn holds(&self) -> bool {
        match self.reducer {
            Reducer::MaxPool => self.bit_identical,
            Reducer::Pca => self.max_lx_deviation <= 1e-8 * self.lx_sup_norm && self.max_theta_deviation <= 1e-10,
        }
    }
}

fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    if perm.len() != len {
        return Err(Error::InvalidPermutation(format!(
            "expected {len} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection on 0..{len}"
            )));
        }
    }
    Ok(())
}

/// Computes `Lx` from `U₁x` and from `Ũ₁x(t, λ₁) = U₁x(t, σ(λ₁))` and
/// reports how far apart they are.
pub fn check_permutation_invariance(
    x: &[f64],
    sigma: &[usize],
    reducer: Reducer,
    plan: &ScatteringPlan,
    p: f64,
) -> Result<PermutationReport> {
    check_permutation(sigma, plan.bank1().len())?;
    let u1 = plan.first_layer_padded(x)?;
    let permuted = u1.select(Axis(0), sigma);

    let (_, s2) = plan.second_layer(u1.view())?;
    let (_, s2p) = plan.second_layer(permuted.view())?;
    let a = transient_representation(s2.view(), p, reducer)?;
    let b = transient_representation(s2p.view(), p, reducer)?;
    Ok(compare_reps(&a, &b))
}

fn compare_reps(a: &TransientRep, b: &TransientRep) -> PermutationReport {
    let same_bits = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits());
    let theta_a = a.theta.clone().unwrap_or_default();
    let theta_b = b.theta.clone().unwrap_or_default();
    let bit_identical =
        a.lx.iter().zip(b.lx.iter()).all(|(p, q)| p.to_bits() == q.to_bits()) && same_bits(&theta_a, &theta_b);

    let mut max_lx_deviation = 0.0f64;
    for (ra, rb) in a.lx.outer_iter().zip(b.lx.outer_iter()) {
        let same = ra.iter().zip(rb.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let flipped = ra.iter().zip(rb.iter()).map(|(p, q)| (p + q).abs()).fold(0.0, f64::max);
        max_lx_deviation = max_lx_deviation.max(same.min(flipped));
    }
    let max_theta_deviation = theta_a
        .iter()
        .zip(&theta_b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    PermutationReport {
        reducer: a.reducer,
        bit_identical,
        max_lx_deviation,
        lx_sup_norm: a.lx.iter().map(|v| v.abs()).fold(0.0, f64::max),
        max_theta_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::build_scale_set;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut ChaCha8Rng, shape: (usize, usize, usize)) -> Array3<f64> {
        Array3::from_shape_fn(shape, |_| rng.random_range(0.0..1.0))
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&[0.0, 1.0, 3.0], 1.0, 2.0).unwrap(), vec![0.0, 0.0, 3.0]);
        assert_eq!(rho(&[0.5, 1.0, 0.2], 1.0, 2.0).unwrap(), vec![0.0; 3]);
        assert_eq!(rho(&[0.0, 2.0, 4.0], 0.0, 1.0).unwrap(), vec![0.0, 2.0, 4.0]);
    }

    #[test]
    fn rho_rejects_bad_exponent() {
        for p in [0.0, -1.0, f64::NAN] {
            assert!(rho(&[1.0], 0.0, p)
                .unwrap_err()
                .to_string()
                .starts_with("invalid exponent"));
        }
    }

    #[test]
    fn thresholds_examples() {
        let s2 = Array3::from_shape_vec((1, 2, 5), vec![1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 7.0, 7.0, 7.0, 7.0]).unwrap();
        let m = compute_thresholds(s2.view()).unwrap();
        assert_eq!(m[[0, 0]], 3.0);
        assert_eq!(m[[0, 1]], 7.0);
        assert!(compute_thresholds(Array3::<f64>::zeros((1, 1, 0)).view()).is_err());
    }

    #[test]
    fn thresholds_match_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s2 = random_tensor(&mut rng, (4, 3, 101));
        let m = compute_thresholds(s2.view()).unwrap();
        for i in 0..4 {
            for j in 0..3 {
                let mut v = s2.slice(s![i, j, ..]).to_vec();
                v.sort_by(f64::total_cmp);
                assert_eq!(m[[i, j]], v[50]);
            }
        }
    }

    #[test]
    fn constant_s2_gives_zero_rx() {
        let s2 = Array3::from_elem((3, 2, 40), 1.25);
        let (rx, m) = compute_rx(s2.view(), 2.0).unwrap();
        assert!(rx.iter().all(|v| *v == 0.0));
        assert!(m.iter().all(|v| *v == 1.25));
    }

    #[test]
    fn spike_above_median_only_marks_supra_median_samples() {
        // 16-sample slice: background 1..=8 twice with a spike of 20 at t=5.
        let mut slice: Vec<f64> = (0..16).map(|t| (t % 8 + 1) as f64).collect();
        slice[5] = 20.0;
        let s2 = Array3::from_shape_vec((1, 1, 16), slice.clone()).unwrap();
        let (rx, m) = compute_rx(s2.view(), 2.0).unwrap();
        // Sorted: 1,1,2,2,3,3,4,4,5,5,7,7,8,8,8,20 -> 8th smallest is 4.
        assert_eq!(m[[0, 0]], 4.0);
        let raw: Vec<f64> = slice
            .iter()
            .map(|&v| if v <= 4.0 { 0.0 } else { (v - 4.0) * (v - 4.0) })
            .collect();
        let scale = 20.0 / 256.0;
        for t in 0..16 {
            let expected = if raw[t] == 256.0 { 20.0 } else { raw[t] * scale };
            assert_eq!(rx[[0, 0, t]], expected);
            assert_eq!(rx[[0, 0, t]] > 0.0, slice[t] > 4.0);
        }
    }

    #[test]
    fn pca_rank_one_slice() {
        let n = 50;
        let a: Vec<f64> = (0..n).map(|t| ((t * 7) % 11) as f64).collect();
        let b = [0.5, 2.0, 1.0];
        let rx = Array3::from_shape_fn((3, 1, n), |(i, _, t)| a[t] * b[i]);
        let r = reduce_pca(rx.view()).unwrap();
        assert!((r.theta[0] - 1.0).abs() < 1e-12);
        let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        for t in 0..n {
            assert!((r.lx[[0, t]] - a[t] * norm_b).abs() < 1e-10);
        }
    }

    #[test]
    fn pca_zero_slice() {
        let rx = Array3::<f64>::zeros((4, 2, 10));
        let r = reduce_pca(rx.view()).unwrap();
        assert_eq!(r.theta, vec![0.0, 0.0]);
        assert!(r.lx.iter().all(|v| *v == 0.0));
        assert!(reduce_pca(Array3::<f64>::zeros((2, 2, 1)).view()).is_err());
    }

    /// Builds the covariance explicitly and power-iterates.
    fn power_iteration_oracle(slice: &Array2<f64>) -> (f64, Vec<f64>, f64) {
        let (k, n) = slice.dim();
        let means: Vec<f64> = (0..k).map(|i| slice.row(i).sum() / n as f64).collect();
        let mut c = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in 0..k {
                let mut acc = 0.0;
                for t in 0..n {
                    acc += (slice[[a, t]] - means[a]) * (slice[[b, t]] - means[b]);
                }
                c[a][b] = acc / (n as f64 - 1.0);
            }
        }
        let trace: f64 = (0..k).map(|i| c[i][i]).sum();
        let mut v = vec![1.0 / (k as f64).sqrt(); k];
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            let w: Vec<f64> = (0..k).map(|a| (0..k).map(|b| c[a][b] * v[b]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let delta = next.iter().zip(&v).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            v = next;
            lambda = norm;
            if delta < 1e-14 {
                break;
            }
        }
        (lambda, v, trace)
    }

    #[test]
    fn pca_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rx = random_tensor(&mut rng, (3, 2, 8));
        let r = reduce_pca(rx.view()).unwrap();
        for j in 0..2 {
            let slice = rx.slice(s![.., j, ..]).to_owned();
            let (lambda, v, trace) = power_iteration_oracle(&slice);
            assert!((r.theta[j] - lambda / trace).abs() < 1e-9);
            let proj: Vec<f64> = (0..8).map(|t| (0..3).map(|i| v[i] * slice[[i, t]]).sum()).collect();
            let sup = proj.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let same = (0..8).map(|t| (r.lx[[j, t]] - proj[t]).abs()).fold(0.0, f64::max);
            let flip = (0..8).map(|t| (r.lx[[j, t]] + proj[t]).abs()).fold(0.0, f64::max);
            assert!(same.min(flip) <= 1e-8 * sup);
        }
    }

    #[test]
    fn maxpool_examples() {
        let mut rx = Array3::<f64>::zeros((3, 2, 5));
        rx.slice_mut(s![1, 0, ..])
            .assign(&ndarray::arr1(&[1.0, 0.0, 2.0, 0.5, 0.0]));
        let lx = reduce_maxpool(rx.view());
        assert_eq!(lx.row(0).to_vec(), vec![1.0, 0.0, 2.0, 0.5, 0.0]);
        assert!(lx.row(1).iter().all(|v| *v == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rx = random_tensor(&mut rng, (5, 3, 20));
        let lx = reduce_maxpool(rx.view());
        for j in 0..3 {
            for t in 0..20 {
                let mut best = rx[[0, j, t]];
                for i in 1..5 {
                    if rx[[i, j, t]] > best {
                        best = rx[[i, j, t]];
                    }
                }
                assert_eq!(lx[[j, t]], best);
            }
        }
    }

    #[test]
    fn theta_weighting() {
        let lx = ndarray::arr2(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(weight_by_theta(lx.view(), &[1.0, 1.0]).unwrap(), lx);
        assert_eq!(
            weight_by_theta(lx.view(), &[1.0, 0.0]).unwrap(),
            ndarray::arr2(&[[1.0, 2.0], [0.0, 0.0]])
        );
        assert_eq!(
            weight_by_theta(lx.view(), &[0.5, 1.0]).unwrap(),
            ndarray::arr2(&[[0.5, 1.0], [3.0, 4.0]])
        );
        assert!(weight_by_theta(lx.view(), &[1.0]).is_err());
    }

    #[test]
    fn representative_selection() {
        assert_eq!(select_representatives(&[0.1, 0.5, 0.2, 0.1, 0.6, 0.3]), vec![1, 4]);
        assert_eq!(select_representatives(&[0.1, 0.2, 0.3, 0.4]), vec![3]);
        assert_eq!(select_representatives(&[0.4, 0.4, 0.4]), vec![0]);
        assert_eq!(select_representatives(&[0.2, 0.7, 0.7, 0.1]), vec![1]);
        assert_eq!(select_representatives(&[0.7, 0.1]), vec![0]);
        assert_eq!(select_representatives(&[0.3]), vec![0]);
    }

    #[test]
    fn invalid_permutation_is_rejected() {
        let scales = build_scale_set(1, 3).unwrap();
        let plan = ScatteringPlan::new(64, &scales, &scales).unwrap();
        let x = vec![0.0; 64];
        for bad in [vec![0, 1], vec![0, 0, 1], vec![0, 1, 3]] {
            assert!(matches!(
                check_permutation_invariance(&x, &bad, Reducer::MaxPool, &plan, 2.0),
                Err(Error::InvalidPermutation(_))
            ));
        }
    }

    #[test]
    fn permutation_invariance_both_reducers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s1 = build_scale_set(2, 3).unwrap();
        let s2 = build_scale_set(1, 3).unwrap();
        let n = 512;
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for t in 200..230 {
            x[t] += 6.0 * ((t - 200) as f64 * 0.8).sin();
        }
        let plan = ScatteringPlan::new(n, &s1, &s2).unwrap();
        let identity: Vec<usize> = (0..6).collect();
        let r = check_permutation_invariance(&x, &identity, Reducer::Pca, &plan, 2.0).unwrap();
        assert!(r.bit_identical && r.max_lx_deviation == 0.0);

        let reversal: Vec<usize> = (0..6).rev().collect();
        let r = check_permutation_invariance(&x, &reversal, Reducer::MaxPool, &plan, 2.0).unwrap();
        assert!(r.bit_identical && r.holds());

        let mut sigma = identity.clone();
        sigma.shuffle(&mut rng);
        let r = check_permutation_invariance(&x, &sigma, Reducer::Pca, &plan, 2.0).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    proptest! {
        #[test]
        fn rx_is_sparse_and_keeps_sup_norm(
            values in proptest::collection::vec(0.0f64..100.0, 1..200),
            p in 0.25f64..4.0,
        ) {
            let n = values.len();
            let s2 = Array3::from_shape_vec((1, 1, n), values.clone()).unwrap();
            let (rx, _) = compute_rx(s2.view(), p).unwrap();
            let zeros = rx.iter().filter(|v| **v == 0.0).count();
            prop_assert!(zeros >= n.div_ceil(2));
            prop_assert!(rx.iter().all(|v| *v >= 0.0));
            let rx_max = rx.iter().cloned().fold(0.0, f64::max);
            if rx_max > 0.0 {
                prop_assert_eq!(rx_max, values.iter().cloned().fold(0.0, f64::max));
            }
        }

        #[test]
        fn rho_is_monotone_above_threshold(
            values in proptest::collection::vec(0.0f64..10.0, 2..50),
            m in 0.0f64..5.0,
            p in 0.5f64..3.0,
        ) {
            let out = rho(&values, m, p).unwrap();
            for a in 0..values.len() {
                for b in 0..values.len() {
                    if values[a] > values[b] && values[b] > m {
                        prop_assert!(out[a] > out[b]);
                    }
                }
            }
        }

        #[test]
        fn maxpool_pipeline_is_positively_homogeneous(
            values in proptest::collection::vec(0.0f64..10.0, 24),
            c in 0.1f64..10.0,
        ) {
            let s2 = Array3::from_shape_vec((2, 2, 6), values).unwrap();
            let scaled = s2.mapv(|v| v * c);
            let a = transient_representation(s2.view(), 2.0, Reducer::MaxPool).unwrap();
            let b = transient_representation(scaled.view(), 2.0, Reducer::MaxPool).unwrap();
            for (x, y) in a.m.iter().zip(b.m.iter()) {
                prop_assert!((x * c - y).abs() <= 1e-12 * y.abs().max(1e-300));
            }
            for (x, y) in a.lx.iter().zip(b.lx.iter()) {
                prop_assert!((x * c - y).abs() <= 1e-10 * y.abs().max(1.0));
            }
        }

        #[test]
        fn theta_is_a_fraction(values in proptest::collection::vec(0.0f64..1.0, 60)) {
            let rx = Array3::from_shape_vec((3, 2, 10), values).unwrap();
            let r = reduce_pca(rx.view()).unwrap();
            prop_assert!(r.theta.iter().all(|t| (0.0..=1.0).contains(t)));
        }

        #[test]
        fn maxpool_is_invariant_to_band_order(
            values in proptest::collection::vec(0.0f64..1.0, 40),
            seed in any::<u64>(),
        ) {
            let rx = Array3::from_shape_vec((4, 1, 10), values).unwrap();
            let mut perm: Vec<usize> = (0..4).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let permuted = rx.select(Axis(0), &perm);
            prop_assert_eq!(reduce_maxpool(rx.view()), reduce_maxpool(permuted.view()));
        }
    }
}
