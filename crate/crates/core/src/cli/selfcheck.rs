//! Quick runtime verification of the numerical kernels against naive
//! reference computations, printed as a pass/fail table.

use std::f64::consts::PI;
use std::fmt;

use ndarray::{Array2, Array3, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detection::feature_dimension;
use crate::error::Result;
use crate::filterbank::{build_filterbank, build_scale_set, MotherWavelet};
use crate::numerics::{eigh, fft, inf_norm, quickselect_median, Complex64};
use crate::representation::{check_permutation_invariance, compute_rx, reduce_pca, Reducer};
use crate::scattering::{wavelet_modulus, ScatteringPlan};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<28} {}", self.name, self.detail)
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("fft vs direct DFT", fft_check),
    ("median vs sort", median_check),
    ("eigh reconstruction", eigen_check),
    ("pca vs power iteration", pca_check),
    ("rx sparsity", sparsity_check),
    ("lambda1 permutation", permutation_check),
    ("feature dimension", dimension_check),
    ("wavelet modulus vs direct", modulus_check),
];

/// Runs every check with a fixed seed.
pub fn run_selfcheck(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CHECKS
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = check(&mut rng).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult { name, passed, detail }
        })
        .collect()
}

fn fft_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=48 {
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let fast = fft(&x)?;
        let mut scale = 0.0f64;
        let mut err = 0.0f64;
        for k in 0..n {
            let direct: Complex64 = x
                .iter()
                .enumerate()
                .map(|(t, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64))
                .sum();
            scale = scale.max(direct.norm());
            err = err.max((direct - fast.bins()[k]).norm());
        }
        worst = worst.max(err / scale.max(1e-300));
    }
    Ok((worst <= 1e-10, format!("max rel err {worst:.2e}")))
}

fn median_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    for _ in 0..300 {
        let len: usize = rng.random_range(1..300);
        let v: Vec<f64> = (0..len).map(|_| rng.random_range(-5i32..5) as f64).collect();
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        let expected = sorted[len.div_ceil(2) - 1];
        if quickselect_median(&v)? != expected {
            return Ok((false, format!("mismatch at length {len}")));
        }
    }
    Ok((true, "300 arrays exact".into()))
}

fn eigen_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let n = rng.random_range(1..=20);
        let a = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0));
        let c = &a + &a.t();
        let e = eigh(c.view())?;
        let bound = inf_norm(c.view()).max(1.0);
        let residual = (&e.reconstruct() - &c).iter().fold(0.0f64, |m, v| m.max(v.abs())) / bound;
        let gram = e.eigenvectors.t().dot(&e.eigenvectors) - Array2::<f64>::eye(n);
        let ortho = gram.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(residual).max(ortho);
    }
    Ok((worst <= 1e-10, format!("max residual {worst:.2e}")))
}

/// Top eigenpair of a symmetric positive semi-definite matrix by power
/// iteration with a Rayleigh-quotient stop.
fn power_iteration(c: &Array2<f64>) -> (f64, Vec<f64>) {
    let n = c.nrows();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut value = 0.0;
    for _ in 0..200_000 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| c[[i, j]] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (0.0, v);
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        value = norm;
        if delta < 1e-13 {
            break;
        }
    }
    (value, v)
}

fn pca_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let (l1, l2, n) = (3, 2, 8);
    let mut worst_theta = 0.0f64;
    let mut worst_lx = 0.0f64;
    for _ in 0..20 {
        let rx = Array3::from_shape_fn((l1, l2, n), |_| rng.random_range(0.0..1.0));
        let got = reduce_pca(rx.view())?;
        for b in 0..l2 {
            let slice = rx.index_axis(Axis(1), b).to_owned();
            let mean = slice.mean_axis(Axis(1)).expect("non-empty");
            let centered = &slice - &mean.insert_axis(Axis(1));
            let cov = centered.dot(&centered.t()) / (n as f64 - 1.0);
            let trace: f64 = cov.diag().sum();
            let (top, v) = power_iteration(&cov);
            worst_theta = worst_theta.max((got.theta[b] - top / trace).abs());
            let proj: Vec<f64> = (0..n).map(|t| (0..l1).map(|i| v[i] * slice[[i, t]]).sum()).collect();
            let scale = proj.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            let dev = |sign: f64| (0..n).fold(0.0f64, |m, t| m.max((got.lx[[b, t]] - sign * proj[t]).abs())) / scale;
            worst_lx = worst_lx.max(dev(1.0).min(dev(-1.0)));
        }
    }
    Ok((
        worst_theta <= 1e-9 && worst_lx <= 1e-8,
        format!("theta {worst_theta:.1e}, lx {worst_lx:.1e}"),
    ))
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn sparsity_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let n = 2048;
    let s = build_scale_set(1, 4)?;
    let coeffs = ScatteringPlan::new(n, &s, &s)?.transform(&random_signal(rng, n))?;
    let (rx, _) = compute_rx(coeffs.s2.view(), 2.0)?;
    let fewest = rx
        .lanes(Axis(2))
        .into_iter()
        .map(|lane| lane.iter().filter(|v| **v == 0.0).count())
        .min()
        .unwrap_or(0);
    Ok((fewest >= n.div_ceil(2), format!("fewest zeros {fewest} of {n}")))
}

fn permutation_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let n = 1024;
    let s = build_scale_set(1, 4)?;
    let plan = ScatteringPlan::new(n, &s, &s)?;
    let x = random_signal(rng, n);
    let mut ok = true;
    for _ in 0..3 {
        let mut sigma: Vec<usize> = (0..s.len()).collect();
        sigma.shuffle(rng);
        for reducer in [Reducer::MaxPool, Reducer::Pca] {
            ok &= check_permutation_invariance(&x, &sigma, reducer, &plan, 2.0)?.holds();
        }
    }
    Ok((ok, "3 permutations, both reducers".into()))
}

fn dimension_check(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let baseline = feature_dimension(2, 10, 2, 10, Reducer::Pca);
    let mut ok = baseline == 861;
    for (j1, q1, j2, q2) in [(1, 1, 1, 1), (3, 4, 2, 3), (2, 2, 3, 1)] {
        let (a, b) = (j1 * q1, j2 * q2);
        ok &= feature_dimension(j1, q1, j2, q2, Reducer::Pca) == 1 + a + 2 * a * b + 2 * b;
    }
    Ok((ok, format!("baseline {baseline}")))
}

fn modulus_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let n = 64;
    let bank = build_filterbank(n, &build_scale_set(1, 2)?, &MotherWavelet::for_resolution(2)?)?;
    let x = random_signal(rng, n);
    let fast = wavelet_modulus(&x, &bank)?;
    let mut worst = 0.0f64;
    for j in 0..bank.len() {
        let psi: Vec<Complex64> = (0..n)
            .map(|t| {
                (0..n)
                    .map(|k| bank.psi(j)[k] * Complex64::from_polar(1.0, 2.0 * PI * (k * t) as f64 / n as f64))
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect();
        let direct: Vec<f64> = (0..n)
            .map(|t| (0..n).map(|s| x[s] * psi[(t + n - s) % n]).sum::<Complex64>().norm())
            .collect();
        let scale = direct.iter().fold(0.0f64, |m, v| m.max(*v)).max(1e-300);
        for t in 0..n {
            worst = worst.max((fast[[j, t]] - direct[t]).abs() / scale);
        }
    }
    Ok((worst <= 1e-9, format!("max rel err {worst:.2e}")))
}
