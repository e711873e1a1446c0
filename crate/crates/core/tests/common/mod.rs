//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerical kernels.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transient_scatter::numerics::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_signal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Lower median by full sort.
pub fn sorted_median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `max |a - b| / max |b|`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = max_abs(b.iter().copied()).max(1e-300);
    max_abs(a.iter().zip(b).map(|(p, q)| p - q)) / scale
}

/// Inverse DFT by direct summation.
pub fn direct_idft(spectrum: &[f64]) -> Vec<Complex64> {
    let n = spectrum.len();
    (0..n)
        .map(|t| {
            spectrum
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, 2.0 * PI * ((k * t) % n) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

/// Circular convolution of a real series with a complex filter, by direct
/// summation over lags.
pub fn direct_circular_conv(x: &[f64], h: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|t| (0..n).map(|s| h[(t + n - s) % n] * x[s]).sum())
        .collect()
}

/// Signed DFT bin frequency in `(-π, π]`.
pub fn omega(k: usize, n: usize) -> f64 {
    let k = k as f64;
    let n = n as f64;
    if 2.0 * k <= n {
        2.0 * PI * k / n
    } else {
        2.0 * PI * (k - n) / n
    }
}

/// Default mother-wavelet profile for `q` filters per octave, dilated by
/// `lambda`: `ĝ(λω - ξ) - K ĝ(λω)`, clipped at zero, zero for `ω <= 0`.
pub fn morlet_hat(omega: f64, lambda: f64, q: usize) -> f64 {
    let xi = 0.75 * PI;
    let sigma = xi / (2.0 * q as f64) / (2f64.powf(1.0 / q as f64) - 1.0);
    let g = |w: f64| (-w * w / (2.0 * sigma * sigma)).exp();
    let w = lambda * omega;
    if w <= 0.0 {
        return 0.0;
    }
    (g(w - xi) - g(xi) * g(w)).max(0.0)
}

pub fn scales(j: usize, q: usize) -> Vec<f64> {
    (0..j * q).map(|i| 2f64.powf(1.0 + i as f64 / q as f64)).collect()
}

/// Whole-sample mirror: `x[-1] = x[1]`, `x[n] = x[n-2]`.
pub fn mirror(x: &[f64], offset: usize, len: usize) -> Vec<f64> {
    let n = x.len() as isize;
    (0..len as isize)
        .map(|i| {
            let mut j = i - offset as isize;
            while j < 0 || j >= n {
                j = if j < 0 { -j } else { 2 * (n - 1) - j };
            }
            x[j as usize]
        })
        .collect()
}

/// Time-domain scattering by direct convolution on a mirror-padded window
/// of `padded` samples with the signal starting at `offset`. Returns cropped
/// `(U₁, U₂, S₂)`.
pub struct DirectScattering {
    pub u1: Array2<f64>,
    pub u2: Array3<f64>,
    pub s2: Array3<f64>,
}

pub fn direct_scattering(
    x: &[f64],
    (j1, q1): (usize, usize),
    (j2, q2): (usize, usize),
    padded: usize,
    offset: usize,
) -> DirectScattering {
    let n = x.len();
    let big = padded;
    let filters = |j: usize, q: usize| -> Vec<Vec<Complex64>> {
        scales(j, q)
            .iter()
            .map(|&lam| {
                let hat: Vec<f64> = (0..big).map(|k| morlet_hat(omega(k, big), lam, q)).collect();
                direct_idft(&hat)
            })
            .collect()
    };
    let psi1 = filters(j1, q1);
    let psi2 = filters(j2, q2);
    let lam_max = *scales(j1, q1).last().expect("non-empty");
    let phi_sigma = 0.75 * PI / lam_max;
    let phi_hat: Vec<f64> = (0..big)
        .map(|k| {
            let w = omega(k, big);
            (-w * w / (2.0 * phi_sigma * phi_sigma)).exp()
        })
        .collect();
    let phi = direct_idft(&phi_hat);

    let xp = mirror(x, offset, big);
    let crop = |v: &[f64]| v[offset..offset + n].to_vec();
    let modulus = |v: Vec<Complex64>| v.iter().map(|c| c.norm()).collect::<Vec<f64>>();

    let mut u1 = Array2::zeros((psi1.len(), n));
    let mut u2 = Array3::zeros((psi1.len(), psi2.len(), n));
    let mut s2 = Array3::zeros((psi1.len(), psi2.len(), n));
    for (a, h1) in psi1.iter().enumerate() {
        let first = modulus(direct_circular_conv(&xp, h1));
        for (t, v) in crop(&first).into_iter().enumerate() {
            u1[[a, t]] = v;
        }
        for (b, h2) in psi2.iter().enumerate() {
            let second = modulus(direct_circular_conv(&first, h2));
            let smooth: Vec<f64> = direct_circular_conv(&second, &phi).iter().map(|c| c.re).collect();
            for (t, (u, s)) in crop(&second).into_iter().zip(crop(&smooth)).enumerate() {
                u2[[a, b, t]] = u;
                s2[[a, b, t]] = s;
            }
        }
    }
    DirectScattering { u1, u2, s2 }
}

/// Top eigenpair of a symmetric positive semi-definite matrix.
pub fn power_iteration(c: &Array2<f64>) -> (f64, Vec<f64>) {
    let n = c.nrows();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut value = 0.0;
    for _ in 0..1_000_000 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| c[[i, j]] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (0.0, v);
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let delta = max_abs(next.iter().zip(&v).map(|(a, b)| a - b));
        v = next;
        value = norm;
        if delta < 1e-15 {
            break;
        }
    }
    (value, v)
}

/// Sample covariance over the columns of `x`, normalized by `n - 1`.
pub fn covariance(x: &Array2<f64>) -> Array2<f64> {
    let (k, n) = x.dim();
    let means: Vec<f64> = (0..k).map(|i| x.row(i).sum() / n as f64).collect();
    Array2::from_shape_fn((k, k), |(a, b)| {
        (0..n)
            .map(|t| (x[[a, t]] - means[a]) * (x[[b, t]] - means[b]))
            .sum::<f64>()
            / (n - 1) as f64
    })
}

/// Every file under `root`, keyed by its relative path.
pub fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir)
            .expect("readable dir")
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Least-squares slope of `log P(f)` against `log f` over `[lo, hi)` cycles
/// per sample, using a direct-DFT periodogram averaged over `segments`.
pub fn spectral_slope(x: &[f64], segments: usize, lo: f64, hi: f64) -> f64 {
    let len = x.len() / segments;
    let mut power = vec![0.0; len / 2];
    for seg in x.chunks_exact(len).take(segments) {
        for (k, p) in power.iter_mut().enumerate().skip(1) {
            let bin: Complex64 = seg
                .iter()
                .enumerate()
                .map(|(t, v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((k * t) % len) as f64 / len as f64))
                .sum();
            *p += bin.norm_sqr();
        }
    }
    let pts: Vec<(f64, f64)> = (1..len / 2)
        .map(|k| (k as f64 / len as f64, power[k]))
        .filter(|(f, _)| *f >= lo && *f < hi)
        .map(|(f, p)| (f.ln(), p.ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}
