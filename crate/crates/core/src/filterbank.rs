//! Geometric scale sets and Fourier-domain wavelet filter banks.
//!
//! Filters are sampled on the `n`-point DFT grid `ω_k = 2πk/n`, mapped to
//! `(-π, π]`. Dilation follows the L¹ convention, `ψ̂_λ(ω) = ψ̂₀(λω)`, which
//! keeps every band-pass filter at unit peak gain.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative amplitude at which a filter's time-domain envelope is treated as
/// having ended.
pub const SUPPORT_THRESHOLD: f64 = 1e-6;

/// Dilation factors `2^{1 + j/Q}` for `j = 0..J·Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSet {
    scales: Vec<f64>,
    octaves: usize,
    per_octave: usize,
}

impl ScaleSet {
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// `J`.
    pub fn octaves(&self) -> usize {
        self.octaves
    }

    /// `Q`.
    pub fn per_octave(&self) -> usize {
        self.per_octave
    }

    pub fn min_scale(&self) -> f64 {
        self.scales[0]
    }

    pub fn max_scale(&self) -> f64 {
        self.scales[self.scales.len() - 1]
    }
}

pub fn build_scale_set(octaves: usize, per_octave: usize) -> Result<ScaleSet> {
    if octaves == 0 || per_octave == 0 {
        return Err(Error::InvalidGeometry { octaves, per_octave });
    }
    let q = per_octave as f64;
    let scales = (0..octaves * per_octave)
        .map(|j| 2f64.powf(1.0 + j as f64 / q))
        .collect();
    Ok(ScaleSet {
        scales,
        octaves,
        per_octave,
    })
}

/// Analytic Morlet-style mother wavelet, defined by its Fourier profile
///
/// ```text
/// ψ̂₀(ω) = exp(-(ω-ξ)²/2σ²) - K·exp(-ω²/2σ²)   for ω > 0
///        = 0                                  for ω ≤ 0
/// ```
///
/// with `K = exp(-ξ²/2σ²)` so that `ψ̂₀(0) = 0`. The profile is non-negative
/// for all `ω ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotherWavelet {
    center: f64,
    bandwidth: f64,
}

impl MotherWavelet {
    /// 3π/4 rad/sample: the finest wavelet (λ = 2) sits at 3π/8.
    pub const DEFAULT_CENTER: f64 = 0.75 * PI;

    pub fn new(center: f64, bandwidth: f64) -> Result<Self> {
        let valid = center.is_finite() && center > 0.0 && center < PI && bandwidth.is_finite() && bandwidth > 0.0;
        if !valid {
            return Err(Error::InvalidMotherWavelet { center, bandwidth });
        }
        Ok(Self { center, bandwidth })
    }

    /// Default wavelet for `Q` filters per octave, with bandwidth
    /// `σ = ξ/(2Q) · (2^{1/Q} - 1)⁻¹`.
    ///
    /// This is wide (about 1.6 rad/sample at `Q = 10`), so first-layer
    /// envelopes keep enough fast structure for the second layer to see.
    pub fn for_resolution(per_octave: usize) -> Result<Self> {
        let q = check_resolution(per_octave)?;
        let center = Self::DEFAULT_CENTER;
        Self::new(center, center / (2.0 * q) / (2f64.powf(1.0 / q) - 1.0))
    }

    /// Narrow alternative whose neighbouring dilations `λ` and `λ·2^{1/Q}`
    /// cross exactly at their half-power point (`|ψ̂|² = 1/2`).
    pub fn half_power(per_octave: usize) -> Result<Self> {
        let ratio = 2f64.powf(1.0 / check_resolution(per_octave)?);
        let center = Self::DEFAULT_CENTER;
        Self::new(
            center,
            center * (ratio - 1.0) / ((ratio + 1.0) * std::f64::consts::LN_2.sqrt()),
        )
    }

    /// `ξ₀`, rad/sample.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// `σ_w`, rad/sample.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// The admissibility correction weight `K`.
    pub fn correction(&self) -> f64 {
        gaussian(self.center, self.bandwidth)
    }

    pub fn hat(&self, omega: f64) -> f64 {
        if omega.is_nan() || omega <= 0.0 {
            return 0.0;
        }
        let value = gaussian(omega - self.center, self.bandwidth) - self.correction() * gaussian(omega, self.bandwidth);
        value.max(0.0)
    }
}

fn check_resolution(per_octave: usize) -> Result<f64> {
    if per_octave == 0 {
        return Err(Error::InvalidGeometry { octaves: 1, per_octave });
    }
    Ok(per_octave as f64)
}

/// `ψ̂₀(ω)` for the given mother wavelet.
pub fn mother_wavelet_hat(omega: f64, mother: &MotherWavelet) -> f64 {
    mother.hat(omega)
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp()
}

/// Angular frequency of DFT bin `k` on an `n`-point grid, in `(-π, π]`.
pub fn bin_frequency(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        2.0 * PI * k as f64 / n as f64
    } else {
        -2.0 * PI * (n - k) as f64 / n as f64
    }
}

/// Band-pass filters `ψ̂_λ` (one row per scale) plus the Gaussian low-pass
/// `φ̂`, all real and non-negative on the DFT grid.
#[derive(Clone, Debug)]
pub struct FilterBank {
    psi_hat: Array2<f64>,
    phi_hat: Vec<f64>,
    n: usize,
    scale_set: ScaleSet,
    mother: MotherWavelet,
    phi_bandwidth: f64,
}

pub fn build_filterbank(n: usize, scale_set: &ScaleSet, mother: &MotherWavelet) -> Result<FilterBank> {
    if n < 2 {
        return Err(Error::FilterTooShort(n));
    }
    // Re-validate: the fields are private but the struct is also deserializable.
    let mother = MotherWavelet::new(mother.center, mother.bandwidth)?;
    let omegas: Vec<f64> = (0..n).map(|k| bin_frequency(k, n)).collect();

    let psi_hat = Array2::from_shape_fn((scale_set.len(), n), |(j, k)| {
        mother.hat(scale_set.scales[j] * omegas[k])
    });
    let phi_bandwidth = mother.center / scale_set.max_scale();
    let phi_hat = omegas.iter().map(|&w| gaussian(w, phi_bandwidth)).collect();

    Ok(FilterBank {
        psi_hat,
        phi_hat,
        n,
        scale_set: scale_set.clone(),
        mother,
        phi_bandwidth,
    })
}

impl FilterBank {
    /// Transform length the filters were sampled for.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.scale_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scale_set.is_empty()
    }

    pub fn scale_set(&self) -> &ScaleSet {
        &self.scale_set
    }

    pub fn mother(&self) -> &MotherWavelet {
        &self.mother
    }

    /// All band-pass filters, shape `(|Λ|, n)`.
    pub fn psi_hat(&self) -> &Array2<f64> {
        &self.psi_hat
    }

    pub fn psi(&self, band: usize) -> ArrayView1<'_, f64> {
        self.psi_hat.row(band)
    }

    pub fn phi_hat(&self) -> &[f64] {
        &self.phi_hat
    }

    /// Standard deviation of `φ̂`, rad/sample.
    pub fn phi_bandwidth(&self) -> f64 {
        self.phi_bandwidth
    }

    /// `ψ̂_λ(ω)` evaluated off-grid for band `band`.
    pub fn psi_at(&self, band: usize, omega: f64) -> f64 {
        self.mother.hat(self.scale_set.scales[band] * omega)
    }

    /// Largest value taken by any band-pass filter on the grid.
    pub fn psi_sup_norm(&self) -> f64 {
        self.psi_hat.iter().cloned().fold(0.0, f64::max)
    }

    /// `Σ_λ |ψ̂_λ(ω_k)|² + |φ̂(ω_k)|²` for every bin.
    pub fn littlewood_paley(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                let psi: f64 = self.psi_hat.column(k).iter().map(|v| v * v).sum();
                psi + self.phi_hat[k] * self.phi_hat[k]
            })
            .collect()
    }

    /// Half-width, in samples, of the time-domain envelope of `φ` down to
    /// [`SUPPORT_THRESHOLD`] of its peak.
    pub fn phi_half_support(&self) -> f64 {
        envelope_half_width(self.phi_bandwidth)
    }

    /// Same as [`phi_half_support`](Self::phi_half_support) for the coarsest
    /// (widest in time) band-pass filter.
    pub fn coarsest_psi_half_support(&self) -> f64 {
        envelope_half_width(self.mother.bandwidth / self.scale_set.max_scale())
    }
}

/// A Gaussian of spectral standard deviation `sigma` has a Gaussian time
/// envelope of standard deviation `1/sigma`.
fn envelope_half_width(sigma: f64) -> f64 {
    (2.0 * (1.0 / SUPPORT_THRESHOLD).ln()).sqrt() / sigma
}
