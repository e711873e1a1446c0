//! Seeded test-signal generators: colored noise, bursts in noise, chirps and
//! regime switches. Every generator is a pure function of its parameters.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{fft_real, quickselect_median, Complex64, FftPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Noise,
    Burst,
    Chirp,
    Regime,
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::Noise => "noise",
            SynthKind::Burst => "burst",
            SynthKind::Chirp => "chirp",
            SynthKind::Regime => "regime",
        })
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noise" => Ok(SynthKind::Noise),
            "burst" => Ok(SynthKind::Burst),
            "chirp" => Ok(SynthKind::Chirp),
            "regime" => Ok(SynthKind::Regime),
            other => Err(Error::Config(format!(
                "unknown synth kind {other:?} (expected noise, burst, chirp or regime)"
            ))),
        }
    }
}

/// Parameters shared by all generators; each kind reads the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub kind: SynthKind,
    pub n: usize,
    pub seed: u64,
    /// Spectral exponent of the background noise, `P(f) ∝ f^-alpha`.
    pub alpha: f64,
    /// Number of bursts.
    pub count: usize,
    /// Burst peak in units of the background MAD.
    pub amplitude: f64,
    /// Gaussian envelope standard deviation of a burst, in samples.
    pub burst_width: f64,
    /// Chirp start and end frequencies in cycles per sample.
    pub f0: f64,
    pub f1: f64,
    /// First sample of the second regime.
    pub switch_at: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            kind: SynthKind::Noise,
            n: 1 << 17,
            seed: 0,
            alpha: 1.0,
            count: 5,
            amplitude: 5.0,
            burst_width: 4.0,
            f0: 0.01,
            f1: 0.2,
            switch_at: 120_000,
        }
    }
}

impl SynthParams {
    /// Parameters of the `burst5` detection fixture.
    pub fn burst5() -> Self {
        Self {
            kind: SynthKind::Burst,
            ..Self::default()
        }
    }
}

/// One injected event, in samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurstEvent {
    pub start: usize,
    pub end: usize,
    pub center: usize,
    /// Peak absolute value of the injected waveform.
    pub amplitude: f64,
}

/// Ground truth written next to a generated signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub params: SynthParams,
    /// Median absolute deviation of the background noise alone.
    pub background_mad: f64,
    /// Peak level an event must exceed to count as supra-threshold.
    pub threshold: f64,
    pub events: Vec<BurstEvent>,
}

#[derive(Clone, Debug)]
pub struct Synthesized {
    pub samples: Vec<f64>,
    pub truth: GroundTruth,
}

pub fn synthesize(params: &SynthParams) -> Result<Synthesized> {
    if params.n < 2 {
        return Err(Error::Config(format!(
            "synth length must be at least 2, got {}",
            params.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let background = colored_noise(params.n, params.alpha, &mut rng)?;
    let background_mad = mad(&background)?;
    let (samples, events) = match params.kind {
        SynthKind::Noise => (background, Vec::new()),
        SynthKind::Burst => bursts_in_noise(background, background_mad, params, &mut rng)?,
        SynthKind::Chirp => (chirp(params, &background), Vec::new()),
        SynthKind::Regime => regime_switch(background, background_mad, params, &mut rng),
    };
    Ok(Synthesized {
        samples,
        truth: GroundTruth {
            params: params.clone(),
            background_mad,
            threshold: 3.0 * background_mad,
            events,
        },
    })
}

/// Median absolute deviation about the median.
pub fn mad(x: &[f64]) -> Result<f64> {
    let med = quickselect_median(x)?;
    let dev: Vec<f64> = x.iter().map(|s| (s - med).abs()).collect();
    quickselect_median(&dev)
}

/// Gaussian noise shaped to `P(f) ∝ f^-alpha` in the frequency domain, zero
/// mean, unit standard deviation.
pub fn colored_noise(n: usize, alpha: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let white: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut bins = fft_real(&white)?.into_bins();
    bins[0] = Complex64::new(0.0, 0.0);
    for (k, b) in bins.iter_mut().enumerate().skip(1) {
        let f = k.min(n - k) as f64 / n as f64;
        *b *= f.powf(-alpha / 2.0);
    }
    let plan = FftPlan::new(n)?;
    let mut scratch = plan.make_scratch();
    plan.inverse(&mut bins, &mut scratch);
    let mut x: Vec<f64> = bins.iter().map(|c| c.re).collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 1.0 };
    x.iter_mut().for_each(|v| *v = (*v - mean) * scale);
    Ok(x)
}

/// Gaussian-windowed oscillation peaking at exactly `peak` at offset 0.
fn burst_shape(offset: f64, width: f64, peak: f64) -> f64 {
    peak * (-0.5 * (offset / width).powi(2)).exp() * (0.9 * offset).cos()
}

fn add_burst(x: &mut [f64], center: usize, half: usize, width: f64, peak: f64) -> BurstEvent {
    let start = center.saturating_sub(half);
    let end = (center + half).min(x.len() - 1);
    for (t, v) in x.iter_mut().enumerate().take(end + 1).skip(start) {
        *v += burst_shape(t as f64 - center as f64, width, peak);
    }
    BurstEvent {
        start,
        end,
        center,
        amplitude: peak,
    }
}

fn bursts_in_noise(
    mut x: Vec<f64>,
    background_mad: f64,
    params: &SynthParams,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<BurstEvent>)> {
    let n = params.n;
    let peak = params.amplitude * background_mad;
    let half = (4.0 * params.burst_width).ceil() as usize;
    let slot = n / params.count.max(1);
    if params.count > 0 && slot < 4 * half + 2 {
        return Err(Error::Config(format!(
            "{} bursts of half-width {half} do not fit in {n} samples",
            params.count
        )));
    }
    let mut events = Vec::with_capacity(params.count);
    for i in 0..params.count {
        // Centre in the middle half of each slot so events never touch.
        let center = i * slot + slot / 4 + rng.random_range(0..=slot / 2);
        events.push(add_burst(&mut x, center, half, params.burst_width, peak));
    }
    Ok((x, events))
}

/// Linear chirp from `f0` to `f1` with the background added at 5% level.
fn chirp(params: &SynthParams, background: &[f64]) -> Vec<f64> {
    let rate = (params.f1 - params.f0) / params.n as f64;
    background
        .iter()
        .enumerate()
        .map(|(t, noise)| {
            let t = t as f64;
            let phase = 2.0 * PI * (params.f0 * t + 0.5 * rate * t * t);
            phase.sin() + 0.05 * noise
        })
        .collect()
}

/// Colored noise, then from `switch_at` onwards the same noise with a
/// spike train superimposed (one spike every 250 to 750 samples).
fn regime_switch(
    mut x: Vec<f64>,
    background_mad: f64,
    params: &SynthParams,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<BurstEvent>) {
    let n = params.n;
    let peak = params.amplitude * background_mad;
    let half = (4.0 * params.burst_width).ceil() as usize;
    let mut events = Vec::new();
    let mut center = params.switch_at + half + rng.random_range(0..250);
    while center + half < n {
        events.push(add_burst(&mut x, center, half, params.burst_width, peak));
        center += rng.random_range(250..750);
    }
    (x, events)
}
