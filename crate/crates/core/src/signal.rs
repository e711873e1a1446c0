use crate::error::{Error, Result};

/// Default acquisition rate of the intracranial recordings this pipeline was
/// tuned for.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 1000.0;

/// A uniformly sampled real-valued time series.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Config(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Pipeline(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// Signal at [`DEFAULT_SAMPLE_RATE_HZ`].
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, DEFAULT_SAMPLE_RATE_HZ)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    /// Sub-signal `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Signal> {
        let end =
            start
                .checked_add(len)
                .filter(|&e| e <= self.samples.len())
                .ok_or(Error::SignalShorterThanWindow {
                    n: self.samples.len(),
                    window_len: start.saturating_add(len),
                })?;
        Signal::new(self.samples[start..end].to_vec(), self.sample_rate_hz)
    }
}
