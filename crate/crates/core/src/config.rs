//! Pipeline configuration and its flat `key=value` file format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::representation::{Reducer, DEFAULT_EXPONENT};
use crate::signal::DEFAULT_SAMPLE_RATE_HZ;

/// What each clustering observation is built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterInput {
    /// Frame-averaged `Lx` rows.
    #[default]
    Lx,
    /// Frame-averaged full feature vectors.
    Features,
}

impl fmt::Display for ClusterInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClusterInput::Lx => "lx",
            ClusterInput::Features => "features",
        })
    }
}

impl FromStr for ClusterInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lx" => Ok(ClusterInput::Lx),
            "features" => Ok(ClusterInput::Features),
            other => Err(Error::Config(format!(
                "unknown cluster_input {other:?} (expected lx or features)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(rename = "J1")]
    pub j1: usize,
    #[serde(rename = "Q1")]
    pub q1: usize,
    #[serde(rename = "J2")]
    pub j2: usize,
    #[serde(rename = "Q2")]
    pub q2: usize,
    pub p: f64,
    pub reducer: Reducer,
    pub window_len: usize,
    pub hop: usize,
    pub k_max: usize,
    pub frame_len: usize,
    /// Shortest reported interval, in samples.
    pub min_duration: usize,
    pub seed: u64,
    pub sample_rate_hz: f64,
    pub cluster_input: ClusterInput,
    /// Robust z-score (median/MAD over all frames) that the loudest frame of
    /// a detected interval must reach.
    pub min_peak_z: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            j1: 2,
            q1: 10,
            j2: 2,
            q2: 10,
            p: DEFAULT_EXPONENT,
            reducer: Reducer::Pca,
            window_len: 60_000,
            hop: 2_000,
            k_max: 6,
            frame_len: 100,
            min_duration: 20,
            seed: 0,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            cluster_input: ClusterInput::Lx,
            min_peak_z: DEFAULT_MIN_PEAK_Z,
        }
    }
}

pub const DEFAULT_MIN_PEAK_Z: f64 = 12.0;

const KEYS: &[&str] = &[
    "J1",
    "Q1",
    "J2",
    "Q2",
    "p",
    "reducer",
    "window_len",
    "hop",
    "k_max",
    "frame_len",
    "min_duration",
    "seed",
    "sample_rate_hz",
    "cluster_input",
    "min_peak_z",
];

impl PipelineConfig {
    /// Geometry `(J₁, Q₁, J₂, Q₂)`.
    pub fn geometry(&self) -> (usize, usize, usize, usize) {
        (self.j1, self.q1, self.j2, self.q2)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("J1", self.j1),
            ("Q1", self.q1),
            ("J2", self.j2),
            ("Q2", self.q2),
            ("hop", self.hop),
            ("k_max", self.k_max),
            ("frame_len", self.frame_len),
        ];
        for (key, value) in positive {
            if value == 0 {
                return Err(Error::Config(format!("{key} must be positive")));
            }
        }
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::Config(format!("p must be positive, got {}", self.p)));
        }
        if self.window_len < 2 {
            return Err(Error::Config("window_len must be at least 2".into()));
        }
        if self.hop > self.window_len {
            return Err(Error::Config(format!(
                "hop ({}) must not exceed window_len ({})",
                self.hop, self.window_len
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::Config(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if !(self.min_peak_z.is_finite() && self.min_peak_z >= 0.0) {
            return Err(Error::Config(format!(
                "min_peak_z must be non-negative, got {}",
                self.min_peak_z
            )));
        }
        Ok(())
    }

    /// Parses the flat `key=value` format. Blank lines and `#` comments are
    /// ignored; unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
        }
        match key {
            "J1" => self.j1 = num(key, value)?,
            "Q1" => self.q1 = num(key, value)?,
            "J2" => self.j2 = num(key, value)?,
            "Q2" => self.q2 = num(key, value)?,
            "p" => self.p = num(key, value)?,
            "reducer" => self.reducer = value.parse()?,
            "window_len" => self.window_len = num(key, value)?,
            "hop" => self.hop = num(key, value)?,
            "k_max" => self.k_max = num(key, value)?,
            "frame_len" => self.frame_len = num(key, value)?,
            "min_duration" => self.min_duration = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "sample_rate_hz" => self.sample_rate_hz = num(key, value)?,
            "cluster_input" => self.cluster_input = value.parse()?,
            "min_peak_z" => self.min_peak_z = num(key, value)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown key {other:?} (known keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Serializes every key; `parse(to_config_string())` reproduces `self`.
    pub fn to_config_string(&self) -> String {
        format!(
            "J1={}\nQ1={}\nJ2={}\nQ2={}\np={:?}\nreducer={}\nwindow_len={}\nhop={}\nk_max={}\nframe_len={}\nmin_duration={}\nseed={}\nsample_rate_hz={:?}\ncluster_input={}\nmin_peak_z={:?}\n",
            self.j1,
            self.q1,
            self.j2,
            self.q2,
            self.p,
            self.reducer,
            self.window_len,
            self.hop,
            self.k_max,
            self.frame_len,
            self.min_duration,
            self.seed,
            self.sample_rate_hz,
            self.cluster_input,
            self.min_peak_z,
        )
    }
}
