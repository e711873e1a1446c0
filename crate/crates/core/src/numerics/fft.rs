//! Complex FFT and FFT-based convolution.
//!
//! Transforms use the `e^{-iωt}` sign convention for the forward direction and
//! scale the inverse by `1/n`, so `ifft(fft(x)) == x` up to rounding.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Output of a forward transform. The number of bins always equals the
/// transform size that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum {
    bins: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }

    /// Inverse transform back to the time domain.
    pub fn ifft(&self) -> Vec<Complex64> {
        let plan = FftPlan::new(self.len()).expect("spectrum is never empty");
        let mut buf = self.bins.clone();
        let mut scratch = plan.make_scratch();
        plan.inverse(&mut buf, &mut scratch);
        buf
    }
}

/// Forward DFT of a complex sequence of any positive length.
pub fn fft(x: &[Complex64]) -> Result<ComplexSpectrum> {
    let plan = FftPlan::new(x.len())?;
    let mut bins = x.to_vec();
    let mut scratch = plan.make_scratch();
    plan.forward(&mut bins, &mut scratch);
    Ok(ComplexSpectrum { bins })
}

/// Forward DFT of a real sequence.
pub fn fft_real(x: &[f64]) -> Result<ComplexSpectrum> {
    let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&buf)
}

/// Linear (full, length `a.len() + b.len() - 1`) convolution computed through
/// a zero-padded FFT.
pub fn convolve_linear(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySignal);
    }
    let out_len = a.len() + b.len() - 1;
    let n = next_fast_len(out_len);
    let plan = FftPlan::new(n)?;
    let mut scratch = plan.make_scratch();

    let mut fa = vec![Complex64::new(0.0, 0.0); n];
    let mut fb = vec![Complex64::new(0.0, 0.0); n];
    for (dst, &v) in fa.iter_mut().zip(a) {
        dst.re = v;
    }
    for (dst, &v) in fb.iter_mut().zip(b) {
        dst.re = v;
    }
    plan.forward(&mut fa, &mut scratch);
    plan.forward(&mut fb, &mut scratch);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    plan.inverse(&mut fa, &mut scratch);
    Ok(fa[..out_len].iter().map(|c| c.re).collect())
}

/// Smallest 5-smooth integer (`2^a 3^b 5^c`) that is `>= n`.
pub fn next_fast_len(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let mut best = usize::MAX;
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut candidate = p35;
            while candidate < n {
                candidate *= 2;
            }
            best = best.min(candidate);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

/// A forward/inverse transform pair for one length, reused across many
/// signals of that length.
#[derive(Clone)]
pub struct FftPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan").field("len", &self.len).finish()
    }
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptySignal);
        }
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Ok(Self {
            len,
            forward,
            inverse,
            scratch_len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn make_scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len]
    }

    /// In-place forward transform. `buf.len()` must equal the plan length.
    pub fn forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process_with_scratch(buf, scratch);
    }

    /// In-place inverse transform, normalized by `1/n`.
    pub fn inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process_with_scratch(buf, scratch);
        let scale = 1.0 / self.len as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}
