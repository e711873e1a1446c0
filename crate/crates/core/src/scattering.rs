//! Two-layer scattering decomposition.
//!
//! `U₁x = |x * ψ_λ₁|`, `U₂x = |U₁x * ψ_λ₂|` and `S_i x = U_i x * φ`, all at
//! full time resolution. Convolutions run in the Fourier domain on a
//! reflect-padded copy of the signal which is cropped back afterwards.
//!
//! Coefficient arrays are band-major: `u1[[λ₁, t]]`, `u2[[λ₁, λ₂, t]]`.

use ndarray::{s, Array2, Array3, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::filterbank::{build_filterbank, FilterBank, MotherWavelet, ScaleSet, SUPPORT_THRESHOLD};
use crate::numerics::{next_fast_len, Complex64, FftPlan};

#[derive(Clone, Debug)]
pub struct ScatteringCoeffs {
    /// `S₀x(t)`.
    pub s0: Vec<f64>,
    /// Scalogram `U₁x`, shape `(|Λ₁|, n)`.
    pub u1: Array2<f64>,
    pub s1: Array2<f64>,
    /// Shape `(|Λ₁|, |Λ₂|, n)`.
    pub u2: Array3<f64>,
    pub s2: Array3<f64>,
    pub scales1: ScaleSet,
    pub scales2: ScaleSet,
}

impl ScatteringCoeffs {
    pub fn n(&self) -> usize {
        self.s0.len()
    }
}

/// Filters of both layers sampled for one padded transform length, plus the
/// FFT plan for that length.
#[derive(Clone, Debug)]
pub struct ScatteringPlan {
    bank1: FilterBank,
    bank2: FilterBank,
    fft: FftPlan,
    signal_len: usize,
    pad_left: usize,
}

/// Reflection padding needed on each side so that no filter chain
/// (`ψ_λ₁`, then `ψ_λ₂`, then `φ`) wraps around the circular transform.
pub fn boundary_padding(
    scales1: &ScaleSet,
    mother1: &MotherWavelet,
    scales2: &ScaleSet,
    mother2: &MotherWavelet,
) -> usize {
    let width = |sigma: f64| (2.0 * (1.0 / SUPPORT_THRESHOLD).ln()).sqrt() / sigma;
    let psi1 = width(mother1.bandwidth() / scales1.max_scale());
    let psi2 = width(mother2.bandwidth() / scales2.max_scale());
    let phi = width(mother1.center() / scales1.max_scale());
    (psi1 + psi2 + phi).ceil() as usize
}

impl ScatteringPlan {
    /// Builds both banks with their default mother wavelets for a signal of
    /// `signal_len` samples.
    pub fn new(signal_len: usize, scales1: &ScaleSet, scales2: &ScaleSet) -> Result<Self> {
        let mother1 = MotherWavelet::for_resolution(scales1.per_octave())?;
        let mother2 = MotherWavelet::for_resolution(scales2.per_octave())?;
        Self::with_mothers(signal_len, scales1, &mother1, scales2, &mother2)
    }

    pub fn with_mothers(
        signal_len: usize,
        scales1: &ScaleSet,
        mother1: &MotherWavelet,
        scales2: &ScaleSet,
        mother2: &MotherWavelet,
    ) -> Result<Self> {
        if signal_len == 0 {
            return Err(Error::EmptySignal);
        }
        let pad = boundary_padding(scales1, mother1, scales2, mother2);
        let n = next_fast_len(signal_len + 2 * pad).max(2);
        let bank1 = build_filterbank(n, scales1, mother1)?;
        let bank2 = build_filterbank(n, scales2, mother2)?;
        Self::from_banks(signal_len, bank1, bank2)
    }

    /// Uses prebuilt banks. Both must share one length `N >= signal_len`; the
    /// signal is centered in the `N`-sample window.
    pub fn from_banks(signal_len: usize, bank1: FilterBank, bank2: FilterBank) -> Result<Self> {
        if signal_len == 0 {
            return Err(Error::EmptySignal);
        }
        if bank1.n() != bank2.n() {
            return Err(Error::ShapeMismatch(format!(
                "layer banks differ in length: {} vs {}",
                bank1.n(),
                bank2.n()
            )));
        }
        if bank1.n() < signal_len {
            return Err(Error::LengthMismatch {
                signal: signal_len,
                bank: bank1.n(),
            });
        }
        let fft = FftPlan::new(bank1.n())?;
        Ok(Self {
            pad_left: (bank1.n() - signal_len) / 2,
            bank1,
            bank2,
            fft,
            signal_len,
        })
    }

    pub fn bank1(&self) -> &FilterBank {
        &self.bank1
    }

    pub fn bank2(&self) -> &FilterBank {
        &self.bank2
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    /// Padded transform length.
    pub fn padded_len(&self) -> usize {
        self.bank1.n()
    }

    pub fn pad_left(&self) -> usize {
        self.pad_left
    }

    /// Reflect-pads `x` into the transform window.
    pub fn pad(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.signal_len {
            return Err(Error::LengthMismatch {
                signal: x.len(),
                bank: self.signal_len,
            });
        }
        let offset = self.pad_left as isize;
        Ok((0..self.padded_len())
            .map(|i| x[reflect_index(i as isize - offset, x.len())])
            .collect())
    }

    fn crop<'a>(&self, padded: &'a [f64]) -> &'a [f64] {
        &padded[self.pad_left..self.pad_left + self.signal_len]
    }

    /// `U₁x` over the whole padded window, shape `(|Λ₁|, N)`.
    pub fn first_layer_padded(&self, x: &[f64]) -> Result<Array2<f64>> {
        let padded = self.pad(x)?;
        let mut work = Workspace::new(&self.fft);
        let spectrum = work.forward_real(&padded);
        Ok(modulus_bank(&spectrum, &self.bank1, &mut work))
    }

    /// Second layer from a padded first layer: returns cropped `(U₂, S₂)`.
    ///
    /// Each `(λ₁, λ₂)` cell depends only on row `λ₁` of the input, so
    /// reordering the rows of `u1_padded` reorders the output bit-exactly.
    pub fn second_layer(&self, u1_padded: ArrayView2<f64>) -> Result<(Array3<f64>, Array3<f64>)> {
        let n_pad = self.padded_len();
        if u1_padded.ncols() != n_pad {
            return Err(Error::LengthMismatch {
                signal: u1_padded.ncols(),
                bank: n_pad,
            });
        }
        let (l1, l2, n) = (u1_padded.nrows(), self.bank2.len(), self.signal_len);
        let mut u2 = Array3::<f64>::zeros((l1, l2, n));
        let mut s2 = Array3::<f64>::zeros((l1, l2, n));
        let mut work = Workspace::new(&self.fft);
        let phi = self.bank1.phi_hat();

        for (i, row) in u1_padded.outer_iter().enumerate() {
            let row = row.as_standard_layout();
            let spectrum = work.forward_real(row.as_slice().expect("standard layout"));
            let moduli = modulus_bank(&spectrum, &self.bank2, &mut work);
            for (j, m) in moduli.outer_iter().enumerate() {
                u2.slice_mut(s![i, j, ..])
                    .iter_mut()
                    .zip(self.crop(m.as_slice().expect("row-major")))
                    .for_each(|(d, v)| *d = *v);
            }
            // Smooth λ₂ bands two at a time: φ is real and even, so the real and
            // imaginary parts of (a + ib) * φ are a * φ and b * φ.
            let mut j = 0;
            while j < l2 {
                let a = moduli.row(j);
                let b = (j + 1 < l2).then(|| moduli.row(j + 1));
                let buf = &mut work.buf;
                for k in 0..n_pad {
                    buf[k] = Complex64::new(a[k], b.map_or(0.0, |b| b[k]));
                }
                self.fft.forward(buf, &mut work.scratch);
                buf.iter_mut().zip(phi).for_each(|(c, f)| *c *= *f);
                self.fft.inverse(buf, &mut work.scratch);
                let window = &buf[self.pad_left..self.pad_left + n];
                s2.slice_mut(s![i, j, ..])
                    .iter_mut()
                    .zip(window)
                    .for_each(|(d, c)| *d = c.re);
                if j + 1 < l2 {
                    s2.slice_mut(s![i, j + 1, ..])
                        .iter_mut()
                        .zip(window)
                        .for_each(|(d, c)| *d = c.im);
                }
                j += 2;
            }
        }
        Ok((u2, s2))
    }

    pub fn transform(&self, x: &[f64]) -> Result<ScatteringCoeffs> {
        let padded = self.pad(x)?;
        let mut work = Workspace::new(&self.fft);
        let spectrum = work.forward_real(&padded);
        let phi = self.bank1.phi_hat();

        for (c, (v, f)) in work.buf.iter_mut().zip(spectrum.iter().zip(phi)) {
            *c = v * f;
        }
        self.fft.inverse(&mut work.buf, &mut work.scratch);
        let s0: Vec<f64> = work.buf[self.pad_left..self.pad_left + self.signal_len]
            .iter()
            .map(|c| c.re)
            .collect();

        let u1_padded = modulus_bank(&spectrum, &self.bank1, &mut work);
        let s1_padded = smooth_rows(u1_padded.view(), phi, &self.fft, &mut work);
        let u1 = self.crop_rows(&u1_padded);
        let s1 = self.crop_rows(&s1_padded);
        let (u2, s2) = self.second_layer(u1_padded.view())?;

        Ok(ScatteringCoeffs {
            s0,
            u1,
            s1,
            u2,
            s2,
            scales1: self.bank1.scale_set().clone(),
            scales2: self.bank2.scale_set().clone(),
        })
    }

    fn crop_rows(&self, padded: &Array2<f64>) -> Array2<f64> {
        padded
            .slice(s![.., self.pad_left..self.pad_left + self.signal_len])
            .to_owned()
    }
}

/// Whole-sample symmetric reflection (`… x₂ x₁ | x₀ x₁ x₂ …`), repeated as
/// often as needed.
pub fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

struct Workspace<'a> {
    plan: &'a FftPlan,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl<'a> Workspace<'a> {
    fn new(plan: &'a FftPlan) -> Self {
        Self {
            plan,
            buf: vec![Complex64::new(0.0, 0.0); plan.len()],
            scratch: plan.make_scratch(),
        }
    }

    /// Spectrum of a real series. A constant series gets an exactly zero
    /// spectrum off DC, so band-pass outputs of it are exactly zero rather
    /// than FFT round-off that PCA would rescale into a spurious `θ`.
    fn forward_real(&mut self, x: &[f64]) -> Vec<Complex64> {
        if let Some(&first) = x.first().filter(|&&f| x.iter().all(|&v| v == f)) {
            let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
            out[0] = Complex64::new(first * x.len() as f64, 0.0);
            return out;
        }
        let mut out: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.plan.forward(&mut out, &mut self.scratch);
        out
    }
}

/// `|IFFT(x̂ · ψ̂_λ)|` for every band.
fn modulus_bank(spectrum: &[Complex64], bank: &FilterBank, work: &mut Workspace<'_>) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((bank.len(), bank.n()));
    for (psi, mut row) in bank.psi_hat().outer_iter().zip(out.outer_iter_mut()) {
        for (c, (v, f)) in work.buf.iter_mut().zip(spectrum.iter().zip(psi.iter())) {
            *c = v * f;
        }
        work.plan.inverse(&mut work.buf, &mut work.scratch);
        row.iter_mut().zip(&work.buf).for_each(|(d, c)| *d = c.norm());
    }
    out
}

fn smooth_rows(u: ArrayView2<f64>, phi: &[f64], plan: &FftPlan, work: &mut Workspace<'_>) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros(u.raw_dim());
    for (row, mut dst) in u.outer_iter().zip(out.outer_iter_mut()) {
        for (c, v) in work.buf.iter_mut().zip(row.iter()) {
            *c = Complex64::new(*v, 0.0);
        }
        plan.forward(&mut work.buf, &mut work.scratch);
        work.buf.iter_mut().zip(phi).for_each(|(c, f)| *c *= *f);
        plan.inverse(&mut work.buf, &mut work.scratch);
        dst.iter_mut().zip(&work.buf).for_each(|(d, c)| *d = c.re);
    }
    out
}

/// `|x * ψ_λ|(t)` for every band, by circular convolution at the bank length.
/// Output shape `(|Λ|, n)`.
pub fn wavelet_modulus(x: &[f64], bank: &FilterBank) -> Result<Array2<f64>> {
    if x.len() != bank.n() {
        return Err(Error::LengthMismatch {
            signal: x.len(),
            bank: bank.n(),
        });
    }
    let plan = FftPlan::new(bank.n())?;
    let mut work = Workspace::new(&plan);
    let spectrum = work.forward_real(x);
    Ok(modulus_bank(&spectrum, bank, &mut work))
}

/// Circular convolution of every row of `u` with `φ`. Rows are time series
/// of the bank's length.
pub fn smooth(u: ArrayView2<f64>, bank: &FilterBank) -> Result<Array2<f64>> {
    if u.ncols() != bank.n() {
        return Err(Error::ShapeMismatch(format!(
            "series length {} does not match bank length {}",
            u.ncols(),
            bank.n()
        )));
    }
    let plan = FftPlan::new(bank.n())?;
    let mut work = Workspace::new(&plan);
    Ok(smooth_rows(u, bank.phi_hat(), &plan, &mut work))
}

/// [`smooth`] for a single series.
pub fn smooth_series(x: &[f64], bank: &FilterBank) -> Result<Vec<f64>> {
    let view = ArrayView2::from_shape((1, x.len()), x).expect("1 x n view");
    Ok(smooth(view, bank)?.index_axis(Axis(0), 0).to_vec())
}

/// Full two-layer transform of `x` using prebuilt banks. The banks must share
/// a length `N >= x.len()`; `x` is reflect-padded to `N` and the outputs are
/// cropped back to `x.len()` samples.
pub fn scattering_transform(x: &[f64], bank1: &FilterBank, bank2: &FilterBank) -> Result<ScatteringCoeffs> {
    ScatteringPlan::from_banks(x.len(), bank1.clone(), bank2.clone())?.transform(x)
}
