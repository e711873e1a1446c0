//! Numeric kernels: FFT and convolution, order statistics, and the symmetric
//! eigensolver used by the per-band PCA.

mod eigen;
mod fft;
mod select;

pub use eigen::{eigh, inf_norm, SymmetricEigen};
pub use fft::{convolve_linear, fft, fft_real, next_fast_len, ComplexSpectrum, FftPlan};
pub use rustfft::num_complex::Complex64;
pub use select::{lower_median_index, quickselect_median, select_nth_in_place};
