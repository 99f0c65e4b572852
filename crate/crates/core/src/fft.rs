//! Thin wrappers over `rustfft` used by the shaping, filtering and spectral code.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::real::Real;

/// In-place forward transform, no normalization.
pub(crate) fn forward<T: Real>(buf: &mut [Complex<T>]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// In-place inverse transform, no normalization.
pub(crate) fn inverse<T: Real>(buf: &mut [Complex<T>]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

/// Frequency in Hz of bin `k` of an `n`-point transform, with bins above
/// Nyquist mapped to negative frequencies.
pub(crate) fn bin_frequency<T: Real>(k: usize, n: usize, rate: T) -> T {
    let kk = if k <= n / 2 {
        T::from_usize_lossy(k)
    } else {
        -T::from_usize_lossy(n - k)
    };
    kk * rate / T::from_usize_lossy(n)
}
