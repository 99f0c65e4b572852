use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::real::Real;
use crate::timedomain::{SampledSignal, SimError};

use super::SpectralError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hann,
    Hamming,
    Blackman,
}

impl Window {
    /// Periodic (DFT-even) window of length `n`.
    pub fn coefficients<T: Real>(self, n: usize) -> Vec<T> {
        let two_pi = T::lit(2.0) * T::PI();
        let len = T::from_usize_lossy(n);
        (0..n)
            .map(|i| {
                let u = two_pi * T::from_usize_lossy(i) / len;
                match self {
                    Window::Rectangular => T::one(),
                    Window::Hann => T::lit(0.5) - T::lit(0.5) * u.cos(),
                    Window::Hamming => T::lit(0.54) - T::lit(0.46) * u.cos(),
                    Window::Blackman => {
                        T::lit(0.42) - T::lit(0.5) * u.cos() + T::lit(0.08) * (u + u).cos()
                    }
                }
            })
            .collect()
    }

    pub fn label(self) -> &'static str {
        match self {
            Window::Rectangular => "rectangular",
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Blackman => "blackman",
        }
    }
}

/// One-sided spectral density on `segment_length/2 + 1` bins. `V` is `T`
/// for auto spectra and `Complex<T>` for cross spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T, V = T> {
    pub frequencies: Vec<T>,
    pub values: Vec<V>,
    pub segment_length: usize,
    pub segment_count: usize,
    pub window: Window,
    pub sample_rate: T,
}

pub type CrossSpectrum<T> = Spectrum<T, Complex<T>>;

impl<T: Real, V> Spectrum<T, V> {
    pub fn bin_width(&self) -> T {
        self.sample_rate / T::from_usize_lossy(self.segment_length)
    }

    /// Index of the bin nearest `freq`.
    pub fn bin(&self, freq: T) -> usize {
        let k = (freq / self.bin_width()).round().to_usize().unwrap_or(0);
        k.min(self.frequencies.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T: Real> Spectrum<T> {
    /// `Σ S(f)·Δf`, which equals the record variance for a mean-free record.
    pub fn integrated_power(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.bin_width()
    }

    /// Bin-wise ratio `self / reference`.
    pub fn ratio(&self, reference: &Spectrum<T>) -> Vec<T> {
        self.values
            .iter()
            .zip(&reference.values)
            .map(|(&a, &b)| a / b)
            .collect()
    }
}

/// Segmenting, windowing and FFT plan shared by auto and cross estimates.
#[derive(Clone)]
pub struct WelchPlan<T: Real> {
    segment_length: usize,
    step: usize,
    window: Window,
    coeffs: Vec<T>,
    fft: Arc<dyn Fft<T>>,
    rate: T,
    /// `2 / (fs Σw²)`: one-sided density scaling.
    scale: T,
    detrend: bool,
}

impl<T: Real> std::fmt::Debug for WelchPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WelchPlan")
            .field("segment_length", &self.segment_length)
            .field("step", &self.step)
            .field("window", &self.window)
            .finish()
    }
}

/// Additive periodogram sums; combine partial results with [`merge`](Self::merge).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSums<V> {
    pub sum: Vec<V>,
    pub segments: usize,
}

impl<V: Copy + std::ops::Add<Output = V>> SpectralSums<V> {
    pub fn merge(&mut self, other: &SpectralSums<V>) {
        if self.sum.is_empty() {
            self.sum = other.sum.clone();
        } else {
            for (a, &b) in self.sum.iter_mut().zip(&other.sum) {
                *a = *a + b;
            }
        }
        self.segments += other.segments;
    }
}

impl<T: Real> WelchPlan<T> {
    pub fn new(
        segment_length: usize,
        overlap_fraction: T,
        window: Window,
        rate: T,
    ) -> Result<Self, SpectralError> {
        if segment_length < 2 {
            return Err(SpectralError::Domain {
                what: "segment length",
                value: segment_length as f64,
            });
        }
        if !(overlap_fraction >= T::zero() && overlap_fraction < T::one()) {
            return Err(SpectralError::Domain {
                what: "overlap fraction",
                value: overlap_fraction.as_f64(),
            });
        }
        if !(rate > T::zero() && rate.is_finite()) {
            return Err(SpectralError::Domain {
                what: "sample rate",
                value: rate.as_f64(),
            });
        }
        let step = ((T::one() - overlap_fraction) * T::from_usize_lossy(segment_length))
            .round()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let coeffs: Vec<T> = window.coefficients(segment_length);
        let s2: T = coeffs.iter().map(|&w| w * w).sum();
        Ok(Self {
            segment_length,
            step,
            window,
            coeffs,
            fft: FftPlanner::new().plan_fft_forward(segment_length),
            rate,
            scale: T::lit(2.0) / (rate * s2),
            detrend: true,
        })
    }

    /// Keep segment means (default removes them).
    pub fn without_detrend(mut self) -> Self {
        self.detrend = false;
        self
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn sample_rate(&self) -> T {
        self.rate
    }

    pub fn bins(&self) -> usize {
        self.segment_length / 2 + 1
    }

    pub fn segments_in(&self, len: usize) -> usize {
        if len < self.segment_length {
            0
        } else {
            (len - self.segment_length) / self.step + 1
        }
    }

    fn transform(&self, x: &[T], buf: &mut [Complex<T>]) {
        let mean = if self.detrend {
            x.iter().copied().sum::<T>() / T::from_usize_lossy(x.len())
        } else {
            T::zero()
        };
        for ((b, &v), &w) in buf.iter_mut().zip(x).zip(&self.coeffs) {
            *b = Complex::new((v - mean) * w, T::zero());
        }
        self.fft.process(buf);
    }

    pub fn auto_sums(&self, x: &[T]) -> SpectralSums<T> {
        let bins = self.bins();
        let mut sum = vec![T::zero(); bins];
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.segment_length];
        let count = self.segments_in(x.len());
        for s in 0..count {
            let start = s * self.step;
            self.transform(&x[start..start + self.segment_length], &mut buf);
            for (a, b) in sum.iter_mut().zip(&buf) {
                *a = *a + b.norm_sqr();
            }
        }
        SpectralSums {
            sum,
            segments: count,
        }
    }

    /// Sums of `conj(W)·Y` over segments.
    pub fn cross_sums(&self, w: &[T], y: &[T]) -> SpectralSums<Complex<T>> {
        let bins = self.bins();
        let mut sum = vec![Complex::new(T::zero(), T::zero()); bins];
        let mut bw = vec![Complex::new(T::zero(), T::zero()); self.segment_length];
        let mut by = bw.clone();
        let count = self.segments_in(w.len().min(y.len()));
        for s in 0..count {
            let start = s * self.step;
            self.transform(&w[start..start + self.segment_length], &mut bw);
            self.transform(&y[start..start + self.segment_length], &mut by);
            for ((a, u), v) in sum.iter_mut().zip(&bw).zip(&by) {
                *a = *a + u.conj() * v;
            }
        }
        SpectralSums {
            sum,
            segments: count,
        }
    }

    fn bin_scale(&self, k: usize) -> T {
        let nyq = self.segment_length.is_multiple_of(2) && k == self.segment_length / 2;
        if k == 0 || nyq {
            self.scale / T::lit(2.0)
        } else {
            self.scale
        }
    }

    fn spectrum<V>(&self, values: Vec<V>, segments: usize) -> Spectrum<T, V> {
        let df = self.rate / T::from_usize_lossy(self.segment_length);
        Spectrum {
            frequencies: (0..self.bins())
                .map(|k| T::from_usize_lossy(k) * df)
                .collect(),
            values,
            segment_length: self.segment_length,
            segment_count: segments,
            window: self.window,
            sample_rate: self.rate,
        }
    }

    pub fn finish_auto(&self, sums: &SpectralSums<T>) -> Result<Spectrum<T>, SpectralError> {
        if sums.segments == 0 {
            return Err(SpectralError::TooShort(self.segment_length));
        }
        let n = T::from_usize_lossy(sums.segments);
        let values = sums
            .sum
            .iter()
            .enumerate()
            .map(|(k, &s)| s * self.bin_scale(k) / n)
            .collect();
        Ok(self.spectrum(values, sums.segments))
    }

    pub fn finish_cross(
        &self,
        sums: &SpectralSums<Complex<T>>,
    ) -> Result<CrossSpectrum<T>, SpectralError> {
        if sums.segments == 0 {
            return Err(SpectralError::TooShort(self.segment_length));
        }
        let n = T::from_usize_lossy(sums.segments);
        let values = sums
            .sum
            .iter()
            .enumerate()
            .map(|(k, &s)| s * (self.bin_scale(k) / n))
            .collect();
        Ok(self.spectrum(values, sums.segments))
    }
}

/// Welch estimate of the one-sided PSD; unit-variance white noise gives
/// `2/fs`.
pub fn welch_psd<T: Real>(
    sig: &SampledSignal<T>,
    segment_length: usize,
    overlap_fraction: T,
    window: Window,
) -> Result<Spectrum<T>, SpectralError> {
    if sig.is_empty() {
        return Err(SpectralError::Domain {
            what: "record length",
            value: 0.0,
        });
    }
    if segment_length > sig.len() {
        return Err(SpectralError::TooShort(segment_length));
    }
    let plan = WelchPlan::new(segment_length, overlap_fraction, window, sig.sample_rate())?;
    plan.finish_auto(&plan.auto_sums(sig.samples()))
}

/// Welch estimate of `S_wy = E[conj(W)·Y]`; `y` delayed by `τ` relative to
/// `w` gives phase `−ωτ`.
pub fn cross_psd<T: Real>(
    w: &SampledSignal<T>,
    y: &SampledSignal<T>,
    segment_length: usize,
    overlap_fraction: T,
    window: Window,
) -> Result<CrossSpectrum<T>, SpectralError> {
    if w.len() != y.len() {
        return Err(SimError::LengthMismatch(w.len(), y.len()).into());
    }
    if w.sample_rate() != y.sample_rate() {
        return Err(
            SimError::RateMismatch(w.sample_rate().as_f64(), y.sample_rate().as_f64()).into(),
        );
    }
    if w.is_empty() {
        return Err(SpectralError::Domain {
            what: "record length",
            value: 0.0,
        });
    }
    if segment_length > w.len() {
        return Err(SpectralError::TooShort(segment_length));
    }
    let plan = WelchPlan::new(segment_length, overlap_fraction, window, w.sample_rate())?;
    plan.finish_cross(&plan.cross_sums(w.samples(), y.samples()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::power_db;
    use crate::timedomain::{apply_delay, gen_gaussian_white, DelaySpec};

    const FS: f64 = 1e9;

    #[test]
    fn white_noise_density_is_two_over_fs() {
        let sig = gen_gaussian_white(9000 * 1024, FS, 1.0, 1).unwrap();
        let psd = welch_psd(&sig, 1024, 0.0, Window::Hann).unwrap();
        assert_eq!(psd.segment_count, 9000);
        // Segment-mean removal leaks into the first Hann bin.
        for k in 2..psd.len() - 1 {
            let db = power_db(psd.values[k] * FS / 2.0);
            assert!(db.abs() < 0.2, "bin {k}: {db} dB");
        }
        assert!((psd.integrated_power() / sig.variance() - 1.0).abs() < 0.02);
    }

    #[test]
    fn window_choice_does_not_bias_white_noise() {
        let sig = gen_gaussian_white(1 << 20, FS, 1.0, 2).unwrap();
        let mean_db = |w: Window| {
            let psd = welch_psd(&sig, 1024, 0.5, w).unwrap();
            let m: f64 = psd.values[1..512].iter().sum::<f64>() / 511.0;
            power_db(m * FS / 2.0)
        };
        for w in [
            Window::Rectangular,
            Window::Hann,
            Window::Hamming,
            Window::Blackman,
        ] {
            assert!(mean_db(w).abs() < 0.3, "{w:?}");
        }
    }

    #[test]
    fn sine_power_is_half_amplitude_squared() {
        let a = 3.0;
        let f = 125e6; // on a bin centre for 1024-point segments
        let sig = SampledSignal::new(
            (0..1 << 16)
                .map(|i| a * (2.0 * std::f64::consts::PI * f * i as f64 / FS).sin())
                .collect(),
            FS,
        )
        .unwrap();
        let psd = welch_psd(&sig, 1024, 0.5, Window::Hann).unwrap();
        let k = psd.bin(f);
        let peak: f64 = psd.values[k - 3..=k + 3].iter().sum::<f64>() * psd.bin_width();
        assert!((peak - a * a / 2.0).abs() < 1e-4 * a * a);
        let (argmax, _) =
            psd.values
                .iter()
                .enumerate()
                .fold((0, 0.0), |m, (i, &v)| if v > m.1 { (i, v) } else { m });
        assert_eq!(argmax, k);
    }

    #[test]
    fn self_cross_spectrum_equals_auto_spectrum() {
        let sig = gen_gaussian_white(1 << 16, FS, 1.0, 3).unwrap();
        let auto = welch_psd(&sig, 1024, 0.5, Window::Hann).unwrap();
        let cross = cross_psd(&sig, &sig, 1024, 0.5, Window::Hann).unwrap();
        for (a, c) in auto.values.iter().zip(&cross.values) {
            assert!((c.re - a).abs() < 1e-12 * a.max(1e-30));
            assert!(c.im.abs() < 1e-12 * a.max(1e-30));
        }
    }

    #[test]
    fn independent_records_have_vanishing_cross_spectrum() {
        let w = gen_gaussian_white(1 << 22, FS, 1.0, 4).unwrap();
        let y = gen_gaussian_white(1 << 22, FS, 1.0, 5).unwrap();
        let c = cross_psd(&w, &y, 1024, 0.5, Window::Hann).unwrap();
        let mean_mag: f64 = c.values.iter().map(|v| v.norm()).sum::<f64>() / c.len() as f64;
        // ~1/√segments of the auto level 2/fs.
        assert!(mean_mag * FS / 2.0 < 0.05);
    }

    #[test]
    fn delayed_half_copy_has_half_gain_and_linear_phase() {
        let w = gen_gaussian_white(1 << 20, FS, 1.0, 6).unwrap();
        let tau = 36e-9;
        let y = apply_delay(&w, DelaySpec::new(tau).unwrap()).scaled(0.5);
        let c = cross_psd(&w, &y, 1024, 0.5, Window::Hann).unwrap();
        let a = welch_psd(&w, 1024, 0.5, Window::Hann).unwrap();
        for k in [20usize, 50, 100] {
            let f = c.values[k] / a.values[k];
            // Segment misalignment scales the estimate by the window's
            // self-overlap at the lag; phase stays exact.
            let want_phase = -2.0 * std::f64::consts::PI * c.frequencies[k] * tau;
            let dphi = (f.arg() - want_phase).rem_euclid(2.0 * std::f64::consts::PI);
            let dphi = dphi.min(2.0 * std::f64::consts::PI - dphi);
            assert!(dphi < 0.05, "bin {k}: {dphi}");
            assert!(f.norm() < 0.5 && f.norm() > 0.45);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let sig = gen_gaussian_white(100, FS, 1.0, 1).unwrap();
        assert!(welch_psd(&sig, 1024, 0.5, Window::Hann).is_err());
        assert!(welch_psd(&sig, 64, 1.0, Window::Hann).is_err());
        let other = gen_gaussian_white(101, FS, 1.0, 1).unwrap();
        assert!(cross_psd(&sig, &other, 64, 0.5, Window::Hann).is_err());
    }
}
