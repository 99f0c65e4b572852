use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::real::Real;
use crate::timedomain::{SampledSignal, SimError};

use super::welch::{SpectralSums, WelchPlan, Window};
use super::SpectralError;

/// Settings for [`estimate_response`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseParams {
    pub segment_length: usize,
    pub overlap: f64,
    pub window: Window,
    /// Bins with `S_ww` below `floor × passband median` are masked.
    pub floor: f64,
    /// Raised-cosine width applied next to masked bins before inversion.
    pub taper_bins: usize,
    /// Largest integer lag searched when pre-aligning `y` to `w`; 0 disables
    /// alignment.
    pub max_lag: usize,
}

impl Default for ResponseParams {
    fn default() -> Self {
        Self {
            segment_length: 1024,
            overlap: 0.5,
            window: Window::Hann,
            floor: 1e-3,
            taper_bins: 4,
            max_lag: 256,
        }
    }
}

/// Estimated linear response `F = S_wy / S_ww` and its time-domain kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseEstimate<T> {
    pub frequencies: Vec<T>,
    /// Zero on masked bins.
    pub freq_response: Vec<Complex<T>>,
    pub valid: Vec<bool>,
    pub valid_band: (T, T),
    /// `kernel[j]` is the response at lag `j − kernel_offset` samples.
    pub kernel: Vec<T>,
    pub kernel_offset: usize,
    /// Integer lag removed before spectral estimation and restored after.
    pub alignment_lag: i64,
    pub sample_rate: T,
}

impl<T: Real> ResponseEstimate<T> {
    /// Kernel of a pure integer shift (`shift = 0` is the identity).
    pub fn impulse(len: usize, shift: i64, rate: T) -> Self {
        let off = len / 2;
        let mut kernel = vec![T::zero(); len];
        kernel[(off as i64 + shift).rem_euclid(len as i64) as usize] = T::one();
        let bins = len / 2 + 1;
        let df = rate / T::from_usize_lossy(len);
        let frequencies: Vec<T> = (0..bins).map(|k| T::from_usize_lossy(k) * df).collect();
        let freq_response = frequencies
            .iter()
            .map(|&f| {
                Complex::from_polar(
                    T::one(),
                    -T::lit(2.0) * T::PI() * f * T::from_i64(shift).unwrap() / rate,
                )
            })
            .collect();
        Self {
            valid_band: (T::zero(), frequencies[bins - 1]),
            frequencies,
            freq_response,
            valid: vec![true; bins],
            kernel,
            kernel_offset: off,
            alignment_lag: shift,
            sample_rate: rate,
        }
    }

    /// Time of kernel sample `j` relative to zero lag, in seconds.
    pub fn kernel_time(&self, j: usize) -> T {
        (T::from_usize_lossy(j) - T::from_usize_lossy(self.kernel_offset)) / self.sample_rate
    }

    /// Lag (samples) of the largest-magnitude kernel tap.
    pub fn peak_lag(&self) -> i64 {
        let (j, _) = self
            .kernel
            .iter()
            .enumerate()
            .fold(
                (0, T::zero()),
                |m, (j, &v)| if v.abs() > m.1 { (j, v.abs()) } else { m },
            );
        j as i64 - self.kernel_offset as i64
    }

    /// Response at the bin nearest `freq`, if that bin is valid.
    pub fn at(&self, freq: T) -> Option<Complex<T>> {
        let df = self.sample_rate / T::from_usize_lossy(self.kernel.len());
        let k = (freq / df).round().to_usize()?;
        (k < self.valid.len() && self.valid[k]).then(|| self.freq_response[k])
    }
}

/// Integer lag `ℓ` maximizing `|Σ_t y[t+ℓ] w[t]|` over `|ℓ| ≤ max_lag`.
fn best_lag<T: Real>(w: &[T], y: &[T], max_lag: usize) -> i64 {
    if max_lag == 0 {
        return 0;
    }
    let n = w.len().min(y.len()).min(1 << 16);
    let m = max_lag as i64;
    let mut best = (0i64, -1.0f64);
    for lag in -m..=m {
        let mut acc = 0.0f64;
        for t in m..(n as i64 - m) {
            acc += y[(t + lag) as usize].as_f64() * w[t as usize].as_f64();
        }
        if acc.abs() > best.1 {
            best = (lag, acc.abs());
        }
    }
    best.0
}

fn advance<T: Real>(y: &[T], lag: i64) -> Vec<T> {
    let n = y.len() as i64;
    (0..n)
        .map(|t| {
            let i = t + lag;
            if (0..n).contains(&i) {
                y[i as usize]
            } else {
                T::zero()
            }
        })
        .collect()
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite spectrum"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    }
}

/// Valid-bin mask: the contiguous run around the `S_ww` maximum whose bins
/// stay above `floor ×` the median of bins within 10 dB of the maximum.
fn valid_mask<T: Real>(sww: &[T], floor: T) -> Vec<bool> {
    let (kmax, max) = sww.iter().enumerate().fold(
        (0, T::zero()),
        |m, (k, &v)| if v > m.1 { (k, v) } else { m },
    );
    let mut valid = vec![false; sww.len()];
    if max <= T::zero() {
        return valid;
    }
    let reference = median(
        sww.iter()
            .copied()
            .filter(|&v| v >= max / T::lit(10.0))
            .collect(),
    );
    let thr = floor * reference;
    let mut lo = kmax;
    while lo > 0 && sww[lo - 1] >= thr {
        lo -= 1;
    }
    let mut hi = kmax;
    while hi + 1 < sww.len() && sww[hi + 1] >= thr {
        hi += 1;
    }
    valid[lo..=hi].iter_mut().for_each(|v| *v = true);
    valid
}

/// Raised-cosine weights rising over `width` bins away from masked bins;
/// the ends of the array are not treated as masked.
fn taper<T: Real>(valid: &[bool], width: usize) -> Vec<T> {
    let n = valid.len();
    let mut dist = vec![usize::MAX; n];
    let mut last: Option<usize> = None;
    for k in 0..n {
        if !valid[k] {
            last = Some(k);
        }
        if let Some(l) = last {
            dist[k] = k - l;
        }
    }
    last = None;
    for k in (0..n).rev() {
        if !valid[k] {
            last = Some(k);
        }
        if let Some(l) = last {
            dist[k] = dist[k].min(l - k);
        }
    }
    dist.into_iter()
        .map(|d| {
            if d > width {
                T::one()
            } else {
                let u = T::from_usize_lossy(d) / T::from_usize_lossy(width + 1);
                T::lit(0.5) * (T::one() - (T::PI() * u).cos())
            }
        })
        .collect()
}

/// Integer lag maximizing the cross-correlation of `w` and `y` within
/// `±max_lag`.
pub fn alignment_lag<T: Real>(w: &SampledSignal<T>, y: &SampledSignal<T>, max_lag: usize) -> i64 {
    best_lag(w.samples(), y.samples(), max_lag)
}

/// Streaming form of [`estimate_response_from_pairs`]: Welch sums over any
/// number of record pairs at a fixed alignment lag.
#[derive(Clone, Debug)]
pub struct ResponseAccumulator<T: Real> {
    params: ResponseParams,
    plan: WelchPlan<T>,
    lag: i64,
    sww: SpectralSums<T>,
    swy: SpectralSums<Complex<T>>,
}

impl<T: Real> ResponseAccumulator<T> {
    pub fn new(params: &ResponseParams, rate: T, lag: i64) -> Result<Self, SpectralError> {
        let plan = WelchPlan::new(
            params.segment_length,
            T::lit(params.overlap),
            params.window,
            rate,
        )?
        .without_detrend();
        Ok(Self {
            params: params.clone(),
            plan,
            lag,
            sww: SpectralSums {
                sum: Vec::new(),
                segments: 0,
            },
            swy: SpectralSums {
                sum: Vec::new(),
                segments: 0,
            },
        })
    }

    /// Sums of one pair, for accumulation in parallel workers.
    pub fn pair_sums(
        &self,
        w: &SampledSignal<T>,
        y: &SampledSignal<T>,
    ) -> Result<(SpectralSums<T>, SpectralSums<Complex<T>>), SpectralError> {
        if w.len() != y.len() {
            return Err(SimError::LengthMismatch(w.len(), y.len()).into());
        }
        let rate = self.plan.sample_rate();
        if w.sample_rate() != rate || y.sample_rate() != rate {
            return Err(SimError::RateMismatch(w.sample_rate().as_f64(), rate.as_f64()).into());
        }
        let ya = advance(y.samples(), self.lag);
        Ok((
            self.plan.auto_sums(w.samples()),
            self.plan.cross_sums(w.samples(), &ya),
        ))
    }

    pub fn merge(&mut self, sums: &(SpectralSums<T>, SpectralSums<Complex<T>>)) {
        self.sww.merge(&sums.0);
        self.swy.merge(&sums.1);
    }

    pub fn add(&mut self, w: &SampledSignal<T>, y: &SampledSignal<T>) -> Result<(), SpectralError> {
        let s = self.pair_sums(w, y)?;
        self.merge(&s);
        Ok(())
    }

    pub fn finish(&self) -> Result<ResponseEstimate<T>, SpectralError> {
        let params = &self.params;
        let auto = self.plan.finish_auto(&self.sww)?;
        let cross = self.plan.finish_cross(&self.swy)?;

        let valid = valid_mask(&auto.values, T::lit(params.floor));
        if !valid.iter().any(|&v| v) {
            return Err(SpectralError::AllMasked);
        }
        let l = params.segment_length;
        let lag_t = T::from_i64(self.lag).unwrap();
        let phase = |k: usize| {
            Complex::from_polar(
                T::one(),
                -T::lit(2.0) * T::PI() * T::from_usize_lossy(k) * lag_t / T::from_usize_lossy(l),
            )
        };
        let freq_response: Vec<Complex<T>> = auto
            .values
            .iter()
            .zip(&cross.values)
            .zip(&valid)
            .enumerate()
            .map(|(k, ((&a, &c), &ok))| {
                if ok {
                    c / a * phase(k)
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();

        // Tapered two-sided spectrum -> kernel, centred at `off`.
        let weights: Vec<T> = taper(&valid, params.taper_bins);
        let mut full = vec![Complex::new(T::zero(), T::zero()); l];
        for k in 0..=l / 2 {
            let h = freq_response[k] * weights[k];
            full[k] = h;
            if k > 0 && k < l - k {
                full[l - k] = h.conj();
            }
        }
        if l.is_multiple_of(2) {
            full[l / 2] = Complex::new(full[l / 2].re, T::zero());
        }
        full[0] = Complex::new(full[0].re, T::zero());
        fft::inverse(&mut full);
        let off = l / 2;
        let scale = T::one() / T::from_usize_lossy(l);
        let kernel: Vec<T> = (0..l).map(|j| full[(j + l - off) % l].re * scale).collect();

        let first = valid.iter().position(|&v| v).expect("some valid bin");
        let last = valid.iter().rposition(|&v| v).expect("some valid bin");
        Ok(ResponseEstimate {
            valid_band: (auto.frequencies[first], auto.frequencies[last]),
            frequencies: auto.frequencies,
            freq_response,
            valid,
            kernel,
            kernel_offset: off,
            alignment_lag: self.lag,
            sample_rate: self.plan.sample_rate(),
        })
    }
}

/// Response estimate averaged over several `(w, y)` record pairs; the
/// alignment lag is taken from the first pair.
pub fn estimate_response_from_pairs<T: Real>(
    pairs: &[(&SampledSignal<T>, &SampledSignal<T>)],
    params: &ResponseParams,
) -> Result<ResponseEstimate<T>, SpectralError> {
    let (w0, y0) = pairs.first().ok_or(SpectralError::Domain {
        what: "record pair count",
        value: 0.0,
    })?;
    let lag = alignment_lag(w0, y0, params.max_lag);
    let mut acc = ResponseAccumulator::new(params, w0.sample_rate(), lag)?;
    for (w, y) in pairs {
        acc.add(w, y)?;
    }
    acc.finish()
}

/// `F(ω) = S_wy(ω) / S_ww(ω)` with floor masking; the kernel is the inverse
/// transform of the tapered masked response.
pub fn estimate_response<T: Real>(
    w: &SampledSignal<T>,
    y: &SampledSignal<T>,
    params: &ResponseParams,
) -> Result<ResponseEstimate<T>, SpectralError> {
    estimate_response_from_pairs(&[(w, y)], params)
}

/// Normalized circular inner product of two kernels after shifting `b` by
/// `shift` samples.
pub fn kernel_similarity<T: Real>(
    a: &ResponseEstimate<T>,
    b: &ResponseEstimate<T>,
    shift: i64,
) -> Result<T, SpectralError> {
    let n = a.kernel.len();
    if b.kernel.len() != n {
        return Err(SimError::LengthMismatch(n, b.kernel.len()).into());
    }
    let mut dot = T::zero();
    for j in 0..n {
        let i = (j as i64 + shift).rem_euclid(n as i64) as usize;
        dot = dot + a.kernel[j] * b.kernel[i];
    }
    let na = a.kernel.iter().map(|&v| v * v).sum::<T>().sqrt();
    let nb = b.kernel.iter().map(|&v| v * v).sum::<T>().sqrt();
    if na == T::zero() || nb == T::zero() {
        return Ok(T::zero());
    }
    Ok(dot / (na * nb))
}

/// The shift maximizing [`kernel_similarity`] over `|shift| ≤ max_shift`.
pub fn best_kernel_alignment<T: Real>(
    a: &ResponseEstimate<T>,
    b: &ResponseEstimate<T>,
    max_shift: i64,
) -> Result<(i64, T), SpectralError> {
    let mut best = (0, -T::infinity());
    for s in -max_shift..=max_shift {
        let v = kernel_similarity(a, b, s)?;
        if v > best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::power_db;
    use crate::timedomain::{
        apply_delay, apply_filter, frequency_response, gen_gaussian_white, DelaySpec, FilterSpec,
    };

    const FS: f64 = 1e9;

    #[test]
    fn identity_system_gives_unit_response_and_impulse_kernel() {
        let w = gen_gaussian_white(1 << 18, FS, 1.0, 1).unwrap();
        let r = estimate_response(&w, &w, &ResponseParams::default()).unwrap();
        assert_eq!(r.alignment_lag, 0);
        assert!(r.valid.iter().all(|&v| v));
        for f in &r.freq_response {
            assert!((f - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
        let delta = ResponseEstimate::impulse(1024, 0, FS);
        for (a, b) in r.kernel.iter().zip(&delta.kernel) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lowpass_response_recovered() {
        let w = gen_gaussian_white(1 << 21, FS, 1.0, 2).unwrap();
        let spec = FilterSpec::lowpass(100e6, 7);
        let y = apply_filter(&w, &spec).unwrap();
        let r = estimate_response(&w, &y, &ResponseParams::default()).unwrap();
        assert!(r.valid_band.1 > 150e6);
        for (k, &f) in r.frequencies.iter().enumerate() {
            if !r.valid[k] || f < 1e6 {
                continue;
            }
            let want = frequency_response(&spec, FS, f).unwrap();
            if power_db(want.norm_sqr()) < -20.0 {
                continue;
            }
            let db = power_db(r.freq_response[k].norm_sqr() / want.norm_sqr());
            let deg = (r.freq_response[k] / want).arg().to_degrees();
            assert!(db.abs() < 0.2, "{f}: {db} dB");
            assert!(deg.abs() < 2.0, "{f}: {deg} deg");
        }
    }

    #[test]
    fn delay_is_aligned_and_restored() {
        let w = gen_gaussian_white(1 << 18, FS, 1.0, 3).unwrap();
        let y = apply_delay(&w, DelaySpec::new(36e-9).unwrap()).scaled(0.5);
        let r = estimate_response(&w, &y, &ResponseParams::default()).unwrap();
        assert_eq!(r.alignment_lag, 36);
        assert_eq!(r.peak_lag(), 36);
        let f = r.at(50e6).unwrap();
        assert!((f.norm() - 0.5).abs() < 0.01);
        let want = -2.0 * std::f64::consts::PI * r.frequencies[r.valid.len() / 10] * 36e-9;
        let got = r.freq_response[r.valid.len() / 10].arg();
        let d = (got - want).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(d.min(2.0 * std::f64::consts::PI - d) < 0.02);
        let target = ResponseEstimate::impulse(1024, 36, FS);
        assert!(kernel_similarity(&r, &target, 0).unwrap() > 0.99);
    }

    #[test]
    fn masked_bins_do_not_reach_the_kernel() {
        let w = apply_filter(
            &gen_gaussian_white(1 << 18, FS, 1.0, 4).unwrap(),
            &FilterSpec::lowpass(100e6, 7),
        )
        .unwrap();
        let r = estimate_response(&w, &w, &ResponseParams::default()).unwrap();
        assert!(r.valid.iter().any(|&v| !v));
        // Re-transform the kernel: masked bins must carry no energy.
        let l = r.kernel.len();
        let mut buf: Vec<Complex<f64>> = (0..l)
            .map(|t| Complex::new(r.kernel[(t + r.kernel_offset) % l], 0.0))
            .collect();
        fft::forward(&mut buf);
        for (k, &ok) in r.valid.iter().enumerate() {
            if !ok {
                assert!(buf[k].norm() < 1e-9, "bin {k}");
            }
        }
    }

    #[test]
    fn all_masked_is_an_error() {
        let w = SampledSignal::zeros(4096, FS).unwrap();
        assert!(matches!(
            estimate_response(&w, &w, &ResponseParams::default()),
            Err(SpectralError::AllMasked)
        ));
    }

    #[test]
    fn similarity_properties() {
        let a = ResponseEstimate::impulse(64, 0, FS);
        assert!((kernel_similarity(&a, &a, 0).unwrap() - 1.0).abs() < 1e-15);
        let b = ResponseEstimate::impulse(64, 5, FS);
        assert_eq!(kernel_similarity(&a, &b, 5).unwrap(), 1.0);
        assert_eq!(best_kernel_alignment(&a, &b, 10).unwrap(), (5, 1.0));
        let mut x = ResponseEstimate::impulse(4096, 0, FS);
        let mut y = x.clone();
        x.kernel = gen_gaussian_white(4096, FS, 1.0, 8).unwrap().into_samples();
        y.kernel = gen_gaussian_white(4096, FS, 1.0, 9).unwrap().into_samples();
        assert!(kernel_similarity(&x, &y, 0).unwrap().abs() < 0.06);
        let short = ResponseEstimate::impulse(32, 0, FS);
        assert!(kernel_similarity(&a, &short, 0).is_err());
    }
}
