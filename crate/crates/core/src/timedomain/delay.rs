use serde::{Deserialize, Serialize};

use crate::real::Real;

use super::signal::SampledSignal;
use super::SimError;

/// Half-length of the windowed-sinc fractional interpolator.
const SINC_HALF_TAPS: i64 = 24;

/// Pure delay in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaySpec<T> {
    pub seconds: T,
}

impl<T: Real> DelaySpec<T> {
    pub fn new(seconds: T) -> Result<Self, SimError> {
        if !(seconds >= T::zero() && seconds.is_finite()) {
            return Err(SimError::Domain {
                what: "delay (s)",
                value: seconds.as_f64(),
            });
        }
        Ok(Self { seconds })
    }

    pub fn zero() -> Self {
        Self { seconds: T::zero() }
    }

    pub fn from_samples(samples: T, rate: T) -> Result<Self, SimError> {
        Self::new(samples / rate)
    }

    /// Delay in (possibly fractional) samples.
    pub fn samples(&self, rate: T) -> T {
        self.seconds * rate
    }

    /// Integer part and remaining fraction in `[0, 1)`.
    pub fn split(&self, rate: T) -> (usize, T) {
        let d = self.samples(rate);
        // Snap values within rounding of an integer so exact sample delays
        // stay exact.
        let nearest = d.round();
        if (d - nearest).abs() < T::lit(1e-9) * nearest.max(T::one()) {
            return (nearest.to_usize().unwrap_or(0), T::zero());
        }
        let whole = d.floor();
        (whole.to_usize().unwrap_or(0), d - whole)
    }
}

/// Blackman-windowed sinc taps for a delay of `mu ∈ (0, 1)` samples,
/// indexed by `n = -SINC_HALF_TAPS ..= SINC_HALF_TAPS`.
fn fractional_taps<T: Real>(mu: T) -> Vec<T> {
    let m = T::from_i64(SINC_HALF_TAPS).unwrap();
    let span = m + T::one();
    let two_pi = T::lit(2.0) * T::PI();
    let taps: Vec<T> = (-SINC_HALF_TAPS..=SINC_HALF_TAPS)
        .map(|n| {
            let t = T::from_i64(n).unwrap() - mu;
            let sinc = if t == T::zero() {
                T::one()
            } else {
                (T::PI() * t).sin() / (T::PI() * t)
            };
            // Window centred on the fractional peak.
            let u = (t + span) / (T::lit(2.0) * span);
            let w = T::lit(0.42) - T::lit(0.5) * (two_pi * u).cos()
                + T::lit(0.08) * (T::lit(2.0) * two_pi * u).cos();
            sinc * w
        })
        .collect();
    // Unit dc gain.
    let s: T = taps.iter().copied().sum();
    taps.into_iter().map(|v| v / s).collect()
}

/// `out[t] = x(t − d)` with zeros shifted in; length is preserved.
pub(crate) fn delay_into<T: Real>(x: &[T], delay: DelaySpec<T>, rate: T, out: &mut [T]) {
    let (k, mu) = delay.split(rate);
    let n = x.len();
    out.iter_mut().for_each(|v| *v = T::zero());
    if mu == T::zero() {
        if k < n {
            out[k..].copy_from_slice(&x[..n - k]);
        }
        return;
    }
    let taps = fractional_taps(mu);
    let ni = n as i64;
    for (t, o) in out.iter_mut().enumerate() {
        let base = t as i64 - k as i64;
        let mut acc = T::zero();
        for (j, &h) in taps.iter().enumerate() {
            let idx = base - (j as i64 - SINC_HALF_TAPS);
            if (0..ni).contains(&idx) {
                acc = acc + h * x[idx as usize];
            }
        }
        *o = acc;
    }
}

/// `out[t] = x(t − samples)` for a shift of either sign, zeros outside the
/// record.
pub(crate) fn shifted<T: Real>(x: &[T], samples: T) -> Vec<T> {
    let whole = samples.floor();
    let mut mu = samples - whole;
    let mut k = whole.to_i64().unwrap_or(0);
    if mu > T::one() - T::lit(1e-9) {
        k += 1;
        mu = T::zero();
    } else if mu < T::lit(1e-9) {
        mu = T::zero();
    }
    let n = x.len() as i64;
    if mu == T::zero() {
        return (0..n)
            .map(|t| {
                let i = t - k;
                if (0..n).contains(&i) {
                    x[i as usize]
                } else {
                    T::zero()
                }
            })
            .collect();
    }
    let taps = fractional_taps(mu);
    (0..n)
        .map(|t| {
            let base = t - k;
            taps.iter()
                .enumerate()
                .filter_map(|(j, &h)| {
                    let i = base - (j as i64 - SINC_HALF_TAPS);
                    (0..n).contains(&i).then(|| h * x[i as usize])
                })
                .fold(T::zero(), |a, b| a + b)
        })
        .collect()
}

pub(crate) fn delayed<T: Real>(x: &[T], delay: DelaySpec<T>, rate: T) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    delay_into(x, delay, rate, &mut out);
    out
}

pub fn apply_delay<T: Real>(sig: &SampledSignal<T>, delay: DelaySpec<T>) -> SampledSignal<T> {
    SampledSignal::from_parts(
        delayed(sig.samples(), delay, sig.sample_rate()),
        sig.sample_rate(),
    )
}

/// Shift by a signed, possibly fractional number of samples (positive
/// delays); samples shifted in from outside the record are zero.
pub fn shift_signal<T: Real>(sig: &SampledSignal<T>, samples: T) -> SampledSignal<T> {
    SampledSignal::from_parts(shifted(sig.samples(), samples), sig.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 1e9;

    #[test]
    fn negative_delay_rejected() {
        assert!(DelaySpec::new(-1e-9f64).is_err());
        assert!(DelaySpec::new(f64::NAN).is_err());
    }

    #[test]
    fn integer_delay_is_exact_shift() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let d = DelaySpec::new(13e-9).unwrap();
        assert_eq!(d.split(FS), (13, 0.0));
        let y = delayed(&x, d, FS);
        assert!(y[..13].iter().all(|&v| v == 0.0));
        assert_eq!(&y[13..], &x[..37]);
    }

    #[test]
    fn fractional_delay_shifts_sinusoid_phase() {
        let f = 80e6;
        let tau = 2.37e-9;
        let n = 2000;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / FS).sin())
            .collect();
        let y = delayed(&x, DelaySpec::new(tau).unwrap(), FS);
        for (i, &yi) in y.iter().enumerate().take(n - 100).skip(100) {
            let t = i as f64 / FS - tau;
            let want = (2.0 * std::f64::consts::PI * f * t).sin();
            assert!((yi - want).abs() < 2e-3, "{i}: {yi} vs {want}");
        }
    }

    #[test]
    fn signed_shift_agrees_with_delay() {
        let x: Vec<f64> = (0..300).map(|i| ((i * 7919) % 101) as f64 - 50.0).collect();
        let d = delayed(&x, DelaySpec::from_samples(3.25, FS).unwrap(), FS);
        let s = shifted(&x, 3.25);
        assert_eq!(d, s);
        let adv = shifted(&x, -4.0);
        assert_eq!(&adv[..296], &x[4..]);
        assert!(adv[296..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn half_sample_delay_has_unit_dc_gain() {
        let x = vec![1.0f64; 200];
        let y = delayed(&x, DelaySpec::from_samples(0.5, FS).unwrap(), FS);
        assert!((y[100] - 1.0).abs() < 1e-12);
    }
}
