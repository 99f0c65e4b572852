use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::real::{db_to_power, squeeze_param_to_db, Real};

use super::signal::{check_rate, gaussian_vec, stream_rng, SampledSignal};
use super::SimError;

/// Spectrum of a below-threshold OPO squeezed vacuum, normalized to shot
/// noise. `fwhm = +inf` gives frequency-flat squeezing.
///
/// The squeezed and anti-squeezed quadratures have Lorentzian excess terms
/// `∓C/(1+(2f/γ)²)`, with the two widths `γ = fwhm·(1 ± x)` fixed by the
/// ratio of the dc excesses, `C_a/C_s = ((1+x)/(1−x))²`. For a lossless
/// cavity (`anti = −squeeze`) this is exact; with loss it keeps the dc
/// levels and the geometric-mean width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AncillaSpec<T> {
    pub squeeze_db_dc: T,
    pub antisqueeze_db_dc: T,
    pub fwhm: T,
}

impl<T: Real> AncillaSpec<T> {
    pub fn new(squeeze_db_dc: T, antisqueeze_db_dc: T, fwhm: T) -> Result<Self, SimError> {
        let s = Self {
            squeeze_db_dc,
            antisqueeze_db_dc,
            fwhm,
        };
        s.validate()?;
        Ok(s)
    }

    /// Minimum-uncertainty squeezing (`anti = −squeeze`).
    pub fn pure(squeeze_db_dc: T, fwhm: T) -> Result<Self, SimError> {
        Self::new(squeeze_db_dc, -squeeze_db_dc, fwhm)
    }

    pub fn flat(squeeze_db: T, antisqueeze_db: T) -> Result<Self, SimError> {
        Self::new(squeeze_db, antisqueeze_db, T::infinity())
    }

    /// White, pure squeezing with parameter `r` (variance `e^{∓2r}`).
    pub fn from_squeeze_param(r: T) -> Result<Self, SimError> {
        let db = squeeze_param_to_db(r.abs());
        Self::flat(db, -db)
    }

    pub fn vacuum() -> Self {
        Self {
            squeeze_db_dc: T::zero(),
            antisqueeze_db_dc: T::zero(),
            fwhm: T::infinity(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let sq = self.squeeze_db_dc;
        let anti = self.antisqueeze_db_dc;
        if !(sq <= T::zero() && sq.is_finite()) {
            return Err(SimError::Domain {
                what: "dc squeezing (dB, must be finite and ≤ 0)",
                value: sq.as_f64(),
            });
        }
        if !(anti >= T::zero() && anti.is_finite()) {
            return Err(SimError::Domain {
                what: "dc anti-squeezing (dB, must be finite and ≥ 0)",
                value: anti.as_f64(),
            });
        }
        if !(self.fwhm > T::zero()) {
            return Err(SimError::Domain {
                what: "OPO linewidth (Hz)",
                value: self.fwhm.as_f64(),
            });
        }
        // Heisenberg bound on the dc variances, in dB to survive r ≫ 1.
        if anti + sq < -T::lit(1e-9) * (T::one() + anti.abs()) {
            return Err(SimError::Domain {
                what: "squeeze/anti-squeeze product below the uncertainty bound (dB sum)",
                value: (anti + sq).as_f64(),
            });
        }
        Ok(())
    }

    fn excess(&self) -> (T, T) {
        (
            T::one() - db_to_power(self.squeeze_db_dc),
            db_to_power(self.antisqueeze_db_dc) - T::one(),
        )
    }

    pub fn is_flat(&self) -> bool {
        self.fwhm.is_infinite()
    }

    /// Lorentzian widths of the squeezed and anti-squeezed excess terms.
    pub fn widths(&self) -> (T, T) {
        let (cs, ca) = self.excess();
        if cs <= T::zero() || ca <= T::zero() {
            return (self.fwhm, self.fwhm);
        }
        let q = (ca / cs).sqrt();
        let x = (q - T::one()) / (q + T::one());
        (self.fwhm * (T::one() + x), self.fwhm * (T::one() - x))
    }

    /// Squeezed-quadrature PSD relative to shot noise.
    pub fn squeezed_psd(&self, freq: T) -> T {
        let (cs, _) = self.excess();
        let (gs, _) = self.widths();
        T::one() - cs * lorentzian(freq, gs)
    }

    /// Anti-squeezed-quadrature PSD relative to shot noise.
    pub fn antisqueezed_psd(&self, freq: T) -> T {
        let (_, ca) = self.excess();
        let (_, ga) = self.widths();
        T::one() + ca * lorentzian(freq, ga)
    }
}

fn lorentzian<T: Real>(freq: T, width: T) -> T {
    if width.is_infinite() {
        return T::one();
    }
    let u = T::lit(2.0) * freq / width;
    T::one() / (T::one() + u * u)
}

/// Shapes unit white noise to the PSD `psd(f)` (shot-noise normalized) by
/// per-bin amplitude weighting on a circular block of power-of-two length.
fn shaped<T: Real, R: Rng>(rng: &mut R, n: usize, rate: T, psd: impl Fn(T) -> T) -> Vec<T>
where
    StandardNormal: Distribution<T>,
{
    let m = n.next_power_of_two().max(2);
    let mut buf: Vec<Complex<T>> = gaussian_vec(rng, m, T::one())
        .into_iter()
        .map(|v| Complex::new(v, T::zero()))
        .collect();
    fft::forward(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        *b = *b * psd(fft::bin_frequency(k, m, rate)).max(T::zero()).sqrt();
    }
    fft::inverse(&mut buf);
    let scale = T::one() / T::from_usize_lossy(m);
    buf.into_iter().take(n).map(|c| c.re * scale).collect()
}

pub(crate) fn squeezed_pair<T: Real, R: Rng>(
    spec: &AncillaSpec<T>,
    n: usize,
    rate: T,
    rng_x: &mut R,
    rng_p: &mut R,
) -> (Vec<T>, Vec<T>)
where
    StandardNormal: Distribution<T>,
{
    if spec.is_flat() {
        let sx = db_to_power(spec.squeeze_db_dc).sqrt();
        let sp = db_to_power(spec.antisqueeze_db_dc).sqrt();
        (gaussian_vec(rng_x, n, sx), gaussian_vec(rng_p, n, sp))
    } else {
        (
            shaped(rng_x, n, rate, |f| spec.squeezed_psd(f)),
            shaped(rng_p, n, rate, |f| spec.antisqueezed_psd(f)),
        )
    }
}

/// Band-limited squeezed vacuum: `x` carries the squeezed quadrature and
/// `p` the anti-squeezed one.
pub fn gen_squeezed_vacuum_timeseries<T: Real>(
    spec: &AncillaSpec<T>,
    n: usize,
    rate: T,
    seed: u64,
) -> Result<(SampledSignal<T>, SampledSignal<T>), SimError>
where
    StandardNormal: Distribution<T>,
{
    spec.validate()?;
    check_rate(rate)?;
    if n == 0 {
        return Err(SimError::Domain {
            what: "record length",
            value: 0.0,
        });
    }
    let mut rx = stream_rng(seed, 0);
    let mut rp = stream_rng(seed, 1);
    let (x, p) = squeezed_pair(spec, n, rate, &mut rx, &mut rp);
    Ok((
        SampledSignal::from_parts(x, rate),
        SampledSignal::from_parts(p, rate),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::power_db;

    #[test]
    fn five_db_ancilla_at_100_mhz() {
        let spec = AncillaSpec::pure(-5.0f64, 150e6).unwrap();
        let db = power_db(spec.squeezed_psd(100e6));
        assert!((db + 2.0).abs() < 0.3, "{db}");
        assert!((power_db(spec.squeezed_psd(0.0)) + 5.0).abs() < 1e-12);
        assert!((power_db(spec.antisqueezed_psd(0.0)) - 5.0).abs() < 1e-12);
        assert!(power_db(spec.squeezed_psd(1e12)).abs() < 1e-4);
    }

    #[test]
    fn pure_spec_is_minimum_uncertainty_at_all_frequencies() {
        let spec = AncillaSpec::pure(-8.0f64, 40e6).unwrap();
        for &f in &[0.0, 1e6, 20e6, 40e6, 1e8, 1e9] {
            let prod = spec.squeezed_psd(f) * spec.antisqueezed_psd(f);
            assert!((prod - 1.0).abs() < 1e-12, "{f}: {prod}");
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(AncillaSpec::new(1.0f64, 1.0, 1e8).is_err());
        assert!(AncillaSpec::new(-5.0f64, -1.0, 1e8).is_err());
        assert!(AncillaSpec::new(-5.0f64, 3.0, 1e8).is_err());
        assert!(AncillaSpec::new(f64::NEG_INFINITY, 5.0, 1e8).is_err());
        assert!(AncillaSpec::new(-5.0f64, 5.0, 0.0).is_err());
        assert!(AncillaSpec::new(-5.0f64, 8.0, 1e8).is_ok());
    }

    #[test]
    fn zero_db_gives_unit_white_noise() {
        let (x, p) =
            gen_squeezed_vacuum_timeseries(&AncillaSpec::vacuum(), 200_000, 1e9f64, 4).unwrap();
        assert!((x.variance() - 1.0).abs() < 0.015);
        assert!((p.variance() - 1.0).abs() < 0.015);
        let lag1: f64 = x.samples().windows(2).map(|w| w[0] * w[1]).sum::<f64>() / x.len() as f64;
        assert!(lag1.abs() < 0.01);
    }

    #[test]
    fn shaped_record_variance_matches_integrated_psd() {
        let spec = AncillaSpec::pure(-5.0f64, 150e6).unwrap();
        let rate = 1e9;
        let (x, p) = gen_squeezed_vacuum_timeseries(&spec, 1 << 18, rate, 11).unwrap();
        let m = 1 << 16;
        let mean_psd = |g: &dyn Fn(f64) -> f64| {
            (0..m)
                .map(|k| g(fft::bin_frequency(k, m, rate)))
                .sum::<f64>()
                / m as f64
        };
        let want_x = mean_psd(&|f| spec.squeezed_psd(f));
        let want_p = mean_psd(&|f| spec.antisqueezed_psd(f));
        assert!((x.variance() / want_x - 1.0).abs() < 0.01);
        assert!((p.variance() / want_p - 1.0).abs() < 0.01);
    }

    #[test]
    fn large_squeezing_parameter_supported() {
        let spec = AncillaSpec::from_squeeze_param(20.0f64).unwrap();
        let (x, p) = gen_squeezed_vacuum_timeseries(&spec, 10_000, 1e9, 1).unwrap();
        assert!(x.variance() < 1e-16);
        assert!(p.variance() > 1e16);
    }
}
