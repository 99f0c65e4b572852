use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::real::{db_to_power, Real};

use super::SimError;

/// Uniformly sampled real record in shot-noise quadrature units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal<T> {
    samples: Vec<T>,
    sample_rate: T,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(samples: Vec<T>, sample_rate: T) -> Result<Self, SimError> {
        check_rate(sample_rate)?;
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(SimError::NonFiniteSample(i));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub(crate) fn from_parts(samples: Vec<T>, sample_rate: T) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn zeros(n: usize, sample_rate: T) -> Result<Self, SimError> {
        Self::new(vec![T::zero(); n], sample_rate)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.samples.len()) / self.sample_rate
    }

    pub fn mean(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        self.samples.iter().copied().sum::<T>() / T::from_usize_lossy(self.samples.len())
    }

    /// Population variance (mean removed).
    pub fn variance(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        let m = self.mean();
        self.samples.iter().map(|&s| (s - m) * (s - m)).sum::<T>()
            / T::from_usize_lossy(self.samples.len())
    }

    /// Mean square without mean removal.
    pub fn power(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        self.samples.iter().map(|&s| s * s).sum::<T>() / T::from_usize_lossy(self.samples.len())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::from_parts(
            self.samples.iter().map(|&s| s * factor).collect(),
            self.sample_rate,
        )
    }

    /// Sample-wise `self - other`.
    pub fn difference(&self, other: &Self) -> Result<Self, SimError> {
        check_compatible(self, other)?;
        Ok(Self::from_parts(
            self.samples
                .iter()
                .zip(other.samples())
                .map(|(&a, &b)| a - b)
                .collect(),
            self.sample_rate,
        ))
    }

    /// Sub-record `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self::from_parts(self.samples[start..end].to_vec(), self.sample_rate)
    }
}

pub(crate) fn check_rate<T: Real>(rate: T) -> Result<(), SimError> {
    if rate > T::zero() && rate.is_finite() {
        Ok(())
    } else {
        Err(SimError::Domain {
            what: "sample rate",
            value: rate.as_f64(),
        })
    }
}

pub(crate) fn check_compatible<T: Real>(
    a: &SampledSignal<T>,
    b: &SampledSignal<T>,
) -> Result<(), SimError> {
    if a.len() != b.len() {
        return Err(SimError::LengthMismatch(a.len(), b.len()));
    }
    if a.sample_rate != b.sample_rate {
        return Err(SimError::RateMismatch(
            a.sample_rate.as_f64(),
            b.sample_rate.as_f64(),
        ));
    }
    Ok(())
}

/// Deterministic generator for `(seed, stream)`; distinct streams are
/// statistically independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer, used to derive per-record-set seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn fill_gaussian<T: Real, R: Rng>(rng: &mut R, out: &mut [T], std_dev: T)
where
    StandardNormal: Distribution<T>,
{
    if std_dev == T::zero() {
        out.iter_mut().for_each(|s| *s = T::zero());
        return;
    }
    for s in out.iter_mut() {
        let z: T = StandardNormal.sample(rng);
        *s = z * std_dev;
    }
}

pub(crate) fn gaussian_vec<T: Real, R: Rng>(rng: &mut R, n: usize, std_dev: T) -> Vec<T>
where
    StandardNormal: Distribution<T>,
{
    let mut v = vec![T::zero(); n];
    fill_gaussian(rng, &mut v, std_dev);
    v
}

/// I.i.d. zero-mean Gaussian samples of the given variance.
pub fn gen_gaussian_white<T: Real>(
    n: usize,
    rate: T,
    variance: T,
    seed: u64,
) -> Result<SampledSignal<T>, SimError>
where
    StandardNormal: Distribution<T>,
{
    if n == 0 {
        return Err(SimError::Domain {
            what: "record length",
            value: 0.0,
        });
    }
    if !(variance >= T::zero() && variance.is_finite()) {
        return Err(SimError::Domain {
            what: "variance",
            value: variance.as_f64(),
        });
    }
    check_rate(rate)?;
    let mut rng = stream_rng(seed, 0);
    Ok(SampledSignal::from_parts(
        gaussian_vec(&mut rng, n, variance.sqrt()),
        rate,
    ))
}

/// Adds white detector noise `clearance_db` below the shot-noise level.
/// `clearance_db = +inf` leaves the record unchanged.
pub fn add_electronic_noise<T: Real>(
    sig: &SampledSignal<T>,
    clearance_db: T,
    seed: u64,
) -> Result<SampledSignal<T>, SimError>
where
    StandardNormal: Distribution<T>,
{
    if !(clearance_db > T::zero()) {
        return Err(SimError::Domain {
            what: "electronic-noise clearance (dB)",
            value: clearance_db.as_f64(),
        });
    }
    let mut out = sig.clone();
    let mut rng = stream_rng(seed, 0);
    add_noise_in_place(&mut rng, out.samples_mut(), clearance_db);
    Ok(out)
}

pub(crate) fn add_noise_in_place<T: Real, R: Rng>(rng: &mut R, samples: &mut [T], clearance_db: T)
where
    StandardNormal: Distribution<T>,
{
    if clearance_db.is_infinite() {
        return;
    }
    let sd = db_to_power(-clearance_db).sqrt();
    for s in samples.iter_mut() {
        let z: T = StandardNormal.sample(rng);
        *s = *s + z * sd;
    }
}
