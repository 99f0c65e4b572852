use serde::{Deserialize, Serialize};

use crate::real::Real;
use crate::timedomain::{ChannelSet, FilterChain, FilterSpec, RecordStats};

use super::bootstrap::Bootstrap;
use super::estimators::{conditional_variance, snr_transfer};
use super::report::Estimate;
use super::{Basis, MetricsError, QuadMoments};

/// Octave-spaced band centres up to 100 MHz.
pub const BAND_CENTERS_HZ: [f64; 6] = [3.125e6, 6.25e6, 12.5e6, 25e6, 50e6, 100e6];

/// One-third-octave analysis band realized as Butterworth high-pass and
/// low-pass sections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    pub order: usize,
}

impl BandSpec {
    pub fn third_octave(center: f64, order: usize) -> Self {
        let k = 2f64.powf(1.0 / 6.0);
        Self {
            center,
            lo: center / k,
            hi: center * k,
            order,
        }
    }

    pub fn chain<T: Real>(&self, rate: T) -> Result<FilterChain<T>, MetricsError> {
        Ok(FilterChain::new(
            &[
                FilterSpec::highpass(T::lit(self.lo), self.order),
                FilterSpec::lowpass(T::lit(self.hi), self.order),
            ],
            rate,
        )?)
    }

    /// Samples discarded after band filtering while the filter state builds up.
    pub fn settle_samples(&self, rate: f64) -> usize {
        (4.0 * rate / (self.hi - self.lo)).ceil() as usize
    }
}

pub fn octave_bands(order: usize) -> Vec<BandSpec> {
    BAND_CENTERS_HZ
        .iter()
        .map(|&c| BandSpec::third_octave(c, order))
        .collect()
}

/// Per-band sufficient statistics of one record set. `measurement` is the
/// chain the set was recorded with; each band's shot-noise reference is the
/// noise gain of the measurement chain followed by the band filter.
pub fn band_stats<T: Real>(
    set: &ChannelSet<T>,
    measurement: &FilterChain<T>,
    bands: &[BandSpec],
) -> Result<Vec<RecordStats>, MetricsError> {
    let rate = set.sample_rate();
    bands
        .iter()
        .map(|b| {
            let chain = b.chain(rate)?;
            let settle = b.settle_samples(rate.as_f64());
            if settle >= set.len() {
                return Err(MetricsError::Domain {
                    what: "record length for band settling",
                    value: set.len() as f64,
                });
            }
            let mut filtered = set.filtered(&chain)?.slice(settle, set.len());
            filtered.shot_noise_variance = measurement.followed_by(&chain).noise_gain();
            Ok(filtered.stats())
        })
        .collect()
}

/// Band-resolved metrics; `t_s`/`t_p` need signal-on statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandMetrics {
    pub band: BandSpec,
    pub v_sp: Estimate<f64>,
    pub g_opt: Estimate<f64>,
    pub t_s: Option<Estimate<f64>>,
    pub t_p: Option<Estimate<f64>>,
}

fn column(per_set: &[Vec<RecordStats>], band: usize) -> Vec<RecordStats> {
    per_set.iter().map(|s| s[band].clone()).collect()
}

impl BandMetrics {
    /// `vacuum[i][k]` is set `i`, band `k` (as returned by [`band_stats`]).
    pub fn compute(
        bands: &[BandSpec],
        vacuum: &[Vec<RecordStats>],
        signal: Option<&[Vec<RecordStats>]>,
        basis: Basis,
        boot: &Bootstrap,
    ) -> Result<Vec<BandMetrics>, MetricsError> {
        bands
            .iter()
            .enumerate()
            .map(|(k, &band)| {
                let vac = column(vacuum, k);
                let sig = signal.map(|s| column(s, k));
                let mut groups: Vec<&[RecordStats]> = vec![&vac];
                if let Some(s) = &sig {
                    groups.push(s);
                }
                let (p, e) = boot.estimate(&groups, |g| {
                    let m0 = QuadMoments::from_stats(&g[0], basis);
                    let c = conditional_variance(&m0)?;
                    let mut out = vec![c.v_sp, c.g_opt];
                    if g.len() > 1 {
                        let t = snr_transfer(&QuadMoments::from_stats(&g[1], basis), &m0)?;
                        out.extend([t.t_s, t.t_p]);
                    }
                    Ok(out)
                })?;
                let at = |i: usize| Estimate {
                    value: p[i],
                    stderr: e[i],
                };
                Ok(BandMetrics {
                    band,
                    v_sp: at(0),
                    g_opt: at(1),
                    t_s: sig.as_ref().map(|_| at(2)),
                    t_p: sig.as_ref().map(|_| at(3)),
                })
            })
            .collect()
    }

    /// `V_S|P` does not decrease from one band to the next by more than `k`
    /// combined standard errors.
    pub fn v_sp_nondecreasing(bands: &[BandMetrics], k: f64) -> bool {
        bands.windows(2).all(|w| {
            let sigma = w[0].v_sp.stderr.hypot(w[1].v_sp.stderr);
            w[1].v_sp.value > w[0].v_sp.value - k * sigma
        })
    }

    pub fn rows(bands: &[BandMetrics]) -> String {
        let mut out = String::from("center_hz,v_sp,v_sp_stderr,g_opt,t_s,t_p\n");
        for b in bands {
            let opt = |e: Option<Estimate<f64>>| e.map_or(String::new(), |e| e.value.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                b.band.center,
                b.v_sp.value,
                b.v_sp.stderr,
                b.g_opt.value,
                opt(b.t_s),
                opt(b.t_p)
            ));
        }
        out
    }
}
