use serde::{Deserialize, Serialize};

use crate::real::Real;

use super::pipeline::{Channel, ChannelSet};

const N: usize = Channel::COUNT;

/// First and second sample moments of every [`Channel`] of one or more
/// record sets, accumulated in `f64` regardless of the record scalar.
///
/// Sums are additive, so sets can be pooled or bootstrapped without keeping
/// the records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordStats {
    pub count: u64,
    pub sum: [f64; N],
    pub cross: [[f64; N]; N],
    /// Shot-noise variance of the measurement chain that produced the sums.
    pub shot_noise_variance: f64,
}

impl RecordStats {
    pub fn empty(shot_noise_variance: f64) -> Self {
        Self {
            count: 0,
            sum: [0.0; N],
            cross: [[0.0; N]; N],
            shot_noise_variance,
        }
    }

    pub fn from_channel_set<T: Real>(set: &ChannelSet<T>) -> Self {
        let mut st = Self::empty(set.shot_noise_variance.as_f64());
        let recs: Vec<&[T]> = Channel::ALL
            .iter()
            .map(|&c| set.channel(c).samples())
            .collect();
        let mut row = [0.0f64; N];
        for t in 0..set.len() {
            for (r, rec) in row.iter_mut().zip(&recs) {
                *r = rec[t].as_f64();
            }
            for i in 0..N {
                st.sum[i] += row[i];
                for j in i..N {
                    st.cross[i][j] += row[i] * row[j];
                }
            }
        }
        for i in 0..N {
            for j in 0..i {
                st.cross[i][j] = st.cross[j][i];
            }
        }
        st.count = set.len() as u64;
        st
    }

    /// Adds another set's sums. The shot-noise reference is replaced by the
    /// count-weighted mean.
    pub fn merge(&mut self, other: &RecordStats) {
        let total = self.count + other.count;
        if total > 0 {
            self.shot_noise_variance = (self.shot_noise_variance * self.count as f64
                + other.shot_noise_variance * other.count as f64)
                / total as f64;
        }
        self.count = total;
        for i in 0..N {
            self.sum[i] += other.sum[i];
            for j in 0..N {
                self.cross[i][j] += other.cross[i][j];
            }
        }
    }

    pub fn pooled<'a>(sets: impl IntoIterator<Item = &'a RecordStats>) -> RecordStats {
        let mut it = sets.into_iter();
        let mut acc = match it.next() {
            Some(first) => first.clone(),
            None => return RecordStats::empty(1.0),
        };
        for s in it {
            acc.merge(s);
        }
        acc
    }

    pub fn mean(&self, c: Channel) -> f64 {
        self.sum[c.index()] / self.count as f64
    }

    pub fn covariance(&self, a: Channel, b: Channel) -> f64 {
        let n = self.count as f64;
        self.cross[a.index()][b.index()] / n - self.mean(a) * self.mean(b)
    }

    pub fn variance(&self, c: Channel) -> f64 {
        self.covariance(c, c)
    }

    /// Variance of `Σ coeffᵢ · channelᵢ`.
    pub fn combination_variance(&self, terms: &[(Channel, f64)]) -> f64 {
        let mut v = 0.0;
        for &(a, ca) in terms {
            for &(b, cb) in terms {
                v += ca * cb * self.covariance(a, b);
            }
        }
        v
    }

    /// Variance in shot-noise units.
    pub fn normalized_variance(&self, c: Channel) -> f64 {
        self.variance(c) / self.shot_noise_variance
    }

    pub fn normalized_combination_variance(&self, terms: &[(Channel, f64)]) -> f64 {
        self.combination_variance(terms) / self.shot_noise_variance
    }

    pub fn correlation(&self, a: Channel, b: Channel) -> f64 {
        self.covariance(a, b) / (self.variance(a) * self.variance(b)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timedomain::{run_qnd_pipeline, PipelineConfig, Scenario};

    #[test]
    fn stats_match_direct_moments() {
        let cfg = PipelineConfig::<f64>::standard(1.0);
        let set = run_qnd_pipeline(&cfg, Scenario::SignalOnX1, 3000, 5).unwrap();
        let st = set.stats();
        assert_eq!(st.count, 3000);
        assert!((st.variance(Channel::X1Out) - set.x1_out.variance()).abs() < 1e-9);
        let (a, b) = (set.x1_out.samples(), set.stored.samples());
        let ma = set.x1_out.mean();
        let mb = set.stored.mean();
        let cov: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / a.len() as f64;
        assert!((st.covariance(Channel::X1Out, Channel::Stored) - cov).abs() < 1e-9);
    }

    #[test]
    fn merge_equals_concatenation() {
        let cfg = PipelineConfig::<f64>::ideal(1.0, 0.3).unwrap();
        let a = run_qnd_pipeline(&cfg, Scenario::Vacuum, 1000, 1)
            .unwrap()
            .stats();
        let b = run_qnd_pipeline(&cfg, Scenario::Vacuum, 500, 2)
            .unwrap()
            .stats();
        let p = RecordStats::pooled([&a, &b]);
        assert_eq!(p.count, 1500);
        let want = (a.cross[0][0] + b.cross[0][0]) / 1500.0 - (p.sum[0] / 1500.0).powi(2);
        assert!((p.variance(Channel::X1Out) - want).abs() < 1e-12);
    }

    #[test]
    fn combination_variance_of_difference() {
        let cfg = PipelineConfig::<f64>::ideal(1.0, 0.0).unwrap();
        let set = run_qnd_pipeline(&cfg, Scenario::Vacuum, 5000, 3).unwrap();
        let st = set.stats();
        let d = set.x1_out.difference(&set.x2_out).unwrap();
        let v = st.combination_variance(&[(Channel::X1Out, 1.0), (Channel::X2Out, -1.0)]);
        assert!((v - d.variance()).abs() < 1e-9);
    }
}
