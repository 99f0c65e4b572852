use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::timedomain::{derive_seed, stream_rng, RecordStats};

use super::MetricsError;

/// Bootstrap over record sets. Groups passed together (e.g. signal and
/// vacuum runs sharing seeds) are resampled with the same indices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub replicates: usize,
    pub seed: u64,
}

impl Default for Bootstrap {
    fn default() -> Self {
        Self {
            replicates: 200,
            seed: 0x5eed_b007,
        }
    }
}

impl Bootstrap {
    /// Point estimates of `f` on the pooled groups and their bootstrap
    /// standard errors.
    pub fn estimate<F>(
        &self,
        groups: &[&[RecordStats]],
        f: F,
    ) -> Result<(Vec<f64>, Vec<f64>), MetricsError>
    where
        F: Fn(&[RecordStats]) -> Result<Vec<f64>, MetricsError> + Sync,
    {
        let n = groups.first().map_or(0, |g| g.len());
        if n == 0 {
            return Err(MetricsError::Empty);
        }
        if let Some(g) = groups.iter().find(|g| g.len() != n) {
            return Err(crate::timedomain::SimError::LengthMismatch(n, g.len()).into());
        }
        let pooled: Vec<RecordStats> = groups
            .iter()
            .map(|g| RecordStats::pooled(g.iter()))
            .collect();
        let point = f(&pooled)?;
        if self.replicates < 2 {
            return Ok((point.clone(), vec![f64::NAN; point.len()]));
        }
        let reps: Vec<Vec<f64>> = (0..self.replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream_rng(derive_seed(self.seed, r as u64), 0);
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let resampled: Vec<RecordStats> = groups
                    .iter()
                    .map(|g| RecordStats::pooled(idx.iter().map(|&i| &g[i])))
                    .collect();
                f(&resampled)
            })
            .collect::<Result<_, _>>()?;
        let k = point.len();
        let m = reps.len() as f64;
        let stderr = (0..k)
            .map(|j| {
                let mean = reps.iter().map(|r| r[j]).sum::<f64>() / m;
                (reps.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
            })
            .collect();
        Ok((point, stderr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timedomain::{record_set_stats, Channel, PipelineConfig, Scenario};

    #[test]
    fn standard_error_of_variance_scales_like_theory() {
        let cfg = PipelineConfig::<f64>::ideal(1.0, 0.0).unwrap();
        let sets = record_set_stats(&cfg, Scenario::Vacuum, 100, 2000, 3).unwrap();
        let (point, err) = Bootstrap::default()
            .estimate(&[&sets], |p| Ok(vec![p[0].variance(Channel::X1In)]))
            .unwrap();
        assert!((point[0] - 1.0).abs() < 0.02);
        // Var of a sample variance of N unit Gaussians is 2/N.
        let theory = (2.0 / 200_000f64).sqrt();
        assert!(
            (err[0] / theory - 1.0).abs() < 0.25,
            "{} vs {theory}",
            err[0]
        );
    }

    #[test]
    fn deterministic_and_validates_groups() {
        let cfg = PipelineConfig::<f64>::ideal(1.0, 0.0).unwrap();
        let sets = record_set_stats(&cfg, Scenario::Vacuum, 10, 500, 3).unwrap();
        let f = |p: &[RecordStats]| Ok(vec![p[0].mean(Channel::X1Out)]);
        let b = Bootstrap::default();
        assert_eq!(
            b.estimate(&[&sets], f).unwrap(),
            b.estimate(&[&sets], f).unwrap()
        );
        assert!(matches!(b.estimate(&[], f), Err(MetricsError::Empty)));
        assert!(b.estimate(&[&sets, &sets[..5]], f).is_err());
    }
}
