//! One scenario run per grid point of a single parameter.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::artifacts::ArtifactWriter;
use crate::config::{ExperimentConfig, FieldError};
use crate::scenarios::{run_scenario, Metrics, RunContext, RunError, ScenarioKind};

pub const SUMMARY_NAME: &str = "summary.csv";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    SqueezeDbDc,
    FfGainError,
    /// Electronic minus optical delay, ns.
    DelayMismatch,
    Gain,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [
        Self::SqueezeDbDc,
        Self::FfGainError,
        Self::DelayMismatch,
        Self::Gain,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::SqueezeDbDc => "squeeze_db_dc",
            Self::FfGainError => "ff_gain_error",
            Self::DelayMismatch => "delay_mismatch",
            Self::Gain => "gain",
        }
    }

    /// Copy of `cfg` with the parameter set to `v`.
    pub fn apply(self, cfg: &ExperimentConfig, v: f64) -> ExperimentConfig {
        let mut c = cfg.clone();
        match self {
            Self::SqueezeDbDc => {
                for a in std::iter::once(&mut c.ancilla).chain(c.ancilla_b.as_mut()) {
                    a.squeeze_db_dc = v;
                    a.antisqueeze_db_dc = None;
                }
            }
            Self::FfGainError => c.ff_gain_error = v,
            Self::DelayMismatch => c.delays.electronic_ns = c.delays.optical_ns + v,
            Self::Gain => c.gate.gain = v,
        }
        c
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = if s == "G" { "gain" } else { s };
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.label() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|p| p.label()).collect();
                format!(
                    "unknown sweep parameter `{s}`; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

/// Comma-separated grid; an empty or blank string is an empty grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, FieldError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| FieldError {
                    field: "values".into(),
                    message: format!("`{s}` is not a finite number"),
                })
        })
        .collect()
}

pub enum SweepError {
    Config(Vec<FieldError>),
    Run(RunError),
}

/// Validates every grid point, then runs them in parallel into
/// `point-NNN/` subdirectories and writes the summary table.
pub fn run_sweep(
    base: &ExperimentConfig,
    config_dir: &Path,
    param: SweepParam,
    grid: &[f64],
    out: &mut ArtifactWriter,
) -> Result<Vec<Metrics>, SweepError> {
    let kind: ScenarioKind = base.scenario.parse().map_err(|m| {
        SweepError::Config(vec![FieldError {
            field: "scenario".into(),
            message: m,
        }])
    })?;
    let mut contexts = Vec::with_capacity(grid.len());
    let mut errs = Vec::new();
    for (i, &v) in grid.iter().enumerate() {
        let config = param.apply(base, v);
        match config.validate(config_dir) {
            Ok(pipeline) => contexts.push(RunContext { config, pipeline }),
            Err(e) => errs.extend(e.into_iter().map(|f| FieldError {
                field: format!("{}={v} (point {i}): {}", param.label(), f.field),
                message: f.message,
            })),
        }
    }
    if !errs.is_empty() {
        return Err(SweepError::Config(errs));
    }

    let root = out.root().to_path_buf();
    let results: Vec<(Metrics, ArtifactWriter)> = contexts
        .par_iter()
        .enumerate()
        .map(|(i, ctx)| {
            let mut w = ArtifactWriter::create(&root.join(point_dir(i)))?;
            let m = run_scenario(kind, ctx, &mut w)?;
            Ok((m, w))
        })
        .collect::<Result<_, RunError>>()
        .map_err(SweepError::Run)?;

    let keys: BTreeSet<&String> = results.iter().flat_map(|(m, _)| m.keys()).collect();
    let mut table = String::from(param.label());
    for k in &keys {
        write!(table, ",{k}").expect("write to string");
    }
    table.push('\n');
    for (&v, (m, _)) in grid.iter().zip(&results) {
        write!(table, "{v}").expect("write to string");
        for k in &keys {
            match m.get(*k) {
                Some(x) => write!(table, ",{x}"),
                None => write!(table, ","),
            }
            .expect("write to string");
        }
        table.push('\n');
    }
    out.write(SUMMARY_NAME, table)
        .map_err(|e| SweepError::Run(e.into()))?;

    let mut metrics = Vec::with_capacity(results.len());
    for (i, (m, w)) in results.into_iter().enumerate() {
        out.absorb(&point_dir(i), w);
        metrics.push(m);
    }
    Ok(metrics)
}

fn point_dir(i: usize) -> String {
    format!("point-{i:03}")
}
