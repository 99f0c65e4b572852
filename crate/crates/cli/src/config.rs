//! TOML experiment configuration and its translation to a pipeline.

use std::fmt;
use std::path::{Path, PathBuf};

use qnd_core::timedomain::{
    parse_measured_table, AncillaSpec, DelaySpec, FilterSpec, PipelineConfig, PipelineDelays,
};
use serde::{Deserialize, Serialize};

use crate::scenarios::ScenarioKind;

/// One problem with a configuration, tied to the offending key.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    /// Mandatory: there is no wall-clock default.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_sets")]
    pub sets: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub gate: GateSection,
    /// Ancilla A; also used for B unless `ancilla_b` is given.
    #[serde(default)]
    pub ancilla: AncillaSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_b: Option<AncillaSection>,
    #[serde(default = "yes")]
    pub ancillas_enabled: bool,
    /// Measurement chain; omitted means the 100 MHz LPF + 1 MHz HPF default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filters: Option<Vec<FilterSection>>,
    #[serde(default)]
    pub injection_filters: Vec<FilterSection>,
    #[serde(default)]
    pub delays: DelaySection,
    #[serde(default)]
    pub ff_gain_error: f64,
    #[serde(default = "default_signal_variance")]
    pub signal_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electronic_noise_db: Option<f64>,
    #[serde(default)]
    pub unfiltered_reference: bool,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSection {
    pub gain: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self { gain: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaSection {
    pub squeeze_db_dc: f64,
    /// Omitted: pure squeezing (`−squeeze_db_dc`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antisqueeze_db_dc: Option<f64>,
    /// Omitted: frequency-flat squeezing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm_hz: Option<f64>,
}

impl Default for AncillaSection {
    fn default() -> Self {
        Self {
            squeeze_db_dc: -5.0,
            antisqueeze_db_dc: None,
            fwhm_hz: Some(150e6),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKindName {
    Lowpass,
    Highpass,
    Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub kind: FilterKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// `frequency_hz,gain_db,phase_deg` table, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelaySection {
    pub injection_ns: f64,
    pub optical_ns: f64,
    pub electronic_ns: f64,
}

impl Default for DelaySection {
    fn default() -> Self {
        Self {
            injection_ns: 23.0,
            optical_ns: 13.0,
            electronic_ns: 13.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub segment_length: usize,
    pub overlap: f64,
    pub bootstrap_replicates: usize,
    pub bootstrap_seed: u64,
    /// Gain grid for sweeps and the Duan–Simon test.
    pub gains: Vec<f64>,
    pub band_order: usize,
    /// Samples written per time trace.
    pub trace_samples: usize,
    /// Also write traces as raw `f64` records with JSON sidecars.
    pub binary_traces: bool,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            segment_length: 1024,
            overlap: 0.5,
            bootstrap_replicates: 200,
            bootstrap_seed: 0x5eed_b007,
            gains: (0..=20).map(|i| i as f64 * 0.05).collect(),
            band_order: 4,
            trace_samples: 2000,
            binary_traces: false,
        }
    }
}

fn default_sets() -> usize {
    100
}
fn default_samples() -> usize {
    10_000
}
fn yes() -> bool {
    true
}
fn default_signal_variance() -> f64 {
    40.0
}
fn default_rate() -> f64 {
    1e9
}
fn default_warmup() -> usize {
    4096
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, Vec<FieldError>> {
        toml::from_str(text).map_err(|e| {
            vec![FieldError {
                field: "config".into(),
                message: e.to_string().trim_end().to_owned(),
            }]
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Field-level checks plus a full pipeline build; `base` resolves
    /// measured-filter tables.
    pub fn validate(&self, base: &Path) -> Result<PipelineConfig<f64>, Vec<FieldError>> {
        let mut errs = Vec::new();
        let mut bad = |field: &str, message: String| {
            errs.push(FieldError {
                field: field.into(),
                message,
            })
        };
        if self.scenario.parse::<ScenarioKind>().is_err() {
            bad(
                "scenario",
                format!(
                    "unknown `{}`; expected one of {}",
                    self.scenario,
                    ScenarioKind::labels().join(", ")
                ),
            );
        }
        if self.sets == 0 {
            bad("sets", "must be at least 1".into());
        }
        if self.samples < self.analysis.segment_length.max(2) {
            bad(
                "samples",
                format!(
                    "{} is shorter than analysis.segment_length {}",
                    self.samples, self.analysis.segment_length
                ),
            );
        }
        if !(self.gate.gain > 0.0 && self.gate.gain.is_finite()) {
            bad(
                "gate.gain",
                format!("must be positive, got {}", self.gate.gain),
            );
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            bad(
                "sample_rate_hz",
                format!("must be positive, got {}", self.sample_rate_hz),
            );
        }
        if !(self.signal_variance >= 0.0 && self.signal_variance.is_finite()) {
            bad(
                "signal_variance",
                format!("must be ≥ 0, got {}", self.signal_variance),
            );
        }
        if !self.ff_gain_error.is_finite() {
            bad("ff_gain_error", "must be finite".into());
        }
        if let Some(c) = self.electronic_noise_db {
            if !(c > 0.0 && c.is_finite()) {
                bad(
                    "electronic_noise_db",
                    format!("clearance must be positive, got {c}"),
                );
            }
        }
        for (name, v) in [
            ("delays.injection_ns", self.delays.injection_ns),
            ("delays.optical_ns", self.delays.optical_ns),
            ("delays.electronic_ns", self.delays.electronic_ns),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                bad(name, format!("must be ≥ 0, got {v}"));
            }
        }
        let a = &self.analysis;
        if a.segment_length < 16 {
            bad(
                "analysis.segment_length",
                format!("must be ≥ 16, got {}", a.segment_length),
            );
        }
        if !(0.0..1.0).contains(&a.overlap) {
            bad(
                "analysis.overlap",
                format!("must lie in [0, 1), got {}", a.overlap),
            );
        }
        if a.bootstrap_replicates < 2 {
            bad("analysis.bootstrap_replicates", "must be at least 2".into());
        }
        if a.gains.iter().any(|g| !g.is_finite()) {
            bad("analysis.gains", "must be finite".into());
        }
        if a.band_order == 0 {
            bad("analysis.band_order", "must be at least 1".into());
        }

        let anc = |field: &str, s: &AncillaSection, errs: &mut Vec<FieldError>| {
            let anti = s.antisqueeze_db_dc.unwrap_or(-s.squeeze_db_dc);
            let spec = match s.fwhm_hz {
                Some(w) => AncillaSpec::new(s.squeeze_db_dc, anti, w),
                None => AncillaSpec::flat(s.squeeze_db_dc, anti),
            };
            spec.map_err(|e| {
                errs.push(FieldError {
                    field: field.into(),
                    message: e.to_string(),
                })
            })
            .ok()
        };
        let ancilla_a = anc("ancilla", &self.ancilla, &mut errs);
        let ancilla_b = match &self.ancilla_b {
            Some(b) => anc("ancilla_b", b, &mut errs),
            None => ancilla_a,
        };

        let filters = match &self.filters {
            Some(list) => filter_specs("filters", list, base, self.sample_rate_hz, &mut errs),
            None => PipelineConfig::<f64>::standard(1.0).filters,
        };
        let injection_filters = filter_specs(
            "injection_filters",
            &self.injection_filters,
            base,
            self.sample_rate_hz,
            &mut errs,
        );

        if !errs.is_empty() {
            return Err(errs);
        }
        let ns = |v: f64| DelaySpec { seconds: v * 1e-9 };
        let cfg = PipelineConfig {
            gain: self.gate.gain,
            ancilla_a: ancilla_a.expect("checked"),
            ancilla_b: ancilla_b.expect("checked"),
            ancillas_enabled: self.ancillas_enabled,
            filters,
            injection_filters,
            delays: PipelineDelays {
                injection: ns(self.delays.injection_ns),
                optical: ns(self.delays.optical_ns),
                electronic: ns(self.delays.electronic_ns),
            },
            ff_gain_error: self.ff_gain_error,
            signal_variance: self.signal_variance,
            electronic_noise_db: self.electronic_noise_db,
            unfiltered_reference: self.unfiltered_reference,
            sample_rate: self.sample_rate_hz,
            warmup: self.warmup,
        };
        cfg.validate().map_err(|e| {
            vec![FieldError {
                field: "pipeline".into(),
                message: e.to_string(),
            }]
        })?;
        Ok(cfg)
    }
}

fn filter_specs(
    field: &str,
    list: &[FilterSection],
    base: &Path,
    rate: f64,
    errs: &mut Vec<FieldError>,
) -> Vec<FilterSpec<f64>> {
    let mut out = Vec::new();
    for (i, f) in list.iter().enumerate() {
        let at = |key: &str| format!("{field}[{i}].{key}");
        let spec = match f.kind {
            FilterKindName::Lowpass | FilterKindName::Highpass => {
                let (Some(cutoff), Some(order)) = (f.cutoff_hz, f.order) else {
                    errs.push(FieldError {
                        field: at("cutoff_hz"),
                        message: "Butterworth sections need cutoff_hz and order".into(),
                    });
                    continue;
                };
                if f.kind == FilterKindName::Lowpass {
                    FilterSpec::lowpass(cutoff, order)
                } else {
                    FilterSpec::highpass(cutoff, order)
                }
            }
            FilterKindName::Measured => {
                let Some(path) = &f.table else {
                    errs.push(FieldError {
                        field: at("table"),
                        message: "measured filters need a table path".into(),
                    });
                    continue;
                };
                let parsed = std::fs::read_to_string(base.join(path))
                    .map_err(|e| e.to_string())
                    .and_then(|t| parse_measured_table(&t).map_err(|e| e.to_string()))
                    .and_then(|rows| FilterSpec::measured(rows).map_err(|e| e.to_string()));
                match parsed {
                    Ok(s) => s,
                    Err(message) => {
                        errs.push(FieldError {
                            field: at("table"),
                            message,
                        });
                        continue;
                    }
                }
            }
        };
        if let Err(e) = spec.validate(rate) {
            errs.push(FieldError {
                field: format!("{field}[{i}]"),
                message: e.to_string(),
            });
            continue;
        }
        out.push(spec);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_toml("scenario = \"vacuum\"\nseed = 3\n").unwrap();
        let p = c.validate(Path::new(".")).unwrap();
        assert_eq!(p.gain, 1.0);
        assert_eq!(p.filters.len(), 2);
        assert!((p.delays.total() - 36e-9).abs() < 1e-15);
        assert_eq!(p.ancilla_a.squeeze_db_dc, -5.0);
    }

    #[test]
    fn seed_is_mandatory() {
        let e = ExperimentConfig::from_toml("scenario = \"vacuum\"\n").unwrap_err();
        assert!(e[0].message.contains("seed"), "{e:?}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e =
            ExperimentConfig::from_toml("scenario = \"vacuum\"\nseed = 1\ngian = 2\n").unwrap_err();
        assert!(e[0].message.contains("gian"), "{e:?}");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let c = ExperimentConfig::from_toml(
            "scenario = \"nope\"\nseed = 1\n[gate]\ngain = -1\n[ancilla]\nsqueeze_db_dc = 3\n",
        )
        .unwrap();
        let fields: Vec<String> = c
            .validate(Path::new("."))
            .unwrap_err()
            .into_iter()
            .map(|e| e.field)
            .collect();
        assert_eq!(fields, ["scenario", "gate.gain", "ancilla"]);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::from_toml(
            "scenario = \"table-s2\"\nseed = 9\n[[filters]]\nkind = \"lowpass\"\ncutoff_hz = 1e8\norder = 7\n",
        )
        .unwrap();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }
}
