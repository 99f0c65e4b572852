//! Sample-by-sample simulation of the broadband gate and its measurement
//! chain.
//!
//! Records are in shot-noise units: a vacuum quadrature sampled at the
//! configured rate is unit-variance white noise. Quantum noise is handled in
//! the Wigner picture, so every linear optical element, squeezing gate and
//! filter acts on the records exactly as its Heisenberg map acts on the
//! operators; Gaussian statistics are reproduced without approximation.

mod ancilla;
mod delay;
mod filter;
mod gate;
mod io;
mod pipeline;
mod signal;
mod stats;

pub use ancilla::{gen_squeezed_vacuum_timeseries, AncillaSpec};
pub use delay::{apply_delay, shift_signal, DelaySpec};
pub use filter::{
    apply_filter, butterworth_sos, format_measured_table, frequency_response, parse_measured_table,
    Biquad, FilterChain, FilterKind, FilterSpec, MeasuredPoint, MEASURED_TABLE_HEADER,
};
pub use gate::{squeezing_gate_feedforward, GateOutput};
pub use io::{read_binary_record, write_binary_record, RecordMetadata};
pub use pipeline::{
    electronic_noise_variance, record_set_stats, run_qnd_pipeline, run_qnd_pipeline_with_signal,
    run_record_sets, Channel, ChannelSet, PipelineConfig, PipelineDelays, Quadrature, Scenario,
};
pub use signal::{
    add_electronic_noise, derive_seed, gen_gaussian_white, stream_rng, SampledSignal,
};
pub use stats::RecordStats;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("record lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sample rates differ: {0} Hz vs {1} Hz")]
    RateMismatch(f64, f64),
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("unknown scenario `{0}`")]
    Scenario(String),
    #[error("filter table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("metadata: {0}")]
    Metadata(#[from] serde_json::Error),
}
