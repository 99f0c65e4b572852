//! Time-domain simulation and analysis of a broadband continuous-variable
//! QND gate built from beam splitters and offline squeezed ancillas.
//!
//! - [`gaussian`]: exact covariance algebra; the reference for everything else.
//! - [`timedomain`]: seeded homodyne-record simulation of the same network
//!   with finite-bandwidth ancillas, filters and delays.
//! - [`spectral`]: Welch spectra, response-function estimation and signal
//!   cancellation.
//! - [`metrics`]: transfer coefficients, conditional variance and the
//!   Duan–Simon test.
//!
//! Everything numeric is generic over [`real::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases.
//!
//! ```
//! use qnd_core::metrics::{qnd_report, Basis, Bootstrap};
//! use qnd_core::timedomain::{record_set_stats, PipelineConfig, Scenario};
//!
//! // G = 1 with -5 dB / 150 MHz ancillas, standard filters and delays.
//! let cfg = PipelineConfig::<f64>::standard(1.0);
//! let without = record_set_stats(&cfg, Scenario::Vacuum, 20, 4096, 1)?;
//! let with = record_set_stats(&cfg, Scenario::SignalOnX1, 20, 4096, 2)?;
//! let r = qnd_report(&with, &without, Basis::X, &Bootstrap::default())?;
//! println!("T_S+T_P = {:.3} ± {:.3}", r.t_sum.value, r.t_sum.stderr);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod gaussian;
pub mod linalg;
pub mod metrics;
pub mod real;
pub mod spectral;
pub mod timedomain;

mod fft;

pub use real::Real;

pub type GateConfig64 = gaussian::GateConfig<f64>;
pub type GaussianState64 = gaussian::GaussianState<f64>;
pub type Signal64 = timedomain::SampledSignal<f64>;
pub type PipelineConfig64 = timedomain::PipelineConfig<f64>;
pub type ChannelSet64 = timedomain::ChannelSet<f64>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type ResponseEstimate64 = spectral::ResponseEstimate<f64>;
pub type QndReport64 = metrics::QndReport<f64>;

pub type GateConfig32 = gaussian::GateConfig<f32>;
pub type GaussianState32 = gaussian::GaussianState<f32>;
pub type Signal32 = timedomain::SampledSignal<f32>;
pub type PipelineConfig32 = timedomain::PipelineConfig<f32>;
pub type ChannelSet32 = timedomain::ChannelSet<f32>;
pub type Spectrum32 = spectral::Spectrum<f32>;
pub type ResponseEstimate32 = spectral::ResponseEstimate<f32>;
pub type QndReport32 = metrics::QndReport<f32>;
