//! Welch spectra, response-function estimation and signal cancellation.

mod cancel;
pub mod export;
mod response;
mod welch;

use thiserror::Error;

use crate::timedomain::SimError;

pub use cancel::{
    apply_scalar, cancel_deconvolved, cancel_scalar, convolve_kernel, CancelSearch,
    ScalarCancellation, ShiftMoments,
};
pub use response::{
    alignment_lag, best_kernel_alignment, estimate_response, estimate_response_from_pairs,
    kernel_similarity, ResponseAccumulator, ResponseEstimate, ResponseParams,
};
pub use welch::{cross_psd, welch_psd, CrossSpectrum, SpectralSums, Spectrum, WelchPlan, Window};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("record shorter than the required {0} samples")]
    TooShort(usize),
    #[error("every frequency bin fell below the PSD floor")]
    AllMasked,
    #[error(transparent)]
    Sim(#[from] SimError),
}
