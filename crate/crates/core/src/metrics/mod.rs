//! QND figures of merit: SNR transfer coefficients, conditional variance,
//! gain sweeps, the Duan–Simon test and their band-resolved variants.
//!
//! Sign conventions live here and only here. For the `x` basis the signal
//! observable is `x1` and the probe observable `x2`; for the `p` basis the
//! signal observable is `p2` and the probe observable `−p1`, so that
//! `A_S − g·A_P` is `x1 − g·x2` and `p2 + g·p1` respectively.

mod bands;
mod bootstrap;
mod estimators;
mod model;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::GaussianError;
use crate::timedomain::{Channel, SimError};

pub use bands::{band_stats, octave_bands, BandMetrics, BandSpec, BAND_CENTERS_HZ};
pub use bootstrap::Bootstrap;
pub use estimators::{
    conditional_variance, conditional_variance_sets, duan_simon_check, duan_simon_check_pairs,
    gain_sweep, qnd_report, snr_transfer, snr_transfer_sets, ConditionalVariance, DuanSimon,
    GainSweep, QuadraticFit, SnrTransfer, SnrTransferEstimate,
};
pub use model::{
    ideal_tp_discrepancy, model_from_gate, oracle_metrics, theoretical_metrics, InputVariances,
    LinearChannelModel,
};
pub use report::{Estimate, QndReport};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("degenerate estimate: {0}")]
    Degenerate(&'static str),
    #[error("no record sets supplied")]
    Empty,
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Quadrature basis of a QND measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    P,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::X, Basis::P];

    pub fn label(self) -> &'static str {
        match self {
            Self::X => "x",
            Self::P => "p",
        }
    }

    /// Output observables `(A_S, A_P)`.
    pub fn outputs(self) -> ObservablePair {
        match self {
            Self::X => ObservablePair {
                signal: (Channel::X1Out, 1.0),
                probe: (Channel::X2Out, 1.0),
            },
            Self::P => ObservablePair {
                signal: (Channel::P2Out, 1.0),
                probe: (Channel::P1Out, -1.0),
            },
        }
    }

    /// Input observables `(A_S, A_P)`.
    pub fn inputs(self) -> ObservablePair {
        match self {
            Self::X => ObservablePair {
                signal: (Channel::X1In, 1.0),
                probe: (Channel::X2In, 1.0),
            },
            Self::P => ObservablePair {
                signal: (Channel::P2In, 1.0),
                probe: (Channel::P1In, -1.0),
            },
        }
    }

    /// Quadrature index `(x1, p1, x2, p2)` and sign of `(A_S, A_P)`.
    pub(crate) fn quadrature_indices(self) -> ((usize, f64), (usize, f64)) {
        match self {
            Self::X => ((0, 1.0), (2, 1.0)),
            Self::P => ((3, 1.0), (1, -1.0)),
        }
    }

    /// Pipeline scenario injecting on this basis' signal observable.
    pub fn signal_scenario(self) -> crate::timedomain::Scenario {
        match self {
            Self::X => crate::timedomain::Scenario::SignalOnX1,
            Self::P => crate::timedomain::Scenario::SignalOnP2,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Basis {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" => Ok(Self::X),
            "p" => Ok(Self::P),
            _ => Err(MetricsError::Domain {
                what: "basis",
                value: f64::NAN,
            }),
        }
    }
}

/// A signed pair of channels `(A_S, A_P)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservablePair {
    pub signal: (Channel, f64),
    pub probe: (Channel, f64),
}

/// Second moments entering every metric, in shot-noise units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadMoments<T> {
    /// Variance of the signal input observable.
    pub input: T,
    pub signal: T,
    pub probe: T,
    /// Covariance of the signal and probe outputs.
    pub cross: T,
}

impl QuadMoments<f64> {
    pub fn from_stats(st: &crate::timedomain::RecordStats, basis: Basis) -> Self {
        let o = basis.outputs();
        let i = basis.inputs();
        let n = st.shot_noise_variance;
        Self {
            input: st.variance(i.signal.0) / n,
            signal: st.variance(o.signal.0) / n,
            probe: st.variance(o.probe.0) / n,
            cross: o.signal.1 * o.probe.1 * st.covariance(o.signal.0, o.probe.0) / n,
        }
    }
}

impl<T: crate::real::Real> QuadMoments<T> {
    /// `signal` output moments from a two-mode output state and the input
    /// variance of the signal observable.
    pub fn from_state(
        state: &crate::gaussian::GaussianState<T>,
        input_variance: T,
        basis: Basis,
    ) -> Self {
        let ((s, ss), (p, sp)) = basis.quadrature_indices();
        Self {
            input: input_variance,
            signal: state.variance(s),
            probe: state.variance(p),
            cross: T::lit(ss * sp) * state.covariance(s, p),
        }
    }
}
