//! Exact Gaussian-state algebra for the offline QND gate.
//!
//! The closed-form moments produced here are the reference against which
//! every Monte-Carlo estimate in [`crate::timedomain`] and
//! [`crate::metrics`] is checked.

mod state;
mod symplectic;

pub use state::GaussianState;
pub use symplectic::{
    beam_splitter_symplectic, default_tolerance, phase_flip_symplectic, qnd_ideal_symplectic,
    rotation_symplectic, squeezer_symplectic, squeezing_gate_symplectic, symplectic_form,
    SqueezedQuadrature, SymplecticTransform,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },
    #[error("covariance matrix not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("covariance violates the uncertainty principle (min eigenvalue {0:e})")]
    Unphysical(f64),
    #[error("matrix is not symplectic (defect {0:e})")]
    NotSymplectic(f64),
}

/// Mode layout of [`offline_qnd_network`].
pub mod modes {
    pub const SIGNAL: usize = 0;
    pub const PROBE: usize = 1;
    pub const ANCILLA_A: usize = 2;
    pub const ANCILLA_B: usize = 3;
    pub const COUNT: usize = 4;
}

/// Parameters of the offline QND gate.
///
/// `reflectivity` is the squeezing-gate beam-splitter reflectivity `R`;
/// the outer mixers use `1/(1+R)` and `R/(1+R)`. `squeeze_a`/`squeeze_b`
/// are the ancilla squeezing parameters in nepers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateConfig<T> {
    pub gain: T,
    pub reflectivity: T,
    pub squeeze_a: T,
    pub squeeze_b: T,
}

impl<T: Real> GateConfig<T> {
    /// Inverts `G = (1-R)/√R`: `√R = (√(G²+4) - G)/2`.
    pub fn from_gain(gain: T, squeeze_a: T, squeeze_b: T) -> Result<Self, GaussianError> {
        if !(gain > T::zero() && gain.is_finite()) {
            return Err(GaussianError::Domain {
                what: "QND gain (offline realization needs G > 0)",
                value: gain.as_f64(),
            });
        }
        let sr = ((gain * gain + T::lit(4.0)).sqrt() - gain) / T::lit(2.0);
        let cfg = Self {
            gain,
            reflectivity: sr * sr,
            squeeze_a,
            squeeze_b,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_reflectivity(
        reflectivity: T,
        squeeze_a: T,
        squeeze_b: T,
    ) -> Result<Self, GaussianError> {
        let cfg = Self {
            gain: gain_from_reflectivity(reflectivity),
            reflectivity,
            squeeze_a,
            squeeze_b,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GaussianError> {
        if !(self.reflectivity > T::zero() && self.reflectivity < T::one()) {
            return Err(GaussianError::Domain {
                what: "reflectivity",
                value: self.reflectivity.as_f64(),
            });
        }
        for (what, r) in [("squeeze_a", self.squeeze_a), ("squeeze_b", self.squeeze_b)] {
            if !(r >= T::zero() && r.is_finite()) {
                return Err(GaussianError::Domain {
                    what,
                    value: r.as_f64(),
                });
            }
        }
        let implied = gain_from_reflectivity(self.reflectivity);
        if (implied - self.gain).abs() > default_tolerance::<T>() * implied.max(T::one()) {
            return Err(GaussianError::Domain {
                what: "gain inconsistent with reflectivity",
                value: self.gain.as_f64(),
            });
        }
        Ok(())
    }

    /// `√((1-R)/(1+R))`, the ancilla weight on `x1_out` and `p2_out`.
    pub fn ancilla_weight_outer(&self) -> T {
        let r = self.reflectivity;
        ((T::one() - r) / (T::one() + r)).sqrt()
    }

    /// `√(R(1-R)/(1+R))`, the ancilla weight on `x2_out` and `p1_out`.
    pub fn ancilla_weight_cross(&self) -> T {
        self.reflectivity.sqrt() * self.ancilla_weight_outer()
    }
}

/// `G = (1-R)/√R`.
pub fn gain_from_reflectivity<T: Real>(reflectivity: T) -> T {
    (T::one() - reflectivity) / reflectivity.sqrt()
}

/// Four-mode realization of the QND gate from two beam splitters and two
/// measurement-based squeezing gates, acting on the mode layout in
/// [`modes`] with all four inputs in vacuum.
///
/// Order of operations: ancilla squeezers (`x` of A, `p` of B), a π phase on
/// ancilla A, `BS(1/(1+R))` on signal/probe, squeezing gate B (`p`) on the
/// signal arm and gate A (`x`) on the probe arm, then `BS(R/(1+R))`.
pub fn offline_qnd_network<T: Real>(
    cfg: &GateConfig<T>,
) -> Result<SymplecticTransform<T>, GaussianError> {
    use modes::*;
    cfg.validate()?;
    let r = cfg.reflectivity;
    let one = T::one();
    let stages = [
        squeezer_symplectic(COUNT, cfg.squeeze_a, ANCILLA_A)?,
        squeezer_symplectic(COUNT, -cfg.squeeze_b, ANCILLA_B)?,
        phase_flip_symplectic(COUNT, ANCILLA_A)?,
        beam_splitter_symplectic(COUNT, one / (one + r), (SIGNAL, PROBE))?,
        squeezing_gate_symplectic(COUNT, r, SIGNAL, ANCILLA_B, SqueezedQuadrature::P)?,
        squeezing_gate_symplectic(COUNT, r, PROBE, ANCILLA_A, SqueezedQuadrature::X)?,
        beam_splitter_symplectic(COUNT, r / (one + r), (SIGNAL, PROBE))?,
    ];
    Ok(stages
        .iter()
        .skip(1)
        .fold(stages[0].clone(), |acc, s| acc.then(s)))
}

/// Full four-mode output state for a two-mode input and vacuum ancillas.
pub fn propagate_full<T: Real>(
    cfg: &GateConfig<T>,
    input: &GaussianState<T>,
) -> Result<GaussianState<T>, GaussianError> {
    if input.modes() != 2 {
        return Err(GaussianError::Dimension {
            expected: 4,
            found: 2 * input.modes(),
        });
    }
    let network = offline_qnd_network(cfg)?;
    input
        .tensor(&GaussianState::vacuum(2))
        .transformed(&network)
}

/// Exact signal/probe output moments including ancilla noise.
pub fn predicted_output_moments<T: Real>(
    cfg: &GateConfig<T>,
    input: &GaussianState<T>,
) -> Result<GaussianState<T>, GaussianError> {
    propagate_full(cfg, input)?.reduced(&[modes::SIGNAL, modes::PROBE])
}

#[cfg(test)]
mod tests {
    use super::modes::*;
    use super::*;

    fn golden() -> f64 {
        (3.0 - 5f64.sqrt()) / 2.0
    }

    fn x(m: usize) -> usize {
        2 * m
    }
    fn p(m: usize) -> usize {
        2 * m + 1
    }

    #[test]
    fn unit_gain_gives_golden_reflectivity() {
        let cfg = GateConfig::from_gain(1.0f64, 0.0, 0.0).unwrap();
        assert!((cfg.reflectivity - golden()).abs() < 1e-12);
        assert!((1.0 / (1.0 + cfg.reflectivity) - 0.7236).abs() < 1e-4);
        assert!((cfg.reflectivity / (1.0 + cfg.reflectivity) - 0.2764).abs() < 1e-4);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(GateConfig::from_gain(0.0f64, 0.0, 0.0).is_err());
        assert!(GateConfig::from_reflectivity(1.0f64, 0.0, 0.0).is_err());
        assert!(GateConfig::from_reflectivity(0.4f64, -1.0, 0.0).is_err());
        let mut cfg = GateConfig::from_reflectivity(0.4f64, 0.0, 0.0).unwrap();
        cfg.gain = 2.0;
        assert!(offline_qnd_network(&cfg).is_err());
    }

    /// Every coefficient of the finite-squeezing input–output relations
    /// against the composed network, with the ancilla coefficients taken per
    /// unit of squeezed quadrature.
    #[test]
    fn network_reproduces_finite_squeezing_relations() {
        let (ra, rb) = (0.37, 0.81);
        let cfg = GateConfig::from_reflectivity(golden(), ra, rb).unwrap();
        let s = offline_qnd_network(&cfg).unwrap();
        let rr = cfg.reflectivity;
        let g = (1.0 - rr) / rr.sqrt();
        let k = ((1.0 - rr) / (1.0 + rr)).sqrt();
        let kk = (rr * (1.0 - rr) / (1.0 + rr)).sqrt();
        let ea = (-ra).exp();
        let eb = (-rb).exp();
        let expect = [
            (x(SIGNAL), x(SIGNAL), 1.0),
            (x(SIGNAL), x(PROBE), 0.0),
            (x(SIGNAL), x(ANCILLA_A), -k * ea),
            (x(PROBE), x(SIGNAL), g),
            (x(PROBE), x(PROBE), 1.0),
            (x(PROBE), x(ANCILLA_A), kk * ea),
            (p(SIGNAL), p(SIGNAL), 1.0),
            (p(SIGNAL), p(PROBE), -g),
            (p(SIGNAL), p(ANCILLA_B), kk * eb),
            (p(PROBE), p(SIGNAL), 0.0),
            (p(PROBE), p(PROBE), 1.0),
            (p(PROBE), p(ANCILLA_B), k * eb),
        ];
        for (row, col, v) in expect {
            assert!(
                (s.coefficient(row, col) - v).abs() < 1e-9,
                "entry ({row},{col}) = {} expected {v}",
                s.coefficient(row, col)
            );
        }
        // signal/probe outputs never see an anti-squeezed ancilla quadrature
        for row in [x(SIGNAL), p(SIGNAL), x(PROBE), p(PROBE)] {
            assert_eq!(s.coefficient(row, p(ANCILLA_A)), 0.0);
            assert_eq!(s.coefficient(row, x(ANCILLA_B)), 0.0);
        }
        assert!(s.is_symplectic(1e-9));
    }

    #[test]
    fn ancilla_coefficient_value_at_unit_gain() {
        let cfg = GateConfig::from_reflectivity(0.381966f64, 0.0, 0.0).unwrap();
        let s = offline_qnd_network(&cfg).unwrap();
        assert!((s.coefficient(x(SIGNAL), x(ANCILLA_A)) + 0.6687).abs() < 1e-4);
        assert!((cfg.gain - 1.0).abs() < 1e-5);
    }

    #[test]
    fn infinite_squeezing_limit_is_ideal_gate() {
        let s20 = 20.0f64;
        let cfg = GateConfig::from_gain(1.0, s20, s20).unwrap();
        let net = offline_qnd_network(&cfg).unwrap();
        let ideal = qnd_ideal_symplectic(1.0).unwrap();
        let restricted = net.restrict(&[SIGNAL, PROBE]);
        assert!(restricted.max_abs_diff(ideal.matrix()) < 1e-8);
        // ancilla leakage bounded by 3 e^{-2r}
        let leak = [x(SIGNAL), x(PROBE), p(SIGNAL), p(PROBE)]
            .iter()
            .flat_map(|&r| [x(ANCILLA_A), p(ANCILLA_B)].map(|c| net.coefficient(r, c).abs()))
            .fold(0.0, f64::max);
        assert!(leak < 3.0 * (-s20).exp());
        assert!(net.is_symplectic(1e-9));
    }

    #[test]
    fn no_squeezing_vacuum_moments() {
        let cfg = GateConfig::from_reflectivity(0.381966f64, 0.0, 0.0).unwrap();
        let out = predicted_output_moments(&cfg, &GaussianState::vacuum(2)).unwrap();
        let r = 0.381966;
        assert!((out.variance(0) - (1.0 + (1.0 - r) / (1.0 + r))).abs() < 1e-9);
        assert!((out.variance(0) - 1.4472).abs() < 1e-4);
    }

    #[test]
    fn five_db_vacuum_moments() {
        let r = 10f64.ln() * 5.0 / 20.0;
        let cfg = GateConfig::from_gain(1.0, r, r).unwrap();
        let out = predicted_output_moments(&cfg, &GaussianState::vacuum(2)).unwrap();
        assert!((out.variance(0) - 1.1414).abs() < 1e-4);
        assert!((out.variance(2) - 2.0540).abs() < 1e-4);
        assert!((out.covariance(0, 2) - 0.9126).abs() < 1e-4);
        // p quadratures mirror x with a negative correlation
        assert!((out.variance(3) - 1.1414).abs() < 1e-4);
        assert!((out.variance(1) - 2.0540).abs() < 1e-4);
        assert!((out.covariance(1, 3) + 0.9126).abs() < 1e-4);
    }

    #[test]
    fn ideal_limit_matches_ideal_gate_moments() {
        let cfg = GateConfig::from_gain(1.0f64, 20.0, 20.0).unwrap();
        let out = predicted_output_moments(&cfg, &GaussianState::vacuum(2)).unwrap();
        let ideal = GaussianState::vacuum(2)
            .transformed(&qnd_ideal_symplectic(1.0).unwrap())
            .unwrap();
        assert!(out.cov().max_abs_diff(ideal.cov()) < 1e-9);
    }

    #[test]
    fn full_output_stays_pure() {
        let cfg = GateConfig::from_gain(1.0f64, 0.6, 1.1).unwrap();
        let input = GaussianState::coherent(vec![1.0, -0.5, 0.3, 2.0]).unwrap();
        let full = propagate_full(&cfg, &input).unwrap();
        assert!((full.cov().determinant() - 1.0).abs() < 1e-9);
        assert!(full.is_physical(1e-9));
        let reduced = predicted_output_moments(&cfg, &input).unwrap();
        assert!(reduced.purity() < 1.0);
        assert!(reduced.is_physical(1e-9));
        // means follow the ideal gate (ancillas have zero mean)
        assert!((reduced.mean()[2] - (0.3 + 1.0)).abs() < 1e-12);
        assert!((reduced.mean()[1] - (-0.5 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_input_size() {
        let cfg = GateConfig::from_gain(1.0f64, 0.0, 0.0).unwrap();
        assert!(predicted_output_moments(&cfg, &GaussianState::vacuum(3)).is_err());
    }
}
