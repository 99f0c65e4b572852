use serde::{Deserialize, Serialize};

use crate::gaussian::{
    modes, offline_qnd_network, predicted_output_moments, GateConfig, GaussianState,
};
use crate::linalg::Matrix;
use crate::real::Real;

use super::estimators::{conditional_variance, snr_transfer};
use super::report::{Estimate, QndReport};
use super::{Basis, MetricsError, QuadMoments};

/// General linear QND channel
/// `A_S' = G_SS A_S + G_SP A_P + G_SNC N_COM + N_S`,
/// `A_P' = G_PS A_S + G_PP A_P + G_PNC N_COM + N_P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearChannelModel<T> {
    pub g_ss: T,
    pub g_sp: T,
    pub g_ps: T,
    pub g_pp: T,
    pub g_snc: T,
    pub g_pnc: T,
    pub v_ncom: T,
    pub v_ns: T,
    pub v_np: T,
}

impl<T: Real> LinearChannelModel<T> {
    /// `A_S' = A_S`, `A_P' = G A_S + A_P`.
    pub fn ideal(gain: T) -> Self {
        let (z, o) = (T::zero(), T::one());
        Self {
            g_ss: o,
            g_sp: z,
            g_ps: gain,
            g_pp: o,
            g_snc: z,
            g_pnc: z,
            v_ncom: z,
            v_ns: z,
            v_np: z,
        }
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        for (what, v) in [
            ("V_NCOM", self.v_ncom),
            ("V_NS", self.v_ns),
            ("V_NP", self.v_np),
        ] {
            if !(v >= T::zero() && v.is_finite()) {
                return Err(MetricsError::Domain {
                    what,
                    value: v.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Output second moments for the given input variances.
    pub fn output_moments(&self, input: &InputVariances<T>) -> QuadMoments<T> {
        let (vs, vp) = (input.signal, input.probe);
        QuadMoments {
            input: vs,
            signal: self.g_ss * self.g_ss * vs
                + self.g_sp * self.g_sp * vp
                + self.g_snc * self.g_snc * self.v_ncom
                + self.v_ns,
            probe: self.g_ps * self.g_ps * vs
                + self.g_pp * self.g_pp * vp
                + self.g_pnc * self.g_pnc * self.v_ncom
                + self.v_np,
            cross: self.g_ss * self.g_ps * vs
                + self.g_sp * self.g_pp * vp
                + self.g_snc * self.g_pnc * self.v_ncom,
        }
    }
}

/// Input variances of the signal and probe observables (1 for coherent
/// states).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputVariances<T> {
    pub signal: T,
    pub probe: T,
}

impl<T: Real> InputVariances<T> {
    pub fn coherent() -> Self {
        Self {
            signal: T::one(),
            probe: T::one(),
        }
    }
}

/// Channel coefficients of the offline network for one basis.
///
/// The ancilla noise on the two outputs is split into a common component
/// (normalized to unit variance) and independent remainders; the split is
/// chosen so both remainders are non-negative.
pub fn model_from_gate<T: Real>(
    cfg: &GateConfig<T>,
    basis: Basis,
) -> Result<LinearChannelModel<T>, MetricsError> {
    let net = offline_qnd_network(cfg)?;
    let m: &Matrix<T> = net.matrix();
    // Quadrature indices in the 4-mode layout (x_k = 2k, p_k = 2k + 1).
    let ((s_row, s_sign), (p_row, p_sign)) = match basis {
        Basis::X => ((2 * modes::SIGNAL, 1.0), (2 * modes::PROBE, 1.0)),
        Basis::P => ((2 * modes::PROBE + 1, 1.0), (2 * modes::SIGNAL + 1, -1.0)),
    };
    let (ss, ps) = (T::lit(s_sign), T::lit(p_sign));
    let c = |row: usize, col: usize| m[(row, col)];
    // Input observables use the same signs as the outputs.
    let g_ss = ss * c(s_row, s_row) * ss;
    let g_sp = ss * c(s_row, p_row) * ps;
    let g_ps = ps * c(p_row, s_row) * ss;
    let g_pp = ps * c(p_row, p_row) * ps;

    let anc = (2 * modes::ANCILLA_A)..(2 * modes::COUNT);
    let (mut a, mut b, mut ab) = (T::zero(), T::zero(), T::zero());
    for col in anc {
        let (u, v) = (ss * c(s_row, col), ps * c(p_row, col));
        a = a + u * u;
        b = b + v * v;
        ab = ab + u * v;
    }
    let (g_snc, g_pnc) = if a > T::zero() && b > T::zero() && ab != T::zero() {
        let ratio = (a / b).sqrt();
        let mag = ab.abs();
        ((mag * ratio).sqrt() * ab.signum(), (mag / ratio).sqrt())
    } else {
        (T::zero(), T::zero())
    };
    Ok(LinearChannelModel {
        g_ss,
        g_sp,
        g_ps,
        g_pp,
        g_snc,
        g_pnc,
        v_ncom: T::one(),
        v_ns: (a - g_snc * g_snc).max(T::zero()),
        v_np: (b - g_pnc * g_pnc).max(T::zero()),
    })
}

/// Closed-form `T_S`, `T_P`, `V_S|P` of a linear channel. SNRs are per unit
/// injected signal power.
pub fn theoretical_metrics<T: Real>(
    model: &LinearChannelModel<T>,
    input: &InputVariances<T>,
    basis: Basis,
) -> Result<QndReport<T>, MetricsError> {
    model.validate()?;
    let m = model.output_moments(input);
    let sq = |v: T| v * v;
    let t_s = sq(model.g_ss) * input.signal / m.signal;
    let t_p = sq(model.g_ps) * input.signal / m.probe;
    let cv = conditional_variance(&m)?;
    Ok(QndReport {
        basis,
        t_s: Estimate::exact(t_s),
        t_p: Estimate::exact(t_p),
        t_sum: Estimate::exact(t_s + t_p),
        v_sp: Estimate::exact(cv.v_sp),
        g_opt: Estimate::exact(cv.g_opt),
        snr_in: T::one() / input.signal,
        snr_out_s: sq(model.g_ss) / m.signal,
        snr_out_p: sq(model.g_ps) / m.probe,
    })
}

/// Metrics from exact Gaussian moments: the output state is propagated with
/// and without a unit-power classical displacement noise on the signal
/// input, then fed to the same estimators as the Monte-Carlo path.
pub fn oracle_metrics<T: Real>(
    cfg: &GateConfig<T>,
    basis: Basis,
) -> Result<QndReport<T>, MetricsError> {
    let vacuum = GaussianState::vacuum(2);
    let ((s, _), _) = basis.quadrature_indices();
    let mut cov = vacuum.cov().clone();
    cov[(s, s)] = T::lit(2.0);
    let with_signal = GaussianState::new(vec![T::zero(); 4], cov)?;

    let without =
        QuadMoments::from_state(&predicted_output_moments(cfg, &vacuum)?, T::one(), basis);
    let with = QuadMoments::from_state(
        &predicted_output_moments(cfg, &with_signal)?,
        T::lit(2.0),
        basis,
    );
    let snr = snr_transfer(&with, &without)?;
    let cv = conditional_variance(&without)?;
    Ok(QndReport {
        basis,
        t_s: Estimate::exact(snr.t_s),
        t_p: Estimate::exact(snr.t_p),
        t_sum: Estimate::exact(snr.t_s + snr.t_p),
        v_sp: Estimate::exact(cv.v_sp),
        g_opt: Estimate::exact(cv.g_opt),
        snr_in: snr.snr_in,
        snr_out_s: snr.snr_out_s,
        snr_out_p: snr.snr_out_p,
    })
}

/// `G/(1+G) − G²/(1+G²)`: difference between the commonly quoted ideal
/// probe transfer and the general-channel formula (zero at `G = 1`).
pub fn ideal_tp_discrepancy<T: Real>(gain: T) -> T {
    gain / (T::one() + gain) - gain * gain / (T::one() + gain * gain)
}
