use serde::{Deserialize, Serialize};

use crate::real::Real;
use crate::timedomain::RecordStats;

use super::bootstrap::Bootstrap;
use super::report::{Estimate, QndReport};
use super::{Basis, MetricsError, ObservablePair, QuadMoments};

/// SNRs and transfer coefficients from powers with and without signal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnrTransfer<T> {
    pub snr_in: T,
    pub snr_out_s: T,
    pub snr_out_p: T,
    pub t_s: T,
    pub t_p: T,
}

/// `SNR = (P_with − P_without) / P_without` at the input and both outputs;
/// `T_S = SNR_S^out / SNR^in`, `T_P = SNR_P^out / SNR^in`.
pub fn snr_transfer<T: Real>(
    with: &QuadMoments<T>,
    without: &QuadMoments<T>,
) -> Result<SnrTransfer<T>, MetricsError> {
    for v in [without.input, without.signal, without.probe] {
        if !(v > T::zero()) {
            return Err(MetricsError::Degenerate("vacuum power must be positive"));
        }
    }
    let snr = |a: T, b: T| (a - b) / b;
    let snr_in = snr(with.input, without.input);
    if snr_in == T::zero() {
        return Err(MetricsError::Degenerate("no injected signal power"));
    }
    let snr_out_s = snr(with.signal, without.signal);
    let snr_out_p = snr(with.probe, without.probe);
    Ok(SnrTransfer {
        snr_in,
        snr_out_s,
        snr_out_p,
        t_s: snr_out_s / snr_in,
        t_p: snr_out_p / snr_in,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalVariance<T> {
    pub v_sp: T,
    pub g_opt: T,
}

/// `V_S|P = V_S − V_SP²/V_P`, attained at `g = V_SP/V_P`.
pub fn conditional_variance<T: Real>(
    m: &QuadMoments<T>,
) -> Result<ConditionalVariance<T>, MetricsError> {
    if !(m.probe > T::zero()) {
        return Err(MetricsError::Degenerate("probe variance must be positive"));
    }
    Ok(ConditionalVariance {
        v_sp: m.signal - m.cross * m.cross / m.probe,
        g_opt: m.cross / m.probe,
    })
}

/// Transfer coefficients with bootstrap errors from paired record sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnrTransferEstimate {
    pub t_s: Estimate<f64>,
    pub t_p: Estimate<f64>,
    pub t_sum: Estimate<f64>,
    pub snr_in: Estimate<f64>,
    pub snr_out_s: Estimate<f64>,
    pub snr_out_p: Estimate<f64>,
}

fn est(point: &[f64], err: &[f64], i: usize) -> Estimate<f64> {
    Estimate {
        value: point[i],
        stderr: err[i],
    }
}

/// [`snr_transfer`] over record sets. `with[i]` and `without[i]` are
/// resampled together, which keeps the benefit of shared seeds.
pub fn snr_transfer_sets(
    with: &[RecordStats],
    without: &[RecordStats],
    basis: Basis,
    boot: &Bootstrap,
) -> Result<SnrTransferEstimate, MetricsError> {
    let (p, e) = boot.estimate(&[with, without], |g| {
        let s = snr_transfer(
            &QuadMoments::from_stats(&g[0], basis),
            &QuadMoments::from_stats(&g[1], basis),
        )?;
        Ok(vec![
            s.t_s,
            s.t_p,
            s.t_s + s.t_p,
            s.snr_in,
            s.snr_out_s,
            s.snr_out_p,
        ])
    })?;
    Ok(SnrTransferEstimate {
        t_s: est(&p, &e, 0),
        t_p: est(&p, &e, 1),
        t_sum: est(&p, &e, 2),
        snr_in: est(&p, &e, 3),
        snr_out_s: est(&p, &e, 4),
        snr_out_p: est(&p, &e, 5),
    })
}

/// [`conditional_variance`] over record sets: `(V_S|P, g_opt)`.
pub fn conditional_variance_sets(
    sets: &[RecordStats],
    basis: Basis,
    boot: &Bootstrap,
) -> Result<(Estimate<f64>, Estimate<f64>), MetricsError> {
    let (p, e) = boot.estimate(&[sets], |g| {
        let c = conditional_variance(&QuadMoments::from_stats(&g[0], basis))?;
        Ok(vec![c.v_sp, c.g_opt])
    })?;
    Ok((est(&p, &e, 0), est(&p, &e, 1)))
}

/// Full report for one basis from signal-on and vacuum record sets.
pub fn qnd_report(
    with: &[RecordStats],
    without: &[RecordStats],
    basis: Basis,
    boot: &Bootstrap,
) -> Result<QndReport<f64>, MetricsError> {
    let snr = snr_transfer_sets(with, without, basis, boot)?;
    let (v_sp, g_opt) = conditional_variance_sets(without, basis, boot)?;
    Ok(QndReport {
        basis,
        t_s: snr.t_s,
        t_p: snr.t_p,
        t_sum: snr.t_sum,
        v_sp,
        g_opt,
        snr_in: snr.snr_in.value,
        snr_out_s: snr.snr_out_s.value,
        snr_out_p: snr.snr_out_p.value,
    })
}

/// `Var(A_S − g·A_P)` over a gain grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainSweep<T> {
    pub basis: Basis,
    pub gains: Vec<T>,
    pub variances: Vec<T>,
}

/// Least-squares parabola `a g² + b g + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// Largest fit residual relative to the curve's range.
    pub max_residual_fraction: T,
}

impl<T: Real> QuadraticFit<T> {
    pub fn minimizer(&self) -> T {
        -self.b / (T::lit(2.0) * self.a)
    }

    pub fn minimum(&self) -> T {
        self.c - self.b * self.b / (T::lit(4.0) * self.a)
    }
}

pub fn gain_sweep<T: Real>(m: &QuadMoments<T>, basis: Basis, gains: &[T]) -> GainSweep<T> {
    let two = T::lit(2.0);
    GainSweep {
        basis,
        gains: gains.to_vec(),
        variances: gains
            .iter()
            .map(|&g| m.signal - two * g * m.cross + g * g * m.probe)
            .collect(),
    }
}

impl<T: Real> GainSweep<T> {
    pub fn fit_quadratic(&self) -> Result<QuadraticFit<T>, MetricsError> {
        let n = self.gains.len();
        if n < 3 {
            return Err(MetricsError::Degenerate("quadratic fit needs three gains"));
        }
        // Normal equations in f64.
        let mut s = [0.0f64; 5];
        let mut r = [0.0f64; 3];
        for (&g, &v) in self.gains.iter().zip(&self.variances) {
            let (g, v) = (g.as_f64(), v.as_f64());
            let mut gp = 1.0;
            for (k, sk) in s.iter_mut().enumerate() {
                *sk += gp;
                if k < 3 {
                    r[k] += gp * v;
                }
                gp *= g;
            }
        }
        let m = [[s[4], s[3], s[2]], [s[3], s[2], s[1]], [s[2], s[1], s[0]]];
        let rhs = [r[2], r[1], r[0]];
        let det3 = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det3(&m);
        if d.abs() < 1e-300 {
            return Err(MetricsError::Degenerate(
                "gain grid has fewer than three distinct points",
            ));
        }
        let mut coef = [0.0; 3];
        for (k, c) in coef.iter_mut().enumerate() {
            let mut mk = m;
            for row in 0..3 {
                mk[row][k] = rhs[row];
            }
            *c = det3(&mk) / d;
        }
        let (lo, hi) = self
            .variances
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(v.as_f64()), h.max(v.as_f64()))
            });
        let range = (hi - lo).max(f64::MIN_POSITIVE);
        let worst = self
            .gains
            .iter()
            .zip(&self.variances)
            .map(|(&g, &v)| {
                let g = g.as_f64();
                (coef[0] * g * g + coef[1] * g + coef[2] - v.as_f64()).abs()
            })
            .fold(0.0, f64::max);
        Ok(QuadraticFit {
            a: T::lit(coef[0]),
            b: T::lit(coef[1]),
            c: T::lit(coef[2]),
            max_residual_fraction: T::lit(worst / range),
        })
    }

    /// Variance at the grid point closest to `g`.
    pub fn at(&self, g: T) -> Option<T> {
        self.gains
            .iter()
            .zip(&self.variances)
            .min_by(|a, b| {
                (*a.0 - g)
                    .abs()
                    .partial_cmp(&(*b.0 - g).abs())
                    .expect("finite gains")
            })
            .map(|(_, &v)| v)
    }
}

/// Duan–Simon margins `Var(S_x − g P_x) + Var(S_p − g P_p) − 4|g|` in
/// shot-noise units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuanSimon {
    pub gains: Vec<f64>,
    pub lhs: Vec<f64>,
    pub margins: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Some margin is negative by at least three standard errors.
    pub entangled: bool,
}

impl DuanSimon {
    /// Index of the most significant (most negative in σ) margin.
    pub fn most_significant(&self) -> Option<usize> {
        (0..self.gains.len()).min_by(|&a, &b| {
            let za = self.margins[a] / self.stderr[a];
            let zb = self.margins[b] / self.stderr[b];
            za.partial_cmp(&zb).unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    pub fn rows(&self) -> String {
        let mut out = String::from("gain,value\n");
        for (g, m) in self.gains.iter().zip(&self.margins) {
            out.push_str(&format!("{g},{m}\n"));
        }
        out
    }
}

fn pair_variance(st: &RecordStats, pair: &ObservablePair, g: f64) -> f64 {
    st.normalized_combination_variance(&[
        (pair.signal.0, pair.signal.1),
        (pair.probe.0, -g * pair.probe.1),
    ])
}

/// Duan–Simon test on arbitrary observable pairs (e.g. the inputs as a
/// separable control). `x_sets[i]` and `p_sets[i]` are resampled together.
pub fn duan_simon_check_pairs(
    x_sets: &[RecordStats],
    x_pair: &ObservablePair,
    p_sets: &[RecordStats],
    p_pair: &ObservablePair,
    gains: &[f64],
    boot: &Bootstrap,
) -> Result<DuanSimon, MetricsError> {
    let lhs = |g: &[RecordStats]| -> Vec<f64> {
        gains
            .iter()
            .map(|&k| pair_variance(&g[0], x_pair, k) + pair_variance(&g[1], p_pair, k))
            .collect()
    };
    if gains.is_empty() {
        return Ok(DuanSimon {
            gains: vec![],
            lhs: vec![],
            margins: vec![],
            stderr: vec![],
            entangled: false,
        });
    }
    let (point, err) = boot.estimate(&[x_sets, p_sets], |g| {
        Ok(lhs(g)
            .into_iter()
            .zip(gains)
            .map(|(l, &k)| l - 4.0 * k.abs())
            .collect())
    })?;
    let lhs_values: Vec<f64> = point
        .iter()
        .zip(gains)
        .map(|(m, &k)| m + 4.0 * k.abs())
        .collect();
    let entangled = point.iter().zip(&err).any(|(&m, &e)| m + 3.0 * e < 0.0);
    Ok(DuanSimon {
        gains: gains.to_vec(),
        lhs: lhs_values,
        margins: point,
        stderr: err,
        entangled,
    })
}

/// Duan–Simon test on the gate outputs: `x1 − g x2` and `g p1 + p2`.
pub fn duan_simon_check(
    x_sets: &[RecordStats],
    p_sets: &[RecordStats],
    gains: &[f64],
    boot: &Bootstrap,
) -> Result<DuanSimon, MetricsError> {
    // With A_P = −p1 for the p basis, `S_p − (−g) P_p` is `p2 + g p1`.
    duan_simon_check_pairs(
        x_sets,
        &Basis::X.outputs(),
        p_sets,
        &Basis::P.outputs(),
        gains,
        boot,
    )
}
