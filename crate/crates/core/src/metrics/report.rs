use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::real::Real;

use super::Basis;

/// A value with its standard error (zero for closed-form results).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub stderr: T,
}

impl<T: Real> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            stderr: T::zero(),
        }
    }

    /// Distance of `value` from `reference` in standard errors (infinite
    /// for an exact value that differs).
    pub fn sigmas_from(&self, reference: T) -> T {
        let d = (self.value - reference).abs();
        if d == T::zero() {
            T::zero()
        } else {
            d / self.stderr
        }
    }

    /// `value` lies above `threshold` by at least `k` standard errors.
    pub fn exceeds(&self, threshold: T, k: T) -> bool {
        self.value - k * self.stderr > threshold
    }

    /// `value` lies below `threshold` by at least `k` standard errors.
    pub fn below(&self, threshold: T, k: T) -> bool {
        self.value + k * self.stderr < threshold
    }
}

/// QND figures of merit for one basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QndReport<T> {
    pub basis: Basis,
    pub t_s: Estimate<T>,
    pub t_p: Estimate<T>,
    /// `T_S + T_P` (its error includes the `T_S`/`T_P` correlation).
    pub t_sum: Estimate<T>,
    pub v_sp: Estimate<T>,
    pub g_opt: Estimate<T>,
    pub snr_in: T,
    pub snr_out_s: T,
    pub snr_out_p: T,
}

impl<T: Real> QndReport<T> {
    /// `T_S + T_P > 1` and `V_S|P < 1`, each by at least `k` standard errors.
    pub fn satisfies_qnd_criteria(&self, k: T) -> bool {
        self.t_sum.exceeds(T::one(), k) && self.v_sp.below(T::one(), k)
    }

    /// Flat `key=value` lines; keys are prefixed by the basis label.
    pub fn to_text(&self) -> String {
        let b = self.basis.label();
        let mut out = String::new();
        let mut kv = |k: &str, v: T| {
            writeln!(out, "{b}.{k}={v}").expect("write to string");
        };
        for (name, e) in [
            ("T_S", self.t_s),
            ("T_P", self.t_p),
            ("T_S+T_P", self.t_sum),
            ("V_SP", self.v_sp),
            ("g_opt", self.g_opt),
        ] {
            kv(name, e.value);
            kv(&format!("{name}.stderr"), e.stderr);
        }
        kv("SNR_in", self.snr_in);
        kv("SNR_out_S", self.snr_out_s);
        kv("SNR_out_P", self.snr_out_p);
        out
    }
}
