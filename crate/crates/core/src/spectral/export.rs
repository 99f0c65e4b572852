//! Plain-text rows for spectra and kernels.

use std::fmt::Write;

use num_complex::Complex;

use crate::real::{power_db, Real};

use super::response::ResponseEstimate;
use super::welch::Spectrum;

pub const PSD_HEADER: &str = "frequency_hz,value_db";
pub const KERNEL_HEADER: &str = "time_s,amplitude";
pub const COMPLEX_HEADER: &str = "frequency_hz,real,imag";

/// PSD rows in dB relative to `reference` (pass 1 for absolute density).
pub fn psd_rows<T: Real>(s: &Spectrum<T>, reference: T) -> String {
    let mut out = format!("{PSD_HEADER}\n");
    for (f, &v) in s.frequencies.iter().zip(&s.values) {
        writeln!(out, "{},{}", f, power_db(v / reference)).expect("write to string");
    }
    out
}

/// PSD rows of `s / reference` bin by bin (e.g. relative to shot noise).
pub fn psd_ratio_rows<T: Real>(s: &Spectrum<T>, reference: &Spectrum<T>) -> String {
    let mut out = format!("{PSD_HEADER}\n");
    for ((f, &a), &b) in s.frequencies.iter().zip(&s.values).zip(&reference.values) {
        writeln!(out, "{},{}", f, power_db(a / b)).expect("write to string");
    }
    out
}

pub fn complex_rows<T: Real>(frequencies: &[T], values: &[Complex<T>]) -> String {
    let mut out = format!("{COMPLEX_HEADER}\n");
    for (f, v) in frequencies.iter().zip(values) {
        writeln!(out, "{},{},{}", f, v.re, v.im).expect("write to string");
    }
    out
}

pub fn kernel_rows<T: Real>(r: &ResponseEstimate<T>) -> String {
    let mut out = format!("{KERNEL_HEADER}\n");
    for (j, &v) in r.kernel.iter().enumerate() {
        writeln!(out, "{},{}", r.kernel_time(j), v).expect("write to string");
    }
    out
}

/// Masked bins of the response are omitted.
pub fn response_rows<T: Real>(r: &ResponseEstimate<T>) -> String {
    let mut out = format!("{COMPLEX_HEADER}\n");
    for ((f, v), &ok) in r.frequencies.iter().zip(&r.freq_response).zip(&r.valid) {
        if ok {
            writeln!(out, "{},{},{}", f, v.re, v.im).expect("write to string");
        }
    }
    out
}

/// Time trace rows `time_s,amplitude`.
pub fn trace_rows<T: Real>(samples: &[T], rate: T) -> String {
    let mut out = format!("{KERNEL_HEADER}\n");
    for (t, &v) in samples.iter().enumerate() {
        writeln!(out, "{},{}", T::from_usize_lossy(t) / rate, v).expect("write to string");
    }
    out
}
