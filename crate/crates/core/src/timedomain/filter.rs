use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::real::{db_to_power, Real};

use super::signal::{check_rate, SampledSignal};
use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Lowpass,
    Highpass,
    Measured,
}

/// One row of a tabulated complex response.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredPoint<T> {
    pub frequency_hz: T,
    pub gain_db: T,
    pub phase_deg: T,
}

/// Filter description; `cutoff`/`order` are ignored for measured tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec<T> {
    pub kind: FilterKind,
    pub cutoff: T,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_table: Option<Vec<MeasuredPoint<T>>>,
}

impl<T: Real> FilterSpec<T> {
    /// Butterworth lowpass.
    pub fn lowpass(cutoff: T, order: usize) -> Self {
        Self {
            kind: FilterKind::Lowpass,
            cutoff,
            order,
            measured_table: None,
        }
    }

    /// Butterworth highpass; `order = 1` is the single-pole RC section.
    pub fn highpass(cutoff: T, order: usize) -> Self {
        Self {
            kind: FilterKind::Highpass,
            cutoff,
            order,
            measured_table: None,
        }
    }

    pub fn measured(table: Vec<MeasuredPoint<T>>) -> Result<Self, SimError> {
        check_table(&table)?;
        Ok(Self {
            kind: FilterKind::Measured,
            cutoff: T::zero(),
            order: 0,
            measured_table: Some(table),
        })
    }

    /// Checks the description against a sample rate.
    pub fn validate(&self, rate: T) -> Result<(), SimError> {
        check_rate(rate)?;
        let nyquist = rate / T::lit(2.0);
        match self.kind {
            FilterKind::Lowpass | FilterKind::Highpass => {
                if self.order == 0 {
                    return Err(SimError::Domain {
                        what: "filter order",
                        value: 0.0,
                    });
                }
                if !(self.cutoff > T::zero() && self.cutoff < nyquist) {
                    return Err(SimError::Domain {
                        what: "filter cutoff (must lie in (0, rate/2))",
                        value: self.cutoff.as_f64(),
                    });
                }
                Ok(())
            }
            FilterKind::Measured => {
                let table = self
                    .measured_table
                    .as_deref()
                    .ok_or_else(|| SimError::Table("measured filter without a table".into()))?;
                check_table(table)?;
                let first = table[0].frequency_hz;
                let last = table[table.len() - 1].frequency_hz;
                if first > T::zero() {
                    return Err(SimError::Domain {
                        what: "measured table lowest frequency (must reach 0 Hz)",
                        value: first.as_f64(),
                    });
                }
                if last < nyquist {
                    return Err(SimError::Domain {
                        what: "measured table highest frequency (must reach rate/2)",
                        value: last.as_f64(),
                    });
                }
                Ok(())
            }
        }
    }
}

fn check_table<T: Real>(table: &[MeasuredPoint<T>]) -> Result<(), SimError> {
    if table.len() < 2 {
        return Err(SimError::Table(
            "measured table needs at least two rows".into(),
        ));
    }
    for (i, p) in table.iter().enumerate() {
        if !(p.frequency_hz.is_finite() && p.gain_db.is_finite() && p.phase_deg.is_finite()) {
            return Err(SimError::Table(format!("row {i}: non-finite value")));
        }
    }
    for (i, w) in table.windows(2).enumerate() {
        if !(w[1].frequency_hz > w[0].frequency_hz) {
            return Err(SimError::Table(format!(
                "frequencies not strictly increasing at row {}",
                i + 1
            )));
        }
    }
    Ok(())
}

pub const MEASURED_TABLE_HEADER: &str = "frequency_hz,gain_db,phase_deg";

/// Parses `frequency_hz,gain_db,phase_deg` rows; the header line is required.
/// Blank lines and `#` comments are skipped.
pub fn parse_measured_table<T: Real>(text: &str) -> Result<Vec<MeasuredPoint<T>>, SimError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let header_ok = lines.next().is_some_and(|(_, h)| {
        h.split(',')
            .map(str::trim)
            .eq(MEASURED_TABLE_HEADER.split(','))
    });
    if !header_ok {
        return Err(SimError::Table(format!(
            "missing header `{MEASURED_TABLE_HEADER}`"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(SimError::Table(format!(
                "line {}: expected 3 fields, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut vals = [T::zero(); 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            let x: f64 = f
                .parse()
                .map_err(|_| SimError::Table(format!("line {}: bad number `{f}`", lineno + 1)))?;
            *v = T::lit(x);
        }
        rows.push(MeasuredPoint {
            frequency_hz: vals[0],
            gain_db: vals[1],
            phase_deg: vals[2],
        });
    }
    check_table(&rows)?;
    Ok(rows)
}

pub fn format_measured_table<T: Real>(rows: &[MeasuredPoint<T>]) -> String {
    let mut out = String::from(MEASURED_TABLE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.frequency_hz, r.gain_db, r.phase_deg
        ));
    }
    out
}

/// Normalized second-order section, `a0 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Biquad<T> {
    pub b: [T; 3],
    pub a: [T; 2],
}

impl<T: Real> Biquad<T> {
    fn response(&self, zinv: Complex<T>) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let z2 = zinv * zinv;
        (one * self.b[0] + zinv * self.b[1] + z2 * self.b[2])
            / (one + zinv * self.a[0] + z2 * self.a[1])
    }

    /// Transposed direct form II.
    fn process(&self, x: &mut [T]) {
        let (mut s1, mut s2) = (T::zero(), T::zero());
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        for v in x.iter_mut() {
            let inp = *v;
            let out = b0 * inp + s1;
            s1 = b1 * inp - a1 * out + s2;
            s2 = b2 * inp - a2 * out;
            *v = out;
        }
    }
}

/// Bilinear-transform Butterworth design with the cutoff prewarped so the
/// digital response is exactly −3 dB at `cutoff`.
pub fn butterworth_sos<T: Real>(
    cutoff: T,
    order: usize,
    rate: T,
    highpass: bool,
) -> Vec<Biquad<T>> {
    let two = T::lit(2.0);
    let k = two * rate;
    let wc = k * (T::PI() * cutoff / rate).tan();
    let mut sections = Vec::with_capacity(order.div_ceil(2));
    if order % 2 == 1 {
        // s + wc
        let d0 = k + wc;
        let a1 = (wc - k) / d0;
        let b = if highpass {
            [k / d0, -k / d0, T::zero()]
        } else {
            [wc / d0, wc / d0, T::zero()]
        };
        sections.push(Biquad {
            b,
            a: [a1, T::zero()],
        });
    }
    let n = T::from_usize_lossy(order);
    for i in 0..order / 2 {
        // Analog section s² + c1·s + c0 for the conjugate pole pair k = i.
        let theta = T::PI() * T::from_usize_lossy(2 * i + 1) / (two * n);
        let c1 = two * theta.sin() * wc;
        let c0 = wc * wc;
        let d0 = k * k + c1 * k + c0;
        let a = [(two * c0 - two * k * k) / d0, (k * k - c1 * k + c0) / d0];
        let b = if highpass {
            let g = k * k / d0;
            [g, -two * g, g]
        } else {
            let g = c0 / d0;
            [g, two * g, g]
        };
        sections.push(Biquad { b, a });
    }
    sections
}

fn table_response<T: Real>(table: &[MeasuredPoint<T>], freq: T) -> Complex<T> {
    let f = freq.abs();
    let last = table.len() - 1;
    let (gain_db, phase_deg) = if f <= table[0].frequency_hz {
        (table[0].gain_db, table[0].phase_deg)
    } else if f >= table[last].frequency_hz {
        (table[last].gain_db, table[last].phase_deg)
    } else {
        let hi = table.partition_point(|p| p.frequency_hz <= f);
        let (p0, p1) = (&table[hi - 1], &table[hi]);
        let t = (f - p0.frequency_hz) / (p1.frequency_hz - p0.frequency_hz);
        (
            p0.gain_db + t * (p1.gain_db - p0.gain_db),
            p0.phase_deg + t * (p1.phase_deg - p0.phase_deg),
        )
    };
    let mag = db_to_power(gain_db).sqrt();
    let ph = phase_deg.to_radians();
    let h = Complex::from_polar(mag, ph);
    if freq < T::zero() {
        h.conj()
    } else {
        h
    }
}

#[derive(Clone, Debug)]
enum Stage<T> {
    Iir(Vec<Biquad<T>>),
    Measured(Vec<MeasuredPoint<T>>),
}

/// A cascade of designed filters bound to one sample rate.
#[derive(Clone, Debug)]
pub struct FilterChain<T> {
    rate: T,
    stages: Vec<Stage<T>>,
}

impl<T: Real> FilterChain<T> {
    pub fn new(specs: &[FilterSpec<T>], rate: T) -> Result<Self, SimError> {
        check_rate(rate)?;
        let mut stages = Vec::with_capacity(specs.len());
        for spec in specs {
            spec.validate(rate)?;
            stages.push(match spec.kind {
                FilterKind::Lowpass => {
                    Stage::Iir(butterworth_sos(spec.cutoff, spec.order, rate, false))
                }
                FilterKind::Highpass => {
                    Stage::Iir(butterworth_sos(spec.cutoff, spec.order, rate, true))
                }
                FilterKind::Measured => Stage::Measured(
                    spec.measured_table
                        .clone()
                        .expect("validated measured table"),
                ),
            });
        }
        Ok(Self { rate, stages })
    }

    /// Pass-through chain.
    pub fn identity(rate: T) -> Self {
        Self {
            rate,
            stages: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn sample_rate(&self) -> T {
        self.rate
    }

    /// Concatenation: `self` first, then `next`.
    pub fn followed_by(&self, next: &FilterChain<T>) -> Self {
        let mut stages = self.stages.clone();
        stages.extend(next.stages.iter().cloned());
        Self {
            rate: self.rate,
            stages,
        }
    }

    /// Complex response at `freq` Hz (negative frequencies give the conjugate).
    pub fn response(&self, freq: T) -> Complex<T> {
        let w = T::lit(2.0) * T::PI() * freq / self.rate;
        let zinv = Complex::from_polar(T::one(), -w);
        let mut h = Complex::new(T::one(), T::zero());
        for stage in &self.stages {
            h = h * match stage {
                Stage::Iir(sos) => sos
                    .iter()
                    .fold(Complex::new(T::one(), T::zero()), |acc, s| {
                        acc * s.response(zinv)
                    }),
                Stage::Measured(table) => table_response(table, freq),
            };
        }
        h
    }

    pub fn apply_in_place(&self, x: &mut [T]) {
        for stage in &self.stages {
            match stage {
                Stage::Iir(sos) => sos.iter().for_each(|s| s.process(x)),
                Stage::Measured(table) => self.apply_table(table, x),
            }
        }
    }

    fn apply_table(&self, table: &[MeasuredPoint<T>], x: &mut [T]) {
        if x.is_empty() {
            return;
        }
        let m = (2 * x.len()).next_power_of_two();
        let mut buf: Vec<Complex<T>> = x
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
            .take(m)
            .collect();
        fft::forward(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            let mut h = table_response(table, fft::bin_frequency(k, m, self.rate));
            if k == m / 2 {
                h = Complex::new(h.re, T::zero());
            }
            *b = *b * h;
        }
        fft::inverse(&mut buf);
        let scale = T::one() / T::from_usize_lossy(m);
        for (v, b) in x.iter_mut().zip(&buf) {
            *v = b.re * scale;
        }
    }

    pub fn apply(&self, sig: &SampledSignal<T>) -> Result<SampledSignal<T>, SimError> {
        if sig.sample_rate() != self.rate {
            return Err(SimError::RateMismatch(
                sig.sample_rate().as_f64(),
                self.rate.as_f64(),
            ));
        }
        let mut out = sig.clone();
        self.apply_in_place(out.samples_mut());
        Ok(out)
    }

    /// Output variance per unit input variance for white input, `Σ h[n]²`,
    /// evaluated through Parseval on a dense grid.
    pub fn noise_gain(&self) -> T {
        if self.is_identity() {
            return T::one();
        }
        let n = 1usize << 16;
        let sum: T = (0..n)
            .map(|k| {
                self.response(fft::bin_frequency(k, n, self.rate))
                    .norm_sqr()
            })
            .sum();
        sum / T::from_usize_lossy(n)
    }

    /// First `len` samples of the unit-impulse response.
    pub fn impulse_response(&self, len: usize) -> Vec<T> {
        let mut x = vec![T::zero(); len];
        if len > 0 {
            x[0] = T::one();
        }
        self.apply_in_place(&mut x);
        x
    }

    /// Temporal mode selected by sampling the filtered record at index `t0`:
    /// `g_mode(t) = g_filter(t0 − t)` on `t = 0..=t0`.
    pub fn mode_function(&self, t0: usize) -> Vec<T> {
        let mut h = self.impulse_response(t0 + 1);
        h.reverse();
        h
    }
}

pub fn apply_filter<T: Real>(
    sig: &SampledSignal<T>,
    spec: &FilterSpec<T>,
) -> Result<SampledSignal<T>, SimError> {
    FilterChain::new(std::slice::from_ref(spec), sig.sample_rate())?.apply(sig)
}

/// Analytic (design) response of a single filter.
pub fn frequency_response<T: Real>(
    spec: &FilterSpec<T>,
    rate: T,
    freq: T,
) -> Result<Complex<T>, SimError> {
    Ok(FilterChain::new(std::slice::from_ref(spec), rate)?.response(freq))
}
