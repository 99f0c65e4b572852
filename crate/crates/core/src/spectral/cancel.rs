use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::real::Real;
use crate::timedomain::{shift_signal, SampledSignal, SimError};

use super::response::ResponseEstimate;
use super::SpectralError;

/// Margin kept free of edge effects from fractional shifts.
const EDGE: usize = 32;

/// Search ranges for [`cancel_scalar`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CancelSearch {
    /// Integer shifts tried, inclusive.
    pub shift_range: (i64, i64),
    /// Gain grid bounds and point count before golden-section refinement.
    pub gain_range: (f64, f64),
    pub gain_steps: usize,
    /// Refine the shift by a parabola through the neighbouring integer shifts.
    pub subsample: bool,
}

impl Default for CancelSearch {
    fn default() -> Self {
        Self {
            shift_range: (-64, 64),
            gain_range: (-4.0, 4.0),
            gain_steps: 81,
            subsample: true,
        }
    }
}

impl CancelSearch {
    fn validate(&self) -> Result<(), SpectralError> {
        if self.shift_range.0 > self.shift_range.1 {
            return Err(SpectralError::Domain {
                what: "shift range",
                value: (self.shift_range.1 - self.shift_range.0) as f64,
            });
        }
        let (lo, hi) = self.gain_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || self.gain_steps < 2 {
            return Err(SpectralError::Domain {
                what: "gain grid",
                value: self.gain_steps as f64,
            });
        }
        Ok(())
    }

    fn max_abs_shift(&self) -> usize {
        self.shift_range
            .0
            .unsigned_abs()
            .max(self.shift_range.1.unsigned_abs()) as usize
    }
}

/// Residual of `y − g·w(t − shift)` at the optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarCancellation<T> {
    pub residual: SampledSignal<T>,
    pub gain: T,
    /// Delay of `w` in samples (may be fractional).
    pub shift: T,
    /// Residual variance over the interior used for the fit.
    pub residual_variance: T,
}

/// Additive first and second moments of a `(y, w)` pair over a sample range.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShiftMoments {
    pub count: u64,
    pub sy: f64,
    pub sw: f64,
    pub syy: f64,
    pub sww: f64,
    pub syw: f64,
}

impl ShiftMoments {
    pub fn accumulate<T: Real>(y: &[T], w: &[T], range: std::ops::Range<usize>) -> Self {
        let mut m = Self::default();
        for t in range {
            let (a, b) = (y[t].as_f64(), w[t].as_f64());
            m.count += 1;
            m.sy += a;
            m.sw += b;
            m.syy += a * a;
            m.sww += b * b;
            m.syw += a * b;
        }
        m
    }

    pub fn merge(&mut self, o: &ShiftMoments) {
        self.count += o.count;
        self.sy += o.sy;
        self.sw += o.sw;
        self.syy += o.syy;
        self.sww += o.sww;
        self.syw += o.syw;
    }

    fn cov(&self) -> (f64, f64, f64) {
        let n = self.count as f64;
        let (my, mw) = (self.sy / n, self.sw / n);
        (
            self.syy / n - my * my,
            self.sww / n - mw * mw,
            self.syw / n - my * mw,
        )
    }

    /// `Var(y − g w)`.
    pub fn residual_variance(&self, g: f64) -> f64 {
        let (vy, vw, c) = self.cov();
        vy - 2.0 * g * c + g * g * vw
    }

    /// Unconstrained least-squares gain `Cov(y,w)/Var(w)`.
    pub fn optimal_gain(&self) -> f64 {
        let (_, vw, c) = self.cov();
        if vw > 0.0 {
            c / vw
        } else {
            0.0
        }
    }
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-12 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Grid search on `g`, then golden-section refinement in the neighbouring
/// grid cells.
fn best_gain(m: &ShiftMoments, search: &CancelSearch) -> (f64, f64) {
    let (lo, hi) = search.gain_range;
    let step = (hi - lo) / (search.gain_steps - 1) as f64;
    let grid = |i: usize| lo + step * i as f64;
    let i = (0..search.gain_steps)
        .min_by(|&a, &b| {
            m.residual_variance(grid(a))
                .partial_cmp(&m.residual_variance(grid(b)))
                .expect("finite moments")
        })
        .expect("non-empty grid");
    let a = grid(i.saturating_sub(1));
    let b = grid((i + 1).min(search.gain_steps - 1));
    let mut g = golden_section(|g| m.residual_variance(g), a, b);
    // The objective is exactly quadratic; golden-section stalls at √ε, so
    // polish with the closed form when it lies in the bracket.
    let exact = m.optimal_gain();
    if (a..=b).contains(&exact) && m.residual_variance(exact) <= m.residual_variance(g) {
        g = exact;
    }
    (g, m.residual_variance(g))
}

fn interior(n: usize, search: &CancelSearch) -> Result<std::ops::Range<usize>, SpectralError> {
    let margin = search.max_abs_shift() + EDGE;
    if n <= 2 * margin + 2 {
        return Err(SpectralError::TooShort(2 * margin + 2));
    }
    Ok(margin..n - margin)
}

/// Minimizes `Var(y − g·w(t − τ))` over the search grid.
///
/// Shifts are integer samples with an optional sub-sample parabolic
/// refinement that is kept only if it lowers the residual.
pub fn cancel_scalar<T: Real>(
    y: &SampledSignal<T>,
    w: &SampledSignal<T>,
    search: &CancelSearch,
) -> Result<ScalarCancellation<T>, SpectralError> {
    search.validate()?;
    if y.len() != w.len() {
        return Err(SimError::LengthMismatch(y.len(), w.len()).into());
    }
    if y.sample_rate() != w.sample_rate() {
        return Err(
            SimError::RateMismatch(y.sample_rate().as_f64(), w.sample_rate().as_f64()).into(),
        );
    }
    let range = interior(y.len(), search)?;
    let eval = |shift: T| {
        let ws = shift_signal(w, shift);
        let m = ShiftMoments::accumulate(y.samples(), ws.samples(), range.clone());
        best_gain(&m, search)
    };

    let (s0, s1) = search.shift_range;
    let scores: Vec<(i64, f64, f64)> = (s0..=s1)
        .map(|s| {
            let (g, v) = eval(T::from_i64(s).unwrap());
            (s, g, v)
        })
        .collect();
    let (bi, &(shift_i, mut gain, mut var)) = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .2.partial_cmp(&b.1 .2).expect("finite residual"))
        .expect("non-empty shift range");
    let mut shift = T::from_i64(shift_i).unwrap();

    if search.subsample && bi > 0 && bi + 1 < scores.len() {
        let (vm, v0, vp) = (scores[bi - 1].2, scores[bi].2, scores[bi + 1].2);
        let denom = vm - 2.0 * v0 + vp;
        if denom > 0.0 {
            let delta = 0.5 * (vm - vp) / denom;
            if delta.abs() > 1e-6 && delta.abs() < 1.0 {
                let frac = T::from_i64(shift_i).unwrap() + T::lit(delta);
                let (g, v) = eval(frac);
                if v < var {
                    shift = frac;
                    gain = g;
                    var = v;
                }
            }
        }
    }
    let gain = T::lit(gain);
    Ok(ScalarCancellation {
        residual: apply_scalar(y, w, gain, shift)?,
        gain,
        shift,
        residual_variance: T::lit(var),
    })
}

/// `y − gain·w(t − shift)`.
pub fn apply_scalar<T: Real>(
    y: &SampledSignal<T>,
    w: &SampledSignal<T>,
    gain: T,
    shift: T,
) -> Result<SampledSignal<T>, SpectralError> {
    Ok(y.difference(&shift_signal(w, shift).scaled(gain))?)
}

/// `(f ∗ w)` with the kernel's centre aligned to zero lag; linear
/// convolution via a zero-padded FFT.
pub fn convolve_kernel<T: Real>(
    w: &SampledSignal<T>,
    resp: &ResponseEstimate<T>,
) -> Result<SampledSignal<T>, SpectralError> {
    if w.sample_rate() != resp.sample_rate {
        return Err(
            SimError::RateMismatch(w.sample_rate().as_f64(), resp.sample_rate.as_f64()).into(),
        );
    }
    let n = w.len();
    let l = resp.kernel.len();
    let size = (n + l).next_power_of_two();
    let zero = Complex::new(T::zero(), T::zero());
    let mut a = vec![zero; size];
    let mut b = vec![zero; size];
    for (dst, &v) in a.iter_mut().zip(w.samples()) {
        dst.re = v;
    }
    for (dst, &v) in b.iter_mut().zip(&resp.kernel) {
        dst.re = v;
    }
    fft::forward(&mut a);
    fft::forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y;
    }
    fft::inverse(&mut a);
    let scale = T::one() / T::from_usize_lossy(size);
    let off = resp.kernel_offset;
    let out: Vec<T> = (0..n).map(|t| a[t + off].re * scale).collect();
    Ok(SampledSignal::new(out, w.sample_rate())?)
}

/// `y − (f ∗ w)` using the estimated response kernel.
pub fn cancel_deconvolved<T: Real>(
    y: &SampledSignal<T>,
    w: &SampledSignal<T>,
    resp: &ResponseEstimate<T>,
) -> Result<SampledSignal<T>, SpectralError> {
    if y.len() != w.len() {
        return Err(SimError::LengthMismatch(y.len(), w.len()).into());
    }
    Ok(y.difference(&convolve_kernel(w, resp)?)?)
}
