use crate::real::Real;

use super::delay::{delay_into, DelaySpec};
use super::signal::{check_compatible, SampledSignal};
use super::SimError;

/// Outputs of one measurement-and-feed-forward squeezing gate.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOutput<T> {
    pub out_x: SampledSignal<T>,
    pub out_p: SampledSignal<T>,
    /// Homodyne record of the tapped port's `p`, before the electronic delay.
    pub tapped_p: SampledSignal<T>,
}

/// Delay and gain settings shared by the gates of a network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct FeedForward<T> {
    pub electronic: DelaySpec<T>,
    pub optical: DelaySpec<T>,
    pub gain_error: T,
}

/// Slice kernel for [`squeezing_gate_feedforward`]; writes into the four
/// output buffers.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gate_into<T: Real>(
    in_x: &[T],
    in_p: &[T],
    anc_x: &[T],
    anc_p: &[T],
    reflectivity: T,
    ff: FeedForward<T>,
    rate: T,
    out_x: &mut [T],
    out_p: &mut [T],
    tapped: &mut [T],
) {
    let n = in_x.len();
    let sr = reflectivity.sqrt();
    let st = (T::one() - reflectivity).sqrt();
    let gain = (T::one() + ff.gain_error) * (st / sr);

    // Beam splitter: int-1 = √R in + √(1−R) anc, int-2 = √(1−R) in − √R anc.
    let mut int1_x = vec![T::zero(); n];
    let mut int1_p = vec![T::zero(); n];
    for i in 0..n {
        int1_x[i] = sr * in_x[i] + st * anc_x[i];
        int1_p[i] = sr * in_p[i] + st * anc_p[i];
        tapped[i] = st * in_p[i] - sr * anc_p[i];
    }
    delay_into(&int1_x, ff.optical, rate, out_x);
    delay_into(&int1_p, ff.optical, rate, out_p);
    let mut fed = vec![T::zero(); n];
    delay_into(tapped, ff.electronic, rate, &mut fed);
    for (o, f) in out_p.iter_mut().zip(&fed) {
        *o = *o + gain * *f;
    }
}

/// Offline squeezing gate squeezing `x` by `√R`: the input is mixed with an
/// `x`-squeezed ancilla, the tapped port's `p` is measured and fed forward
/// with gain `(1 + ff_gain_error)·√((1−R)/R)` onto the optically delayed
/// transmitted `p`. Use with `x`/`p` swapped for the `p`-squeezing variant.
#[allow(clippy::too_many_arguments)]
pub fn squeezing_gate_feedforward<T: Real>(
    input_x: &SampledSignal<T>,
    input_p: &SampledSignal<T>,
    ancilla_x: &SampledSignal<T>,
    ancilla_p: &SampledSignal<T>,
    reflectivity: T,
    electronic_delay: DelaySpec<T>,
    optical_delay: DelaySpec<T>,
    ff_gain_error: T,
) -> Result<GateOutput<T>, SimError> {
    check_compatible(input_x, input_p)?;
    check_compatible(input_x, ancilla_x)?;
    check_compatible(input_x, ancilla_p)?;
    if !(reflectivity > T::zero() && reflectivity < T::one()) {
        return Err(SimError::Domain {
            what: "reflectivity (must lie in (0, 1))",
            value: reflectivity.as_f64(),
        });
    }
    let n = input_x.len();
    let rate = input_x.sample_rate();
    let (mut ox, mut op, mut tp) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    gate_into(
        input_x.samples(),
        input_p.samples(),
        ancilla_x.samples(),
        ancilla_p.samples(),
        reflectivity,
        FeedForward {
            electronic: electronic_delay,
            optical: optical_delay,
            gain_error: ff_gain_error,
        },
        rate,
        &mut ox,
        &mut op,
        &mut tp,
    );
    Ok(GateOutput {
        out_x: SampledSignal::from_parts(ox, rate),
        out_p: SampledSignal::from_parts(op, rate),
        tapped_p: SampledSignal::from_parts(tp, rate),
    })
}
