use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gaussian::{gain_from_reflectivity, GateConfig};
use crate::real::{db_to_power, db_to_squeeze_param, Real};

use super::ancilla::{squeezed_pair, AncillaSpec};
use super::delay::{delay_into, DelaySpec};
use super::filter::{FilterChain, FilterSpec};
use super::gate::{gate_into, FeedForward};
use super::signal::{
    add_noise_in_place, check_rate, derive_seed, fill_gaussian, stream_rng, SampledSignal,
};
use super::stats::RecordStats;
use super::SimError;

/// Input quadratures of the two-mode gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X1,
    P1,
    X2,
    P2,
}

impl Quadrature {
    pub const ALL: [Quadrature; 4] = [Self::X1, Self::P1, Self::X2, Self::P2];

    pub(crate) fn index(self) -> usize {
        match self {
            Self::X1 => 0,
            Self::P1 => 1,
            Self::X2 => 2,
            Self::P2 => 3,
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Self::X1 | Self::X2)
    }
}

/// Which input quadrature, if any, carries the injected random signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Vacuum,
    SignalOnX1,
    SignalOnX2,
    SignalOnP1,
    SignalOnP2,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Self::Vacuum,
        Self::SignalOnX1,
        Self::SignalOnX2,
        Self::SignalOnP1,
        Self::SignalOnP2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::SignalOnX1 => "signal_on_x1",
            Self::SignalOnX2 => "signal_on_x2",
            Self::SignalOnP1 => "signal_on_p1",
            Self::SignalOnP2 => "signal_on_p2",
        }
    }

    pub fn target(self) -> Option<Quadrature> {
        match self {
            Self::Vacuum => None,
            Self::SignalOnX1 => Some(Quadrature::X1),
            Self::SignalOnX2 => Some(Quadrature::X2),
            Self::SignalOnP1 => Some(Quadrature::P1),
            Self::SignalOnP2 => Some(Quadrature::P2),
        }
    }

    pub fn with_signal_on(q: Quadrature) -> Self {
        match q {
            Quadrature::X1 => Self::SignalOnX1,
            Quadrature::X2 => Self::SignalOnX2,
            Quadrature::P1 => Self::SignalOnP1,
            Quadrature::P2 => Self::SignalOnP2,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.label() == s)
            .ok_or_else(|| SimError::Scenario(s.to_owned()))
    }
}

/// Delay budget. The signal reaches the gate `injection` after it is
/// stored; inside each squeezing gate the transmitted beam is delayed by
/// `optical` and the feed-forward by `electronic`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineDelays<T> {
    pub injection: DelaySpec<T>,
    pub optical: DelaySpec<T>,
    pub electronic: DelaySpec<T>,
}

impl<T: Real> PipelineDelays<T> {
    /// 23 ns injection + 13 ns matched gate latency.
    pub fn standard() -> Self {
        Self {
            injection: DelaySpec {
                seconds: T::lit(23e-9),
            },
            optical: DelaySpec {
                seconds: T::lit(13e-9),
            },
            electronic: DelaySpec {
                seconds: T::lit(13e-9),
            },
        }
    }

    pub fn none() -> Self {
        Self {
            injection: DelaySpec::zero(),
            optical: DelaySpec::zero(),
            electronic: DelaySpec::zero(),
        }
    }

    /// Signal-path delay from storage to the outputs.
    pub fn total(&self) -> T {
        self.injection.seconds + self.optical.seconds
    }
}

/// Everything that determines one simulated experiment except the seed and
/// the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig<T> {
    /// QND gain `G`; the squeezing gates use `R` with `G = (1−R)/√R`.
    pub gain: T,
    pub ancilla_a: AncillaSpec<T>,
    pub ancilla_b: AncillaSpec<T>,
    /// When false, both ancilla ports receive vacuum.
    pub ancillas_enabled: bool,
    /// Homodyne measurement chain, applied to every output and input record.
    pub filters: Vec<FilterSpec<T>>,
    /// Response of the signal injection path (e.g. modulator); usually empty.
    pub injection_filters: Vec<FilterSpec<T>>,
    pub delays: PipelineDelays<T>,
    pub ff_gain_error: T,
    /// Variance of the injected white signal, in shot-noise units.
    pub signal_variance: T,
    /// Detector dark-noise clearance below shot noise; `None` disables it.
    pub electronic_noise_db: Option<T>,
    /// Store the raw injected signal instead of its filtered copy.
    pub unfiltered_reference: bool,
    pub sample_rate: T,
    /// Samples simulated and discarded before each record.
    pub warmup: usize,
}

impl<T: Real> PipelineConfig<T> {
    /// Experimental defaults: 1 GHz sampling, −5 dB / 150 MHz ancillas,
    /// 100 MHz 7th-order Butterworth LPF followed by a 1 MHz single-pole HPF.
    pub fn standard(gain: T) -> Self {
        let ancilla =
            AncillaSpec::pure(T::lit(-5.0), T::lit(150e6)).expect("valid default ancilla");
        Self {
            gain,
            ancilla_a: ancilla,
            ancilla_b: ancilla,
            ancillas_enabled: true,
            filters: vec![
                FilterSpec::lowpass(T::lit(100e6), 7),
                FilterSpec::highpass(T::lit(1e6), 1),
            ],
            injection_filters: Vec::new(),
            delays: PipelineDelays::standard(),
            ff_gain_error: T::zero(),
            signal_variance: T::lit(40.0),
            electronic_noise_db: None,
            unfiltered_reference: false,
            sample_rate: T::lit(1e9),
            warmup: 4096,
        }
    }

    /// Frequency-flat pure ancillas with squeezing parameter `r`, no
    /// filters, no delays: the setting in which records reproduce the
    /// Gaussian oracle sample-by-sample.
    pub fn ideal(gain: T, r: T) -> Result<Self, SimError> {
        let anc = AncillaSpec::from_squeeze_param(r)?;
        Ok(Self {
            ancilla_a: anc,
            ancilla_b: anc,
            filters: Vec::new(),
            delays: PipelineDelays::none(),
            warmup: 0,
            ..Self::standard(gain)
        })
    }

    pub fn reflectivity(&self) -> T {
        let g = self.gain;
        let sr = ((g * g + T::lit(4.0)).sqrt() - g) / T::lit(2.0);
        sr * sr
    }

    /// Gate parameters for the analytic model, with squeezing parameters
    /// taken from the dc squeezing of the ancillas (zero when disabled).
    pub fn gate_config(&self) -> Result<GateConfig<T>, SimError> {
        let r = |a: &AncillaSpec<T>| {
            if self.ancillas_enabled {
                db_to_squeeze_param(a.squeeze_db_dc)
            } else {
                T::zero()
            }
        };
        let reflectivity = self.reflectivity();
        Ok(GateConfig {
            gain: gain_from_reflectivity(reflectivity),
            reflectivity,
            squeeze_a: r(&self.ancilla_a),
            squeeze_b: r(&self.ancilla_b),
        })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        check_rate(self.sample_rate)?;
        if !(self.gain > T::zero() && self.gain.is_finite()) {
            return Err(SimError::Domain {
                what: "gain",
                value: self.gain.as_f64(),
            });
        }
        self.ancilla_a.validate()?;
        self.ancilla_b.validate()?;
        for f in self.filters.iter().chain(&self.injection_filters) {
            f.validate(self.sample_rate)?;
        }
        for d in [
            self.delays.injection,
            self.delays.optical,
            self.delays.electronic,
        ] {
            DelaySpec::new(d.seconds)?;
        }
        if !(self.signal_variance >= T::zero() && self.signal_variance.is_finite()) {
            return Err(SimError::Domain {
                what: "signal variance",
                value: self.signal_variance.as_f64(),
            });
        }
        if !self.ff_gain_error.is_finite() {
            return Err(SimError::Domain {
                what: "feed-forward gain error",
                value: self.ff_gain_error.as_f64(),
            });
        }
        if let Some(c) = self.electronic_noise_db {
            if !(c > T::zero()) {
                return Err(SimError::Domain {
                    what: "electronic-noise clearance (dB)",
                    value: c.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn measurement_chain(&self) -> Result<FilterChain<T>, SimError> {
        FilterChain::new(&self.filters, self.sample_rate)
    }

    /// Variance of a filtered shot-noise-limited record.
    pub fn shot_noise_variance(&self) -> Result<T, SimError> {
        Ok(self.measurement_chain()?.noise_gain())
    }
}

/// One simulated record set.
///
/// Both quadratures of both outputs are produced; an experiment would pick
/// the x pair or the p pair per run by its local-oscillator phases.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet<T> {
    pub x1_out: SampledSignal<T>,
    pub x2_out: SampledSignal<T>,
    pub p1_out: SampledSignal<T>,
    pub p2_out: SampledSignal<T>,
    /// Measured (filtered) input quadratures in [`Quadrature`] order,
    /// including the injected signal at the gate input.
    pub inputs: [SampledSignal<T>; 4],
    /// The injected signal as stored, before the injection delay.
    pub stored: SampledSignal<T>,
    pub seed: u64,
    pub scenario: Scenario,
    /// Variance of filtered vacuum, the shot-noise reference.
    pub shot_noise_variance: T,
}

/// Record identifiers for [`RecordStats`] and exporters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    X1Out,
    X2Out,
    P1Out,
    P2Out,
    X1In,
    P1In,
    X2In,
    P2In,
    Stored,
}

impl Channel {
    pub const COUNT: usize = 9;
    pub const ALL: [Channel; 9] = [
        Self::X1Out,
        Self::X2Out,
        Self::P1Out,
        Self::P2Out,
        Self::X1In,
        Self::P1In,
        Self::X2In,
        Self::P2In,
        Self::Stored,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn input(q: Quadrature) -> Self {
        match q {
            Quadrature::X1 => Self::X1In,
            Quadrature::P1 => Self::P1In,
            Quadrature::X2 => Self::X2In,
            Quadrature::P2 => Self::P2In,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::X1Out => "x1_out",
            Self::X2Out => "x2_out",
            Self::P1Out => "p1_out",
            Self::P2Out => "p2_out",
            Self::X1In => "x1_in",
            Self::P1In => "p1_in",
            Self::X2In => "x2_in",
            Self::P2In => "p2_in",
            Self::Stored => "stored",
        }
    }
}

impl<T: Real> ChannelSet<T> {
    pub fn channel(&self, c: Channel) -> &SampledSignal<T> {
        match c {
            Channel::X1Out => &self.x1_out,
            Channel::X2Out => &self.x2_out,
            Channel::P1Out => &self.p1_out,
            Channel::P2Out => &self.p2_out,
            Channel::X1In => &self.inputs[0],
            Channel::P1In => &self.inputs[1],
            Channel::X2In => &self.inputs[2],
            Channel::P2In => &self.inputs[3],
            Channel::Stored => &self.stored,
        }
    }

    pub fn len(&self) -> usize {
        self.x1_out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1_out.is_empty()
    }

    pub fn sample_rate(&self) -> T {
        self.x1_out.sample_rate()
    }

    pub fn stats(&self) -> RecordStats {
        RecordStats::from_channel_set(self)
    }

    /// Samples `start..end` of every record.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let f = |s: &SampledSignal<T>| s.slice(start, end);
        Self {
            x1_out: f(&self.x1_out),
            x2_out: f(&self.x2_out),
            p1_out: f(&self.p1_out),
            p2_out: f(&self.p2_out),
            inputs: [
                f(&self.inputs[0]),
                f(&self.inputs[1]),
                f(&self.inputs[2]),
                f(&self.inputs[3]),
            ],
            stored: f(&self.stored),
            seed: self.seed,
            scenario: self.scenario,
            shot_noise_variance: self.shot_noise_variance,
        }
    }

    /// Copy with every record passed through `chain` (e.g. a band filter);
    /// the shot-noise reference is left for the caller to rescale.
    pub fn filtered(&self, chain: &FilterChain<T>) -> Result<Self, SimError> {
        let f = |s: &SampledSignal<T>| chain.apply(s);
        Ok(Self {
            x1_out: f(&self.x1_out)?,
            x2_out: f(&self.x2_out)?,
            p1_out: f(&self.p1_out)?,
            p2_out: f(&self.p2_out)?,
            inputs: [
                f(&self.inputs[0])?,
                f(&self.inputs[1])?,
                f(&self.inputs[2])?,
                f(&self.inputs[3])?,
            ],
            stored: f(&self.stored)?,
            seed: self.seed,
            scenario: self.scenario,
            shot_noise_variance: self.shot_noise_variance,
        })
    }
}

/// RNG stream layout within one record set.
mod streams {
    pub const VACUUM: u64 = 0; // 0..4
    pub const ANCILLA_A: u64 = 4; // 4, 5
    pub const ANCILLA_B: u64 = 6; // 6, 7
    pub const SIGNAL: u64 = 8;
    pub const ELECTRONIC: u64 = 9; // 9..13
}

enum Source<'a, T> {
    None,
    White,
    Custom(&'a [T]),
}

fn simulate<T: Real>(
    cfg: &PipelineConfig<T>,
    scenario: Scenario,
    target: Option<Quadrature>,
    source: Source<'_, T>,
    n: usize,
    seed: u64,
) -> Result<ChannelSet<T>, SimError>
where
    StandardNormal: Distribution<T>,
{
    cfg.validate()?;
    if n == 0 {
        return Err(SimError::Domain {
            what: "record length",
            value: 0.0,
        });
    }
    let rate = cfg.sample_rate;
    let len = cfg.warmup + n;
    let chain = cfg.measurement_chain()?;
    let injection_chain = FilterChain::new(&cfg.injection_filters, rate)?;
    let zeros = || vec![T::zero(); len];

    // Vacuum inputs in Quadrature order.
    let mut input: [Vec<T>; 4] = std::array::from_fn(|_| zeros());
    for (k, q) in input.iter_mut().enumerate() {
        fill_gaussian(
            &mut stream_rng(seed, streams::VACUUM + k as u64),
            q,
            T::one(),
        );
    }

    let mut alpha = zeros();
    match source {
        Source::None => {}
        Source::White => fill_gaussian(
            &mut stream_rng(seed, streams::SIGNAL),
            &mut alpha[cfg.warmup..],
            cfg.signal_variance.sqrt(),
        ),
        Source::Custom(sig) => alpha[cfg.warmup..].copy_from_slice(sig),
    }
    if let Some(q) = target {
        let mut optical = alpha.clone();
        injection_chain.apply_in_place(&mut optical);
        let mut arrived = zeros();
        delay_into(&optical, cfg.delays.injection, rate, &mut arrived);
        for (v, s) in input[q.index()].iter_mut().zip(&arrived) {
            *v = *v + *s;
        }
    }

    let ancilla = |spec: &AncillaSpec<T>, stream: u64| {
        let spec = if cfg.ancillas_enabled {
            *spec
        } else {
            AncillaSpec::vacuum()
        };
        squeezed_pair(
            &spec,
            len,
            rate,
            &mut stream_rng(seed, stream),
            &mut stream_rng(seed, stream + 1),
        )
    };
    // Ancilla A squeezed in x, then a π phase; ancilla B squeezed in p.
    let (mut a_x, mut a_p) = ancilla(&cfg.ancilla_a, streams::ANCILLA_A);
    a_x.iter_mut().chain(a_p.iter_mut()).for_each(|v| *v = -*v);
    let (b_p, b_x) = ancilla(&cfg.ancilla_b, streams::ANCILLA_B);

    let r = cfg.reflectivity();
    let one = T::one();
    let [x1, p1, x2, p2] = &input;
    let mix = |a: &[T], b: &[T], t: T| -> (Vec<T>, Vec<T>) {
        let (st, sr) = (t.sqrt(), (one - t).sqrt());
        (
            a.iter().zip(b).map(|(&u, &v)| st * u + sr * v).collect(),
            a.iter().zip(b).map(|(&u, &v)| sr * u - st * v).collect(),
        )
    };
    let t1 = one / (one + r);
    let (s_x, m_x) = mix(x1, x2, t1);
    let (s_p, m_p) = mix(p1, p2, t1);

    let ff = FeedForward {
        electronic: cfg.delays.electronic,
        optical: cfg.delays.optical,
        gain_error: cfg.ff_gain_error,
    };
    let mut tapped = zeros();
    // Signal arm: p-squeezing gate with ancilla B (x and p roles swapped).
    let (mut s_p2, mut s_x2) = (zeros(), zeros());
    gate_into(
        &s_p,
        &s_x,
        &b_p,
        &b_x,
        r,
        ff,
        rate,
        &mut s_p2,
        &mut s_x2,
        &mut tapped,
    );
    // Probe arm: x-squeezing gate with ancilla A.
    let (mut m_x2, mut m_p2) = (zeros(), zeros());
    gate_into(
        &m_x,
        &m_p,
        &a_x,
        &a_p,
        r,
        ff,
        rate,
        &mut m_x2,
        &mut m_p2,
        &mut tapped,
    );

    let t2 = r / (one + r);
    let (mut x1o, mut x2o) = mix(&s_x2, &m_x2, t2);
    let (mut p1o, mut p2o) = mix(&s_p2, &m_p2, t2);

    if let Some(c) = cfg.electronic_noise_db {
        for (k, rec) in [&mut x1o, &mut x2o, &mut p1o, &mut p2o]
            .into_iter()
            .enumerate()
        {
            add_noise_in_place(
                &mut stream_rng(seed, streams::ELECTRONIC + k as u64),
                rec,
                c,
            );
        }
    }

    let finish = |mut v: Vec<T>, filter: bool| -> SampledSignal<T> {
        if filter {
            chain.apply_in_place(&mut v);
        }
        SampledSignal::from_parts(v.split_off(cfg.warmup), rate)
    };
    let [i0, i1, i2, i3] = input;
    Ok(ChannelSet {
        x1_out: finish(x1o, true),
        x2_out: finish(x2o, true),
        p1_out: finish(p1o, true),
        p2_out: finish(p2o, true),
        inputs: [
            finish(i0, true),
            finish(i1, true),
            finish(i2, true),
            finish(i3, true),
        ],
        stored: finish(alpha, !cfg.unfiltered_reference),
        seed,
        scenario,
        shot_noise_variance: chain.noise_gain(),
    })
}

/// Simulates one record set of `n` samples (after warm-up).
pub fn run_qnd_pipeline<T: Real>(
    cfg: &PipelineConfig<T>,
    scenario: Scenario,
    n: usize,
    seed: u64,
) -> Result<ChannelSet<T>, SimError>
where
    StandardNormal: Distribution<T>,
{
    let source = if scenario.target().is_some() {
        Source::White
    } else {
        Source::None
    };
    simulate(cfg, scenario, scenario.target(), source, n, seed)
}

/// As [`run_qnd_pipeline`] with a caller-supplied signal record injected
/// on `target` instead of the white source.
pub fn run_qnd_pipeline_with_signal<T: Real>(
    cfg: &PipelineConfig<T>,
    target: Quadrature,
    signal: &SampledSignal<T>,
    seed: u64,
) -> Result<ChannelSet<T>, SimError>
where
    StandardNormal: Distribution<T>,
{
    if signal.sample_rate() != cfg.sample_rate {
        return Err(SimError::RateMismatch(
            signal.sample_rate().as_f64(),
            cfg.sample_rate.as_f64(),
        ));
    }
    simulate(
        cfg,
        Scenario::with_signal_on(target),
        Some(target),
        Source::Custom(signal.samples()),
        signal.len(),
        seed,
    )
}

/// Runs `sets` independent record sets in parallel and maps each through
/// `analyze`, so full records never accumulate in memory. Set `i` uses seed
/// `derive_seed(seed, i)`; results are in set order.
pub fn run_record_sets<T, R, F>(
    cfg: &PipelineConfig<T>,
    scenario: Scenario,
    sets: usize,
    n: usize,
    seed: u64,
    analyze: F,
) -> Result<Vec<R>, SimError>
where
    T: Real,
    StandardNormal: Distribution<T>,
    R: Send,
    F: Fn(&ChannelSet<T>) -> R + Sync,
{
    cfg.validate()?;
    (0..sets)
        .into_par_iter()
        .map(|i| {
            run_qnd_pipeline(cfg, scenario, n, derive_seed(seed, i as u64)).map(|s| analyze(&s))
        })
        .collect()
}

/// Per-set sufficient statistics for `sets` record sets.
pub fn record_set_stats<T: Real>(
    cfg: &PipelineConfig<T>,
    scenario: Scenario,
    sets: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<RecordStats>, SimError>
where
    StandardNormal: Distribution<T>,
{
    run_record_sets(cfg, scenario, sets, n, seed, ChannelSet::stats)
}

/// Linear detector-noise variance for the clearance, relative to shot noise.
pub fn electronic_noise_variance<T: Real>(clearance_db: Option<T>) -> T {
    clearance_db.map_or(T::zero(), |c| db_to_power(-c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_labels_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.label().parse::<Scenario>().unwrap(), s);
        }
        assert!(matches!(
            "signal_on_q3".parse::<Scenario>(),
            Err(SimError::Scenario(_))
        ));
    }

    #[test]
    fn standard_reflectivity_for_unity_gain() {
        let cfg = PipelineConfig::<f64>::standard(1.0);
        let golden = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((cfg.reflectivity() - golden).abs() < 1e-12);
        let gate = cfg.gate_config().unwrap();
        gate.validate().unwrap();
        assert!((gate.squeeze_a - 0.5756).abs() < 1e-4);
    }

    #[test]
    fn records_share_length_and_rate() {
        let cfg = PipelineConfig::<f64>::standard(1.0);
        let set = run_qnd_pipeline(&cfg, Scenario::SignalOnX1, 2000, 1).unwrap();
        for c in Channel::ALL {
            assert_eq!(set.channel(c).len(), 2000);
            assert_eq!(set.channel(c).sample_rate(), 1e9);
        }
        assert_eq!(set.scenario, Scenario::SignalOnX1);
    }

    #[test]
    fn ideal_pipeline_has_unit_vacuum_inputs() {
        let cfg = PipelineConfig::<f64>::ideal(1.0, 0.0).unwrap();
        let set = run_qnd_pipeline(&cfg, Scenario::Vacuum, 100_000, 2).unwrap();
        assert!((set.inputs[0].variance() - 1.0).abs() < 0.03);
        assert_eq!(set.shot_noise_variance, 1.0);
        assert!(set.stored.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = PipelineConfig::<f64>::standard(1.0);
        cfg.gain = -1.0;
        assert!(run_qnd_pipeline(&cfg, Scenario::Vacuum, 100, 1).is_err());
        let mut cfg = PipelineConfig::<f64>::standard(1.0);
        cfg.filters = vec![FilterSpec::lowpass(700e6, 7)];
        assert!(run_qnd_pipeline(&cfg, Scenario::Vacuum, 100, 1).is_err());
        assert!(run_qnd_pipeline(
            &PipelineConfig::<f64>::standard(1.0),
            Scenario::Vacuum,
            0,
            1
        )
        .is_err());
    }

    #[test]
    fn record_sets_are_deterministic_and_distinct() {
        let cfg = PipelineConfig::<f64>::ideal(1.0, 0.5).unwrap();
        let a = record_set_stats(&cfg, Scenario::Vacuum, 4, 500, 9).unwrap();
        let b = record_set_stats(&cfg, Scenario::Vacuum, 4, 500, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }
}
