//! Named scenarios: each runs the simulation and writes its artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex;
use qnd_core::metrics::{
    band_stats, conditional_variance_sets, duan_simon_check, gain_sweep, octave_bands,
    oracle_metrics, qnd_report, BandMetrics, Basis, Bootstrap, MetricsError, QndReport,
    QuadMoments,
};
use qnd_core::spectral::export::{kernel_rows, psd_ratio_rows, response_rows, trace_rows};
use qnd_core::spectral::{
    alignment_lag, apply_scalar, cancel_deconvolved, cancel_scalar, kernel_similarity,
    CancelSearch, ResponseAccumulator, ResponseEstimate, ResponseParams, SpectralError,
    SpectralSums, Spectrum, WelchPlan, Window,
};
use qnd_core::timedomain::{
    derive_seed, run_qnd_pipeline, run_record_sets, squeezing_gate_feedforward,
    write_binary_record, Channel, ChannelSet, PipelineConfig, RecordMetadata, RecordStats,
    SampledSignal, Scenario, SimError,
};
use thiserror::Error;

use crate::artifacts::ArtifactWriter;
use crate::config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("writing artifacts: {0}")]
    Io(#[from] std::io::Error),
}

/// Key metrics of one run, in a stable order for summaries.
pub type Metrics = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Vacuum,
    Fig2,
    Fig3,
    Response,
    TableS2,
    GainSweep,
    Bands,
    Feedforward,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        Self::Vacuum,
        Self::Fig2,
        Self::Fig3,
        Self::Response,
        Self::TableS2,
        Self::GainSweep,
        Self::Bands,
        Self::Feedforward,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Response => "response",
            Self::TableS2 => "table-s2",
            Self::GainSweep => "gain-sweep",
            Self::Bands => "bands",
            Self::Feedforward => "feedforward",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Vacuum => {
                "vacuum inputs: output PSDs relative to shot noise, conditional variances"
            }
            Self::Fig2 => {
                "time traces of the stored signal, outputs and scalar-cancelled residuals"
            }
            Self::Fig3 => "output and residual PSDs with scalar and deconvolved cancellation",
            Self::Response => {
                "response functions, kernels and kernel similarity between record groups"
            }
            Self::TableS2 => {
                "T_S, T_P, T_S+T_P, V_S|P for both quadratures with the Gaussian oracle"
            }
            Self::GainSweep => "Var(A_S − g A_P) over the gain grid and Duan–Simon margins",
            Self::Bands => "band-resolved conditional variance with and without ancillas",
            Self::Feedforward => {
                "ancilla anti-squeezing extinction by feed-forward versus frequency"
            }
        }
    }

    pub fn labels() -> Vec<&'static str> {
        Self::ALL.iter().map(|s| s.label()).collect()
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

/// Everything a scenario needs; built from a validated config.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub pipeline: PipelineConfig<f64>,
}

impl RunContext {
    fn boot(&self) -> Bootstrap {
        Bootstrap {
            replicates: self.config.analysis.bootstrap_replicates,
            seed: self.config.analysis.bootstrap_seed,
        }
    }

    /// Independent seed streams: 1 signal runs, 2 vacuum runs, 3+ extras.
    fn seed(&self, stream: u64) -> u64 {
        derive_seed(self.config.seed, stream)
    }

    fn plan(&self) -> Result<WelchPlan<f64>, RunError> {
        let a = &self.config.analysis;
        Ok(WelchPlan::new(
            a.segment_length,
            a.overlap,
            Window::Hann,
            self.pipeline.sample_rate,
        )?)
    }

    fn sets(&self) -> usize {
        self.config.sets
    }

    fn samples(&self) -> usize {
        self.config.samples
    }
}

pub fn run_scenario(
    kind: ScenarioKind,
    ctx: &RunContext,
    out: &mut ArtifactWriter,
) -> Result<Metrics, RunError> {
    match kind {
        ScenarioKind::Vacuum => vacuum(ctx, out),
        ScenarioKind::Fig2 => fig2(ctx, out),
        ScenarioKind::Fig3 => fig3(ctx, out),
        ScenarioKind::Response => response(ctx, out),
        ScenarioKind::TableS2 => table_s2(ctx, out),
        ScenarioKind::GainSweep => gain_sweep_scenario(ctx, out),
        ScenarioKind::Bands => bands(ctx, out),
        ScenarioKind::Feedforward => feedforward(ctx, out),
    }
}

const OUTPUTS: [Channel; 4] = [
    Channel::X1Out,
    Channel::X2Out,
    Channel::P1Out,
    Channel::P2Out,
];
const INPUTS: [Channel; 4] = [Channel::X1In, Channel::P1In, Channel::X2In, Channel::P2In];

fn empty_sums<V>() -> SpectralSums<V> {
    SpectralSums {
        sum: Vec::new(),
        segments: 0,
    }
}

fn merge_all(per_set: &[Vec<SpectralSums<f64>>]) -> Vec<SpectralSums<f64>> {
    let width = per_set.first().map_or(0, Vec::len);
    let mut total: Vec<SpectralSums<f64>> = (0..width).map(|_| empty_sums()).collect();
    for s in per_set {
        for (t, x) in total.iter_mut().zip(s) {
            t.merge(x);
        }
    }
    total
}

fn finish_all(
    plan: &WelchPlan<f64>,
    sums: &[SpectralSums<f64>],
) -> Result<Vec<Spectrum<f64>>, RunError> {
    Ok(sums
        .iter()
        .map(|s| plan.finish_auto(s))
        .collect::<Result<_, _>>()?)
}

/// Bin-wise mean of spectra (e.g. several shot-noise records).
fn mean_spectrum(parts: &[Spectrum<f64>]) -> Spectrum<f64> {
    let mut s = parts[0].clone();
    for (k, v) in s.values.iter_mut().enumerate() {
        *v = parts.iter().map(|p| p.values[k]).sum::<f64>() / parts.len() as f64;
    }
    s
}

fn kv(metrics: &Metrics) -> String {
    let mut out = String::new();
    for (k, v) in metrics {
        writeln!(out, "{k}={v}").expect("write to string");
    }
    out
}

fn put_report(m: &mut Metrics, prefix: &str, r: &QndReport<f64>) {
    let b = r.basis.label();
    for (name, e) in [
        ("T_S", r.t_s),
        ("T_P", r.t_p),
        ("T_S+T_P", r.t_sum),
        ("V_SP", r.v_sp),
        ("g_opt", r.g_opt),
    ] {
        m.insert(format!("{prefix}{b}.{name}"), e.value);
        if e.stderr != 0.0 {
            m.insert(format!("{prefix}{b}.{name}.stderr"), e.stderr);
        }
    }
}

fn shot_noise_reference(
    ctx: &RunContext,
    plan: &WelchPlan<f64>,
) -> Result<Spectrum<f64>, RunError> {
    let per_set = run_record_sets(
        &ctx.pipeline,
        Scenario::Vacuum,
        ctx.sets(),
        ctx.samples(),
        ctx.seed(3),
        |s| {
            INPUTS
                .iter()
                .map(|&c| plan.auto_sums(s.channel(c).samples()))
                .collect::<Vec<_>>()
        },
    )?;
    Ok(mean_spectrum(&finish_all(plan, &merge_all(&per_set))?))
}

fn vacuum(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let plan = ctx.plan()?;
    let per_set = run_record_sets(
        &ctx.pipeline,
        Scenario::Vacuum,
        ctx.sets(),
        ctx.samples(),
        ctx.seed(2),
        |s| {
            let sums: Vec<_> = OUTPUTS
                .iter()
                .chain(&INPUTS)
                .map(|&c| plan.auto_sums(s.channel(c).samples()))
                .collect();
            (s.stats(), sums)
        },
    )?;
    let (stats, sums): (Vec<RecordStats>, Vec<_>) = per_set.into_iter().unzip();
    let spectra = finish_all(&plan, &merge_all(&sums))?;
    let shot = mean_spectrum(&spectra[4..]);
    for (c, s) in OUTPUTS.iter().zip(&spectra) {
        out.write(&format!("psd/{}.csv", c.label()), psd_ratio_rows(s, &shot))?;
    }

    let mut m = Metrics::new();
    let gate = ctx.pipeline.gate_config()?;
    for basis in Basis::ALL {
        let (v, g) = conditional_variance_sets(&stats, basis, &ctx.boot())?;
        let b = basis.label();
        m.insert(format!("{b}.V_SP"), v.value);
        m.insert(format!("{b}.V_SP.stderr"), v.stderr);
        m.insert(format!("{b}.g_opt"), g.value);
        m.insert(
            format!("oracle.{b}.V_SP"),
            oracle_metrics(&gate, basis)?.v_sp.value,
        );
    }
    out.write("metrics.txt", kv(&m))?;
    Ok(m)
}

fn write_trace(
    ctx: &RunContext,
    out: &mut ArtifactWriter,
    name: &str,
    sig: &SampledSignal<f64>,
) -> Result<(), RunError> {
    let len = ctx.config.analysis.trace_samples.min(sig.len());
    let rows = trace_rows(&sig.samples()[..len], sig.sample_rate());
    out.write(&format!("traces/{name}.csv"), rows)?;
    if ctx.config.analysis.binary_traces {
        let rel = format!("traces/{name}.f64");
        let meta = RecordMetadata::new(ctx.config.scenario.as_str(), name, ctx.config.seed);
        write_binary_record(&out.root().join(&rel), &sig.slice(0, len), &meta)?;
        out.record_existing(&rel)?;
        out.record_existing(&format!("{rel}.json"))?;
    }
    Ok(())
}

fn fig2(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let set = run_qnd_pipeline(
        &ctx.pipeline,
        Scenario::SignalOnX1,
        ctx.samples(),
        derive_seed(ctx.seed(1), 0),
    )?;
    let search = CancelSearch::default();
    let mut m = Metrics::new();
    write_trace(ctx, out, "stored", &set.stored)?;
    for (name, y) in [("x1_out", &set.x1_out), ("x2_out", &set.x2_out)] {
        let c = cancel_scalar(y, &set.stored, &search)?;
        write_trace(ctx, out, name, y)?;
        write_trace(ctx, out, &format!("{name}_residual"), &c.residual)?;
        m.insert(format!("{name}.gain"), c.gain);
        m.insert(format!("{name}.shift_samples"), c.shift);
        m.insert(
            format!("{name}.residual_variance"),
            c.residual_variance / set.shot_noise_variance,
        );
    }
    out.write("cancellation.txt", kv(&m))?;
    Ok(m)
}

fn response_params(ctx: &RunContext) -> ResponseParams {
    ResponseParams {
        segment_length: ctx.config.analysis.segment_length,
        overlap: ctx.config.analysis.overlap,
        ..ResponseParams::default()
    }
}

type PairSums = (SpectralSums<f64>, SpectralSums<Complex<f64>>);

/// Response of `channel` to the stored signal, accumulated over the given
/// signal record sets; returns one estimate per group of sets.
fn grouped_responses(
    ctx: &RunContext,
    channel: Channel,
    groups: usize,
) -> Result<(ResponseEstimate<f64>, Vec<ResponseEstimate<f64>>), RunError> {
    let params = response_params(ctx);
    let first = run_qnd_pipeline(
        &ctx.pipeline,
        Scenario::SignalOnX1,
        ctx.samples(),
        derive_seed(ctx.seed(1), 0),
    )?;
    let lag = alignment_lag(&first.stored, first.channel(channel), params.max_lag);
    let template = ResponseAccumulator::new(&params, ctx.pipeline.sample_rate, lag)?;
    let per_set: Vec<Result<PairSums, SpectralError>> = run_record_sets(
        &ctx.pipeline,
        Scenario::SignalOnX1,
        ctx.sets(),
        ctx.samples(),
        ctx.seed(1),
        |s| template.pair_sums(&s.stored, s.channel(channel)),
    )?;
    let per_set = per_set.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut all = template.clone();
    let mut parts: Vec<ResponseAccumulator<f64>> = vec![template.clone(); groups];
    for (i, s) in per_set.iter().enumerate() {
        all.merge(s);
        parts[i * groups / per_set.len()].merge(s);
    }
    let parts = parts
        .iter()
        .map(|p| p.finish())
        .collect::<Result<Vec<_>, _>>()?;
    Ok((all.finish()?, parts))
}

fn response(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let groups = ctx.sets().min(4);
    let mut m = Metrics::new();
    let mut table = String::from("channel,group_a,group_b,similarity\n");
    for channel in [Channel::X1Out, Channel::X2Out] {
        let name = channel.label();
        let (resp, parts) = grouped_responses(ctx, channel, groups)?;
        out.write(&format!("kernel_{name}.csv"), kernel_rows(&resp))?;
        out.write(&format!("response_{name}.csv"), response_rows(&resp))?;
        m.insert(format!("{name}.peak_lag_samples"), resp.peak_lag() as f64);
        let mut min_sim = 1.0f64;
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                let s = kernel_similarity(&parts[a], &parts[b], 0)?;
                min_sim = min_sim.min(s);
                writeln!(table, "{name},{a},{b},{s}").expect("write to string");
            }
        }
        m.insert(format!("{name}.min_similarity"), min_sim);
    }
    out.write("similarity.csv", table)?;
    out.write("metrics.txt", kv(&m))?;
    Ok(m)
}

/// Mean of `a/b` in dB over `[lo, hi]`.
fn mean_ratio_db(a: &Spectrum<f64>, b: &Spectrum<f64>, lo: f64, hi: f64) -> f64 {
    let ks: Vec<usize> = (0..a.len())
        .filter(|&k| a.frequencies[k] >= lo && a.frequencies[k] <= hi)
        .collect();
    if ks.is_empty() {
        return f64::NAN;
    }
    let mean = ks.iter().map(|&k| a.values[k] / b.values[k]).sum::<f64>() / ks.len() as f64;
    10.0 * mean.log10()
}

fn fig3(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let plan = ctx.plan()?;
    let first = run_qnd_pipeline(
        &ctx.pipeline,
        Scenario::SignalOnX1,
        ctx.samples(),
        derive_seed(ctx.seed(1), 0),
    )?;
    let search = CancelSearch::default();
    let ys = [Channel::X1Out, Channel::X2Out];
    let mut scalars = Vec::new();
    let mut responses = Vec::new();
    for &c in &ys {
        let s = cancel_scalar(first.channel(c), &first.stored, &search)?;
        scalars.push((s.gain, s.shift));
        responses.push(grouped_responses(ctx, c, 1)?.0);
    }

    let edge = ctx.config.analysis.segment_length.min(ctx.samples() / 4);
    let n = ctx.samples();
    let residual_sums = |s: &ChannelSet<f64>| -> Result<Vec<SpectralSums<f64>>, SpectralError> {
        let mut v = vec![plan.auto_sums(s.stored.samples())];
        for (i, &c) in ys.iter().enumerate() {
            let y = s.channel(c);
            let rs = apply_scalar(y, &s.stored, scalars[i].0, scalars[i].1)?;
            let rd = cancel_deconvolved(y, &s.stored, &responses[i])?;
            v.push(plan.auto_sums(y.samples()));
            v.push(plan.auto_sums(rs.slice(edge, n - edge).samples()));
            v.push(plan.auto_sums(rd.slice(edge, n - edge).samples()));
        }
        Ok(v)
    };
    let per_set = run_record_sets(
        &ctx.pipeline,
        Scenario::SignalOnX1,
        ctx.sets(),
        n,
        ctx.seed(1),
        residual_sums,
    )?
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let signal = finish_all(&plan, &merge_all(&per_set))?;

    let vac = run_record_sets(
        &ctx.pipeline,
        Scenario::Vacuum,
        ctx.sets(),
        n,
        ctx.seed(2),
        |s| {
            ys.iter()
                .map(|&c| plan.auto_sums(s.channel(c).samples()))
                .collect::<Vec<_>>()
        },
    )?;
    let vacuum = finish_all(&plan, &merge_all(&vac))?;
    let shot = shot_noise_reference(ctx, &plan)?;

    out.write("psd/stored.csv", psd_ratio_rows(&signal[0], &shot))?;
    let mut m = Metrics::new();
    let top = (100e6f64).min(0.45 * ctx.pipeline.sample_rate);
    for (i, &c) in ys.iter().enumerate() {
        let name = c.label();
        let [y, rs, rd] = [&signal[1 + 3 * i], &signal[2 + 3 * i], &signal[3 + 3 * i]];
        out.write(&format!("psd/{name}.csv"), psd_ratio_rows(y, &shot))?;
        out.write(
            &format!("psd/{name}_scalar_residual.csv"),
            psd_ratio_rows(rs, &shot),
        )?;
        out.write(
            &format!("psd/{name}_deconvolved_residual.csv"),
            psd_ratio_rows(rd, &shot),
        )?;
        out.write(
            &format!("psd/{name}_vacuum.csv"),
            psd_ratio_rows(&vacuum[i], &shot),
        )?;
        m.insert(format!("{name}.scalar_gain"), scalars[i].0);
        m.insert(format!("{name}.scalar_shift_samples"), scalars[i].1);
        m.insert(
            format!("{name}.scalar_excess_db"),
            mean_ratio_db(rs, &vacuum[i], 2e6, top),
        );
        m.insert(
            format!("{name}.deconvolved_excess_db"),
            mean_ratio_db(rd, &vacuum[i], 2e6, top),
        );
    }
    out.write("metrics.txt", kv(&m))?;
    Ok(m)
}

fn table_s2(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let without = qnd_core::timedomain::record_set_stats(
        &ctx.pipeline,
        Scenario::Vacuum,
        ctx.sets(),
        ctx.samples(),
        ctx.seed(2),
    )?;
    let gate = ctx.pipeline.gate_config()?;
    let mut text = String::new();
    let mut m = Metrics::new();
    let mut json = Vec::new();
    for basis in Basis::ALL {
        let with = qnd_core::timedomain::record_set_stats(
            &ctx.pipeline,
            basis.signal_scenario(),
            ctx.sets(),
            ctx.samples(),
            ctx.seed(1),
        )?;
        let r = qnd_report(&with, &without, basis, &ctx.boot())?;
        let o = oracle_metrics(&gate, basis)?;
        text.push_str(&r.to_text());
        for line in o.to_text().lines() {
            writeln!(text, "oracle.{line}").expect("write to string");
        }
        put_report(&mut m, "", &r);
        put_report(&mut m, "oracle.", &o);
        json.push(serde_json::json!({ "monte_carlo": r, "oracle": o }));
    }
    out.write("report.txt", text)?;
    out.write(
        "report.json",
        serde_json::to_string_pretty(&json).expect("report serializes") + "\n",
    )?;
    Ok(m)
}

fn gain_sweep_scenario(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let stats = qnd_core::timedomain::record_set_stats(
        &ctx.pipeline,
        Scenario::Vacuum,
        ctx.sets(),
        ctx.samples(),
        ctx.seed(2),
    )?;
    let pooled = RecordStats::pooled(&stats);
    let gains = &ctx.config.analysis.gains;
    let mut m = Metrics::new();
    for basis in Basis::ALL {
        let sweep = gain_sweep(&QuadMoments::from_stats(&pooled, basis), basis, gains);
        let mut rows = String::from("gain,value\n");
        for (g, v) in sweep.gains.iter().zip(&sweep.variances) {
            writeln!(rows, "{g},{v}").expect("write to string");
        }
        out.write(&format!("gain_sweep_{}.csv", basis.label()), rows)?;
        if let Ok(fit) = sweep.fit_quadratic() {
            m.insert(format!("{}.fit_g_min", basis.label()), fit.minimizer());
            m.insert(format!("{}.fit_V_min", basis.label()), fit.minimum());
        }
    }
    let ds = duan_simon_check(&stats, &stats, gains, &ctx.boot())?;
    out.write("duan_simon.csv", ds.rows())?;
    m.insert(
        "duan_simon.entangled".into(),
        f64::from(u8::from(ds.entangled)),
    );
    if let Some(i) = ds.most_significant() {
        m.insert("duan_simon.gain".into(), ds.gains[i]);
        m.insert("duan_simon.margin".into(), ds.margins[i]);
        m.insert("duan_simon.margin.stderr".into(), ds.stderr[i]);
    }
    out.write("metrics.txt", kv(&m))?;
    Ok(m)
}

fn bands(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let mut m = Metrics::new();
    let rate = ctx.pipeline.sample_rate;
    let list: Vec<_> = octave_bands(ctx.config.analysis.band_order)
        .into_iter()
        .filter(|b| b.hi < 0.5 * rate)
        .collect();
    for (tag, enabled) in [("with", true), ("without", false)] {
        let cfg = PipelineConfig {
            ancillas_enabled: enabled,
            ..ctx.pipeline.clone()
        };
        let chain = cfg.measurement_chain()?;
        let collect = |scenario: Scenario, seed: u64| -> Result<Vec<Vec<RecordStats>>, RunError> {
            Ok(
                run_record_sets(&cfg, scenario, ctx.sets(), ctx.samples(), seed, |s| {
                    band_stats(s, &chain, &list)
                })?
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?,
            )
        };
        let vac = collect(Scenario::Vacuum, ctx.seed(2))?;
        let sig = collect(Scenario::SignalOnX1, ctx.seed(1))?;
        let res = BandMetrics::compute(&list, &vac, Some(&sig), Basis::X, &ctx.boot())?;
        out.write(
            &format!("bands_{tag}_ancillas.csv"),
            BandMetrics::rows(&res),
        )?;
        for b in &res {
            m.insert(
                format!("{tag}.{}MHz.V_SP", b.band.center / 1e6),
                b.v_sp.value,
            );
        }
    }
    out.write("metrics.txt", kv(&m))?;
    Ok(m)
}

/// Tone power at `freq` by lock-in, skipping `skip` samples at each end.
fn lock_in_power(x: &SampledSignal<f64>, freq: f64, skip: usize) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq / x.sample_rate();
    let s = &x.samples()[skip..x.len() - skip];
    let acc: Complex<f64> = s
        .iter()
        .enumerate()
        .map(|(t, &v)| Complex::from_polar(v, -w * (t + skip) as f64))
        .sum();
    acc.norm_sqr() / (s.len() as f64).powi(2)
}

/// Reported suppression is floored at this value for exact cancellation.
const MAX_SUPPRESSION_DB: f64 = 300.0;

fn feedforward(ctx: &RunContext, out: &mut ArtifactWriter) -> Result<Metrics, RunError> {
    let p = &ctx.pipeline;
    let rate = p.sample_rate;
    let n = 1 << 14;
    let zero = SampledSignal::zeros(n, rate)?;
    let r = p.reflectivity();
    let mut rows = String::from("frequency_hz,suppression_db\n");
    let mut m = Metrics::new();
    let mut f = 10e6;
    while f <= 200e6 && f < 0.5 * rate {
        let tone = SampledSignal::new(
            (0..n)
                .map(|t| (2.0 * std::f64::consts::PI * f * t as f64 / rate).cos())
                .collect(),
            rate,
        )?;
        let power = |ff_err: f64| -> Result<f64, RunError> {
            let g = squeezing_gate_feedforward(
                &zero,
                &zero,
                &zero,
                &tone,
                r,
                p.delays.electronic,
                p.delays.optical,
                ff_err,
            )?;
            Ok(lock_in_power(&g.out_p, f, 256))
        };
        let off = power(-1.0)?;
        let on = power(p.ff_gain_error)?;
        let db = (10.0 * (off / on).log10()).min(MAX_SUPPRESSION_DB);
        writeln!(rows, "{f},{db}").expect("write to string");
        if (f - 50e6).abs() < 1.0 {
            m.insert("suppression_db_at_50MHz".into(), db);
        }
        f += 10e6;
    }
    out.write("ff_extinction.csv", rows)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.label().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("fig9".parse::<ScenarioKind>().is_err());
    }
}
