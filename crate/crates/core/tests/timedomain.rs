//! Time-domain pipeline against the exact Gaussian moments.

use qnd_core::gaussian::{predicted_output_moments, GaussianState};
use qnd_core::timedomain::{
    gen_gaussian_white, run_qnd_pipeline, run_qnd_pipeline_with_signal, Channel, PipelineConfig,
    Quadrature, RecordStats, SampledSignal, Scenario,
};

/// Output channel for each oracle quadrature index `(x1, p1, x2, p2)`.
const ORACLE_ORDER: [Channel; 4] = [
    Channel::X1Out,
    Channel::P1Out,
    Channel::X2Out,
    Channel::P2Out,
];

fn assert_matches_oracle(cfg: &PipelineConfig<f64>, st: &RecordStats) {
    let oracle =
        predicted_output_moments(&cfg.gate_config().unwrap(), &GaussianState::vacuum(2)).unwrap();
    let n = st.count as f64;
    for (i, &a) in ORACLE_ORDER.iter().enumerate() {
        for (j, &b) in ORACLE_ORDER.iter().enumerate().skip(i) {
            let want = oracle.covariance(i, j);
            let sigma = ((oracle.variance(i) * oracle.variance(j) + want * want) / n).sqrt();
            let got = st.covariance(a, b);
            assert!(
                (got - want).abs() < 5.0 * sigma,
                "cov({a:?},{b:?}) = {got}, oracle {want} ± {sigma}"
            );
        }
    }
}

#[test]
fn vacuum_output_covariance_matches_oracle() {
    for &(gain, r) in &[
        (1.0, 0.0),
        (1.0, 0.5756),
        (0.5, 1.0),
        (2.0, 0.3),
        (1.0, 20.0),
    ] {
        let cfg = PipelineConfig::ideal(gain, r).unwrap();
        let st = run_qnd_pipeline(&cfg, Scenario::Vacuum, 400_000, 17)
            .unwrap()
            .stats();
        assert_matches_oracle(&cfg, &st);
    }
}

#[test]
fn infinitely_squeezed_ancillas_give_ideal_x_block() {
    let cfg = PipelineConfig::ideal(1.0, 20.0).unwrap();
    let st = run_qnd_pipeline(&cfg, Scenario::Vacuum, 400_000, 3)
        .unwrap()
        .stats();
    let n = st.count as f64;
    let within =
        |got: f64, want: f64, var_scale: f64| (got - want).abs() < 5.0 * (var_scale / n).sqrt();
    assert!(within(st.variance(Channel::X1Out), 1.0, 2.0));
    assert!(within(
        st.covariance(Channel::X1Out, Channel::X2Out),
        1.0,
        3.0
    ));
    assert!(within(st.variance(Channel::X2Out), 2.0, 8.0));
}

#[test]
fn filtered_vacuum_matches_oracle_in_shot_noise_units() {
    // White ancillas with the measurement chain on: the chain scales every
    // covariance by the same Σh², so normalized moments equal the oracle.
    let mut cfg = PipelineConfig::standard(1.0);
    let anc = qnd_core::timedomain::AncillaSpec::from_squeeze_param(0.5756).unwrap();
    cfg.ancilla_a = anc;
    cfg.ancilla_b = anc;
    let st = run_qnd_pipeline(&cfg, Scenario::Vacuum, 400_000, 5)
        .unwrap()
        .stats();
    let oracle =
        predicted_output_moments(&cfg.gate_config().unwrap(), &GaussianState::vacuum(2)).unwrap();
    // Correlated samples: allow for the ~5× reduced effective sample count.
    let n_eff = st.count as f64 * st.shot_noise_variance;
    for (i, &c) in ORACLE_ORDER.iter().enumerate() {
        let want = oracle.variance(i);
        let got = st.normalized_variance(c);
        let sigma = want * (2.0 / n_eff).sqrt();
        assert!((got - want).abs() < 5.0 * sigma, "{c:?}: {got} vs {want}");
    }
}

#[test]
fn unfiltered_vacuum_has_unit_input_variance() {
    let cfg = PipelineConfig::ideal(1.0, 0.0).unwrap();
    let st = run_qnd_pipeline(&cfg, Scenario::Vacuum, 200_000, 8)
        .unwrap()
        .stats();
    for c in [Channel::X1In, Channel::P1In, Channel::X2In, Channel::P2In] {
        assert!((st.variance(c) - 1.0).abs() < 5.0 * (2.0 / 200_000f64).sqrt());
    }
}

#[test]
fn unity_gain_signal_on_x1_appears_equally_on_both_outputs() {
    // Without delays the stored record is aligned with the outputs, so the
    // regression coefficient on it is the signal gain of each output.
    let mut cfg = PipelineConfig::standard(1.0);
    cfg.delays = qnd_core::timedomain::PipelineDelays::none();
    let st = run_qnd_pipeline(&cfg, Scenario::SignalOnX1, 200_000, 21)
        .unwrap()
        .stats();
    let var_s = st.variance(Channel::Stored);
    for c in [Channel::X1Out, Channel::X2Out] {
        let g = st.covariance(c, Channel::Stored) / var_s;
        assert!((g - 1.0).abs() < 0.02, "{c:?}: {g}");
    }
}

#[test]
fn no_crosstalk_from_x_signal_into_p_outputs() {
    let mut cfg = PipelineConfig::ideal(1.0, 0.5756).unwrap();
    cfg.signal_variance = 40.0;
    let n = 200_000;
    let with = run_qnd_pipeline(&cfg, Scenario::SignalOnX1, n, 4).unwrap();
    let without = run_qnd_pipeline(&cfg, Scenario::Vacuum, n, 4).unwrap();
    assert_eq!(with.p1_out, without.p1_out);
    assert_eq!(with.p2_out, without.p2_out);
    assert_ne!(with.x1_out, without.x1_out);
}

#[test]
fn signal_component_is_linear_in_amplitude() {
    let cfg = PipelineConfig::standard(1.0);
    let n = 5000;
    let alpha = 3.0;
    let base = gen_gaussian_white(n, 1e9, 1.0, 77).unwrap();
    let run = |s: SampledSignal<f64>| run_qnd_pipeline_with_signal(&cfg, Quadrature::X1, &s, 12);
    let zero = run(base.scaled(0.0)).unwrap();
    let one = run(base.clone()).unwrap();
    let three = run(base.scaled(alpha)).unwrap();
    for c in [Channel::X1Out, Channel::X2Out] {
        let d1 = one.channel(c).difference(zero.channel(c)).unwrap();
        let d3 = three.channel(c).difference(zero.channel(c)).unwrap();
        for (a, b) in d1.samples().iter().zip(d3.samples()) {
            assert!((alpha * a - b).abs() < 1e-9, "{a} {b}");
        }
    }
}

#[test]
fn signal_component_is_time_invariant() {
    let cfg = PipelineConfig::standard(1.0);
    let n = 4000;
    let k = 37;
    let base = gen_gaussian_white(n, 1e9, 1.0, 5).unwrap();
    let mut shifted = vec![0.0; n];
    shifted[k..].copy_from_slice(&base.samples()[..n - k]);
    let shifted = SampledSignal::new(shifted, 1e9).unwrap();
    let run = |s: &SampledSignal<f64>| run_qnd_pipeline_with_signal(&cfg, Quadrature::X1, s, 9);
    let zero = run(&base.scaled(0.0)).unwrap();
    let a = run(&base).unwrap();
    let b = run(&shifted).unwrap();
    for c in [Channel::X1Out, Channel::X2Out, Channel::Stored] {
        let da = a.channel(c).difference(zero.channel(c)).unwrap();
        let db = b.channel(c).difference(zero.channel(c)).unwrap();
        for t in k..n {
            assert!((db.samples()[t] - da.samples()[t - k]).abs() < 1e-9);
        }
    }
}

#[test]
fn f32_pipeline_runs_and_is_close_to_oracle() {
    let cfg = PipelineConfig::<f32>::ideal(1.0, 0.5756).unwrap();
    let st = run_qnd_pipeline(&cfg, Scenario::Vacuum, 200_000, 1)
        .unwrap()
        .stats();
    let cfg64 = PipelineConfig::<f64>::ideal(1.0, 0.5756).unwrap();
    assert_matches_oracle(&cfg64, &st);
}
