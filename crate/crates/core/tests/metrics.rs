//! Metrics from simulated record sets against the exact Gaussian oracle.

use qnd_core::metrics::{
    conditional_variance_sets, duan_simon_check, gain_sweep, oracle_metrics, qnd_report, Basis,
    Bootstrap, QuadMoments,
};
use qnd_core::timedomain::{record_set_stats, PipelineConfig, RecordStats, Scenario};

fn five_db() -> PipelineConfig<f64> {
    PipelineConfig::ideal(1.0, 10f64.ln() * 5.0 / 20.0).unwrap()
}

#[test]
fn transfer_coefficients_match_oracle_within_five_sigma() {
    let cfg = five_db();
    let without = record_set_stats(&cfg, Scenario::Vacuum, 100, 10_000, 1).unwrap();
    for basis in Basis::ALL {
        let with = record_set_stats(&cfg, basis.signal_scenario(), 100, 10_000, 2).unwrap();
        let r = qnd_report(&with, &without, basis, &Bootstrap::default()).unwrap();
        let o = oracle_metrics(&cfg.gate_config().unwrap(), basis).unwrap();
        assert!((o.t_s.value - 0.876).abs() < 1e-3);
        assert!((o.t_p.value - 0.487).abs() < 1e-3);
        assert!(r.t_s.sigmas_from(o.t_s.value) < 5.0, "{basis}: {:?}", r.t_s);
        assert!(r.t_p.sigmas_from(o.t_p.value) < 5.0, "{basis}: {:?}", r.t_p);
        assert!(
            r.v_sp.sigmas_from(o.v_sp.value) < 5.0,
            "{basis}: {:?}",
            r.v_sp
        );
        for t in [r.t_s.value, r.t_p.value] {
            assert!((0.0..=1.0).contains(&t));
        }
    }
}

#[test]
fn uncorrelated_outputs_have_no_conditional_gain() {
    let cfg = PipelineConfig {
        ancillas_enabled: false,
        ..PipelineConfig::ideal(1.0, 0.0).unwrap()
    };
    // Input channels of a vacuum run are independent vacua.
    let sets = record_set_stats(&cfg, Scenario::Vacuum, 50, 10_000, 4).unwrap();
    let st = RecordStats::pooled(&sets);
    let m = QuadMoments {
        input: 1.0,
        signal: st.normalized_variance(qnd_core::timedomain::Channel::X1In),
        probe: st.normalized_variance(qnd_core::timedomain::Channel::X2In),
        cross: st.covariance(
            qnd_core::timedomain::Channel::X1In,
            qnd_core::timedomain::Channel::X2In,
        ) / st.shot_noise_variance,
    };
    let cv = qnd_core::metrics::conditional_variance(&m).unwrap();
    assert!(cv.g_opt.abs() < 5.0 / (st.count as f64).sqrt());
    assert!((cv.v_sp - m.signal).abs() < 1e-4);
}

#[test]
fn sweep_through_operating_gains() {
    let cfg = five_db();
    let sets = record_set_stats(&cfg, Scenario::Vacuum, 50, 10_000, 5).unwrap();
    let (v_sp, g_opt) = conditional_variance_sets(&sets, Basis::X, &Bootstrap::default()).unwrap();
    let m = QuadMoments::from_stats(&RecordStats::pooled(&sets), Basis::X);
    let sweep = gain_sweep(&m, Basis::X, &[0.0, 0.39, 0.41, g_opt.value, 0.7]);
    assert!((sweep.variances[0] - m.signal).abs() < 1e-12);
    let min = sweep
        .variances
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    assert!((min - v_sp.value).abs() < 1e-9);
    assert!(sweep.variances[1] < 1.0 && sweep.variances[2] < 1.0);
}

#[test]
fn five_db_outputs_are_entangled() {
    let cfg = five_db();
    let sets = record_set_stats(&cfg, Scenario::Vacuum, 50, 10_000, 6).unwrap();
    let gains: Vec<f64> = (3..=7).map(|i| i as f64 / 10.0).collect();
    let ds = duan_simon_check(&sets, &sets, &gains, &Bootstrap::default()).unwrap();
    assert!(ds.entangled);
    // 2·Var(x1 − g x2) − 4g is positive at g = 0.3 (≈ +0.36) and negative from 0.5.
    assert!(ds.margins[0] > 0.0);
    assert!(ds.margins[2..].iter().all(|&m| m < 0.0));
}
