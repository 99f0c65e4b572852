//! Property suites over the Gaussian algebra, filters, spectra and pipeline.

use proptest::prelude::*;
use qnd_core::gaussian::{
    beam_splitter_symplectic, offline_qnd_network, propagate_full, qnd_ideal_symplectic,
    rotation_symplectic, squeezer_symplectic, GateConfig, GaussianState,
};
use qnd_core::metrics::{
    conditional_variance, gain_sweep, model_from_gate, oracle_metrics, theoretical_metrics, Basis,
    InputVariances,
};
use qnd_core::spectral::{cross_psd, welch_psd, Window};
use qnd_core::timedomain::{
    gen_gaussian_white, run_qnd_pipeline_with_signal, shift_signal, FilterChain, FilterSpec,
    PipelineConfig, Quadrature, SampledSignal,
};

const FS: f64 = 1e9;

fn gate() -> impl Strategy<Value = GateConfig<f64>> {
    (0.1f64..5.0, 0.0f64..3.0, 0.0f64..3.0)
        .prop_map(|(g, ra, rb)| GateConfig::from_gain(g, ra, rb).unwrap())
}

/// Pure two-mode input: independently squeezed and rotated vacua.
fn pure_input() -> impl Strategy<Value = GaussianState<f64>> {
    (-1.5f64..1.5, -1.5f64..1.5, 0.0f64..3.2, 0.0f64..3.2).prop_map(|(r1, r2, t1, t2)| {
        let rot = |r: f64, t: f64| {
            GaussianState::squeezed_vacuum(r)
                .transformed(&rotation_symplectic(1, t, 0).unwrap())
                .unwrap()
        };
        rot(r1, t1).tensor(&rot(r2, t2))
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn network_is_symplectic(cfg in gate()) {
        prop_assert!(offline_qnd_network(&cfg).unwrap().symplectic_defect() < 1e-9);
    }

    #[test]
    fn elementary_transforms_compose_symplectically(
        refl in 0.0f64..1.0, r in -3.0f64..3.0, theta in -6.3f64..6.3,
    ) {
        let s = beam_splitter_symplectic(3, refl, (0, 2)).unwrap()
            .then(&squeezer_symplectic(3, r, 1).unwrap())
            .then(&rotation_symplectic(3, theta, 2).unwrap());
        prop_assert!(s.symplectic_defect() < 1e-9);
        prop_assert!(s.then(&s.inverse()).matrix().max_abs_diff(&qnd_core::linalg::Matrix::identity(6)) < 1e-9);
    }

    #[test]
    fn outputs_respect_uncertainty_and_purity(cfg in gate(), input in pure_input()) {
        let out = propagate_full(&cfg, &input).unwrap();
        prop_assert!(out.is_physical(1e-9));
        prop_assert!((out.purity() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn strong_squeezing_reaches_ideal_gate(g in 0.2f64..3.0, r in 3.0f64..12.0) {
        let cfg = GateConfig::from_gain(g, r, r).unwrap();
        let net = offline_qnd_network(&cfg).unwrap().restrict(&[0, 1]);
        let ideal = qnd_ideal_symplectic(g).unwrap();
        prop_assert!(net.max_abs_diff(ideal.matrix()) < 3.0 * (-2.0 * r).exp());
    }

    #[test]
    fn channel_model_reproduces_oracle(cfg in gate()) {
        for basis in Basis::ALL {
            let model = model_from_gate(&cfg, basis).unwrap();
            let t = theoretical_metrics(&model, &InputVariances::coherent(), basis).unwrap();
            let o = oracle_metrics(&cfg, basis).unwrap();
            prop_assert!((t.t_s.value - o.t_s.value).abs() < 1e-9);
            prop_assert!((t.t_p.value - o.t_p.value).abs() < 1e-9);
            prop_assert!((t.v_sp.value - o.v_sp.value).abs() < 1e-9);
        }
    }

    #[test]
    fn conditional_variance_is_the_sweep_minimum(cfg in gate()) {
        let state = qnd_core::gaussian::predicted_output_moments(&cfg, &GaussianState::vacuum(2)).unwrap();
        let m = qnd_core::metrics::QuadMoments::from_state(&state, 1.0, Basis::X);
        let cv = conditional_variance(&m).unwrap();
        prop_assert!(cv.v_sp <= m.signal + 1e-12);
        let grid: Vec<f64> = (-20..=20).map(|i| cv.g_opt + 0.05 * i as f64).collect();
        let sweep = gain_sweep(&m, Basis::X, &grid);
        let min = sweep.variances.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((min - cv.v_sp).abs() < 1e-9);
    }

    #[test]
    fn parseval_for_a_single_rectangular_segment(len_pow in 6u32..14, seed in any::<u64>()) {
        let x = gen_gaussian_white(1 << len_pow, FS, 1.0, seed).unwrap();
        let s = welch_psd(&x, 1 << len_pow, 0.0, Window::Rectangular).unwrap();
        prop_assert!((s.integrated_power() / x.variance() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cross_spectrum_is_hermitian(seed in any::<u64>()) {
        let a = gen_gaussian_white(4096, FS, 1.0, seed).unwrap();
        let b = gen_gaussian_white(4096, FS, 1.0, seed ^ 1).unwrap();
        let ab = cross_psd(&a, &b, 512, 0.5, Window::Hann).unwrap();
        let ba = cross_psd(&b, &a, 512, 0.5, Window::Hann).unwrap();
        for (x, y) in ab.values.iter().zip(&ba.values) {
            prop_assert!((x - y.conj()).norm() < 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn filter_chain_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let chain = FilterChain::new(
            &[FilterSpec::lowpass(100e6, 7), FilterSpec::highpass(1e6, 1)],
            FS,
        ).unwrap();
        let x = gen_gaussian_white(2048, FS, 1.0, seed).unwrap();
        let y = gen_gaussian_white(2048, FS, 1.0, seed ^ 7).unwrap();
        let mix: Vec<f64> = x.samples().iter().zip(y.samples()).map(|(p, q)| a * p + b * q).collect();
        let lhs = chain.apply(&SampledSignal::new(mix, FS).unwrap()).unwrap();
        let fx = chain.apply(&x).unwrap();
        let fy = chain.apply(&y).unwrap();
        let rhs: Vec<f64> = fx.samples().iter().zip(fy.samples()).map(|(p, q)| a * p + b * q).collect();
        prop_assert!(max_abs_diff(lhs.samples(), &rhs) < 1e-9);
    }

    #[test]
    fn butterworth_magnitude_never_exceeds_one(f in 0.0f64..5e8, order in 1usize..9) {
        let chain = FilterChain::new(&[FilterSpec::lowpass(100e6, order)], FS).unwrap();
        prop_assert!(chain.response(f).norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn integer_shift_moves_samples(shift in 0usize..50, seed in any::<u64>()) {
        let x = gen_gaussian_white(256, FS, 1.0, seed).unwrap();
        let y = shift_signal(&x, shift as f64);
        prop_assert!(max_abs_diff(&y.samples()[shift..], &x.samples()[..256 - shift]) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pipeline_signal_path_is_linear_and_time_invariant(
        amp in 0.1f64..5.0, shift in 1usize..200, seed in any::<u64>(),
    ) {
        let cfg = PipelineConfig::standard(1.0);
        let n = 4096;
        let s = gen_gaussian_white(n, FS, 1.0, seed).unwrap();
        let run = |v: Vec<f64>| {
            run_qnd_pipeline_with_signal(&cfg, Quadrature::X1, &SampledSignal::new(v, FS).unwrap(), 9).unwrap()
        };
        let zero = run(vec![0.0; n]);
        let one = run(s.samples().to_vec());
        let scaled = run(s.samples().iter().map(|v| amp * v).collect());
        let mut delayed = vec![0.0; n];
        delayed[shift..].copy_from_slice(&s.samples()[..n - shift]);
        let moved = run(delayed);
        for t in 0..n {
            let d1 = one.x2_out.samples()[t] - zero.x2_out.samples()[t];
            let da = scaled.x2_out.samples()[t] - zero.x2_out.samples()[t];
            prop_assert!((da - amp * d1).abs() < 1e-9);
            if t >= shift {
                let dm = moved.x1_out.samples()[t] - zero.x1_out.samples()[t];
                let d0 = one.x1_out.samples()[t - shift] - zero.x1_out.samples()[t - shift];
                prop_assert!((dm - d0).abs() < 1e-9);
            }
        }
    }
}
