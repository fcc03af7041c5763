use num_complex::Complex;
use proptest::prelude::*;
use squeeze_core::collective::BlockState;
use squeeze_core::fullspace::{
    build_network, oracle_protocol_run, propagate, Drive, FullState, PropagatorConfig,
};
use squeeze_core::protocols::run_scoring;
use squeeze_core::{ArchitectureParams, Axis, LayerModel, Mode, ProtocolSpec};

fn arch() -> impl Strategy<Value = ProtocolSpec> {
    prop_oneof![
        (1usize..=8).prop_map(|n| ProtocolSpec::new(ArchitectureParams::Qrc { n }, 0.0)),
        (1usize..=7)
            .prop_map(|n_in| ProtocolSpec::new(ArchitectureParams::Perceptron { n_in }, 0.0)),
        (1usize..=5, 1usize..=4, 0usize..3).prop_map(|(n_in, n_out, m)| {
            let mode = [Mode::Sequential, Mode::Simultaneous, Mode::Steered][m];
            ProtocolSpec::new(ArchitectureParams::Qnn { n_in, n_out }, 0.0).with_mode(mode)
        }),
        (3usize..=4, 1usize..=2, any::<bool>()).prop_map(|(layers, n_l, ev)| {
            let model = if ev {
                LayerModel::EventAdditive
            } else {
                LayerModel::StateEvolution
            };
            ProtocolSpec::new(ArchitectureParams::Layered { layers, n_l }, 0.0).with_model(model)
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn collective_matches_full_space(spec in arch(), theta in 0.0..3.1f64, phi in -0.09..0.09f64) {
        let s = spec.with_theta(theta).with_phi(phi);
        let core = run_scoring(&s).unwrap();
        let oracle = oracle_protocol_run(&s).unwrap();
        prop_assert!((core.readout_mean() - oracle.exp_sy).abs() < 1e-9);
        prop_assert!((core.readout_variance() - oracle.var_sy).abs() < 1e-9);
    }

    #[test]
    fn echo_without_field_returns_home(spec in arch(), theta in 0.0..3.1f64) {
        let out = run_scoring(&spec.with_theta(theta)).unwrap();
        prop_assert!(out.readout_mean().abs() < 1e-12);
    }

    #[test]
    fn twist_and_rotation_preserve_norm(n in 1usize..40, theta in -3.0..3.0f64, angle in -3.0..3.0f64, accel in 1usize..5) {
        let s = BlockState::<f64>::css_x(n).unwrap()
            .apply_oat(theta, accel)
            .apply_rotation(Axis::Y, angle)
            .apply_rotation(Axis::Z, theta);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn twist_is_undone_by_its_inverse(n in 1usize..40, theta in -3.0..3.0f64) {
        let start = BlockState::<f64>::css_x(n).unwrap();
        let back = start.apply_oat(theta, 1).apply_oat(-theta, 1);
        prop_assert!(back.max_amplitude_distance(&start).unwrap() < 1e-12);
    }

    #[test]
    fn symmetric_states_stay_symmetric(n in 2usize..7, theta in -1.0..1.0f64, angle in -1.0..1.0f64) {
        // a collective rotation of |+>^n never leaves the permutation-symmetric subspace
        let mut s = FullState::<f64>::plus(n).unwrap();
        s.rotate_qubits(0..n, Axis::Y, angle);
        s.apply_diagonal_phase(|i| {
            let m = n as f64 / 2.0 - i.count_ones() as f64;
            theta * m * m
        });
        let amps = s.amplitudes();
        for i in 0..amps.len() {
            let j = i.rotate_left(1) & ((1 << n) - 1) | (i >> (n - 1));
            prop_assert!((amps[i] - amps[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn propagation_conserves_norm_and_energy(n_in in 1usize..4, n_out in 1usize..3, j in -1.5..1.5f64, omega in 0.5..10.0f64, t in 0.0..1.0f64) {
        let h = build_network(n_in, n_out, j, omega, Drive::Outputs).unwrap();
        let mut start = FullState::<f64>::plus(n_in + n_out).unwrap();
        start.rotate_qubits(0..n_in, Axis::Y, 0.3);
        let e0 = h.expectation(&start).unwrap();
        for cfg in [PropagatorConfig::dense(), PropagatorConfig::krylov()] {
            let s = propagate(&start, &h, t, &cfg).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!((h.expectation(&s).unwrap() - e0).abs() < 1e-8);
        }
    }
}

#[test]
fn basis_states_are_normalized() {
    let s = FullState::<f64>::basis(3, 5).unwrap();
    assert_eq!(s.amplitudes()[5], Complex::new(1.0, 0.0));
    assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
}
