mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use common::rng;
use decohere_core::averaging::DensityMatrix;
use decohere_core::dynamics::evolve_exact;
use decohere_core::hilbert::partial_trace;
use decohere_core::twostate::*;
use decohere_core::{CMatrix, CVector, Complex64 as C64, CompositeSpace, OperatorMatrix, StateVector};
use proptest::prelude::*;
use rand::Rng;

fn model(up: f64, down: f64) -> TwoStateModel {
    TwoStateModel::constant_rate(0.3, -0.2, up, down).unwrap()
}

#[test]
fn boundary_action_is_up_action() {
    let m = model(1.7, -0.4);
    assert!((lambda_theta(&m, 0.0, 2.5).unwrap() - 1.7 * 2.5).abs() < 1e-15);
    assert!((lambda_theta(&m, FRAC_PI_2, 2.5).unwrap() + 0.4 * 2.5).abs() < 1e-12);
}

#[test]
fn quadrature_matches_closed_form_for_diagonal_v() {
    let v = OperatorMatrix::diagonal(CompositeSpace::single(2).unwrap(), &[1.3, -0.6]).unwrap();
    let general = TwoStateModel::with_v(0.8, -0.5, v).unwrap();
    let closed = TwoStateModel::constant_rate(0.8, -0.5, 1.3, -0.6).unwrap();
    for theta in [0.0, 0.3, FRAC_PI_4, 1.2, FRAC_PI_2] {
        for t in [0.0, 0.7, 4.0] {
            let a = lambda_theta(&general, theta, t).unwrap();
            let b = lambda_theta(&closed, theta, t).unwrap();
            assert!((a - b).abs() < 1e-9, "θ={theta} t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn quadrature_tracks_off_diagonal_oscillation() {
    let v = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.5, 0.0), C64::new(0.2, 0.1), C64::new(0.2, -0.1), C64::new(-0.3, 0.0)],
    );
    let v = OperatorMatrix::hermitian(CompositeSpace::single(2).unwrap(), v).unwrap();
    let m = TwoStateModel::with_v(1.0, -1.0, v).unwrap();
    let (theta, t) = (0.6f64, 3.0);
    let w = 2.0;
    let (c, s) = (theta.cos(), theta.sin());
    let v12 = C64::new(0.2, 0.1);
    // ∫₀ᵗ Re(v12 e^{iws}) ds
    let cross = (v12 * (C64::new(0.0, w * t).exp() - 1.0) / C64::new(0.0, w)).re;
    let expect = (c * c * 0.5 + s * s * -0.3) * t + 2.0 * c * s * cross;
    assert!((lambda_theta(&m, theta, t).unwrap() - expect).abs() < 1e-3);
}

#[test]
fn overlap_examples() {
    let m = model(2.0, 0.0);
    assert!((theta_overlap_average(&m, 0.4, 0.4, 3.0).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);

    // (cos²θ1 − cos²θ2)(λ↑ − λ↓) = π with T = 2
    let m = model(PI, 0.0);
    let z = theta_overlap_average(&m, 0.0, FRAC_PI_2, 2.0).unwrap();
    assert!(z.norm() < 1e-15);
    let m = model(2.0 * PI, 0.0);
    let z = theta_overlap_average(&m, 0.0, FRAC_PI_4, 2.0).unwrap();
    assert!(z.norm() < 1e-12);

    let flat = model(0.8, 0.8);
    for t in [0.1, 10.0, 1e4] {
        let z = theta_overlap_average(&flat, 0.2, 1.1, t).unwrap();
        assert!((z.norm() - (0.9f64).cos().abs()).abs() < 1e-15);
    }
}

#[test]
fn pointer_pair_overlap_vanishes_at_ten_tau() {
    let m = model(4.0, 1.0);
    let tau = decoherence_time(&m).unwrap();
    let z = theta_overlap_average(&m, 0.0, FRAC_PI_2, 10.0 * tau).unwrap();
    assert!(z.norm() <= 0.1 * (FRAC_PI_2).cos().abs() + 1e-16);
}

#[test]
fn grid_sum_approaches_pointer_pair() {
    let m = model(200.0, 0.0);
    let cmp = saddle_comparison(&m, DEFAULT_THETA_POINTS, 1.0, DEFAULT_GAP_THRESHOLD).unwrap();
    assert!(cmp.relative_error[0] < 0.05, "{:?}", cmp.relative_error);
    assert!(cmp.relative_error[1] < 0.05, "{:?}", cmp.relative_error);

    let errors: Vec<f64> = [50.0, 100.0, 200.0, 400.0]
        .iter()
        .map(|&gap| saddle_comparison(&model(gap, 0.0), DEFAULT_THETA_POINTS, 1.0, 10.0).unwrap().max_relative_error())
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn grid_sum_error_scales_inversely_with_gap() {
    let errs: Vec<f64> = [25.0, 50.0, 100.0, 200.0, 400.0]
        .iter()
        .map(|&gap| saddle_comparison(&model(gap, 0.0), 20001, 1.0, 10.0).unwrap().max_scaled_abs_error())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] <= 0.5 * w[0] * 1.2, "{errs:?}");
    }
}

#[test]
fn stationary_phase_guard() {
    let m = model(5.0, 0.0);
    let err = saddle_comparison(&m, 101, 1.0, DEFAULT_GAP_THRESHOLD).unwrap_err();
    assert!(err.is_regime());
}

#[test]
fn coherence_factor_basics() {
    let m = model(1.5, -0.5);
    assert_eq!(coherence_factor(&m, 0.0).unwrap(), C64::new(1.0, 0.0));
    let avg = coherence_factor_average(&m, 10.0).unwrap();
    assert!(avg.norm() <= 0.1 + 1e-15);
    let num = coherence_factor_average_numeric(&m, 10.0, 64).unwrap();
    assert!((avg - num).norm() < 1e-10);
}

#[test]
fn noncommutative_example() {
    let v = v_from_split(1.0, -1.0).unwrap();
    let m = TwoStateModel::with_v(0.1, -0.1, v).unwrap();
    let g0 = noncommutative_growth(&m, 0.0).unwrap();
    assert_eq!(g0.exact.norm(), 0.0);
    assert_eq!(g0.estimate.norm(), 0.0);
    for t in [0.05, 0.2, 0.5] {
        let g = noncommutative_growth(&m, t).unwrap();
        assert!((g.estimate - C64::new(0.0, -0.2 * t)).norm() < 1e-15);
        assert!(g.difference.norm() <= 0.02 * g.estimate.norm());
    }
}

#[test]
fn noncommutative_diagnostic_reaches_half() {
    let v = v_from_split(0.02, -0.03).unwrap();
    let m = TwoStateModel::with_v(1.0, -0.5, v).unwrap();
    let (peak, extrapolated) = noncommutative_diagnostic(&m, 20001).unwrap();
    assert!(peak >= 0.5 * extrapolated - 1e-6, "{peak} vs {extrapolated}");
}

#[test]
fn noncommutative_rejects_wrong_structure() {
    let v = OperatorMatrix::diagonal(CompositeSpace::single(2).unwrap(), &[1.0, 0.5]).unwrap();
    let m = TwoStateModel::with_v(0.1, -0.1, v).unwrap();
    let err = noncommutative_growth(&m, 0.1).unwrap_err().to_string();
    assert!(err.contains("σx"), "{err}");
}

#[test]
fn explicit_environment_reproduces_phase_factor() {
    let m = model(0.9, -0.35).with_env_dim(3).unwrap();
    let h = dephasing_composite(&m, &[0.0, 0.4, 1.3]).unwrap();
    let (a, b) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
    let sys = StateVector::new(CompositeSpace::single(2).unwrap(), CVector::from_vec(vec![a, b]), 0.0).unwrap();
    let env = StateVector::from_real(CompositeSpace::single(3).unwrap(), &[1.0, 1.0, 1.0]).unwrap();
    let psi0 = sys.tensor(&env).unwrap();
    for t in [0.0, 0.5, 2.0, 7.3] {
        let psi = evolve_exact(&h, &psi0, t).unwrap();
        let red = partial_trace(&DensityMatrix::from_pure(&psi, "energy"), &[0]).unwrap();
        let expect = dephasing_offdiag(&m, a, b, t).unwrap();
        assert!((red.entries()[(0, 1)] - expect).norm() < 1e-6);
        let r = coherence_factor(&m, t).unwrap();
        assert!((red.entries()[(0, 1)].norm() - (a * b).norm() * r.norm()).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn coherence_factor_is_pure_phase(up in -50.0f64..50.0, down in -50.0f64..50.0, t in 0.0f64..100.0) {
        let r = coherence_factor(&model(up, down), t).unwrap();
        prop_assert!((r.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coherence_average_under_envelope(up in -20.0f64..20.0, down in -20.0f64..20.0, window in 1e-3f64..1e3) {
        let m = model(up, down);
        let avg = coherence_factor_average(&m, window).unwrap();
        prop_assert!(avg.norm() <= coherence_envelope(&m, window) + 1e-12);
    }

    #[test]
    fn overlap_bounded_by_cosine(
        up in -10.0f64..10.0, down in -10.0f64..10.0,
        t1 in 0.0f64..FRAC_PI_2, t2 in 0.0f64..FRAC_PI_2, window in 1e-3f64..1e3,
    ) {
        let m = model(up, down);
        let z = theta_overlap_average(&m, t1, t2, window).unwrap();
        let c = (t1 - t2).cos().abs();
        prop_assert!(z.norm() <= c + 1e-14);
        let z0 = theta_overlap_average(&m, t1, t2, 1e-12).unwrap();
        prop_assert!((z0.norm() - c).abs() < 1e-9);
    }

    #[test]
    fn first_order_window(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (vp, vm): (f64, f64) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let (eu, ed): (f64, f64) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        prop_assume!((vp - vm).abs() > 1e-3 && (eu - ed).abs() > 1e-3);
        let m = TwoStateModel::with_v(eu, ed, v_from_split(vp, vm).unwrap()).unwrap();
        let limit = 0.1 * (2.0 / (eu - ed).abs()).min(1.0 / (vp - vm).abs());
        for k in 1..=10 {
            let g = noncommutative_growth(&m, limit * k as f64 / 10.0).unwrap();
            prop_assert!(g.difference.norm() <= 0.1 * g.estimate.norm());
        }
    }

    #[test]
    fn pointer_weight_modulus(gap in 10.0f64..1e4, c in 0.01f64..1.0) {
        let coefficient = C64::new(c, 0.0);
        let branches = [
            ThetaBranch { theta: 0.0, coefficient, action: gap },
            ThetaBranch { theta: FRAC_PI_2, coefficient, action: 0.0 },
        ];
        let pair = saddle_point_reduce(&branches, 1.0, 10.0).unwrap();
        let expect = (PI / gap).sqrt();
        prop_assert!((pair.c_up.norm() / c - expect).abs() < 1e-12);
        prop_assert!((pair.c_down.norm() / c - expect).abs() < 1e-12);
    }
}
