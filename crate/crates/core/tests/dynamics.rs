mod common;

use common::{fidelity, rk4_schrodinger, rng, to_rows};
use decohere_core::dynamics::{
    branch_overlap_time_average, evolve_exact, evolve_mean_field, evolve_phase_approx, reassemble,
    ActionAccumulator, BranchState, CoefficientIntegrator, ExactEngine, HamiltonianSplit, PhaseApproxEngine,
};
use decohere_core::hilbert::{expectation, tensor_product};
use decohere_core::quadrature::linspace;
use decohere_core::random::{random_hermitian, random_state};
use decohere_core::{Complex64 as C64, CompositeSpace, OperatorMatrix, StateVector};
use proptest::prelude::*;

fn single(d: usize) -> CompositeSpace {
    CompositeSpace::single(d).unwrap()
}

fn random_split(seed: u64, ds: usize, de: usize) -> HamiltonianSplit {
    let mut r = rng(seed);
    let sys = random_hermitian(&mut r, &single(ds), 1.0).unwrap();
    let env = random_hermitian(&mut r, &single(de), 1.0).unwrap();
    let space = CompositeSpace::new(vec![ds, de]).unwrap();
    let int = random_hermitian(&mut r, &space, 0.5).unwrap();
    HamiltonianSplit::from_factors(&sys, &env, int).unwrap()
}

// h_sys + h_env and h_int all diagonal in the product basis.
fn commuting_split(sys: &[f64], env: &[f64], int: &[f64]) -> HamiltonianSplit {
    let s = OperatorMatrix::diagonal(single(sys.len()), sys).unwrap();
    let e = OperatorMatrix::diagonal(single(env.len()), env).unwrap();
    let space = CompositeSpace::new(vec![sys.len(), env.len()]).unwrap();
    let i = OperatorMatrix::diagonal(space, int).unwrap();
    HamiltonianSplit::from_factors(&s, &e, i).unwrap()
}

#[test]
fn exact_matches_rk4_on_random_qubit_pair() {
    let h = random_split(11, 2, 2);
    let psi = random_state(&mut rng(12), h.space()).unwrap();
    let exact = evolve_exact(&h, &psi, 1.3).unwrap();
    let oracle = rk4_schrodinger(&to_rows(h.total().entries()), psi.amplitudes().as_slice(), 1.3, 1e-5, 1.0);
    let diff: f64 = exact.amplitudes().iter().zip(&oracle).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!(diff < 1e-7, "difference {diff}");
    assert!((exact.time() - 1.3).abs() < 1e-15);
}

#[test]
fn hbar_rescales_time() {
    let h = random_split(13, 2, 3);
    let psi = random_state(&mut rng(14), h.space()).unwrap();
    let a = evolve_exact(&h, &psi, 2.0).unwrap();
    let b = evolve_exact(&h.clone().with_hbar(2.0).unwrap(), &psi, 4.0).unwrap();
    assert!(fidelity(a.amplitudes().as_slice(), b.amplitudes().as_slice()) > 1.0 - 1e-12);
    assert!(h.with_hbar(0.0).is_err());
}

#[test]
fn non_hermitian_total_is_rejected() {
    let space = CompositeSpace::new(vec![2, 2]).unwrap();
    let m = decohere_core::CMatrix::from_fn(4, 4, |i, j| C64::new((i * 4 + j) as f64, 0.0));
    let bad = OperatorMatrix::new(space.clone(), m).unwrap();
    let zero = OperatorMatrix::zeros(space);
    assert!(HamiltonianSplit::new(zero.clone(), zero, bad, 1).is_err());
}

#[test]
fn coefficient_ode_free_case_is_static() {
    let mut h = random_split(15, 2, 2);
    h = HamiltonianSplit::new(h.h_sys().clone(), h.h_env().clone(), OperatorMatrix::zeros(h.space().clone()), 1).unwrap();
    let integ = CoefficientIntegrator::new(&h).unwrap();
    let mut basis: Vec<StateVector> = (0..4).map(|k| StateVector::basis(h.space().clone(), k).unwrap()).collect();
    let c0 = vec![C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0), C64::new(0.5, 0.0)];
    let mut c = c0.clone();
    for _ in 0..50 {
        let (b, n) = integ.step(&basis, &c, 0.02).unwrap();
        basis = b;
        c = n;
    }
    assert_eq!(c, c0);
}

#[test]
fn coefficient_ode_constant_diagonal_phases() {
    let lambdas = [0.3, -0.7, 1.1, 0.25];
    let h = commuting_split(&[0.4, -0.2], &[1.0, 0.5], &lambdas);
    let integ = CoefficientIntegrator::new(&h).unwrap();
    let mut basis: Vec<StateVector> = (0..4).map(|k| StateVector::basis(h.space().clone(), k).unwrap()).collect();
    let c0: Vec<C64> = [0.1, 0.5, 0.7, 0.5].iter().map(|&x| C64::new(x, 0.0)).collect();
    let mut c = c0.clone();
    let dt = 0.01;
    for _ in 0..1000 {
        let (b, n) = integ.step(&basis, &c, dt).unwrap();
        basis = b;
        c = n;
    }
    let t = 1000.0 * dt;
    for k in 0..4 {
        let expect = c0[k] * C64::from_polar(1.0, -lambdas[k] * t);
        assert!((c[k] - expect).norm() < 1e-8, "level {k}: {} vs {}", c[k], expect);
    }
}

#[test]
fn coefficient_ode_conserves_norm_and_tracks_exact() {
    let h = random_split(16, 2, 2);
    let integ = CoefficientIntegrator::new(&h).unwrap();
    let mut basis: Vec<StateVector> = (0..4).map(|k| StateVector::basis(h.space().clone(), k).unwrap()).collect();
    let psi0 = random_state(&mut rng(17), h.space()).unwrap();
    let mut c: Vec<C64> = psi0.amplitudes().iter().copied().collect();
    let dt = 0.01;
    for _ in 0..1000 {
        let (b, n) = integ.step(&basis, &c, dt).unwrap();
        basis = b;
        c = n;
    }
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-8, "norm drift {}", norm - 1.0);

    let mut amps = decohere_core::CVector::zeros(4);
    for (b, ck) in basis.iter().zip(&c) {
        amps += b.amplitudes() * *ck;
    }
    let exact = evolve_exact(&h, &psi0, 10.0).unwrap();
    assert!(fidelity(exact.amplitudes().as_slice(), amps.as_slice()) > 1.0 - 1e-8);
}

#[test]
fn ideal_measurement_phase_approx_is_exact() {
    let int = [0.9, -0.3, 0.2, 1.4, -1.0, 0.6];
    let h = commuting_split(&[0.5, -0.5], &[0.0, 0.7, 1.9], &int);
    let coeffs = [0.3, 0.1, 0.5, 0.4, 0.6, 0.35];
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let branches: Vec<BranchState> = (0..6)
        .map(|k| BranchState::new(StateVector::basis(h.space().clone(), k).unwrap(), C64::new(coeffs[k] / norm, 0.0)))
        .collect();
    let psi0 = reassemble(&branches, 1.0).unwrap();
    for t in [0.0, 0.5, 3.0, 10.0] {
        let approx = reassemble(&evolve_phase_approx(&h, &branches, t).unwrap(), 1.0).unwrap();
        let exact = evolve_exact(&h, &psi0, t).unwrap();
        assert!(fidelity(approx.amplitudes().as_slice(), exact.amplitudes().as_slice()) > 1.0 - 1e-9);
    }
}

#[test]
fn constant_branch_energy_gives_linear_action() {
    let h = commuting_split(&[0.2, 0.9], &[0.0, 0.3], &[0.4, 1.5, -0.8, 0.0]);
    let b = vec![BranchState::new(StateVector::basis(h.space().clone(), 2).unwrap(), C64::new(1.0, 0.0))];
    let out = evolve_phase_approx(&h, &b, 7.5).unwrap();
    assert!((out[0].action - (-0.8 * 7.5)).abs() < 1e-10);
}

#[test]
fn mean_field_eigenstate_action() {
    let h = commuting_split(&[0.2, 0.9], &[0.0, 0.3], &[0.4, 1.5, -0.8, 0.0]);
    let psi0 = StateVector::basis(h.space().clone(), 1).unwrap();
    let t = 6.0;
    let (state, acc) = evolve_mean_field(&h, &psi0, t, 0.01).unwrap();
    assert!((acc.value() - 1.5 * t).abs() < 1e-9);
    let exact = evolve_exact(&h, &psi0, t).unwrap();
    assert!(fidelity(state.amplitudes().as_slice(), exact.amplitudes().as_slice()) > 1.0 - 1e-12);
    assert!((state.inner(&exact).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-9);
}

#[test]
fn mean_field_zero_interaction_is_free() {
    let mut h = random_split(18, 2, 2);
    h = HamiltonianSplit::new(h.h_sys().clone(), h.h_env().clone(), OperatorMatrix::zeros(h.space().clone()), 1).unwrap();
    let psi0 = random_state(&mut rng(19), h.space()).unwrap();
    let (state, acc) = evolve_mean_field(&h, &psi0, 2.0, 0.05).unwrap();
    assert_eq!(acc.value(), 0.0);
    let free = evolve_exact(&h, &psi0, 2.0).unwrap();
    assert!((state.amplitudes() - free.amplitudes()).norm() < 1e-12);
}

#[test]
fn mean_field_base_overlap_is_constant() {
    let h = random_split(20, 2, 3);
    let mut r = rng(21);
    let a = random_state(&mut r, h.space()).unwrap();
    let b = random_state(&mut r, h.space()).unwrap();
    let o0 = a.inner(&b).unwrap().norm();
    for t in [0.5, 1.0, 4.0] {
        let (sa, _) = evolve_mean_field(&h, &a, t, 0.01).unwrap();
        let (sb, _) = evolve_mean_field(&h, &b, t, 0.01).unwrap();
        assert!((sa.inner(&sb).unwrap().norm() - o0).abs() < 1e-9);
    }
}

#[test]
fn overlap_average_closed_form() {
    let space = single(2);
    let c = 0.6;
    let x = StateVector::basis(space.clone(), 0).unwrap();
    let y = StateVector::from_real(space, &[c, (1.0f64 - c * c).sqrt()]).unwrap();
    let dl = 3.0;
    let window = 5.0;
    let times = linspace(0.0, window, 20001);
    let b1: Vec<BranchState> = times
        .iter()
        .map(|&t| BranchState { base: x.clone().with_time(t), action: dl * t, coefficient: C64::new(1.0, 0.0) })
        .collect();
    let b2: Vec<BranchState> =
        times.iter().map(|&t| BranchState { base: y.clone().with_time(t), action: 0.0, coefficient: C64::new(1.0, 0.0) }).collect();
    let avg = branch_overlap_time_average(&b1, &b2, 1.0).unwrap();
    let i = C64::new(0.0, 1.0);
    let expect = c * ((i * dl * window).exp() - 1.0) / (i * dl * window);
    assert!((avg - expect).norm() < 1e-7);
    assert!(avg.norm() <= 2.0 * c / (dl * window) + 1e-9);

    let flat: Vec<BranchState> = b1.iter().map(|b| BranchState { action: 0.0, ..b.clone() }).collect();
    let plain = branch_overlap_time_average(&flat, &b2, 1.0).unwrap();
    assert!((plain - C64::new(c, 0.0)).norm() < 1e-12);
}

#[test]
fn non_commuting_branches_drift_from_exact() {
    let h = random_split(22, 2, 2);
    let eng = PhaseApproxEngine::new(&h).unwrap();
    let branches: Vec<BranchState> = (0..4)
        .map(|k| BranchState::new(StateVector::basis(h.space().clone(), k).unwrap(), C64::new(0.5, 0.0)))
        .collect();
    let psi0 = reassemble(&branches, 1.0).unwrap();
    let exact = ExactEngine::new(&h).unwrap();
    let mut gaps = Vec::new();
    for t in [0.0, 0.5, 1.0, 2.0] {
        let approx = reassemble(&eng.advance(&branches, t).unwrap(), 1.0).unwrap();
        let e = exact.state_at(&psi0, t).unwrap();
        gaps.push(1.0 - fidelity(approx.amplitudes().as_slice(), e.amplitudes().as_slice()));
    }
    assert!(gaps[0].abs() < 1e-14);
    assert!(gaps[1] > 0.0 && gaps[3] > gaps[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_conserves_norm_and_energy(seed in any::<u64>(), ds in 1usize..4, de in 1usize..4, t in 0.0f64..20.0) {
        let h = random_split(seed, ds, de);
        let psi = random_state(&mut rng(seed ^ 0xabc), h.space()).unwrap();
        let out = evolve_exact(&h, &psi, t).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        let total = h.total();
        let e0 = expectation(&total, &psi).unwrap().re;
        let e1 = expectation(&total, &out).unwrap().re;
        prop_assert!((e1 - e0).abs() < 1e-9 * e0.abs() + 1e-12);
    }

    #[test]
    fn accumulator_monotone_for_nonnegative_energy(energies in prop::collection::vec(0.0f64..5.0, 2..40)) {
        let mut acc = ActionAccumulator::new();
        let mut last = 0.0;
        for (k, e) in energies.iter().enumerate() {
            acc.push(k as f64 * 0.1, *e).unwrap();
            prop_assert!(acc.value() >= last);
            last = acc.value();
        }
        prop_assert!(acc.is_monotone());
    }

    #[test]
    fn ideal_measurement_holds_for_random_spectra(
        sys in prop::collection::vec(-2.0f64..2.0, 2),
        env in prop::collection::vec(-2.0f64..2.0, 2),
        int in prop::collection::vec(-2.0f64..2.0, 4),
        t in 0.0f64..10.0,
    ) {
        let h = commuting_split(&sys, &env, &int);
        let branches: Vec<BranchState> = (0..4)
            .map(|k| BranchState::new(StateVector::basis(h.space().clone(), k).unwrap(), C64::from_polar(0.5, k as f64)))
            .collect();
        let psi0 = reassemble(&branches, 1.0).unwrap();
        let approx = reassemble(&evolve_phase_approx(&h, &branches, t).unwrap(), 1.0).unwrap();
        let exact = evolve_exact(&h, &psi0, t).unwrap();
        prop_assert!(fidelity(approx.amplitudes().as_slice(), exact.amplitudes().as_slice()) > 1.0 - 1e-9);
    }

    #[test]
    fn mean_field_matches_exact_for_joint_eigenstates(
        int in prop::collection::vec(-2.0f64..2.0, 4),
        k in 0usize..4,
        t in 0.1f64..8.0,
    ) {
        let h = commuting_split(&[0.3, -0.4], &[1.0, 0.0], &int);
        let psi0 = StateVector::basis(h.space().clone(), k).unwrap();
        let (state, acc) = evolve_mean_field(&h, &psi0, t, 0.01).unwrap();
        prop_assert!((acc.value() - int[k] * t).abs() < 1e-9);
        let exact = evolve_exact(&h, &psi0, t).unwrap();
        prop_assert!((state.inner(&exact).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn structural_check_uses_tensor_layout() {
    let z = OperatorMatrix::pauli_z();
    let id = OperatorMatrix::identity(single(3));
    let on_env = tensor_product(&OperatorMatrix::identity(single(2)), &random_hermitian(&mut rng(23), &single(3), 1.0).unwrap()).unwrap();
    let on_sys = tensor_product(&z, &id).unwrap();
    let zero = OperatorMatrix::zeros(on_sys.space().clone());
    assert!(HamiltonianSplit::new(on_sys.clone(), on_env.clone(), zero.clone(), 1).is_ok());
    assert!(HamiltonianSplit::new(on_env, on_sys, zero, 1).is_err());
}
