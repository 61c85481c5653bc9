use proptest::prelude::*;
use qqa_core::bosonic::{build_cho, ChoParams};
use qqa_core::encoding::{build_encoding, site_operator, EncodingScheme, Subspace};
use qqa_core::linalg::{c, commutator, expm_herm, herm_eig, identity, kron, max_abs, r, trace};
use qqa_core::metrics::{fidelity, relative_entropy, von_neumann_entropy};
use qqa_core::mixers::{named_mixer, MixerName};
use qqa_core::pauli::pauli_decompose;
use qqa_core::qaoa::{apply_depolarizing_two_qubit, NoiseModel, QaoaConfig, QaoaProblem};
use qqa_core::thermal::{gibbs_state, thermofield_double, GibbsSpec};
use qqa_core::{ComplexMatrix, QuantumState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix_from(n: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        c(entries[2 * (i * n + j)], entries[2 * (i * n + j) + 1])
    })
}

fn hermitian_from(n: usize, entries: &[f64]) -> ComplexMatrix {
    let a = matrix_from(n, entries);
    (&a + a.adjoint()).scale(0.5)
}

fn density_from(n: usize, entries: &[f64]) -> QuantumState {
    let a = matrix_from(n, entries);
    let m = &a * a.adjoint() + identity(n).scale(1e-3);
    let tr = trace(&m).re;
    QuantumState::density(m.unscale(tr)).unwrap()
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * n * n)
}

/// Qubit count and matching random entries.
fn hermitian_on_qubits(max_k: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_k).prop_flat_map(|k| (Just(k), entries(1 << k)))
}

fn random_unitary(n: usize, entries: &[f64]) -> ComplexMatrix {
    expm_herm(&hermitian_from(n, entries), c(0.0, -1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative(a in entries(2), b in entries(2), d in entries(4)) {
        let (a, b, d) = (matrix_from(2, &a), matrix_from(2, &b), matrix_from(4, &d));
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        prop_assert!(max_abs(&(left - right)) < 1e-12);
    }

    #[test]
    fn expm_of_hermitian_is_unitary(e in entries(8), t in -5.0..5.0f64) {
        let h = hermitian_from(8, &e);
        let u = expm_herm(&h, c(0.0, -t)).unwrap();
        prop_assert!(max_abs(&(u.adjoint() * &u - identity(8))) < 1e-10);
    }

    #[test]
    fn eig_reconstructs(e in entries(6)) {
        let h = hermitian_from(6, &e);
        let eig = herm_eig(&h).unwrap();
        prop_assert!(max_abs(&(eig.reconstruct() - &h)) < 1e-10);
        prop_assert!(eig.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn partial_trace_keeps_trace(e in entries(8), keep in prop::sample::subsequence(vec![0usize, 1, 2], 1..=2)) {
        let rho = density_from(8, &e);
        let red = rho.partial_trace(&keep).unwrap();
        prop_assert!((trace(red.data()).re - 1.0).abs() < 1e-12);
        prop_assert!(herm_eig(red.data()).unwrap().values[0] > -1e-12);
    }

    #[test]
    fn pauli_round_trip((k, e) in hermitian_on_qubits(4)) {
        let h = hermitian_from(1 << k, &e);
        let sum = pauli_decompose(&h).unwrap();
        prop_assert_eq!(sum.num_qubits, k);
        prop_assert!(max_abs(&(sum.to_matrix() - &h)) < 1e-12);
    }

    #[test]
    fn purification_reproduces_gibbs((k, e) in hermitian_on_qubits(3), beta in 0.0..3.0f64) {
        let h = hermitian_from(1 << k, &e);
        let tfd = thermofield_double(&h, beta).unwrap();
        let keep: Vec<usize> = (0..k).collect();
        let reduced = tfd.partial_trace(&keep).unwrap();
        let gibbs = gibbs_state(&GibbsSpec::new(h, beta)).unwrap();
        prop_assert!(max_abs(&(reduced.data() - gibbs.data())) <= 1e-12);
    }

    #[test]
    fn gibbs_is_a_commuting_state((k, e) in hermitian_on_qubits(3), beta in 0.0..5.0f64) {
        let h = hermitian_from(1 << k, &e);
        let g = gibbs_state(&GibbsSpec::new(h.clone(), beta)).unwrap();
        prop_assert!((trace(g.data()).re - 1.0).abs() < 1e-12);
        prop_assert!(herm_eig(g.data()).unwrap().values[0] > -1e-14);
        prop_assert!(max_abs(&commutator(g.data(), &h)) < 1e-10);
    }

    #[test]
    fn gibbs_entropy_falls_with_beta(e in entries(4), b1 in 0.0..4.0f64, db in 0.0..4.0f64) {
        let h = hermitian_from(4, &e);
        let s1 = von_neumann_entropy(&gibbs_state(&GibbsSpec::new(h.clone(), b1)).unwrap()).unwrap();
        let s2 = von_neumann_entropy(&gibbs_state(&GibbsSpec::new(h, b1 + db)).unwrap()).unwrap();
        prop_assert!(s2 <= s1 + 1e-10);
    }

    #[test]
    fn fidelity_axioms(a in entries(4), b in entries(4), u in entries(4)) {
        let (rho, sigma) = (density_from(4, &a), density_from(4, &b));
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-10).contains(&f));
        prop_assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-9);
        prop_assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let u = random_unitary(4, &u);
        let rot = |s: &QuantumState| QuantumState::density(&u * s.data() * u.adjoint()).unwrap();
        prop_assert!((fidelity(&rot(&rho), &rot(&sigma)).unwrap() - f).abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_axioms(a in entries(4), b in entries(4)) {
        let (rho, sigma) = (density_from(4, &a), density_from(4, &b));
        prop_assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-10);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-9);
    }

    /// `S(ρ‖e^{-βH}/Z) = β⟨H⟩_ρ + ln Z - S(ρ)`.
    #[test]
    fn relative_entropy_to_gibbs(a in entries(4), e in entries(4), beta in 0.0..2.0f64) {
        let rho = density_from(4, &a);
        let h = hermitian_from(4, &e);
        let g = gibbs_state(&GibbsSpec::new(h.clone(), beta)).unwrap();
        let ln_z = herm_eig(&h).unwrap().values.iter().map(|x| (-beta * x).exp()).sum::<f64>().ln();
        let expected = beta * rho.expectation(&h).unwrap() + ln_z - von_neumann_entropy(&rho).unwrap();
        prop_assert!((relative_entropy(&rho, &g).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn cost_layer_keeps_cost_energy(a in entries(4), e in entries(4), m in entries(4), gamma in -3.0..3.0f64) {
        let rho = density_from(4, &a);
        let (hc, hm) = (hermitian_from(4, &e), hermitian_from(4, &m));
        let problem = QaoaProblem::new(rho.clone(), hc.clone(), hm, None).unwrap();
        let after = problem.state(&[gamma, 0.0], &NoiseModel::NONE).unwrap();
        prop_assert!((after.expectation(&hc).unwrap() - rho.expectation(&hc).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn depolarizing_keeps_states_physical(a in entries(8), eps in 0.0..=1.0f64, pair in (0usize..3, 1usize..3)) {
        let rho = density_from(8, &a);
        let (i, j) = (pair.0, (pair.0 + pair.1) % 3);
        let out = apply_depolarizing_two_qubit(&rho, (i, j), eps).unwrap();
        prop_assert!((trace(out.data()).re - 1.0).abs() < 1e-12);
        prop_assert!(max_abs(&(out.data() - out.data().adjoint())) < 1e-14);
        prop_assert!(herm_eig(out.data()).unwrap().values[0] > -1e-12);
    }
}

#[test]
fn pauli_round_trip_six_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let e: Vec<f64> = (0..2 * 64 * 64).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let h = hermitian_from(64, &e);
    assert!(max_abs(&(pauli_decompose(&h).unwrap().to_matrix() - &h)) < 1e-12);
}

#[test]
fn encodings_are_isometries() {
    for scheme in EncodingScheme::ALL {
        for d in 2..=8 {
            let map = build_encoding(scheme, d).unwrap();
            let m = &map.isometry;
            assert_eq!(m.nrows(), 1 << map.num_qubits);
            assert!(
                max_abs(&(m.adjoint() * m - identity(d))) < 1e-14,
                "{scheme:?} D={d}"
            );
        }
    }
}

#[test]
fn cost_hamiltonian_is_linear_in_lambda() {
    let map = build_encoding(EncodingScheme::Binary, 3).unwrap();
    let cho = |lambda| {
        build_cho(
            &ChoParams {
                omega1: 2.0,
                omega2: 1.5,
                lambda,
                cutoff_nc: 2,
            },
            &map,
        )
        .unwrap()
    };
    let (h0, h1, h3) = (cho(0.0), cho(1.0), cho(3.0));
    let lin = &h0 + (&h1 - &h0).scale(3.0);
    assert!(max_abs(&(h3 - lin)) < 1e-12);
}

/// 100 random layered circuits with two-mode mixers keep feasible input
/// inside the encoded subspace.
#[test]
fn mixers_preserve_feasibility() {
    let mixers = [
        MixerName::BinaryH1,
        MixerName::BinaryH2,
        MixerName::BinaryH3,
        MixerName::SymH1,
        MixerName::SymH2,
        MixerName::SymH3,
        MixerName::SymOpt,
        MixerName::UnaryH1,
        MixerName::UnaryH2,
        MixerName::UnaryH3,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for draw in 0..100 {
        let name = mixers[draw % mixers.len()];
        let map = build_encoding(name.scheme(), 3).unwrap();
        let maps = vec![map.clone(), map.clone()];
        let sub = Subspace::from_maps(&maps);
        let single = named_mixer(name, 3).unwrap().matrix;
        let blocks = [map.num_qubits, map.num_qubits];
        let hm = site_operator(&single, 0, &blocks).unwrap()
            + site_operator(&single, 1, &blocks).unwrap();
        let hc = build_cho(
            &ChoParams {
                omega1: 2.0,
                omega2: 2.0,
                lambda: 1.0,
                cutoff_nc: 2,
            },
            &map,
        )
        .unwrap();
        let amps = qqa_core::linalg::ComplexVector::from_fn(sub.dim(), |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let initial = QuantumState::pure_normalized(sub.lift_vector(&amps).unwrap()).unwrap();
        let p = rng.gen_range(1..=6);
        let theta: Vec<f64> = (0..2 * p)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let problem = QaoaProblem::new(initial, hc, hm, None).unwrap();
        let out = problem.state(&theta, &NoiseModel::NONE).unwrap();
        let leak = out.leakage(&sub.projector()).unwrap();
        assert!(leak <= 1e-10, "{name} draw {draw}: leakage {leak:.3e}");
    }
}

#[test]
fn optimization_is_deterministic() {
    let h = qqa_core::linalg::pauli_z();
    let hm = qqa_core::linalg::pauli_x();
    let plus = QuantumState::pure_normalized(qqa_core::linalg::ComplexVector::from_vec(vec![
        r(1.0),
        r(1.0),
    ]))
    .unwrap();
    let problem = QaoaProblem::new(plus, h, hm, None).unwrap();
    let mut cfg = QaoaConfig::new(2);
    cfg.seed = 11;
    cfg.restarts = 4;
    let a = problem.optimize(&cfg, &NoiseModel::NONE).unwrap();
    let b = problem.optimize(&cfg, &NoiseModel::NONE).unwrap();
    assert_eq!(a, b);
}
