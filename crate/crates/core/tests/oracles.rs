mod common;

use common::*;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use qite_core::analysis::{entangling_power, linear_entropy, ProductStateReal};
use qite_core::pauli::{Letter, PauliString};
use qite_core::problem::{build_hamiltonian, generate_instance, GeneratorConfig, IsingHamiltonian};
use qite_core::qite::{
    compression_error_leading_term, exact_ite_reference, first_step_closed_form, qite_step, realize_state,
    AnsatzParameters, AnsatzSpec, LayerOrder, QiteConfig, ReducedZyCoefficients,
};
use qite_core::{parse_instance, RealStatevector, TwoQubitAxis};

#[test]
fn kernels_and_assembly_match_dense_oracles() {
    for seed in 0..50 {
        let dev = dense_oracle_case(seed);
        assert!(dev < 1e-10, "case {seed}: deviation {dev:e}");
    }
}

#[test]
fn rotation_inverse_round_trip() {
    let mut r = rng(7);
    for _ in 0..20 {
        let n = r.random_range(1..=8);
        let psi = random_state(n, &mut r);
        let mut s = psi.clone();
        let q = r.random_range(0..n);
        let th = r.random_range(-6.0..6.0);
        s.apply_ry(q, th).unwrap();
        s.apply_ry(q, -th).unwrap();
        assert!(max_abs_diff(s.amplitudes(), psi.amplitudes()) < 1e-12);
    }
}

#[test]
fn four_qubit_reduced_zy_system_matches_dense() {
    let mut r = rng(11);
    let psi = random_state(4, &mut r);
    let h = random_hamiltonian(4, 2.0, &mut r);
    let spec = AnsatzSpec::reduced_zy(2, false);
    let basis = qite_core::qite::build_operator_basis(&spec, 4).unwrap();
    let energy = psi.expectation_diagonal(&h).unwrap();
    let sys = qite_core::qite::assemble_linear_system(&psi, energy, &h, &basis, 0.02, Default::default()).unwrap();
    let (s, b, c) = dense_system(basis.generators(), &h, &psi, 0.02);
    assert!((&sys.s - &s).amax() < 1e-10);
    assert!((&sys.b - &b).amax() < 1e-10);
    assert!((sys.c - c).abs() < 1e-12);
    for i in 0..basis.len() {
        assert!((sys.s[(i, i)] - 1.0).abs() < 1e-12);
        for j in 0..basis.len() {
            assert!((sys.s[(i, j)] - sys.s[(j, i)]).abs() < 1e-12);
        }
    }
}

#[test]
fn first_step_matches_closed_form_on_generated_instances() {
    for seed in 0..20u64 {
        let n = 3 + (seed as usize % 8);
        let cfg = if seed % 2 == 0 { GeneratorConfig::tail_assignment(n, seed) } else { GeneratorConfig::sparse(n, seed) };
        let h = build_hamiltonian(&generate_instance(&cfg).unwrap());
        let k = (seed as usize * 3) % n;
        let spec = AnsatzSpec::reduced_zy(k, true);
        let dtau = 0.004;
        let mut state = RealStatevector::plus(n).unwrap();
        let mut params = AnsatzParameters::new(2 * n - 1);
        qite_step(&mut state, &h, &spec, &mut params, dtau, &QiteConfig::fixed(1, dtau)).unwrap();
        let cf = first_step_closed_form(&h, dtau, &spec).unwrap().to_basis_vector();
        let dev = max_abs_diff(&params.layers[0], &cf);
        assert!(dev < 1e-8, "seed {seed}: {dev:e}");

        // Without the ridge the prepared state is the closed-form circuit.
        let mut state = RealStatevector::plus(n).unwrap();
        let mut params = AnsatzParameters::new(2 * n - 1);
        let exact = QiteConfig { ridge: 0.0, ..QiteConfig::fixed(1, dtau) };
        qite_step(&mut state, &h, &spec, &mut params, dtau, &exact).unwrap();
        let mut cf_params = AnsatzParameters::new(cf.len());
        cf_params.push_layer(&cf, 1.0).unwrap();
        let basis = qite_core::qite::build_operator_basis(&spec, n).unwrap();
        let direct = realize_state(&basis, &spec, &cf_params, LayerOrder::RyFirst).unwrap();
        assert!(max_abs_diff(direct.amplitudes(), state.amplitudes()) < 1e-10);
    }
}

#[test]
fn first_step_pipeline_matches_closed_form_on_random_hamiltonians() {
    let mut r = rng(5);
    for _ in 0..10 {
        let n = r.random_range(2..=8);
        let h = random_hamiltonian(n, 1.5, &mut r);
        let k = r.random_range(0..n);
        let spec = AnsatzSpec::reduced_zy(k, false);
        let mut state = RealStatevector::plus(n).unwrap();
        let mut params = AnsatzParameters::new(2 * n - 1);
        let cfg = QiteConfig { ridge: 0.0, ..QiteConfig::fixed(1, 0.01) };
        qite_step(&mut state, &h, &spec, &mut params, 0.01, &cfg).unwrap();
        let cf = first_step_closed_form(&h, 0.01, &spec).unwrap().to_basis_vector();
        assert!(max_abs_diff(&params.layers[0], &cf) < 1e-10);
    }
}

fn reduced_sum(c: &ReducedZyCoefficients) -> CMat {
    let n = c.a.len();
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    for i in 0..n {
        m += pauli_matrix(&PauliString::single(n, i, Letter::Y)) * Complex64::new(c.a[i], 0.0);
        if i != c.pivot {
            m += pauli_matrix(&PauliString::pair(n, c.pivot, Letter::Z, i, Letter::Y)) * Complex64::new(c.b[i], 0.0);
        }
    }
    m
}

#[test]
fn merge_error_matches_dense_commutator() {
    let mut r = rng(3);
    for _ in 0..10 {
        let n = 4;
        let k = r.random_range(0..n);
        let mut coeffs = || {
            let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..n).map(|i| if i == k { 0.0 } else { r.random_range(-1.0..1.0) }).collect();
            ReducedZyCoefficients { pivot: k, a, b }
        };
        let history = coeffs();
        let next = coeffs();
        let (hm, nm) = (reduced_sum(&history), reduced_sum(&next));
        let commutator = &nm * &hm - &hm * &nm;
        let mut expected = CMat::zeros(1 << n, 1 << n);
        for ((kk, i), c) in compression_error_leading_term(&history, &next).unwrap() {
            expected += pauli_matrix(&PauliString::pair(n, kk, Letter::X, i, Letter::Y)) * Complex64::new(0.0, 2.0 * c);
        }
        assert!((commutator - expected).camax() < 1e-10);
    }
}

#[test]
fn toy_ite_reference_by_hand() {
    let inst = parse_instance("1 2\n0 1\n").unwrap();
    let h = build_hamiltonian(&inst);
    let snaps = exact_ite_reference(&h, &[0.0, 1.0, 40.0], None).unwrap();
    for a in snaps[0].state.amplitudes() {
        assert!((a - 0.5).abs() < 1e-15);
    }
    // Energies relative to the offset: +1/2 on 00 and 11, -1/2 on 01 and 10.
    let w = [(-0.5f64).exp(), (0.5f64).exp(), (0.5f64).exp(), (-0.5f64).exp()];
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (a, e) in snaps[1].state.amplitudes().iter().zip(w) {
        assert!((a - e / norm).abs() < 1e-12);
    }
    let h2 = 0.5f64.sqrt();
    assert!(max_abs_diff(snaps[2].state.amplitudes(), &[0.0, h2, h2, 0.0]) < 1e-12);
}

#[test]
fn linear_entropy_matches_partial_trace() {
    let mut r = rng(9);
    for _ in 0..50 {
        let v: Vec<f64> = (0..4).map(|_| r.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let psi = [v[0] / n, v[1] / n, v[2] / n, v[3] / n];
        // rho_0[r][s] = sum_j psi[r + 2j] psi[s + 2j]
        let mut rho = [[0.0; 2]; 2];
        for (rr, row) in rho.iter_mut().enumerate() {
            for (ss, cell) in row.iter_mut().enumerate() {
                *cell = (0..2).map(|j| psi[rr + 2 * j] * psi[ss + 2 * j]).sum();
            }
        }
        let purity: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| rho[a][b] * rho[b][a]).sum();
        assert!((linear_entropy(&psi).unwrap() - (1.0 - purity)).abs() < 1e-12);
    }
}

#[test]
fn entangling_power_matches_gate_then_entropy() {
    let mut r = rng(13);
    for _ in 0..100 {
        let b: f64 = r.random_range(0.0..1.0);
        let theta = r.random_range(-3.2..3.2);
        let d: f64 = std::f64::consts::FRAC_1_SQRT_2;
        let prod = ProductStateReal::from_b(b, d).unwrap();
        for (axis, l) in [(TwoQubitAxis::ZY, Letter::Z), (TwoQubitAxis::XY, Letter::X)] {
            let mut s = RealStatevector::from_amplitudes(prod.amplitudes().to_vec()).unwrap();
            s.apply_two_pauli_rotation(axis, 0, 1, theta).unwrap();
            let a = s.amplitudes();
            let e = linear_entropy(&[a[0], a[1], a[2], a[3]]).unwrap();
            assert!((e - entangling_power(axis, b, theta)).abs() < 1e-10, "{l:?} b={b} theta={theta}");
            // Dense check of the gate itself.
            let dense = rotation_matrix(&PauliString::pair(2, 0, l, 1, Letter::Y), theta)
                * DVector::from_iterator(4, prod.amplitudes().iter().map(|&x| Complex64::new(x, 0.0)));
            assert!(max_dev_complex(&dense, a) < 1e-12);
        }
    }
}

#[test]
fn zero_hamiltonian_first_step_is_trivial() {
    let h = IsingHamiltonian::zero(3);
    let cf = first_step_closed_form(&h, 0.1, &AnsatzSpec::reduced_zy(0, true)).unwrap();
    assert!(cf.a.iter().chain(&cf.b).all(|&v| v == 0.0));
}
