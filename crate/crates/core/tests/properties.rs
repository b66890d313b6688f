mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use qite_core::analysis::{average_entangling_power, entangling_power, haar_entangling_power};
use qite_core::qite::{
    assemble_linear_system, build_operator_basis, AnsatzSpec, AnsatzVariant, OffsetMode, SymbolicSystem,
};
use qite_core::{RealStatevector, TwoQubitAxis};

fn random_spec(n: usize, pick: usize, k: usize) -> AnsatzSpec {
    match pick % 5 {
        0 => AnsatzSpec::new(AnsatzVariant::P1A),
        1 => AnsatzSpec::new(AnsatzVariant::P2AFull),
        2 => AnsatzSpec::reduced_zy(k % n, pick.is_multiple_of(2)),
        3 => AnsatzSpec::new(AnsatzVariant::ReducedXY).with_pivot(k % n),
        _ => AnsatzSpec::new(AnsatzVariant::UniversalReduced),
    }
}

#[test]
fn norm_survives_ten_thousand_gates() {
    let mut r = rng(1);
    let n = 14;
    let mut s = RealStatevector::plus(n).unwrap();
    for _ in 0..10_000 {
        let th = r.random_range(-3.2..3.2);
        match r.random_range(0..3) {
            0 => s.apply_ry(r.random_range(0..n), th).unwrap(),
            1 => {
                let c = r.random_range(0..n);
                let t = (c + r.random_range(1..n)) % n;
                let axis = if r.random_bool(0.5) { TwoQubitAxis::ZY } else { TwoQubitAxis::XY };
                s.apply_two_pauli_rotation(axis, c, t, th).unwrap();
            }
            _ => s.apply_pauli_rotation(&random_odd_y(n, &mut r), th).unwrap(),
        }
    }
    assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn haar_average_is_axis_independent() {
    for theta in [0.4, 1.2, std::f64::consts::FRAC_PI_2] {
        let zy = haar_entangling_power(TwoQubitAxis::ZY, theta, 100_000, 17);
        let xy = haar_entangling_power(TwoQubitAxis::XY, theta, 100_000, 18);
        let sigma = (zy.std_error.powi(2) + xy.std_error.powi(2)).sqrt();
        assert!((zy.mean - xy.mean).abs() < 3.0 * sigma, "theta {theta}: {zy:?} vs {xy:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), n in 1usize..12, gates in 1usize..200) {
        let mut r = rng(seed);
        let mut s = random_state(n, &mut r);
        for _ in 0..gates {
            let th = r.random_range(-7.0..7.0);
            if n == 1 || r.random_bool(0.4) {
                s.apply_ry(r.random_range(0..n), th).unwrap();
            } else {
                s.apply_pauli_rotation(&random_odd_y(n, &mut r), th).unwrap();
            }
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_y_expectations_vanish(seed in any::<u64>(), n in 1usize..10) {
        let mut r = rng(seed);
        let s = random_state(n, &mut r);
        prop_assert_eq!(s.expectation_pauli(&random_odd_y(n, &mut r)).unwrap(), 0.0);
    }

    #[test]
    fn s_matrix_structure(seed in any::<u64>(), n in 2usize..8, pick in 0usize..5, k in 0usize..8) {
        let mut r = rng(seed);
        let h = random_hamiltonian(n, 1.0, &mut r);
        let spec = random_spec(n, pick, k);
        let basis = build_operator_basis(&spec, n).unwrap();
        let sym = SymbolicSystem::new(&basis, &h).unwrap();
        prop_assert!(sym.strings().iter().all(|p| !p.has_odd_y()));
        let psi = random_state(n, &mut r);
        let e = psi.expectation_diagonal(&h).unwrap();
        let sys = assemble_linear_system(&psi, e, &h, &basis, 0.01, OffsetMode::Subtract).unwrap();
        let m = basis.len();
        for i in 0..m {
            prop_assert!((sys.s[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..m {
                prop_assert!((sys.s[(i, j)] - sys.s[(j, i)]).abs() < 1e-12);
            }
        }
        prop_assert!(sys.c > 0.0);
        // On |+>^N the single-pivot ZY basis gives exactly the identity.
        if !matches!(spec.variant, AnsatzVariant::P1A | AnsatzVariant::ReducedZY) {
            return Ok(());
        }
        let plus = RealStatevector::plus(n).unwrap();
        let e0 = plus.expectation_diagonal(&h).unwrap();
        let sys0 = assemble_linear_system(&plus, e0, &h, &basis, 0.01, OffsetMode::Subtract).unwrap();
        for i in 0..m {
            for j in 0..m {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((sys0.s[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn entangling_power_shape(b in 0.0..1.0f64, theta in -10.0..10.0f64) {
        for axis in [TwoQubitAxis::ZY, TwoQubitAxis::XY] {
            let e = entangling_power(axis, b, theta);
            prop_assert!(e >= 0.0);
            prop_assert!((e - entangling_power(axis, b, theta + std::f64::consts::PI)).abs() < 1e-12);
            prop_assert_eq!(entangling_power(axis, b, 0.0), 0.0);
        }
    }

    #[test]
    fn quadrature_averages(theta in -3.2..3.2f64) {
        let s2 = theta.sin().powi(2);
        prop_assert!((average_entangling_power(TwoQubitAxis::XY, theta, 10_000) - 7.0 / 30.0 * s2).abs() < 1e-6);
        prop_assert!((average_entangling_power(TwoQubitAxis::ZY, theta, 10_000) - 8.0 / 30.0 * s2).abs() < 1e-6);
    }
}
