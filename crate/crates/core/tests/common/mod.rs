//! Dense-matrix oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qite_core::pauli::{Letter, PauliString};
use qite_core::problem::IsingHamiltonian;
use qite_core::RealStatevector;

pub type CMat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn letter_element(l: Letter, r: u64, c: u64) -> Complex64 {
    let z = Complex64::new(0.0, 0.0);
    match l {
        Letter::I => if r == c { Complex64::new(1.0, 0.0) } else { z },
        Letter::X => if r != c { Complex64::new(1.0, 0.0) } else { z },
        Letter::Z => match (r, c) {
            (0, 0) => Complex64::new(1.0, 0.0),
            (1, 1) => Complex64::new(-1.0, 0.0),
            _ => z,
        },
        Letter::Y => match (r, c) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => z,
        },
    }
}

/// Full `2^N x 2^N` matrix; qubit `q` is bit `q` of the basis index.
pub fn pauli_matrix(p: &PauliString) -> CMat {
    let n = p.num_qubits();
    let dim = 1usize << n;
    CMat::from_fn(dim, dim, |r, c| {
        (0..n).fold(Complex64::new(1.0, 0.0), |acc, q| {
            acc * letter_element(p.letter(q), (r >> q & 1) as u64, (c >> q & 1) as u64)
        })
    })
}

/// `exp(-i theta/2 P)`.
pub fn rotation_matrix(p: &PauliString, theta: f64) -> CMat {
    let dim = 1usize << p.num_qubits();
    let (s, c) = (0.5 * theta).sin_cos();
    CMat::identity(dim, dim) * Complex64::new(c, 0.0) - pauli_matrix(p) * Complex64::new(0.0, s)
}

pub fn hamiltonian_matrix(h: &IsingHamiltonian) -> CMat {
    let dim = 1usize << h.num_qubits();
    CMat::from_fn(dim, dim, |r, c| if r == c { Complex64::new(h.energy_of(r as u64), 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn to_complex(state: &RealStatevector) -> DVector<Complex64> {
    DVector::from_iterator(state.len(), state.amplitudes().iter().map(|&a| Complex64::new(a, 0.0)))
}

/// `<psi|M|psi>`.
pub fn expect(m: &CMat, psi: &DVector<Complex64>) -> Complex64 {
    (psi.adjoint() * m * psi)[(0, 0)]
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> RealStatevector {
    let amps: Vec<f64> = (0..1usize << n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut s = RealStatevector::from_amplitudes(amps).unwrap();
    s.normalize();
    s
}

pub fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    let letters: Vec<Letter> = (0..n)
        .map(|_| [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.random_range(0..4)])
        .collect();
    PauliString::from_letters(&letters)
}

pub fn random_odd_y(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let p = random_pauli(n, rng);
        if p.has_odd_y() {
            return p;
        }
    }
}

pub fn random_even_y(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let p = random_pauli(n, rng);
        if !p.has_odd_y() {
            return p;
        }
    }
}

/// Dense couplings with coefficients in `[-scale, scale]` and a random offset.
pub fn random_hamiltonian(n: usize, scale: f64, rng: &mut impl Rng) -> IsingHamiltonian {
    let linear = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
    let mut quad = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.7) {
                quad.insert((a, b), rng.random_range(-scale..scale));
            }
        }
    }
    IsingHamiltonian::new(n, linear, quad, rng.random_range(-scale..scale)).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Largest deviation of a complex vector from a real one (real part and imaginary part).
pub fn max_dev_complex(dense: &DVector<Complex64>, real: &[f64]) -> f64 {
    dense.iter().zip(real).fold(0.0, |m, (z, r)| m.max((z.re - r).abs()).max(z.im.abs()))
}

/// Dense `S_IJ = Re <s_I s_J>` and `b_I = Im <s_I H> / sqrt(c)` with
/// `c = 1 - 2 dtau (<H> - offset)`.
pub fn dense_system(
    gens: &[PauliString],
    h: &IsingHamiltonian,
    psi: &RealStatevector,
    dtau: f64,
) -> (DMatrix<f64>, DVector<f64>, f64) {
    let v = to_complex(psi);
    let hm = hamiltonian_matrix(h);
    // s_I psi and s_I^dag psi = s_I psi (Hermitian) are formed once.
    let cols: Vec<DVector<Complex64>> = gens.iter().map(|g| pauli_matrix(g) * &v).collect();
    let hv = &hm * &v;
    let m = gens.len();
    let s = DMatrix::from_fn(m, m, |i, j| cols[i].dotc(&cols[j]).re);
    let energy = expect(&hm, &v).re;
    let c = 1.0 - 2.0 * dtau * (energy - h.constant_offset());
    let b = DVector::from_fn(m, |i, _| cols[i].dotc(&hv).im / c.sqrt());
    (s, b, c)
}

/// One randomized case over every kernel and the `S`/`b` assembly; returns
/// the largest elementwise deviation from the dense oracles.
pub fn dense_oracle_case(seed: u64) -> f64 {
    use qite_core::qite::{
        assemble_linear_system, build_operator_basis, AnsatzSpec, AnsatzVariant, BranchProductState, ExpectationSource,
        LayerOrder, OffsetMode,
    };
    use qite_core::TwoQubitAxis;

    let mut r = rng(seed);
    let n = r.random_range(2..=6usize);
    let psi = random_state(n, &mut r);
    let v = to_complex(&psi);
    let mut worst = 0.0f64;
    let mut track = |dense: DVector<Complex64>, got: &RealStatevector| worst = worst.max(max_dev_complex(&dense, got.amplitudes()));

    let q = r.random_range(0..n);
    let th = r.random_range(-4.0..4.0);
    let mut s = psi.clone();
    s.apply_ry(q, th).unwrap();
    track(rotation_matrix(&PauliString::single(n, q, Letter::Y), th) * &v, &s);

    let c = r.random_range(0..n);
    let t = (c + r.random_range(1..n)) % n;
    for (axis, l) in [(TwoQubitAxis::ZY, Letter::Z), (TwoQubitAxis::XY, Letter::X)] {
        let mut s = psi.clone();
        s.apply_two_pauli_rotation(axis, c, t, th).unwrap();
        track(rotation_matrix(&PauliString::pair(n, c, l, t, Letter::Y), th) * &v, &s);
    }

    let p = random_odd_y(n, &mut r);
    let mut s = psi.clone();
    s.apply_pauli_rotation(&p, th).unwrap();
    track(rotation_matrix(&p, th) * &v, &s);

    let angles: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
    let mut s = psi.clone();
    s.apply_ry_layer(&angles).unwrap();
    let mut dense = v.clone();
    for (q, &a) in angles.iter().enumerate() {
        dense = rotation_matrix(&PauliString::single(n, q, Letter::Y), a) * dense;
    }
    track(dense, &s);

    let targets: Vec<(usize, f64)> = (0..n).filter(|&i| i != c).map(|i| (i, r.random_range(-3.0..3.0))).collect();
    let mut s = psi.clone();
    s.apply_zy_fan(c, &targets).unwrap();
    let mut dense = v.clone();
    for &(i, a) in &targets {
        dense = rotation_matrix(&PauliString::pair(n, c, Letter::Z, i, Letter::Y), a) * dense;
    }
    track(dense, &s);

    for _ in 0..4 {
        let p = random_even_y(n, &mut r);
        let e = expect(&pauli_matrix(&p), &v);
        worst = worst.max((psi.expectation_pauli(&p).unwrap() - e.re).abs()).max(e.im.abs());
    }

    let h = random_hamiltonian(n, 1.0, &mut r);
    let energy = psi.expectation_diagonal(&h).unwrap();
    worst = worst.max((energy - expect(&hamiltonian_matrix(&h), &v).re).abs());
    let dtau = r.random_range(0.001..0.05);
    let k = r.random_range(0..n);
    let specs = [
        AnsatzSpec::new(AnsatzVariant::P1A),
        AnsatzSpec::new(AnsatzVariant::P2AFull),
        AnsatzSpec::reduced_zy(k, false),
        AnsatzSpec::new(AnsatzVariant::ReducedXY).with_pivot(k),
        AnsatzSpec::new(AnsatzVariant::UniversalReduced),
    ];
    for spec in &specs {
        let basis = build_operator_basis(spec, n).unwrap();
        let sys = assemble_linear_system(&psi, energy, &h, &basis, dtau, OffsetMode::Subtract).unwrap();
        let (s_d, b_d, c_d) = dense_system(basis.generators(), &h, &psi, dtau);
        worst = worst.max((&sys.s - s_d).amax()).max((&sys.b - b_d).amax()).max((sys.c - c_d).abs());
    }

    // Branch-product expectations against the dense state they describe.
    let alpha: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
    let beta: Vec<f64> = (0..n).map(|i| if i == k { 0.0 } else { r.random_range(-2.0..2.0) }).collect();
    for order in [LayerOrder::RyFirst, LayerOrder::TwoQubitFirst] {
        let bp = BranchProductState::single_pivot_layer(k, Letter::Z, &alpha, &beta, order).unwrap();
        let sv = bp.to_statevector().unwrap();
        for _ in 0..4 {
            let p = random_even_y(n, &mut r);
            worst = worst.max((bp.expectation(&p).unwrap() - sv.expectation_pauli(&p).unwrap()).abs());
        }
    }
    worst
}
