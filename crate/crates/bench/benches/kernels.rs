use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use qite_core::pauli::{Letter, PauliString};
use qite_core::problem::{build_hamiltonian, generate_instance, pivot_ranking, GeneratorConfig};
use qite_core::qite::{qite_step, AnsatzParameters, AnsatzSpec, QiteConfig};
use qite_core::{RealStatevector, TwoQubitAxis};

const N: usize = 20;

fn kernels(c: &mut Criterion) {
    let base = RealStatevector::plus(N).unwrap();
    c.bench_function("ry_n20", |b| {
        b.iter_batched_ref(|| base.clone(), |s| s.apply_ry(7, black_box(0.3)).unwrap(), BatchSize::LargeInput)
    });
    c.bench_function("zy_n20", |b| {
        b.iter_batched_ref(
            || base.clone(),
            |s| s.apply_two_pauli_rotation(TwoQubitAxis::ZY, 3, 11, black_box(0.3)).unwrap(),
            BatchSize::LargeInput,
        )
    });
    let fan: Vec<(usize, f64)> = (1..N).map(|i| (i, 0.01 * i as f64)).collect();
    c.bench_function("zy_fan_n20", |b| {
        b.iter_batched_ref(|| base.clone(), |s| s.apply_zy_fan(0, black_box(&fan)).unwrap(), BatchSize::LargeInput)
    });
    let p = PauliString::pair(N, 2, Letter::X, 9, Letter::Z);
    c.bench_function("expectation_n20", |b| b.iter(|| base.expectation_pauli(black_box(&p)).unwrap()));
}

fn step(c: &mut Criterion) {
    let inst = generate_instance(&GeneratorConfig { unique: false, ..GeneratorConfig::tail_assignment(N, 1) }).unwrap();
    let h = build_hamiltonian(&inst);
    let spec = AnsatzSpec::reduced_zy(pivot_ranking(&inst).order[0], true);
    let cfg = QiteConfig::fixed(1, 0.01);
    let mut g = c.benchmark_group("qite");
    g.sample_size(10);
    g.bench_function("compressed_zy_step_n20", |b| {
        b.iter_batched(
            || (RealStatevector::plus(N).unwrap(), AnsatzParameters::new(2 * N - 1)),
            |(mut s, mut p)| qite_step(&mut s, &h, &spec, &mut p, 0.01, &cfg).unwrap(),
            BatchSize::LargeInput,
        )
    });
    g.finish();
}

criterion_group!(benches, kernels, step);
criterion_main!(benches);
