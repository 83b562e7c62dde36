use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dotqip_core::{
    active_subspace, build_hamiltonian, evolve_dephasing, evolve_unitary, teleport_with_measurement, time_steps,
    DephasingSpec, DriveSpec, ExcitonSystemParams, PulseShape, QuantumState, QubitState, SignConvention,
};

fn dynamics(c: &mut Criterion) {
    let system = ExcitonSystemParams::new(3, 0.1, SignConvention::DensityMatrix);
    let h = build_hamiltonian(&system, &DriveSpec::resonant(0.04, PulseShape::Cosine)).unwrap();
    let s0 = QuantumState::basis(active_subspace(3).unwrap(), 0).unwrap();
    let times = time_steps(400.0, 0.5);

    c.bench_function("evolve_unitary_ghz_801", |b| b.iter(|| evolve_unitary(&h, &s0, black_box(&times)).unwrap()));
    let spec = DephasingSpec::rate(0.001);
    c.bench_function("evolve_dephasing_ghz_801", |b| {
        b.iter(|| evolve_dephasing(&h, black_box(&spec), &s0, &times).unwrap())
    });
    let input = QubitState::from_bloch(1.1, 0.3);
    c.bench_function("teleport_with_measurement", |b| {
        b.iter(|| teleport_with_measurement(black_box(&input), None, 7).unwrap())
    });
}

criterion_group!(benches, dynamics);
criterion_main!(benches);
