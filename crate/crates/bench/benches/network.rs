use std::hint::black_box;

use butler_core::array::{array_factor, default_angle_grid};
use butler_core::{
    build_butler_4x4, interconnect, ArrayGeometry, ElementModel, Fidelity, Substrate,
};
use criterion::{criterion_group, criterion_main, Criterion};

const F0: f64 = 5.2e9;

fn interconnect_benches(c: &mut Criterion) {
    let sub = Substrate::fr4();
    let ideal = build_butler_4x4(Fidelity::Ideal, F0, &sub).unwrap();
    let circuit = build_butler_4x4(Fidelity::Circuit, F0, &sub).unwrap();
    c.bench_function("butler_ideal_interconnect", |b| {
        b.iter(|| interconnect(black_box(&ideal), black_box(F0)).unwrap())
    });
    c.bench_function("butler_circuit_interconnect", |b| {
        b.iter(|| interconnect(black_box(&circuit), black_box(F0)).unwrap())
    });
}

fn pattern_benches(c: &mut Criterion) {
    let sub = Substrate::fr4();
    let net = build_butler_4x4(Fidelity::Ideal, F0, &sub).unwrap();
    let ex = butler_core::excite(&net, 1, F0).unwrap();
    let geom = ArrayGeometry::half_wavelength(4, F0).unwrap();
    let grid = default_angle_grid();
    c.bench_function("array_factor_3601", |b| {
        b.iter(|| {
            array_factor(
                black_box(&ex.output_amplitudes),
                &geom,
                &grid,
                ElementModel::Cosine,
                true,
                "1R",
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, interconnect_benches, pattern_benches);
criterion_main!(benches);
