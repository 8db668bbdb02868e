//! Serial vs data-parallel sweep over a small grid.

use criterion::{criterion_group, criterion_main, Criterion};
use tia_core::geometry::MeshResolution;
use tia_core::loads::Bvp;
use tia_core::sweep::{run_sweep_with, ResolutionSetting, SweepConfig};

fn grid() -> SweepConfig {
    SweepConfig {
        amplitudes: vec![10.0, 20.0],
        shifts: vec![0.0, 0.5],
        frequencies: vec![1.0, 2.0],
        n_values: vec![4],
        thicknesses: vec![40.0],
        layers: 4,
        resolution: ResolutionSetting::Fixed(MeshResolution::new(24, 2, 8)),
        bvps: vec![Bvp::Pipe],
        ..SweepConfig::default()
    }
}

fn sweep(c: &mut Criterion) {
    let cfg = grid();
    let mut g = c.benchmark_group("sweep_8_points");
    g.sample_size(10);
    g.bench_function("serial", |b| b.iter(|| run_sweep_with(&cfg, 1, |_, _| {}).unwrap()));
    if tia_core::par::parallel_enabled() {
        g.bench_function("parallel", |b| b.iter(|| run_sweep_with(&cfg, 0, |_, _| {}).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
