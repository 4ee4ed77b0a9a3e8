//! Hot-path benchmarks: one replicate of each pipeline stage at the
//! campaign-default resolution (4096 steps).

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use sigma_skew::*;

const N: usize = 4096;
const DT: f64 = 1.0 / 4096.0;

fn bench_path_generation(c: &mut Criterion) {
    c.bench_function("generate_bm_4096", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            black_box(generate_bm(N, DT, seed).unwrap())
        })
    });
    c.bench_function("abs_bm_process_4096", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            black_box(make_sigma_process(ProcessKind::AbsBm, N, DT, seed, None).unwrap())
        })
    });
}

fn bench_decomposition(c: &mut Criterion) {
    let src = make_sigma_process(ProcessKind::AbsBm, N, DT, 7, None).unwrap();
    c.bench_function("decompose_4096", |b| {
        b.iter(|| black_box(decompose_process(black_box(&src)).unwrap()))
    });
}

fn bench_local_time(c: &mut Criterion) {
    let b0 = generate_bm(N, DT, 11).unwrap();
    let qv = realized_qv(&b0);
    let eps = default_eps(DT, qv.terminal_value());
    c.bench_function("lt_band_4096", |b| {
        b.iter(|| black_box(lt_band(black_box(&b0), black_box(&qv), eps).unwrap()))
    });
    c.bench_function("lt_tanaka_4096", |b| {
        b.iter(|| black_box(lt_tanaka(black_box(&b0))))
    });
}

fn bench_sign_sampling(c: &mut Criterion) {
    let src = make_sigma_process(ProcessKind::AbsBm, N, DT, 13, None).unwrap();
    let dec = decompose_process(&src).unwrap();
    let schedule = AlphaSchedule::constant(0.7).unwrap();
    c.bench_function("sample_signs_4096", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            black_box(sample_z_alpha_schedule(black_box(&dec), &schedule, seed).unwrap())
        })
    });
}

fn bench_full_replicate(c: &mut Criterion) {
    let direct = BuildSpec {
        kind: ProcessKind::AbsBm,
        n_steps: N,
        dt: DT,
        sigma: None,
        schedule: AlphaSchedule::constant(0.7).unwrap(),
        construction: Construction::Direct,
        horizon: 1.0,
    };
    c.bench_function("build_replicate_direct_4096", |b| {
        let mut r = 0u64;
        b.iter(|| {
            r = r.wrapping_add(1);
            black_box(build_replicate(&direct, 1, r).unwrap())
        })
    });
    let time_changed = BuildSpec {
        kind: ProcessKind::ScaledAbs,
        n_steps: N,
        dt: DT,
        sigma: Some(StepFn::constant(2.0).unwrap()),
        schedule: AlphaSchedule::constant(0.7).unwrap(),
        construction: Construction::TimeChanged,
        horizon: 1.0,
    };
    c.bench_function("build_replicate_time_changed_4096", |b| {
        let mut r = 0u64;
        b.iter(|| {
            r = r.wrapping_add(1);
            black_box(build_replicate(&time_changed, 1, r).unwrap())
        })
    });
}

criterion_group!(
    benches,
    bench_path_generation,
    bench_decomposition,
    bench_local_time,
    bench_sign_sampling,
    bench_full_replicate
);
criterion_main!(benches);
