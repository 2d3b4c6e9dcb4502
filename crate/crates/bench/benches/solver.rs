use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rabf_bench::scenario_instance;
use rabf_core::beamformer::{build_subproblem, solve_direct_form, solve_inner_socp};
use rabf_core::socp::solve_conic;

fn bench_subproblem_solve(c: &mut Criterion) {
    let inst = scenario_instance(10.0, 1);
    let sub = build_subproblem(
        &inst.w0,
        &inst.rhat,
        inst.params.gamma,
        &inst.q,
        inst.params.eta,
    )
    .unwrap();
    c.bench_function("conic_subproblem_n10", |b| {
        b.iter(|| black_box(solve_conic(black_box(&sub.problem), 1e-9, 200)))
    });
}

fn bench_full_solve(c: &mut Criterion) {
    let inst = scenario_instance(10.0, 2);
    c.bench_function("inner_socp_n10", |b| {
        b.iter(|| {
            black_box(
                solve_inner_socp(&inst.rhat, &inst.q, &inst.params, black_box(&inst.w0)).unwrap(),
            )
        })
    });
    let den = rabf_core::beamformer::worst_case_denominator(
        &inst.w0,
        &inst.rhat,
        inst.params.gamma,
    )
    .sqrt();
    let w0d: Vec<_> = inst.w0.iter().map(|c| c / den).collect();
    c.bench_function("direct_form_n10", |b| {
        b.iter(|| {
            black_box(solve_direct_form(&inst.rhat, &inst.q, &inst.params, black_box(&w0d)).unwrap())
        })
    });
}

criterion_group!(benches, bench_subproblem_solve, bench_full_solve);
criterion_main!(benches);
