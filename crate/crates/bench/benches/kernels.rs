use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ecvx_core::conj::{c_conjugate, c_infconv};
use ecvx_core::duality::{constraint_epigraphs, set_b, v_dual_tilde};
use ecvx_core::episet::{eprime_hull, indicator_epigraph, set_compare, WGridConfig};
use ecvx_core::hull::eco_hull;
use ecvx_core::{fixtures, LoadedProblem};

fn load(name: &str) -> LoadedProblem {
    fixtures::problem_file(name).unwrap().load().unwrap()
}

fn conjugates(c: &mut Criterion) {
    let lp = load("eccq_not_necessary");
    let fc = c_conjugate(&lp.problem.f);
    let hc = c_conjugate(&lp.problem.constraints[0].1);
    c.bench_function("c_conjugate/build", |b| b.iter(|| c_conjugate(black_box(&lp.problem.f))));
    c.bench_function("c_conjugate/eval", |b| b.iter(|| fc.eval(black_box(0.75), black_box(-0.5), black_box(1.0))));
    c.bench_function("c_infconv/build", |b| b.iter(|| c_infconv(black_box(&fc), black_box(&hc))));
    let sum = c_infconv(&fc, &hc);
    c.bench_function("c_infconv/eval", |b| b.iter(|| sum.eval(black_box(0.75), black_box(-0.5), black_box(1.0))));
}

fn hulls(c: &mut Criterion) {
    let lp = load("set_b");
    for (i, (_, h)) in lp.problem.constraints.iter().enumerate().take(2) {
        c.bench_with_input(BenchmarkId::new("eco_hull", i), h, |b, h| b.iter(|| eco_hull(h).unwrap()));
    }
}

fn set_comparison(c: &mut Criterion) {
    let lp = load("set_b");
    let k = constraint_epigraphs(&lp.problem, &lp.lambda);
    let hull = eprime_hull(&k).unwrap();
    let eb = indicator_epigraph(set_b(&lp.problem, &lp.lambda)).unwrap();
    let mut group = c.benchmark_group("set_compare");
    group.sample_size(10);
    for n in [16, 32] {
        let cfg = WGridConfig { n, ..Default::default() };
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| b.iter(|| set_compare(&hull, &eb, cfg)));
    }
    group.finish();
}

fn duals(c: &mut Criterion) {
    let mut group = c.benchmark_group("v_dual_tilde");
    group.sample_size(10);
    for name in ["weak_gap", "eccq_not_necessary"] {
        let lp = load(name);
        group.bench_function(name, |b| b.iter(|| v_dual_tilde(&lp.problem, &lp.lambda, &lp.config)));
    }
    group.finish();
}

criterion_group!(benches, conjugates, hulls, set_comparison, duals);
criterion_main!(benches);
