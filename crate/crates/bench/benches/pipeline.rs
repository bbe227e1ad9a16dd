use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hypercause::causality::{actual_cause, all_minimal_causes, Config};
use hypercause::checker::{find_counterexample, Bounds};
use hypercause::oracle::brute_force_causes;
use hypercause::satcore::candidate_cause;
use hypercause::AnnotationPolicy;
use hypercause_bench::{random_instances, running, Workload};

fn workloads() -> Vec<Workload> {
    let mut all = vec![running()];
    all.extend(random_instances([1, 2, 3], 8));
    all
}

fn explain(c: &mut Criterion) {
    let mut g = c.benchmark_group("explain");
    for w in workloads() {
        let cand = candidate_cause(&w.machine, &w.formula, &w.cex, AnnotationPolicy::Canonical).unwrap();
        g.bench_with_input(BenchmarkId::new("candidates", &w.name), &w, |b, w| {
            b.iter(|| candidate_cause(&w.machine, &w.formula, &w.cex, AnnotationPolicy::Canonical).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("first-cause", &w.name), &w, |b, w| {
            b.iter(|| actual_cause(&w.machine, &w.formula, &w.cex, &cand, Config::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("all-causes", &w.name), &w, |b, w| {
            b.iter(|| all_minimal_causes(&w.machine, &w.formula, &w.cex, &cand, Config::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("oracle", &w.name), &w, |b, w| {
            b.iter(|| brute_force_causes(&w.machine, &w.formula, &w.cex).unwrap())
        });
    }
    g.finish();
}

fn check(c: &mut Criterion) {
    let w = running();
    c.bench_function("check/running-example", |b| {
        b.iter(|| find_counterexample(&w.machine, &w.formula, Bounds::default()).unwrap())
    });
}

criterion_group!(benches, explain, check);
criterion_main!(benches);
