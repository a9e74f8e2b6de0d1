use std::hint::black_box;

use antitree_core::engine::{pruefer_step, run_trajectory, ShellSampler};
use antitree_core::geometry::zd_shell_counts;
use antitree_core::{GrowthLaw, PotentialDistribution, PrueferState, SolutionPair, StreamKey};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn steps(c: &mut Criterion) {
    let k = 0.75f64.acos();
    c.bench_function("pruefer_step", |b| {
        let mut st = PrueferState::new(0.1, k);
        b.iter(|| {
            st = pruefer_step(&st, black_box(0.05), k);
            st.log_r
        })
    });
    c.bench_function("solution_pair_step", |b| {
        let mut pair = SolutionPair::identity();
        b.iter(|| {
            pair.step(black_box(1.5));
            pair.log_norm_u()
        })
    });
}

fn shells(c: &mut Criterion) {
    let mut g = c.benchmark_group("shell_sample");
    let laws = [("bernoulli", PotentialDistribution::bernoulli()), ("uniform", PotentialDistribution::uniform())];
    for (name, dist) in &laws {
        let sampler = ShellSampler::new(dist, 1.0);
        let eq = dist.effective_quantities(2.0, 1.0).unwrap();
        for s in [10u64, 1_000] {
            g.throughput(Throughput::Elements(s));
            g.bench_with_input(BenchmarkId::new(*name, s), &s, |b, &s| {
                let key = StreamKey::new(1);
                let mut n = 0u64;
                b.iter(|| {
                    n += 1;
                    sampler.sample(key.child(n), n, s, 2.0, Some(&eq)).unwrap().x
                })
            });
        }
    }
    g.finish();
}

fn trajectory(c: &mut Criterion) {
    let dist = PotentialDistribution::bernoulli();
    let law = GrowthLaw::uniform_power(1.5, 1.0).unwrap();
    let mut g = c.benchmark_group("trajectory");
    g.sample_size(20);
    g.throughput(Throughput::Elements(100_000));
    g.bench_function("bernoulli_d1.5_n1e5", |b| {
        b.iter(|| run_trajectory(&dist, &law, 2.0, 1.0, 100_000, StreamKey::new(7), &[]).unwrap().last().log_r)
    });
    g.finish();
}

fn lattice(c: &mut Criterion) {
    c.bench_function("zd_shell_counts_d4_n1e4", |b| b.iter(|| zd_shell_counts(4, black_box(10_000)).unwrap().s_n));
}

criterion_group!(benches, steps, shells, trajectory, lattice);
criterion_main!(benches);
