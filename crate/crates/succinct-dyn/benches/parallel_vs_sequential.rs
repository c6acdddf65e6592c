//! Sequential against rayon-parallel execution of the two hot loops: expanding a network's
//! dynamics and evaluating a set-quantified formula.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use succinct_dyn::annet::{expand_dynamics_with, lookup_table_network};
use succinct_dyn::logic::{evaluate_with, strongly_connected};
use succinct_dyn::par::Exec;
use succinct_dyn::Digraph;

fn random_functional(n: usize, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Digraph::from_edges(n, (0..n).map(|u| (u, rng.gen_range(0..n))))
}

fn random_digraph(n: usize, p: f64, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (0..n * n).filter(|_| rng.gen_bool(p)).map(|e| (e / n, e % n)).collect();
    Digraph::from_edges(n, edges)
}

fn expand(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand_dynamics");
    for (name, shape) in [("an_2^10", vec![2u64; 10]), ("an_3^6", vec![3u64; 6])] {
        let n = shape.iter().product::<u64>() as usize;
        let d = lookup_table_network(&random_functional(n, 1), &shape).expect("sizes match");
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), name), &d, |b, d| {
                b.iter(|| expand_dynamics_with(black_box(d), exec, 1 << 20).expect("within bound"))
            });
        }
    }
    let d = lookup_table_network(&random_digraph(64, 0.1, 2), &[4, 4, 4]).expect("sizes match");
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), "nan_4^3"), &d, |b, d| {
            b.iter(|| expand_dynamics_with(black_box(d), exec, 1 << 20).expect("within bound"))
        });
    }
    group.finish();
}

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_strongly_connected");
    group.sample_size(20);
    let f = strongly_connected();
    for n in [8usize, 11] {
        let g = random_digraph(n, 0.3, n as u64);
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &g, |b, g| {
                b.iter(|| evaluate_with(&f, black_box(g), exec).expect("within bound"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, expand, evaluate);
criterion_main!(benches);
