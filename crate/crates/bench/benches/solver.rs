use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cutmatch::certify::brute_force_sparsest_cut;
use cutmatch::game::{play_game, GameConfig, WalkMode};
use cutmatch::graph::DiGraph;
use cutmatch::maxflow::max_flow;
use cutmatch::rational::rat;
use cutmatch_bench::{complete_round_network, random_instance};

fn bench_max_flow(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_flow/complete_round");
    for n in [16usize, 32, 64] {
        let net = complete_round_network(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| black_box(max_flow(net).value))
        });
    }
    group.finish();
}

fn bench_game(c: &mut Criterion) {
    let mut group = c.benchmark_group("play_game/complete");
    group.sample_size(10);
    for n in [16usize, 32] {
        let graph = DiGraph::complete_bidirected(n);
        group.bench_with_input(BenchmarkId::new("exact", n), &graph, |b, g| {
            b.iter(|| play_game(g, &GameConfig::new(rat(1, 1), 7)).unwrap().matchings.len())
        });
        group.bench_with_input(BenchmarkId::new("projected", n), &graph, |b, g| {
            let mut config = GameConfig::new(rat(1, 1), 7);
            config.mode = WalkMode::Projected;
            config.round_cap = Some(16);
            b.iter(|| play_game(g, &config).unwrap().matchings.len())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let graph = random_instance(12, 5);
    c.bench_function("brute_force_oracle/n12", |b| {
        b.iter(|| brute_force_sparsest_cut(black_box(&graph)).unwrap().expansion)
    });
}

criterion_group!(benches, bench_max_flow, bench_game, bench_oracle);
criterion_main!(benches);
