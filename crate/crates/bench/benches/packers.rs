use std::hint::black_box;

use boxpack::oracles::exact_opt;
use boxpack::{Algorithm, Generator, Objective, Piece};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pack(alg: Algorithm, stream: &[Piece]) {
    let mut packer = alg.build();
    for p in stream {
        black_box(packer.place(p));
    }
}

fn online(c: &mut Criterion) {
    let mut group = c.benchmark_group("online");
    for n in [100usize, 1000] {
        let stream = Generator::LogUniform { lo: -6.0, hi: 6.0 }.generate(n, 1);
        for alg in Algorithm::ALL {
            group.bench_with_input(BenchmarkId::new(alg.as_str(), n), &stream, |b, s| {
                b.iter(|| pack(alg, s))
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_opt");
    let pieces: Vec<Piece> = [(1, 3), (3, 1), (2, 2), (1, 2), (2, 1)]
        .iter()
        .map(|&(w, h)| Piece::ratio((w, 1), (h, 1)).unwrap())
        .collect();
    for objective in [Objective::Perimeter, Objective::Area] {
        group.bench_function(objective.as_str(), |b| {
            b.iter(|| exact_opt(black_box(&pieces), objective, true).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, online, oracle);
criterion_main!(benches);
