//! Serial against parallel execution for the three fan-out stages.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hurwitz_core::boundary::analyze_boundary;
use hurwitz_core::braid::decompose_components;
use hurwitz_core::corpus;
use hurwitz_core::count::{enumerate_marked, Execution, Options};
use hurwitz_core::portrait::BranchingData;
use hurwitz_core::Partition;

fn profile(parts: &[&[u32]]) -> BranchingData {
    let p: Vec<Partition> = parts.iter().map(|x| Partition::new(x.to_vec()).unwrap()).collect();
    corpus::fully_marked(&p)
}

fn options(exec: Execution) -> Options {
    Options {
        execution: exec,
        ..Options::default()
    }
}

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn enumeration(c: &mut Criterion) {
    let cases = [
        ("d5", profile(&[&[3, 1, 1], &[3, 1, 1], &[3, 1, 1], &[3, 1, 1]])),
        ("d6", profile(&[&[2, 2, 1, 1], &[2, 2, 1, 1], &[3, 1, 1, 1], &[4, 1, 1], &[2, 1, 1, 1, 1]])),
    ];
    let mut group = c.benchmark_group("enumerate_marked");
    group.sample_size(10);
    for (name, data) in &cases {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), data, |b, d| {
                b.iter(|| enumerate_marked(black_box(d), &options(exec)).unwrap())
            });
        }
    }
    group.finish();
}

fn components(c: &mut Criterion) {
    let data = profile(&[&[3, 1, 1], &[3, 1, 1], &[3, 1, 1], &[3, 1, 1]]);
    let set = enumerate_marked(&data, &Options::default()).unwrap();
    let mut group = c.benchmark_group("decompose_components");
    group.sample_size(10);
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| b.iter(|| decompose_components(black_box(&set), exec).unwrap()));
    }
    group.finish();
}

fn boundary(c: &mut Criterion) {
    let data = profile(&[&[2, 2], &[3, 1], &[2, 1, 1], &[2, 1, 1]]);
    let mut group = c.benchmark_group("analyze_boundary");
    group.sample_size(10);
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| b.iter(|| analyze_boundary(black_box(&data), &options(exec)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, enumeration, components, boundary);
criterion_main!(benches);
