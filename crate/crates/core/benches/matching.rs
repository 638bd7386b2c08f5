use std::hint::black_box;
use std::path::PathBuf;

use archmatch::exec::Execution;
use archmatch::matcher::{match_requirement, MatchOptions, Requirement};
use archmatch::repo::{build_index, load_units, Options};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

#[allow(dead_code)]
#[path = "../tests/common/gen.rs"]
mod gen;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn options(execution: Execution) -> Options {
    Options { execution, ..Options::default() }
}

fn index(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_index");
    group.sample_size(10);
    for size in [100, 500] {
        let synth = gen::synthetic(size as u64, size, 30, false);
        let (catalog, model) = load_units(PathBuf::from("bench.txt"), synth.units, Options::default()).unwrap();
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, size), &size, |b, _| {
                b.iter(|| build_index(black_box(&catalog), &model, options(mode)).unwrap())
            });
        }
    }
    group.finish();
}

fn query(c: &mut Criterion) {
    let mut group = c.benchmark_group("match_requirement");
    for size in [100, 500] {
        let synth = gen::synthetic(size as u64, size, 30, false);
        let (catalog, model) = load_units(PathBuf::from("bench.txt"), synth.units, Options::default()).unwrap();
        let index = build_index(&catalog, &model, Options::default()).unwrap();
        let target = &synth.components[size / 2];
        let req = Requirement::new(model.interfaces[&target.interface].clone(), Some(target.protocol.clone()));
        for (label, mode) in MODES {
            // Without the prefilter every entry goes through signature and protocol checks.
            let opts = MatchOptions { prefilter: false, execution: mode, ..MatchOptions::default() };
            group.bench_with_input(BenchmarkId::new(label, size), &size, |b, _| {
                b.iter(|| match_requirement(black_box(&req), &index, opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, index, query);
criterion_main!(benches);
