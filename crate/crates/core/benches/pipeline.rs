use std::fs;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lidetect_core::attitude::AttitudeLexicon;
use lidetect_core::compat::DefaultPolicy;
use lidetect_core::pipeline::{self, Session};
use lidetect_core::registry::SpdxDb;
use lidetect_core::Execution;

const CUSTOM: &[&str] = &[
    "Do Not Redistribute.",
    "You may not use this software for commercial purposes.",
    "You must give credit to the original author of the work.",
    "You may use and modify this file. You must state changes.",
    "Do not email me about it or make an obvious acknowledgement to me via url links.",
];

/// A project with an MIT root license and `n` vendored components.
fn build_project(root: &Path, n: usize) {
    let db = SpdxDb::builtin();
    fs::write(root.join("LICENSE"), &db.get("MIT").unwrap().canonical_text).unwrap();
    let official: Vec<_> = db.entries().collect();
    for i in 0..n {
        let dir = root.join(format!("vendor/c{i:03}"));
        fs::create_dir_all(&dir).unwrap();
        let text = if i % 3 == 0 {
            official[i % official.len()].canonical_text.clone()
        } else {
            format!("{} Component {i}.", CUSTOM[i % CUSTOM.len()])
        };
        fs::write(dir.join("LICENSE"), text).unwrap();
        fs::write(dir.join("lib.py"), format!("# Licensed under the MIT License.\nx = {i}\n")).unwrap();
    }
}

fn analyze(c: &mut Criterion) {
    let model = pipeline::default_model();
    let lexicon = AttitudeLexicon::default();
    let policy = DefaultPolicy::default();
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for n in [8, 32] {
        let dir = tempfile::tempdir().unwrap();
        build_project(dir.path(), n);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let session = Session::new(SpdxDb::builtin(), exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &n, |b, _| {
                b.iter(|| pipeline::cmd_analyze(dir.path(), &session, &model, &lexicon, &policy).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, analyze);
criterion_main!(benches);
