use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use ncc_core::ambient::AmbientEnvironment;
use ncc_core::corpus::{run_corpus, IngestRecord};
use ncc_core::fixtures;
use ncc_core::pipeline::{run, PipelineConfig};
use ncc_core::source::{Origin, Snippet};
use ncc_core::{analyzer, parser};

fn env() -> &'static AmbientEnvironment {
    AmbientEnvironment::builtin()
}

fn bench_parse(c: &mut Criterion) {
    let mut group = c.benchmark_group("parse");
    for (id, src) in fixtures::example_snippets() {
        group.bench_function(id, |b| b.iter(|| parser::parse(std::hint::black_box(src))));
    }
    group.finish();
}

fn bench_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    for (id, src) in fixtures::example_snippets() {
        let snippet = Snippet::inline(id, src);
        group.bench_function(id, |b| {
            b.iter(|| analyzer::check(std::hint::black_box(&snippet), env()))
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let cfg = PipelineConfig::default();
    let mut group = c.benchmark_group("pipeline");
    for (id, src) in fixtures::example_snippets() {
        let snippet = Snippet::inline(id, src);
        group.bench_function(id, |b| {
            b.iter(|| run(std::hint::black_box(&snippet), &cfg, env()))
        });
    }
    group.finish();
}

fn bench_corpus(c: &mut Criterion) {
    let cfg = PipelineConfig::default();
    let env = Arc::new(
        AmbientEnvironment::from_json_str(ncc_core::ambient::BUILTIN_AMBIENT_JSON).unwrap(),
    );
    let records: Vec<IngestRecord> = (0..50)
        .map(|i| IngestRecord {
            id: format!("s{i:02}"),
            origin: Origin::Inline,
            text: match i % 4 {
                0 => fixtures::HTTP_CALLBACK_SNIPPET.to_string(),
                1 => fixtures::STRING_SPLIT_SNIPPET.to_string(),
                2 => "var x = ;\nqq();\n".to_string(),
                _ => "console.log(1);\n".to_string(),
            },
        })
        .collect();
    c.bench_function("corpus/50-snippets", |b| {
        b.iter_batched(
            || records.clone(),
            |records| run_corpus(records, &cfg, 2, &env),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_parse, bench_check, bench_pipeline, bench_corpus);
criterion_main!(benches);
