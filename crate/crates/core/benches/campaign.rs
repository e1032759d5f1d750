use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iptlab::campaign::{run_verify, CampaignConfig, RunOptions};
use iptlab::exec::Execution;

fn verify_suite(c: &mut Criterion) {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut cfg = CampaignConfig::default_suite();
    cfg.trials = 10;
    cfg.output_path = dir.path().join("bench.jsonl").display().to_string();

    let mut group = c.benchmark_group("verify_default_suite_10_trials");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_verify(&cfg, &RunOptions { exec, ..Default::default() }).expect("campaign runs"))
        });
    }
    group.finish();
}

criterion_group!(benches, verify_suite);
criterion_main!(benches);
