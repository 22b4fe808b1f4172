use actnoise::coverage::{uniform_sample, x_urel, UrelParams};
use actnoise::mcar::{calibrate, CalibrationOptions};
use actnoise::noise::NoiseConfig;
use actnoise::synth::{default_scales, run_sweep, Family, MeasureSettings, SynthSpec};
use actnoise::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_x_urel(c: &mut Criterion) {
    let mut group = c.benchmark_group("x_urel_nnr");
    group.sample_size(10);
    for d in [2usize, 25] {
        let data = uniform_sample(2500, d, 1);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, d), &data, |b, data| {
                b.iter(|| x_urel(data, &UrelParams::nnr(2), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let spec = SynthSpec { d: 10, n: 500, reps: 2, scales: default_scales(4), ..SynthSpec::new(Family::GrowingUniform, 3) };
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_sweep(&spec, &MeasureSettings::default(), exec).unwrap()));
    }
    group.finish();
}

fn bench_calibrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("calibrate_ou");
    group.sample_size(10);
    let cfg = NoiseConfig::ornstein_uhlenbeck(0.5, 1);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| calibrate(&cfg, 500, 1, &CalibrationOptions::default(), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_x_urel, bench_sweep, bench_calibrate);
criterion_main!(benches);
