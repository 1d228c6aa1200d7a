use criterion::{criterion_group, criterion_main, Criterion};
use spdc_core::*;

fn bench_ensemble_rate(c: &mut Criterion) {
    let bundle = Scenario::new(ScenarioKind::ThreeCrystal);
    c.bench_function("three_crystal_analytic_run", |b| {
        b.iter(|| bundle.run().unwrap())
    });
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut reg = VacuumRegistry::new();
    let i0 = reg.register("i0").unwrap();
    let s1 = reg.register("s1").unwrap();
    let s2 = reg.register("s2").unwrap();
    let reg = reg.seal();
    let cfg = CrystalConfig::new(0.1);
    let (sig1, _) = spdc_emit(&cfg, s1, i0, "bbo1", &reg).unwrap();
    let (sig2, _) = spdc_emit(&cfg, s2, i0, "bbo2", &reg).unwrap();
    let (out, _) = combine_beam_splitter(&sig1, &apply_phase(&sig2, 0.7), 0.5).unwrap();
    c.bench_function("monte_carlo_rate_10k_trials", |b| {
        b.iter(|| monte_carlo_rate(&out, &reg, 42, 10_000).unwrap())
    });
}

fn bench_overlap(c: &mut Criterion) {
    let a = HermiteGaussMode::new(1, 0, 100.0, 0.702).unwrap();
    let b_mode = HermiteGaussMode::new(1, 0, 100.0, 0.702)
        .unwrap()
        .with_center([50.0, 0.0]);
    c.bench_function("hermite_gauss_overlap_quadrature", |b| {
        b.iter(|| overlap(&a, &b_mode).unwrap())
    });
}

fn bench_far_field(c: &mut Criterion) {
    let mode = HermiteGaussMode::new(1, 0, 100.0, 0.702).unwrap();
    let profile = TransverseProfile::sample_mode(&mode, 600.0, 256);
    c.bench_function("far_field_256x256", |b| {
        b.iter(|| far_field(&profile).unwrap())
    });
}

criterion_group!(
    benches,
    bench_ensemble_rate,
    bench_monte_carlo,
    bench_overlap,
    bench_far_field
);
criterion_main!(benches);
