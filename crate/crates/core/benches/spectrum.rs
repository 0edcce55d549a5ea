use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use quartic_core::characteristic::char_det;
use quartic_core::coefficients::{Harmonic, PeriodicCoefficient};
use quartic_core::spectrum::solve_range;
use quartic_core::{Execution, SearchPlan};

fn coefficients() -> (PeriodicCoefficient, PeriodicCoefficient) {
    let p = PeriodicCoefficient::new(0.0, vec![Harmonic { k: 1, a: 0.0, b: 1.0 }, Harmonic { k: 2, a: 0.3, b: 0.0 }]).unwrap();
    let q = PeriodicCoefficient::new(0.0, vec![Harmonic { k: 1, a: 1.0, b: 0.0 }, Harmonic { k: 3, a: 0.0, b: 0.2 }]).unwrap();
    (p, q)
}

fn solve(c: &mut Criterion) {
    let (p, q) = coefficients();
    let mut group = c.benchmark_group("solve_range_0_20");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let plan = SearchPlan::new(0, 20).with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &plan, |b, plan| {
            b.iter(|| solve_range(&p, &q, plan).unwrap())
        });
    }
    group.finish();
}

fn single_det(c: &mut Criterion) {
    let (p, q) = coefficients();
    let lam = Complex64::new((std::f64::consts::PI * 20.3f64).powi(4), 0.0);
    c.bench_function("char_det_z64", |b| b.iter(|| char_det(&p, &q, lam, 1e-12).unwrap()));
}

criterion_group!(benches, solve, single_det);
criterion_main!(benches);
