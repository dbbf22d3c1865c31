//! Sequential against data-parallel evaluation of the hot loops.
//!
//! `seq` runs each workload inside a one-thread pool, `par` on the global pool.
//! Built without the `parallel` feature both arms are plain iterators.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use xideform::almostperiod::verify_shift;
use xideform::deform::DeformedSeries;
use xideform::parallel::par_map_range;
use xideform::selberg::zeta;
use xideform::zerofind::{count_zeros_in, CountOptions, Rect};
use xideform::{PrecisionConfig, Result, ValueWithError};

fn arms() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("seq", one), ("par", all)]
}

fn series_grid(c: &mut Criterion) {
    let series = DeformedSeries::new(&zeta(), -1.0, -0.31, 1e-10, 5_000_000).unwrap();
    let mut g = c.benchmark_group("series_grid_4096");
    g.bench_function("plain_loop", |b| {
        b.iter(|| {
            (0..4096)
                .map(|k| series.eval(Complex64::new(-0.3 + 1e-4 * (k % 64) as f64, 100.0 + 0.01 * k as f64)).0)
                .sum::<Complex64>()
        })
    });
    for (name, pool) in arms() {
        g.bench_function(BenchmarkId::new("par_map", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    par_map_range(4096, |k| {
                        series.eval(Complex64::new(-0.3 + 1e-4 * (k % 64) as f64, 100.0 + 0.01 * k as f64)).0
                    })
                    .into_iter()
                    .sum::<Complex64>()
                })
            })
        });
    }
    g.finish();
}

fn boundary_count(c: &mut Criterion) {
    let series = DeformedSeries::new(&zeta(), -1.0, -0.31, 1e-8, 5_000_000).unwrap();
    let f = |s: Complex64| -> Result<ValueWithError> {
        let (v, e) = series.eval(s);
        Ok(ValueWithError::new(v, e))
    };
    let rect = Rect::new(-0.3, -0.2, 100.0, 110.0).unwrap();
    let mut g = c.benchmark_group("count_zeros");
    g.sample_size(10);
    for (name, pool) in arms() {
        g.bench_function(name, |b| b.iter(|| pool.install(|| count_zeros_in(&f, &rect, &CountOptions::default()).unwrap())));
    }
    g.finish();
}

fn shift_check(c: &mut Criterion) {
    let strip = Rect::new(-0.3, -0.2, 0.0, 5.0).unwrap();
    let prec = PrecisionConfig::double(1e-12);
    let mut g = c.benchmark_group("verify_shift");
    g.sample_size(10);
    for (name, pool) in arms() {
        g.bench_function(name, |b| {
            b.iter(|| pool.install(|| verify_shift(&zeta(), -1.0, &strip, 10.0, 0.5, 1.0, &prec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, series_grid, boundary_count, shift_check);
criterion_main!(benches);
