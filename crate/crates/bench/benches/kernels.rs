use criterion::{black_box, criterion_group, criterion_main, Criterion};
use pi2_core::specfn::airy::airy_ai;
use pi2_core::specfn::elliptic::{elliptic_e, elliptic_k};
use pi2_core::specfn::quad::{integrate, QuadratureSpec};
use pi2_core::specfn::theta::Theta;

fn bench_elliptic(c: &mut Criterion) {
    c.bench_function("elliptic_k(0.8)", |b| {
        b.iter(|| elliptic_k(black_box(0.8)).unwrap())
    });
    c.bench_function("elliptic_e(0.8)", |b| {
        b.iter(|| elliptic_e(black_box(0.8)).unwrap())
    });
}

fn bench_theta(c: &mut Criterion) {
    let th = Theta::new(0.7).unwrap();
    c.bench_function("theta_value", |b| b.iter(|| th.value(black_box(0.37))));
    c.bench_function("theta_log_deriv2", |b| {
        b.iter(|| th.log_deriv2(black_box(0.37)))
    });
}

fn bench_airy(c: &mut Criterion) {
    c.bench_function("airy_series", |b| b.iter(|| airy_ai(black_box(2.5))));
    c.bench_function("airy_asymptotic", |b| b.iter(|| airy_ai(black_box(9.0))));
}

fn bench_quadrature(c: &mut Criterion) {
    let smooth = QuadratureSpec::default();
    c.bench_function("integrate_smooth", |b| {
        b.iter(|| integrate(|x| (x * x).sin(), 0.0, 3.0, black_box(&smooth)).unwrap())
    });
    let singular = QuadratureSpec::default().with_exponents(-0.5, 0.5);
    c.bench_function("integrate_singular_endpoints", |b| {
        b.iter(|| {
            integrate(
                |x| (1.0 - x).sqrt() / x.sqrt(),
                0.0,
                1.0,
                black_box(&singular),
            )
            .unwrap()
        })
    });
}

criterion_group!(kernels, bench_elliptic, bench_theta, bench_airy, bench_quadrature);
criterion_main!(kernels);
