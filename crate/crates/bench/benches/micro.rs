use criterion::{criterion_group, criterion_main, Criterion};
use frobring_bench::{basic_poly, f2, loc_z, sample_ratfuncs};
use frobring_core::bounds::reduce_mod_image;
use frobring_core::hasse::hasse_derivative;
use frobring_core::independence::wronskian_certificate;
use frobring_core::ratfun::RatFunc;
use frobring_core::Poly;
use std::hint::black_box;

fn bench_hasse(c: &mut Criterion) {
    let xs = sample_ratfuncs(7, 16, 6);
    c.bench_function("hasse_derivative_eps4_deg6", |b| {
        b.iter(|| {
            for x in &xs {
                black_box(hasse_derivative(black_box(x), 4));
            }
        })
    });
}

fn bench_wronskian(c: &mut Criterion) {
    let fam = sample_ratfuncs(11, 4, 4);
    c.bench_function("wronskian_certificate_n4_s2", |b| {
        b.iter(|| black_box(wronskian_certificate(black_box(&fam), 2).unwrap()))
    });
}

fn bench_reduce(c: &mut Criterion) {
    let f = basic_poly();
    let loc = loc_z();
    let spec = f2();
    let u = RatFunc::new(Poly::one(&spec), Poly::z(&spec).pow(12)).unwrap();
    c.bench_function("reduce_mod_image_pole12", |b| {
        b.iter(|| black_box(reduce_mod_image(black_box(&f), black_box(&u), &loc).unwrap()))
    });
}

criterion_group!(benches, bench_hasse, bench_wronskian, bench_reduce);
criterion_main!(benches);
