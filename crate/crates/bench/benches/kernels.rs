//! Timings for the exact kernels: Smith form, modular symbols, class enumeration,
//! congruence exponents and theta towers.

use criterion::{criterion_group, criterion_main, Criterion};
use mulab_bench::{dense_matrix, level_11_triple};
use mulab_core::brandt::{definite_eigenvector, ideal_class_module};
use mulab_core::hecke::congruence_exponent;
use mulab_core::linalg::{kernel_saturated, smith_normal_form};
use mulab_core::modsym::{build_space, newform_packets};
use mulab_core::theta::{theta_tower, AnticyclotomicSetup};
use mulab_core::verify::packet_for_curve;
use std::hint::black_box;

fn linalg(c: &mut Criterion) {
    let a = dense_matrix(8, 7);
    c.bench_function("smith_normal_form 8x8", |b| b.iter(|| smith_normal_form(black_box(&a))));
    let wide = dense_matrix(8, 11).hstack(&dense_matrix(8, 13));
    c.bench_function("kernel_saturated 8x16", |b| b.iter(|| kernel_saturated(black_box(&wide))));
}

fn modular_symbols(c: &mut Criterion) {
    c.bench_function("build_space 143", |b| b.iter(|| build_space(black_box(143)).unwrap()));
    let space = build_space(143).unwrap();
    c.bench_function("newform_packets 143", |b| b.iter(|| newform_packets(&space, 1).unwrap()));
    let f = newform_packets(&build_space(46).unwrap(), 1).unwrap().packets.remove(0);
    c.bench_function("congruence_exponent 46 p=5", |b| b.iter(|| congruence_exponent(&f, 46, 1, 5).unwrap()));
}

fn brandt(c: &mut Criterion) {
    let mut g = c.benchmark_group("ideal_class_module");
    g.sample_size(10);
    for (np, nm) in [(1u64, 37u64), (3, 11), (7, 19), (7, 30)] {
        g.bench_function(format!("({np},{nm})"), |b| b.iter(|| ideal_class_module(np, nm).unwrap()));
    }
    g.finish();
}

fn theta(c: &mut Criterion) {
    let (e, k, p) = level_11_triple();
    let module = ideal_class_module(1, 11).unwrap();
    let f = packet_for_curve(&e).unwrap();
    let g = definite_eigenvector(&module, &f).unwrap();
    let mut grp = c.benchmark_group("theta");
    grp.sample_size(10);
    grp.bench_function("setup 11 D=-3 p=7 n=2", |b| b.iter(|| AnticyclotomicSetup::new(&module, &k, p, 2).unwrap()));
    let setup = AnticyclotomicSetup::new(&module, &k, p, 2).unwrap();
    grp.bench_function("tower 11 D=-3 p=7 n=2", |b| b.iter(|| theta_tower(&setup, &g, e.ap(p)).unwrap()));
    grp.finish();
}

criterion_group!(benches, linalg, modular_symbols, brandt, theta);
criterion_main!(benches);
