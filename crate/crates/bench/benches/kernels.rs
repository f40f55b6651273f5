use alexcover::arrangements::{aomoto_complex, beta_tau, deleted_b3};
use alexcover::covers::{alexander_poly, cover_homology, limit_scan};
use alexcover::exactlin::{cyclic_substitute, minor_gcd_laurent, rank_mod_p, snf_int};
use alexcover::laurent::{mahler_measure, DEFAULT_TOLERANCE};
use alexcover::LaurentPolyZ;
use alexcover_bench::{laurent_matrix, orbifold_complex};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn smith_form(c: &mut Criterion) {
    let m = laurent_matrix(3);
    let mut group = c.benchmark_group("snf_of_substituted");
    for n in [8, 16, 32] {
        let big = cyclic_substitute(&m, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &big, |b, big| b.iter(|| snf_int(black_box(big))));
    }
    group.finish();
    let big = cyclic_substitute(&m, 32);
    c.bench_function("rank_mod_5_n32", |b| b.iter(|| rank_mod_p(black_box(&big), 5)));
}

fn fitting_gcd(c: &mut Criterion) {
    let m = laurent_matrix(4);
    c.bench_function("minor_gcd_4x4", |b| b.iter(|| minor_gcd_laurent(black_box(&m))));
    let cx = orbifold_complex(2, 0, &[3]);
    c.bench_function("alexander_genus2", |b| b.iter(|| alexander_poly(black_box(&cx), 1)));
}

fn covers(c: &mut Criterion) {
    let cx = orbifold_complex(1, 0, &[2, 3]);
    c.bench_function("cover_homology_n20", |b| b.iter(|| cover_homology(black_box(&cx), 20, &[0, 2, 3, 5], true)));
    let cx = orbifold_complex(0, 2, &[2, 3]);
    let mut group = c.benchmark_group("limit_scan");
    group.sample_size(10);
    group.bench_function("orbifold_0_2_23_n40", |b| b.iter(|| limit_scan(black_box(&cx), 1, 40, 0)));
    group.finish();
}

fn mahler(c: &mut Criterion) {
    let lehmer = LaurentPolyZ::from_i64s(0, &[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
    c.bench_function("mahler_lehmer", |b| b.iter(|| mahler_measure(black_box(&lehmer), DEFAULT_TOLERANCE)));
}

fn aomoto(c: &mut Criterion) {
    let arr = deleted_b3();
    let nu = [1, -1, 0, -1, 1, 2, -2];
    c.bench_function("aomoto_deleted_b3", |b| {
        b.iter(|| beta_tau(&aomoto_complex(black_box(&arr), &nu).unwrap(), &[0, 2, 3, 5]))
    });
}

criterion_group!(benches, smith_form, fitting_gcd, covers, mahler, aomoto);
criterion_main!(benches);
