use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hypam::hyperbolic::kappa;
use hypam::line::classify_line;
use hypam::surface::{membership, MembershipOpts};
use hypam::tropical::{build_theta, hausdorff};
use hypam::{sample, FloorDiagram, Surface};
use hypam_bench::{ball_cloud, lines, matrices, rng};

fn bench_kappa(c: &mut Criterion) {
    let ms = matrices(1000, 1);
    c.bench_function("kappa_1000", |b| b.iter(|| ms.iter().map(|m| kappa(m).unwrap().time()).sum::<f64>()));
}

fn bench_classify(c: &mut Criterion) {
    let ls = lines(100, 2);
    c.bench_function("classify_line_100", |b| b.iter(|| ls.iter().filter(|l| classify_line(l).is_ok()).count()));
}

fn bench_membership(c: &mut Criterion) {
    let s = Surface::hole_quadric();
    let mut r = rng(3);
    let xs: Vec<_> = (0..8).map(|_| sample::hpoint(&mut r, 2.0)).collect();
    let mut g = c.benchmark_group("membership");
    g.sample_size(10);
    for starts in [16, 64] {
        let opts = MembershipOpts { starts, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(starts), &opts, |b, o| {
            b.iter(|| xs.iter().filter(|x| membership(&s, x, o).unwrap().member).count())
        });
    }
    g.finish();
}

fn bench_hausdorff(c: &mut Criterion) {
    let theta = build_theta(&FloorDiagram::figure1()).unwrap();
    let mut g = c.benchmark_group("hausdorff");
    for n in [1_000, 10_000] {
        let a: Vec<[f64; 3]> = theta.sample(n).points.iter().map(|p| p.v).collect();
        let b = ball_cloud(n, 4);
        g.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bch, (a, b)| bch.iter(|| hausdorff(a, b).unwrap()));
    }
    g.finish();
}

criterion_group!(kernels, bench_kappa, bench_classify, bench_membership, bench_hausdorff);
criterion_main!(kernels);
