use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use plslab::count::{count_cycles, count_octahedra};
use plslab::cycle::CycleKind;
use plslab::par;
use plslab::pls::{cyclic, restrict_random};
use plslab::quadrangle::{check_quadrangle, QcKind};
use plslab::so3::{build_net, verify_density};

fn modes(c: &mut Criterion, name: &str, mut f: impl FnMut()) {
    let mut g = c.benchmark_group(name);
    for (label, seq) in [("parallel", false), ("sequential", true)] {
        par::force_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(label), |b| b.iter(&mut f));
    }
    par::force_sequential(false);
    g.finish();
}

fn kernels(c: &mut Criterion) {
    let z16 = cyclic(16);
    modes(c, "octahedra_z16", || {
        black_box(count_octahedra(&z16));
    });

    let sparse = restrict_random(&cyclic(24), 0.5, 1);
    modes(c, "cycles_r3_restricted_z24", || {
        black_box(count_cycles(&sparse, CycleKind::Label, 3).unwrap());
    });

    let z12 = cyclic(12);
    modes(c, "quadrangle_z12", || {
        black_box(check_quadrangle(&z12, QcKind::Label));
    });

    let net = build_net(0.8, 3, 10_000).unwrap();
    modes(c, "so3_density", || {
        black_box(verify_density(&net, 0.4));
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = kernels
}
criterion_main!(benches);
