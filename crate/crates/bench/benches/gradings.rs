use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use glab_bench::{cyclic_elementary, pauli};
use glab_core::hopf::{check_hopf_axioms, module_generators, verify_module_algebra};
use glab_core::lie::generalized_leibniz_check;
use glab_core::{build_field, AbelianGroup, Mode};

fn verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    for n in [3, 4, 5] {
        let gr = cyclic_elementary(7, n);
        group.bench_with_input(BenchmarkId::new("elementary", n), &gr, |b, gr| {
            b.iter(|| gr.verify(Mode::Associative).unwrap())
        });
    }
    let gr = pauli(7, 3);
    group.bench_function("pauli/3", |b| b.iter(|| gr.verify(Mode::Associative).unwrap()));
    group.finish();
}

fn module_algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("module_algebra");
    for (p, n) in [(7, 3), (3, 3), (5, 5)] {
        let gr = cyclic_elementary(p, n);
        let gens = module_generators(gr.group(), gr.field()).unwrap();
        group.bench_function(format!("p{p}/n{n}"), |b| {
            b.iter(|| verify_module_algebra(&gr, Mode::Associative, black_box(&gens)).unwrap())
        });
    }
    group.finish();
}

fn hopf_axioms(c: &mut Criterion) {
    let mut group = c.benchmark_group("hopf_axioms");
    for (p, orders) in [(5, vec![4]), (3, vec![9]), (3, vec![3, 2])] {
        let g = AbelianGroup::new(&orders).unwrap();
        let f = build_field(p, 1).unwrap();
        group.bench_function(format!("p{p}/{orders:?}"), |b| b.iter(|| check_hopf_axioms(&g, &f)));
    }
    group.finish();
}

fn leibniz(c: &mut Criterion) {
    let gr = cyclic_elementary(3, 3);
    c.bench_function("leibniz/p3/n3", |b| {
        b.iter(|| generalized_leibniz_check(&gr, 0, black_box(10)).unwrap())
    });
}

criterion_group!(benches, verify, module_algebra, hopf_axioms, leibniz);
criterion_main!(benches);
