//! Grid-level costs: the Poisson preconditioner apply, one extremal descent,
//! and a full branch solve on the default interval resolution.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nehari_core::{
    minimize_mu, solve_branch1, solve_poisson, DescentOpts, DiscreteField, Exponents, GridSpec,
    MuKind,
};

fn bench_descent(c: &mut Criterion) {
    let ex = Exponents::new(1.5, 1.75, 3.0, 1).unwrap();
    let grid = GridSpec::interval(1.0, 256).unwrap();
    let opts = DescentOpts::default();
    let rhs = DiscreteField::first_mode(grid).values().to_vec();

    c.bench_function("poisson_solve_n256", |b| {
        b.iter(|| solve_poisson(grid, black_box(&rhs)).unwrap())
    });
    c.bench_function("minimize_mu_e_minus_n256", |b| {
        b.iter(|| minimize_mu(MuKind::EMinus, black_box(0.1), grid, &ex, &opts).unwrap())
    });
    c.bench_function("solve_branch1_n256", |b| {
        b.iter(|| solve_branch1(black_box(0.1), black_box(5.5), grid, &ex, &opts).unwrap())
    });
}

criterion_group!(benches, bench_descent);
criterion_main!(benches);
