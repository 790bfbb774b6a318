use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use strlab_core::resonance::{compute_resonant_sets, GridMode, GridSpec2, Phase, SignPair};
use strlab_core::solver::{evolve_profile, profile_rhs};
use strlab_core::spectral::{pseudo_product, pseudo_product_direct, Field, Grid, Symbol2};
use strlab_core::{DispersionRelation, DispersionSystem, EvolutionProblem, QuadraticTerm};

fn smooth(grid: Grid) -> Field {
    Field::from_frequency(grid, |k| {
        let r = k.norm();
        Complex64::new((-r * r / 8.0).exp(), 0.1 * k.x)
    })
}

fn schrodinger_problem(n: usize) -> EvolutionProblem {
    let sys = DispersionSystem::scalar(DispersionRelation::schrodinger(1).unwrap());
    EvolutionProblem::new(sys, Grid::new_1d(n, TAU).unwrap())
        .unwrap()
        .with_term(QuadraticTerm::power(1, SignPair::PP))
        .unwrap()
        .with_dealias(true)
}

fn pseudo_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("pseudo_product");
    for n in [64usize, 256] {
        let grid = Grid::new_1d(n, TAU).unwrap();
        let (f, g) = (smooth(grid), smooth(grid).conj());
        let one = Symbol2::one();
        group.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
            b.iter(|| pseudo_product_direct(black_box(&one), &f, &g).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fast", n), &n, |b, _| {
            b.iter(|| pseudo_product(black_box(&one), &f, &g).unwrap())
        });
    }
    group.finish();
}

fn resonant_sets(c: &mut Criterion) {
    let phase = Phase::scalar(DispersionRelation::schrodinger(1).unwrap(), SignPair::PP);
    let mut group = c.benchmark_group("resonant_sets");
    for (label, mode) in [("curve", GridMode::Curve), ("band", GridMode::Band)] {
        let grid = GridSpec2::square_1d(1.0, 0.01, mode).unwrap();
        group.bench_function(label, |b| b.iter(|| compute_resonant_sets(black_box(&phase), &grid, 1e-4).unwrap()));
    }
    group.finish();
}

fn stepping(c: &mut Criterion) {
    let p = schrodinger_problem(256);
    let u0 = [smooth(*p.grid()).scale(Complex64::new(1e-2, 0.0))];
    c.bench_function("profile_rhs_n256", |b| b.iter(|| profile_rhs(&p, black_box(0.3), &u0).unwrap()));
    c.bench_function("rk4_10_steps_n256", |b| {
        b.iter(|| evolve_profile(&p, black_box(&u0), 0.1, 0.01).unwrap())
    });
}

criterion_group!(benches, pseudo_products, resonant_sets, stepping);
criterion_main!(benches);
