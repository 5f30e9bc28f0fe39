//! Benchmark bodies for the hot kernels of `expgap-core`.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use expgap_core::corpus;
use expgap_core::protocols::{nwz_amplify, AmplificationParams};
use expgap_core::simulator::{expm_taylor, run_circuit, QuantumCircuit, Statevector};
use expgap_core::spectral::{det_sparse, min_eigenvalue, path_min_eigenvalue, structured_matrix};
use expgap_core::BlockKind;

pub fn benchmarks(c: &mut Criterion) {
    determinant(c);
    spectra(c);
    taylor(c);
    statevector(c);
    amplification(c);
}

fn determinant(c: &mut Criterion) {
    let m = corpus::machine("unary_counter").unwrap();
    let a = m.augmented_adjacency("#11").unwrap();
    c.bench_function("det_sparse/unary_counter", |b| b.iter(|| det_sparse(black_box(&a)).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_eigenvalue");
    for ell in [32usize, 128] {
        let dense = structured_matrix(BlockKind::Path, ell).unwrap().matrix.to_f64();
        group.bench_with_input(BenchmarkId::new("dense", ell), &dense, |b, d| b.iter(|| min_eigenvalue(d).unwrap()));
        group.bench_with_input(BenchmarkId::new("tridiagonal", ell), &ell, |b, &l| {
            b.iter(|| path_min_eigenvalue(l).unwrap())
        });
    }
    group.finish();
}

fn taylor(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm_taylor");
    let oracle = structured_matrix(BlockKind::Path, 64).unwrap().matrix.to_oracle();
    for order in [8usize, 24] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &k| {
            b.iter(|| expm_taylor(&oracle, PI / 4.0, k).unwrap())
        });
    }
    group.finish();
}

fn statevector(c: &mut Criterion) {
    let circuit = QuantumCircuit::random(12, 200, 1).unwrap();
    let psi = Statevector::zero(12).unwrap();
    c.bench_function("run_circuit/12q_200g", |b| b.iter(|| run_circuit(&circuit, black_box(&psi)).unwrap()));
}

fn amplification(c: &mut Criterion) {
    let v = corpus::verifier("rotate_yes").unwrap();
    let params = AmplificationParams::for_verifier(&v, 3, 4).unwrap();
    let psi = Statevector::basis(1, 1).unwrap();
    c.bench_function("nwz_amplify/rotate_yes", |b| b.iter(|| nwz_amplify(&v, &params, black_box(&psi)).unwrap()));
}
