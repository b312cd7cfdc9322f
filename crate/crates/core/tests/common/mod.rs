#![allow(dead_code)]

use krylovlab_core::{c64, HamiltonianMatrix, Mat, MatRef, OperatorVector};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng, d: usize) -> Mat<c64> {
    let mut m = Mat::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            m[(i, j)] = c64::new(normal(rng), normal(rng));
        }
    }
    m
}

/// `(A + A^†)/2` with complex Gaussian `A`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Mat<c64> {
    let a = complex_gaussian(rng, d);
    Mat::from_fn(d, d, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn random_hamiltonian(rng: &mut ChaCha8Rng, d: usize) -> HamiltonianMatrix {
    HamiltonianMatrix::new(random_hermitian(rng, d)).unwrap()
}

pub fn random_observable(rng: &mut ChaCha8Rng, d: usize) -> OperatorVector {
    OperatorVector::new(random_hermitian(rng, d)).unwrap()
}

pub fn max_dev(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm_sqr().sqrt());
        }
    }
    worst
}

fn frobenius(m: MatRef<'_, c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// `exp(A)` by scaling and squaring of a truncated Taylor series.
pub fn expm(a: MatRef<'_, c64>) -> Mat<c64> {
    let d = a.nrows();
    let norm = frobenius(a);
    let mut squarings = 0;
    while norm / f64::powi(2.0, squarings) > 0.25 {
        squarings += 1;
    }
    let scale = c64::new(f64::powi(2.0, -squarings), 0.0);
    let a = Mat::from_fn(d, d, |i, j| a[(i, j)] * scale);
    let mut result = Mat::<c64>::identity(d, d);
    let mut term = Mat::<c64>::identity(d, d);
    for k in 1..=24 {
        let next = &term * &a;
        let inv = c64::new(1.0 / k as f64, 0.0);
        term = Mat::from_fn(d, d, |i, j| next[(i, j)] * inv);
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(-iHt) O exp(iHt)` from two dense exponentials.
pub fn heisenberg_oracle(h: MatRef<'_, c64>, o: MatRef<'_, c64>, t: f64) -> Mat<c64> {
    let d = h.nrows();
    let minus_iht = Mat::from_fn(d, d, |i, j| h[(i, j)] * c64::new(0.0, -t));
    let u = expm(minus_iht.as_ref());
    &u * o * u.adjoint()
}

pub fn pauli(k: usize) -> Mat<c64> {
    use krylovlab_core::paulis::{identity2, pauli_x, pauli_z};
    match k {
        0 => identity2(),
        1 => pauli_z(),
        2 => pauli_x(),
        _ => pauli_x() * pauli_z(),
    }
}
