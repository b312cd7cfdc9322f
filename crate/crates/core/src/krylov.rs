//! Lanczos over operator space, Krylov amplitudes and Krylov complexity.
//!
//! [`lanczos_with_spectrum`] runs the recursion in the eigenbasis of `H`,
//! where the Liouvillian is diagonal: `(L O)_mn = (E_m - E_n) O_mn`. Entries
//! sharing a transition frequency are collapsed into one coordinate (their
//! Krylov components stay proportional to the starting operator), and the
//! phases of the starting operator factor out of the recursion, so the
//! vectors that are iterated and reorthogonalized are real and of length
//! equal to the number of distinct frequencies. Basis operators are mapped
//! back to matrices on demand.
//!
//! [`lanczos_dense`] is the textbook variant on `d x d` matrices using
//! commutators; it costs `O(d^3)` per step and exists for cross-checks.

use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Col, Mat, MatRef, Par};

use crate::hamiltonian::HamiltonianMatrix;
use crate::linalg::{abs2, cabs, cis, tridiagonal_eigen};
use crate::operator::{evolve_operator, inner_unchecked, liouvillian_apply, OperatorVector, SpectralDecomposition};
use crate::{Error, Result};

/// Default breakdown tolerance, relative to `||L K_0||`.
pub const DEFAULT_LANCZOS_TOL: f64 = 1e-8;

/// Transition frequencies closer than this (relative to the largest one) are
/// treated as equal.
const FREQUENCY_MERGE_TOL: f64 = 1e-12;

/// Eigenbasis entries below this fraction of the largest one are dropped.
const WEIGHT_FLOOR: f64 = 1e-15;

/// Second Gram–Schmidt pass threshold on the norm ratio.
const REORTH_RATIO: f64 = core::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy)]
struct Member {
    /// Column-major index `row + col * d` into the eigenbasis matrix.
    index: usize,
    cluster: usize,
    /// `O_i / ||O_cluster||`.
    factor: c64,
}

#[derive(Debug, Clone)]
enum Storage {
    Spectral {
        eigenvectors: Mat<c64>,
        /// Rows: frequency clusters, columns: Krylov index.
        coords: Mat<f64>,
        members: Vec<Member>,
    },
    Dense(Vec<Mat<c64>>),
}

/// Orthonormal Krylov basis `K_0, ..., K_{D_K - 1}`.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    dim: usize,
    len: usize,
    storage: Storage,
}

impl KrylovBasis {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Hilbert-space dimension `d` of the operators.
    pub fn operator_dim(&self) -> usize {
        self.dim
    }

    /// `K_n` in the eigenbasis of `H` (for dense runs, the computational basis).
    pub fn eigenbasis_entries(&self, n: usize) -> Option<Mat<c64>> {
        if n >= self.len {
            return None;
        }
        match &self.storage {
            Storage::Spectral { coords, members, .. } => {
                let d = self.dim;
                let mut m = Mat::<c64>::zeros(d, d);
                for mem in members {
                    m[(mem.index % d, mem.index / d)] = mem.factor * coords[(mem.cluster, n)];
                }
                Some(m)
            }
            Storage::Dense(ops) => Some(ops[n].clone()),
        }
    }

    /// `K_n` as a matrix in the computational basis.
    pub fn operator(&self, n: usize) -> Option<OperatorVector> {
        let m = self.eigenbasis_entries(n)?;
        match &self.storage {
            Storage::Spectral { eigenvectors, .. } => {
                Some(OperatorVector::from_mat_unchecked(eigenvectors * m * eigenvectors.adjoint()))
            }
            Storage::Dense(_) => Some(OperatorVector::from_mat_unchecked(m)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = OperatorVector> + '_ {
        (0..self.len).filter_map(move |n| self.operator(n))
    }
}

/// Outcome of a Lanczos run.
#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// `b_1, ..., b_{D_K - 1}`.
    pub b: Vec<f64>,
    /// Diagonal `(K_n|L|K_n)`; zero up to round-off for Hermitian `O`.
    pub a: Vec<f64>,
    /// `||O||` of the starting operator.
    pub operator_norm: f64,
    /// `||L O|| / ||O||`, the scale of the breakdown test.
    pub lk0_norm: f64,
    /// Stopped at `max_steps` before breakdown.
    pub truncated: bool,
    pub basis: KrylovBasis,
}

impl LanczosResult {
    pub fn krylov_dim(&self) -> usize {
        self.a.len()
    }

    /// `D_K x D_K` Liouvillian in the Krylov basis.
    pub fn tridiagonal(&self) -> Mat<f64> {
        let n = self.krylov_dim();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.a[i]
            } else if i + 1 == j {
                self.b[i]
            } else if j + 1 == i {
                self.b[j]
            } else {
                0.0
            }
        })
    }

    pub fn tridiagonal_spectrum(&self) -> Result<TridiagonalSpectrum> {
        let (eigenvalues, eigenvectors) = tridiagonal_eigen(&self.a, &self.b)?;
        Ok(TridiagonalSpectrum { eigenvalues, eigenvectors })
    }
}

/// Eigenpairs `T = W diag(lambda) W^T` of the Krylov tridiagonal.
#[derive(Debug, Clone)]
pub struct TridiagonalSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat<f64>,
}

impl TridiagonalSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

fn validate(o: &OperatorVector, tol: f64, max_steps: usize) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::invalid("Lanczos tolerance must lie in (0, 1e-4]"));
    }
    if max_steps == 0 {
        return Err(Error::invalid("max_steps must be at least 1"));
    }
    let norm = o.norm();
    if norm == 0.0 {
        return Err(Error::invalid("starting operator is zero"));
    }
    Ok(norm)
}

/// Lanczos on the operator `o` under `[h, .]`.
pub fn lanczos(h: &HamiltonianMatrix, o: &OperatorVector, tol: f64, max_steps: usize) -> Result<LanczosResult> {
    let spec = SpectralDecomposition::new(h)?;
    lanczos_with_spectrum(&spec, o, tol, max_steps)
}

/// [`lanczos`] reusing an existing spectral decomposition of `H`.
pub fn lanczos_with_spectrum(
    spec: &SpectralDecomposition,
    o: &OperatorVector,
    tol: f64,
    max_steps: usize,
) -> Result<LanczosResult> {
    let operator_norm = validate(o, tol, max_steps)?;
    let d = spec.dim();
    let w = spec.to_eigenbasis(o)?;

    let mut largest = 0.0f64;
    let mut max_freq = 0.0f64;
    for col in 0..d {
        for row in 0..d {
            largest = largest.max(cabs(w[(row, col)]));
            max_freq = max_freq.max(spec.frequency(row, col).abs());
        }
    }
    let mut entries: Vec<(f64, usize)> = Vec::new();
    for col in 0..d {
        for row in 0..d {
            if cabs(w[(row, col)]) > WEIGHT_FLOOR * largest {
                entries.push((spec.frequency(row, col), row + col * d));
            }
        }
    }
    entries.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    // group equal frequencies
    let merge = FREQUENCY_MERGE_TOL * max_freq;
    let mut omega: Vec<f64> = Vec::new();
    let mut weight2: Vec<f64> = Vec::new();
    let mut cluster_of: Vec<usize> = Vec::with_capacity(entries.len());
    let mut prev = f64::NEG_INFINITY;
    for &(f, idx) in &entries {
        if omega.is_empty() || f - prev > merge {
            omega.push(0.0);
            weight2.push(0.0);
        }
        let c = omega.len() - 1;
        let p = abs2(w[(idx % d, idx / d)]);
        omega[c] += p * f;
        weight2[c] += p;
        cluster_of.push(c);
        prev = f;
    }
    let weight: Vec<f64> = weight2.iter().map(|v| libm::sqrt(*v)).collect();
    for (om, w2) in omega.iter_mut().zip(&weight2) {
        *om /= w2;
    }
    let members: Vec<Member> = entries
        .iter()
        .zip(&cluster_of)
        .map(|(&(_, index), &cluster)| Member { index, cluster, factor: w[(index % d, index / d)] / weight[cluster] })
        .collect();

    let start_norm = libm::sqrt(weight2.iter().sum::<f64>());
    let start: Vec<f64> = weight.iter().map(|v| v / start_norm).collect();
    let run = real_lanczos(&omega, &start, tol, max_steps);

    Ok(LanczosResult {
        b: run.b,
        a: run.a,
        operator_norm,
        lk0_norm: run.lk0_norm,
        truncated: run.truncated,
        basis: KrylovBasis {
            dim: d,
            len: run.coords.ncols(),
            storage: Storage::Spectral { eigenvectors: spec.eigenvectors().to_owned(), coords: run.coords, members },
        },
    })
}

struct RealRun {
    a: Vec<f64>,
    b: Vec<f64>,
    lk0_norm: f64,
    truncated: bool,
    coords: Mat<f64>,
}

/// Lanczos for `diag(omega)` from the unit vector `start`.
fn real_lanczos(omega: &[f64], start: &[f64], tol: f64, max_steps: usize) -> RealRun {
    let n = omega.len();
    let cap = n.min(max_steps.saturating_add(1));
    let mut q = Mat::<f64>::zeros(n, cap);
    for i in 0..n {
        q[(i, 0)] = start[i];
    }
    let lk0_norm = libm::sqrt(omega.iter().zip(start).map(|(w, s)| (w * s) * (w * s)).sum::<f64>());
    let mut a = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut truncated = false;
    let mut v = Col::<f64>::zeros(n);
    let mut k = 0;
    loop {
        for i in 0..n {
            v[i] = omega[i] * q[(i, k)];
        }
        if k > 0 {
            let beta = b[k - 1];
            for i in 0..n {
                v[i] -= beta * q[(i, k - 1)];
            }
        }
        let mut alpha = 0.0;
        for i in 0..n {
            alpha += q[(i, k)] * v[i];
        }
        for i in 0..n {
            v[i] -= alpha * q[(i, k)];
        }
        a.push(alpha);
        if lk0_norm == 0.0 {
            break;
        }

        // full reorthogonalization, second pass when the first one removed a
        // large component
        let basis = q.as_ref().subcols(0, k + 1);
        let before = v.norm_l2();
        project_out(basis, &mut v);
        if v.norm_l2() < REORTH_RATIO * before {
            project_out(basis, &mut v);
        }

        let beta = v.norm_l2();
        if beta < tol * lk0_norm || k + 1 >= n {
            break;
        }
        if b.len() == max_steps {
            truncated = true;
            break;
        }
        b.push(beta);
        k += 1;
        for i in 0..n {
            q[(i, k)] = v[i] / beta;
        }
    }
    let coords = q.subcols(0, k + 1).to_owned();
    RealRun { a, b, lk0_norm, truncated, coords }
}

fn project_out(basis: MatRef<'_, f64>, v: &mut Col<f64>) {
    let mut c = Col::<f64>::zeros(basis.ncols());
    matmul(c.as_mat_mut(), Accum::Replace, basis.transpose(), v.as_mat(), 1.0, Par::Seq);
    matmul(v.as_mat_mut(), Accum::Add, basis, c.as_mat(), -1.0, Par::Seq);
}

/// Lanczos directly on `d x d` matrices with commutators and two full
/// Gram–Schmidt passes per step.
pub fn lanczos_dense(h: &HamiltonianMatrix, o: &OperatorVector, tol: f64, max_steps: usize) -> Result<LanczosResult> {
    let operator_norm = validate(o, tol, max_steps)?;
    if h.dim() != o.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: o.dim() });
    }
    let d = o.dim();
    let cap = (d * d).min(max_steps.saturating_add(1));
    let mut basis: Vec<Mat<c64>> = Vec::with_capacity(cap);
    basis.push(o.scaled(c64::new(1.0 / operator_norm, 0.0)).into_entries());
    let lk0_norm = liouvillian_apply(h, &OperatorVector::from_mat_unchecked(basis[0].clone()))?.norm();
    let mut a = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut truncated = false;
    loop {
        let k = basis.len() - 1;
        let mut v = liouvillian_apply(h, &OperatorVector::from_mat_unchecked(basis[k].clone()))?.into_entries();
        let alpha = inner_unchecked(basis[k].as_ref(), v.as_ref()).re;
        a.push(alpha);
        if lk0_norm == 0.0 {
            break;
        }
        for _ in 0..2 {
            for kn in &basis {
                let c = inner_unchecked(kn.as_ref(), v.as_ref());
                v -= kn * faer::Scale(c);
            }
        }
        let beta = v.norm_l2();
        if beta < tol * lk0_norm || basis.len() >= d * d {
            break;
        }
        if b.len() == max_steps {
            truncated = true;
            break;
        }
        b.push(beta);
        basis.push(v * faer::Scale(c64::new(1.0 / beta, 0.0)));
    }
    Ok(LanczosResult {
        b,
        a,
        operator_norm,
        lk0_norm,
        truncated,
        basis: KrylovBasis { dim: d, len: basis.len(), storage: Storage::Dense(basis) },
    })
}

/// `phi_n(t) = (K_n|O(t)) / ||O||` on a time grid; row `t`, column `n`.
#[derive(Debug, Clone)]
pub struct KrylovAmplitudes {
    pub times: Vec<f64>,
    pub phi: Mat<c64>,
}

impl KrylovAmplitudes {
    pub fn krylov_dim(&self) -> usize {
        self.phi.ncols()
    }

    /// `sum_n |phi_n(t)|^2` for time index `ti`.
    pub fn total_weight(&self, ti: usize) -> f64 {
        (0..self.phi.ncols()).map(|n| abs2(self.phi[(ti, n)])).sum()
    }
}

/// `phi(t) = exp(-iTt) e_0` through the eigendecomposition of the tridiagonal.
pub fn krylov_evolve(result: &LanczosResult, times: &[f64]) -> Result<KrylovAmplitudes> {
    krylov_evolve_with(&result.tridiagonal_spectrum()?, times)
}

/// [`krylov_evolve`] with a precomputed tridiagonal spectrum.
pub fn krylov_evolve_with(spectrum: &TridiagonalSpectrum, times: &[f64]) -> Result<KrylovAmplitudes> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times must be finite"));
    }
    let k = spectrum.dim();
    let nt = times.len();
    let w = spectrum.eigenvectors.as_ref();
    let mut p_re = Mat::<f64>::zeros(k, nt);
    let mut p_im = Mat::<f64>::zeros(k, nt);
    for (j, &t) in times.iter().enumerate() {
        for a in 0..k {
            let (s, c) = libm::sincos(spectrum.eigenvalues[a] * t);
            p_re[(a, j)] = w[(0, a)] * c;
            p_im[(a, j)] = -w[(0, a)] * s;
        }
    }
    let re = w * &p_re;
    let im = w * &p_im;
    let phi = Mat::from_fn(nt, k, |ti, n| c64::new(re[(n, ti)], im[(n, ti)]));
    Ok(KrylovAmplitudes { times: times.to_vec(), phi })
}

/// Amplitudes from explicit projections `(K_n|O(t)) / ||O||`, independent of
/// the tridiagonal. `spec` and `o` must be the inputs of the Lanczos run.
pub fn krylov_project(
    result: &LanczosResult,
    spec: &SpectralDecomposition,
    o: &OperatorVector,
    times: &[f64],
) -> Result<KrylovAmplitudes> {
    let kdim = result.krylov_dim();
    let nt = times.len();
    let norm = o.norm();
    let mut phi = Mat::<c64>::zeros(nt, kdim);
    match &result.basis.storage {
        Storage::Spectral { coords, members, .. } => {
            let d = spec.dim();
            let w = spec.to_eigenbasis(o)?;
            let nc = coords.nrows();
            for (ti, &t) in times.iter().enumerate() {
                let mut g_re = Col::<f64>::zeros(nc);
                let mut g_im = Col::<f64>::zeros(nc);
                for m in members {
                    let (row, col) = (m.index % d, m.index / d);
                    let z = m.factor.conj() * w[(row, col)] * cis(-spec.frequency(row, col) * t);
                    g_re[m.cluster] += z.re;
                    g_im[m.cluster] += z.im;
                }
                let re = coords.transpose() * &g_re;
                let im = coords.transpose() * &g_im;
                for n in 0..kdim {
                    phi[(ti, n)] = c64::new(re[n], im[n]) / norm;
                }
            }
        }
        Storage::Dense(ops) => {
            for (ti, &t) in times.iter().enumerate() {
                let ot = evolve_operator(spec, o, t)?;
                for (n, kn) in ops.iter().enumerate() {
                    phi[(ti, n)] = inner_unchecked(kn.as_ref(), ot.entries()) / norm;
                }
            }
        }
    }
    Ok(KrylovAmplitudes { times: times.to_vec(), phi })
}

/// `C_K(t) = sum_n n |phi_n(t)|^2`.
pub fn k_complexity(amps: &KrylovAmplitudes) -> Vec<f64> {
    (0..amps.times.len()).map(|ti| (0..amps.phi.ncols()).map(|n| n as f64 * abs2(amps.phi[(ti, n)])).sum()).collect()
}

/// Complexity operator `diag(0, 1, ..., D_K - 1)` on the Krylov subspace.
pub fn complexity_matrix(krylov_dim: usize) -> Mat<f64> {
    Mat::from_fn(krylov_dim, krylov_dim, |i, j| if i == j { i as f64 } else { 0.0 })
}

/// Positions `0..D_K` as a vector, the diagonal of [`complexity_matrix`].
pub(crate) fn complexity_diagonal(krylov_dim: usize) -> Vec<f64> {
    (0..krylov_dim).map(|i| i as f64).collect()
}

/// Largest `|(K_m|K_n) - delta_mn|` over the basis, in the representation the
/// basis is stored in.
pub fn orthonormality_defect(basis: &KrylovBasis) -> f64 {
    match &basis.storage {
        Storage::Spectral { coords, .. } => {
            let g = coords.transpose() * coords;
            max_identity_defect(g.as_ref())
        }
        Storage::Dense(ops) => {
            let n = ops.len();
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..=i {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max(cabs(inner_unchecked(ops[i].as_ref(), ops[j].as_ref()) - target));
                }
            }
            worst
        }
    }
}

fn max_identity_defect(g: MatRef<'_, f64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}
