//! Thin wrappers over the dense kernels in `faer`.

use alloc::vec::Vec;

use faer::diag::{Diag, DiagRef};
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{c64, get_global_parallelism, Mat, MatRef, Side};

use crate::{Error, Result};

#[inline]
pub(crate) fn abs2(z: c64) -> f64 {
    z.re * z.re + z.im * z.im
}

#[inline]
pub(crate) fn cabs(z: c64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `exp(i theta)`
#[inline]
pub(crate) fn cis(theta: f64) -> c64 {
    let (s, c) = libm::sincos(theta);
    c64::new(c, s)
}

#[inline]
pub(crate) fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub(crate) fn to_complex(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| real(m[(i, j)]))
}

pub(crate) fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(cabs(m[(i, j)]));
        }
    }
    out
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence("hermitian eigensolver"))?;
    let s = evd.S();
    let values = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

pub(crate) fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence("symmetric eigensolver"))
}

/// Eigenpairs of the real symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off.len() + 1 == diag.len()`).
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n);
    let mut sub = Vec::with_capacity(n);
    sub.extend_from_slice(off);
    sub.push(0.0);
    let mut s = Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let par = get_global_parallelism();
    let mut buf =
        MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(n, ComputeEigenvectors::Yes, par, Default::default()));
    evd::tridiagonal_self_adjoint_evd(
        DiagRef::from_slice(diag),
        DiagRef::from_slice(&sub),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|_| Error::NoConvergence("tridiagonal eigensolver"))?;
    let values = (0..n).map(|i| s[i]).collect();
    Ok((values, u))
}

pub(crate) fn singular_values(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    m.singular_values().map_err(|_| Error::NoConvergence("singular value decomposition"))
}

/// Haar-distributed orthogonal matrix: QR of `gaussian` with the signs of
/// `diag(R)` folded into `Q`.
pub(crate) fn haar_orthogonal(gaussian: MatRef<'_, f64>) -> Mat<f64> {
    let n = gaussian.nrows();
    let qr = gaussian.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
