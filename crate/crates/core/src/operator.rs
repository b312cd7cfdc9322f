//! Operator space with the Hilbert–Schmidt inner product `(A|B) = Tr(A† B)`.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use faer::{c64, Mat, MatRef};

use crate::hamiltonian::HamiltonianMatrix;
use crate::linalg::{abs2, cis, hermitian_eigen};
use crate::{Error, Result};

/// A `d x d` complex matrix viewed as a vector in operator space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorVector {
    entries: Mat<c64>,
}

impl OperatorVector {
    pub fn new(entries: Mat<c64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        if entries.nrows() == 0 {
            return Err(Error::invalid("operator dimension must be positive"));
        }
        for j in 0..entries.ncols() {
            for i in 0..entries.nrows() {
                let z = entries[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::invalid("operator entries must be finite"));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: MatRef<'_, f64>) -> Result<Self> {
        Self::new(crate::linalg::to_complex(entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Result<Self> {
        Self::new(Mat::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: Mat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: Mat::from_fn(dim, dim, |i, j| c64::new(if i == j { 1.0 } else { 0.0 }, 0.0)) }
    }

    pub(crate) fn from_mat_unchecked(entries: Mat<c64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    pub fn into_entries(self) -> Mat<c64> {
        self.entries
    }

    /// Hilbert–Schmidt norm `sqrt(Tr(O† O))`.
    pub fn norm(&self) -> f64 {
        self.entries.norm_l2()
    }

    pub fn scaled(&self, factor: c64) -> Self {
        Self { entries: Mat::from_fn(self.dim(), self.dim(), |i, j| self.entries[(i, j)] * factor) }
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint().to_owned() }
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                let diff = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(abs2(diff));
            }
        }
        libm::sqrt(worst)
    }
}

impl Add for &OperatorVector {
    type Output = OperatorVector;

    fn add(self, rhs: &OperatorVector) -> OperatorVector {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        OperatorVector { entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &OperatorVector {
    type Output = OperatorVector;

    fn sub(self, rhs: &OperatorVector) -> OperatorVector {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        OperatorVector { entries: &self.entries - &rhs.entries }
    }
}

impl Mul<&OperatorVector> for &OperatorVector {
    type Output = OperatorVector;

    /// Matrix product.
    fn mul(self, rhs: &OperatorVector) -> OperatorVector {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        OperatorVector { entries: &self.entries * &rhs.entries }
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Tr(a† b)`.
pub fn hs_inner(a: &OperatorVector, b: &OperatorVector) -> Result<c64> {
    check_dims(a.dim(), b.dim())?;
    Ok(inner_unchecked(a.entries(), b.entries()))
}

pub(crate) fn inner_unchecked(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc
}

/// `[H, O] = HO - OH`.
pub fn liouvillian_apply(h: &HamiltonianMatrix, o: &OperatorVector) -> Result<OperatorVector> {
    check_dims(h.dim(), o.dim())?;
    let ho = h.entries() * o.entries();
    let oh = o.entries() * h.entries();
    Ok(OperatorVector { entries: ho - oh })
}

/// Eigen-decomposition `H = V diag(E) V†` with ascending `E`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<c64>,
}

impl SpectralDecomposition {
    pub fn new(h: &HamiltonianMatrix) -> Result<Self> {
        let (eigenvalues, eigenvectors) = hermitian_eigen(h.entries())?;
        Ok(Self { eigenvalues, eigenvectors })
    }

    /// Builds a decomposition from known eigenpairs. `eigenvectors` must be
    /// unitary; eigenvalues are reordered to ascending order.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: Mat<c64>) -> Result<Self> {
        let d = eigenvalues.len();
        check_dims(d, eigenvectors.nrows())?;
        check_dims(d, eigenvectors.ncols())?;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let values = order.iter().map(|&k| eigenvalues[k]).collect();
        let vectors = Mat::from_fn(d, d, |i, j| eigenvectors[(i, order[j])]);
        Ok(Self { eigenvalues: values, eigenvectors: vectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigenvectors.as_ref()
    }

    pub fn spectral_range(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `V† O V`: matrix elements `<E_m|O|E_n>`.
    pub fn to_eigenbasis(&self, o: &OperatorVector) -> Result<Mat<c64>> {
        check_dims(self.dim(), o.dim())?;
        Ok(self.eigenvectors.adjoint() * o.entries() * &self.eigenvectors)
    }

    /// `V M V†`, inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, m: MatRef<'_, c64>) -> Result<OperatorVector> {
        check_dims(self.dim(), m.nrows())?;
        Ok(OperatorVector { entries: &self.eigenvectors * m * self.eigenvectors.adjoint() })
    }

    /// `H = V diag(E) V†`.
    pub fn reconstruct(&self) -> Mat<c64> {
        let d = self.dim();
        let scaled = Mat::from_fn(d, d, |i, j| self.eigenvectors[(i, j)] * self.eigenvalues[j]);
        scaled * self.eigenvectors.adjoint()
    }

    /// Transition frequency `E_m - E_n`.
    #[inline]
    pub fn frequency(&self, m: usize, n: usize) -> f64 {
        self.eigenvalues[m] - self.eigenvalues[n]
    }

    /// Evolves eigenbasis matrix elements in place: entry `(m, n)` picks up
    /// `exp(-i (E_m - E_n) t)`.
    pub(crate) fn evolve_eigenbasis(&self, m: &mut Mat<c64>, t: f64) {
        let d = self.dim();
        for col in 0..d {
            for row in 0..d {
                m[(row, col)] *= cis(-self.frequency(row, col) * t);
            }
        }
    }
}

/// `O(t) = exp(-iHt) O exp(+iHt)`, computed in the eigenbasis of `H`.
pub fn evolve_operator(spec: &SpectralDecomposition, o: &OperatorVector, t: f64) -> Result<OperatorVector> {
    if !t.is_finite() {
        return Err(Error::invalid("time must be finite"));
    }
    let mut m = spec.to_eigenbasis(o)?;
    spec.evolve_eigenbasis(&mut m, t);
    spec.from_eigenbasis(m.as_ref())
}

/// `G(t) = (O|O(t))`.
pub fn autocorrelation(spec: &SpectralDecomposition, o: &OperatorVector, t: f64) -> Result<c64> {
    if !t.is_finite() {
        return Err(Error::invalid("time must be finite"));
    }
    let m = spec.to_eigenbasis(o)?;
    Ok(autocorrelation_from_eigenbasis(spec, m.as_ref(), t))
}

/// `G(t) = sum_{mn} |O_mn|^2 exp(-i (E_m - E_n) t)` for eigenbasis elements `O_mn`.
pub(crate) fn autocorrelation_from_eigenbasis(spec: &SpectralDecomposition, m: MatRef<'_, c64>, t: f64) -> c64 {
    let d = spec.dim();
    let mut acc = c64::new(0.0, 0.0);
    for col in 0..d {
        for row in 0..d {
            acc += cis(-spec.frequency(row, col) * t) * abs2(m[(row, col)]);
        }
    }
    acc
}
