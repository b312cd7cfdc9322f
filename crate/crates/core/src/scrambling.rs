//! Pauli-basis scrambling diagnostics.
//!
//! Labels are base-4 integers with one digit per site, site 1 most
//! significant. The digit `2s + t` selects `X^s Z^t`, so `0 = I`, `1 = Z`,
//! `2 = X` and `3 = XZ` (with `Y = i XZ`). Inner products here are normalized
//! by the Hilbert-space dimension, which makes the Pauli strings orthonormal.

use alloc::vec;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::linalg::{abs2, cabs, singular_values};
use crate::operator::OperatorVector;
use crate::{Error, Result};

/// Unit-normalized Pauli coefficients of an `n`-qubit operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    pub n: usize,
    /// `c_a = Tr(P_a^† O) / (2^n scale)`, indexed by label.
    pub coeffs: Vec<c64>,
    /// `sqrt(Tr(O^† O) / 2^n)` of the input.
    pub scale: f64,
}

impl PauliCoefficients {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|&c| abs2(c)).sum()
    }
}

/// Schmidt decomposition of an operator across a site cut.
#[derive(Debug, Clone, PartialEq)]
pub struct OpeeResult {
    /// Number of sites in subsystem A.
    pub cut: usize,
    /// Squared singular values, descending, summing to 1.
    pub schmidt_sq: Vec<f64>,
    pub entropy_bits: f64,
}

fn qubit_count(dim: usize, n: usize) -> Result<()> {
    if !dim.is_power_of_two() || dim.trailing_zeros() as usize != n {
        return Err(Error::invalid("operator dimension must equal 2^n"));
    }
    Ok(())
}

/// Interleaves the bits of `row` and `col` into a base-4 index whose digit
/// for site `i` is `2 r_i + c_i`.
fn interleave(row: usize, col: usize, n: usize) -> usize {
    let mut idx = 0;
    for bit in (0..n).rev() {
        idx = (idx << 2) | (((row >> bit) & 1) << 1) | ((col >> bit) & 1);
    }
    idx
}

/// Decomposes `O` over the `4^n` Pauli strings with `n` single-site
/// transforms.
pub fn pauli_decompose(o: &OperatorVector, n: usize) -> Result<PauliCoefficients> {
    qubit_count(o.dim(), n)?;
    let dim = o.dim();
    let m = o.entries();
    let mut buf = vec![c64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        for row in 0..dim {
            buf[interleave(row, col, n)] = m[(row, col)];
        }
    }
    let half = 0.5;
    for site in 0..n {
        let stride = 1usize << (2 * (n - 1 - site));
        for block in buf.chunks_exact_mut(4 * stride) {
            for k in 0..stride {
                let (o00, o01, o10, o11) = (block[k], block[k + stride], block[k + 2 * stride], block[k + 3 * stride]);
                block[k] = (o00 + o11) * half;
                block[k + stride] = (o00 - o11) * half;
                block[k + 2 * stride] = (o01 + o10) * half;
                block[k + 3 * stride] = (o10 - o01) * half;
            }
        }
    }
    let scale = libm::sqrt(buf.iter().map(|&c| abs2(c)).sum::<f64>());
    if scale == 0.0 {
        return Err(Error::invalid("zero operator"));
    }
    let inv = 1.0 / scale;
    buf.iter_mut().for_each(|c| *c *= inv);
    Ok(PauliCoefficients { n, coeffs: buf, scale })
}

/// Number of non-identity sites in a label.
pub fn pauli_size(label: usize) -> usize {
    let mut a = label;
    let mut size = 0;
    while a != 0 {
        size += usize::from(a & 3 != 0);
        a >>= 2;
    }
    size
}

/// Average Pauli size `W = sum_a |a| |c_a|^2`.
pub fn influence(coeffs: &PauliCoefficients) -> f64 {
    coeffs.coeffs.iter().enumerate().map(|(a, &c)| pauli_size(a) as f64 * abs2(c)).sum()
}

/// `1 / sum_a |c_a|^4`.
pub fn ipr(coeffs: &PauliCoefficients) -> Result<f64> {
    let s: f64 = coeffs.coeffs.iter().map(|&c| abs2(c) * abs2(c)).sum();
    if s == 0.0 {
        return Err(Error::invalid("zero operator"));
    }
    Ok(1.0 / s)
}

/// `|c_a|` grouped by size: row `k` holds labels of size `k` in increasing
/// label order.
pub fn size_resolved_map(coeffs: &PauliCoefficients) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new(); coeffs.n + 1];
    for (a, &c) in coeffs.coeffs.iter().enumerate() {
        rows[pauli_size(a)].push(cabs(c));
    }
    rows
}

fn check_cut(n: usize, cut: usize) -> Result<()> {
    if cut == 0 || cut >= n {
        return Err(Error::invalid("cut must satisfy 1 <= n_A <= n - 1"));
    }
    Ok(())
}

fn entropy_from_schmidt(cut: usize, mut s: Vec<f64>) -> OpeeResult {
    s.iter_mut().for_each(|x| *x *= *x);
    let total: f64 = s.iter().sum();
    s.iter_mut().for_each(|x| *x /= total);
    s.sort_by(|a, b| b.total_cmp(a));
    let entropy_bits = -s.iter().filter(|&&p| p > 0.0).map(|&p| p * libm::log2(p)).sum::<f64>();
    OpeeResult { cut, schmidt_sq: s, entropy_bits: entropy_bits.max(0.0) }
}

/// Operator entanglement entropy across `n_A | n - n_A`, from the singular
/// values of the Pauli coefficient matrix `M[a_A, b_B]`.
pub fn opee(o: &OperatorVector, n: usize, cut: usize) -> Result<OpeeResult> {
    check_cut(n, cut)?;
    opee_from_coefficients(&pauli_decompose(o, n)?, cut)
}

/// [`opee`] for an existing decomposition.
pub fn opee_from_coefficients(coeffs: &PauliCoefficients, cut: usize) -> Result<OpeeResult> {
    check_cut(coeffs.n, cut)?;
    let cols = 1usize << (2 * (coeffs.n - cut));
    let rows = coeffs.len() / cols;
    let m = Mat::from_fn(rows, cols, |i, j| coeffs.coeffs[i * cols + j]);
    Ok(entropy_from_schmidt(cut, singular_values(m.as_ref())?))
}

/// [`opee`] through the realignment
/// `R[(i_A, j_A), (i_B, j_B)] = O[(i_A i_B), (j_A j_B)]`.
pub fn opee_reshuffle(o: &OperatorVector, n: usize, cut: usize) -> Result<OpeeResult> {
    qubit_count(o.dim(), n)?;
    check_cut(n, cut)?;
    let db = 1usize << (n - cut);
    let da = 1usize << cut;
    let m = o.entries();
    if o.norm() == 0.0 {
        return Err(Error::invalid("zero operator"));
    }
    let r = Mat::from_fn(da * da, db * db, |p, q| {
        let (ia, ja) = (p / da, p % da);
        let (ib, jb) = (q / db, q % db);
        m[(ia * db + ib, ja * db + jb)]
    });
    Ok(entropy_from_schmidt(cut, singular_values(r.as_ref())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paulis::{identity2, kron, pauli_x, pauli_y, pauli_z};

    fn op(m: Mat<c64>) -> OperatorVector {
        OperatorVector::new(m).unwrap()
    }

    #[test]
    fn single_strings() {
        let xi = op(kron(pauli_x().as_ref(), identity2().as_ref()));
        let c = pauli_decompose(&xi, 2).unwrap();
        assert_eq!(c.coeffs[8], c64::new(1.0, 0.0));
        assert!((c.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(influence(&c), 1.0);
        assert_eq!(ipr(&c).unwrap(), 1.0);

        let y = pauli_decompose(&op(pauli_y()), 1).unwrap();
        assert_eq!(y.coeffs, vec![c64::new(0.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 1.0)]);
    }

    #[test]
    fn sizes() {
        assert_eq!(pauli_size(0), 0);
        // X (x) I (x) Z = digits 2, 0, 1
        assert_eq!(pauli_size(2 * 16 + 1), 2);
        assert_eq!(pauli_size(0xff), 4);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(pauli_decompose(&OperatorVector::identity(3), 2).is_err());
        assert!(pauli_decompose(&OperatorVector::identity(4), 1).is_err());
        assert!(pauli_decompose(&OperatorVector::zeros(4), 2).is_err());
    }

    #[test]
    fn mixed_influence() {
        let x = pauli_x();
        let id = identity2();
        let m = kron(x.as_ref(), id.as_ref()) + kron(x.as_ref(), x.as_ref());
        let c = pauli_decompose(&op(m), 2).unwrap();
        assert!((influence(&c) - 1.5).abs() < 1e-14);
        assert!((ipr(&c).unwrap() - 2.0).abs() < 1e-14);
        let rows = size_resolved_map(&c);
        assert_eq!(rows.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 6, 9]);
    }

    #[test]
    fn swap_and_products() {
        let mut swap = Mat::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = c64::new(1.0, 0.0);
        }
        let swap = op(swap);
        for r in [opee(&swap, 2, 1).unwrap(), opee_reshuffle(&swap, 2, 1).unwrap()] {
            assert!((r.entropy_bits - 2.0).abs() < 1e-9);
        }
        let xz = op(kron(pauli_x().as_ref(), pauli_z().as_ref()));
        assert!(opee(&xz, 2, 1).unwrap().entropy_bits.abs() < 1e-12);
        assert!(opee(&xz, 2, 0).is_err());
        assert!(opee(&xz, 2, 2).is_err());
    }
}
