//! Single-qubit Pauli matrices and Kronecker products.
//!
//! Site 1 is the leftmost tensor factor, i.e. the most significant bit of the
//! computational-basis index. `|0>` is the `+1` eigenstate of `Z`.

use faer::{c64, Mat, MatRef};

use crate::{operator::OperatorVector, Error, Result};

pub fn identity2() -> Mat<c64> {
    Mat::from_fn(2, 2, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn pauli_x() -> Mat<c64> {
    Mat::from_fn(2, 2, |i, j| if i != j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn pauli_y() -> Mat<c64> {
    let mut m = Mat::zeros(2, 2);
    m[(0, 1)] = c64::new(0.0, -1.0);
    m[(1, 0)] = c64::new(0.0, 1.0);
    m
}

pub fn pauli_z() -> Mat<c64> {
    let mut m = Mat::zeros(2, 2);
    m[(0, 0)] = c64::new(1.0, 0.0);
    m[(1, 1)] = c64::new(-1.0, 0.0);
    m
}

pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// `op` acting on `site` (1-based) of an `n_sites` chain, identity elsewhere.
pub fn site_operator(n_sites: usize, site: usize, op: MatRef<'_, c64>) -> Result<OperatorVector> {
    if site == 0 || site > n_sites {
        return Err(Error::invalid("site index out of range"));
    }
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: op.nrows() });
    }
    let dim = 1usize << n_sites;
    let shift = n_sites - site;
    let entries = Mat::from_fn(dim, dim, |r, c| {
        if (r ^ c) & !(1 << shift) != 0 {
            return c64::new(0.0, 0.0);
        }
        op[((r >> shift) & 1, (c >> shift) & 1)]
    });
    OperatorVector::new(entries)
}

/// `(7 X_mid + 4 Z_mid)` at `mid = ceil(L / 2)`, unit Hilbert-Schmidt norm.
pub fn mid_chain_probe(n_sites: usize) -> Result<OperatorVector> {
    let mid = n_sites.div_ceil(2);
    let x = site_operator(n_sites, mid, pauli_x().as_ref())?;
    let z = site_operator(n_sites, mid, pauli_z().as_ref())?;
    let o = &x.scaled(c64::new(7.0, 0.0)) + &z.scaled(c64::new(4.0, 0.0));
    let norm = o.norm();
    Ok(o.scaled(c64::new(1.0 / norm, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_operator_matches_kron() {
        let x = pauli_x();
        let id = identity2();
        let expected = kron(kron(id.as_ref(), x.as_ref()).as_ref(), id.as_ref());
        let got = site_operator(3, 2, x.as_ref()).unwrap();
        assert_eq!(got.entries(), expected.as_ref());
    }

    #[test]
    fn probe_is_normalized() {
        let o = mid_chain_probe(5).unwrap();
        assert!((o.norm() - 1.0).abs() < 1e-14);
        // site 3 of 5: bit 2 from the right
        assert!((o.entries()[(0, 4)].re - 7.0 / (65.0f64 * 32.0).sqrt()).abs() < 1e-14);
        assert!(mid_chain_probe(0).is_err());
    }

    #[test]
    fn y_is_i_xz() {
        let xz = pauli_x() * pauli_z();
        let y = pauli_y();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(y[(i, j)], c64::new(0.0, 1.0) * xz[(i, j)]);
            }
        }
    }
}
