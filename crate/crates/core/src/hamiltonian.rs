//! Hamiltonian families: GOE, type-1 integrable matrices and the ANNI chain.

use alloc::format;
use alloc::vec::Vec;

use faer::{c64, Mat, MatRef};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, max_abs, real, symmetric_eigenvalues};
use crate::operator::SpectralDecomposition;
use crate::{Error, Result};

/// Largest chain the dense ANNI builder accepts (a `4096 x 4096` matrix).
pub const MAX_ANNI_SITES: usize = 12;

/// Relative tolerance of the Hermiticity check.
const HERMITIAN_TOL: f64 = 1e-12;

/// Dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    entries: Mat<c64>,
}

impl HamiltonianMatrix {
    /// Checks squareness and Hermiticity to `1e-12` of the largest entry.
    pub fn new(entries: Mat<c64>) -> Result<Self> {
        let d = entries.nrows();
        if d == 0 {
            return Err(Error::invalid("Hamiltonian dimension must be positive"));
        }
        if entries.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: entries.ncols() });
        }
        let scale = max_abs(entries.as_ref());
        if !scale.is_finite() {
            return Err(Error::invalid("Hamiltonian entries must be finite"));
        }
        for j in 0..d {
            for i in 0..=j {
                let diff = entries[(i, j)] - entries[(j, i)].conj();
                if linalg::cabs(diff) > HERMITIAN_TOL * scale {
                    return Err(Error::invalid(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: MatRef<'_, f64>) -> Result<Self> {
        Self::new(linalg::to_complex(entries))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    /// Real part of the entries; meaningful for the real symmetric families.
    pub fn real_entries(&self) -> Mat<f64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.entries[(i, j)].re)
    }

    pub fn is_real(&self) -> bool {
        (0..self.dim()).all(|j| (0..self.dim()).all(|i| self.entries[(i, j)].im == 0.0))
    }

    pub fn spectral_decomposition(&self) -> Result<SpectralDecomposition> {
        SpectralDecomposition::new(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.spectral_decomposition()?.eigenvalues().to_vec())
    }
}

/// Parameters of a type-1 integrable matrix `H(x) = xT + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Type1Params {
    pub x: f64,
    pub gamma: Vec<f64>,
    pub d_values: Vec<f64>,
    pub e_values: Vec<f64>,
}

impl Type1Params {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("type-1 dimension must be positive"));
        }
        for (name, v) in [("d_values", &self.d_values), ("e_values", &self.e_values)] {
            if v.len() != d {
                return Err(Error::invalid(format!("{name} has length {}, expected {d}", v.len())));
            }
        }
        if !(0.0..=1.0).contains(&self.x) {
            return Err(Error::invalid("coupling x must lie in [0, 1]"));
        }
        let norm2: f64 = self.gamma.iter().map(|g| g * g).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("gamma must have unit Euclidean norm"));
        }
        let all_finite = self.gamma.iter().chain(&self.d_values).chain(&self.e_values).all(|v| v.is_finite());
        if !all_finite || !self.x.is_finite() {
            return Err(Error::invalid("type-1 parameters must be finite"));
        }
        Ok(())
    }
}

/// Transverse-field Ising chain with next-nearest-neighbour `XX` coupling,
/// open boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnniParams {
    pub sites: usize,
    pub g: f64,
    pub h: f64,
}

impl AnniParams {
    pub fn new(sites: usize, g: f64, h: f64) -> Result<Self> {
        let p = Self { sites, g, h };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::invalid("ANNI chain needs at least 2 sites"));
        }
        if self.sites > MAX_ANNI_SITES {
            return Err(Error::invalid(format!("ANNI chain limited to {MAX_ANNI_SITES} sites")));
        }
        if !(self.g.is_finite() && self.h.is_finite()) || self.g < 0.0 {
            return Err(Error::invalid("ANNI couplings must be finite with g >= 0"));
        }
        Ok(())
    }
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<f64> {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = StandardNormal.sample(rng);
        }
    }
    m
}

/// `(A + A^T) / 2` with standard normal `A`.
pub(crate) fn goe_real(rng: &mut ChaCha8Rng, dim: usize) -> Mat<f64> {
    let a = gaussian_matrix(rng, dim, dim);
    Mat::from_fn(dim, dim, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// GOE sample `(A + A^T)/2`, `A_ij ~ N(0, 1)` i.i.d.
pub fn sample_goe(dim: usize, seed: u64) -> Result<HamiltonianMatrix> {
    if dim == 0 {
        return Err(Error::invalid("GOE dimension must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    HamiltonianMatrix::from_real(goe_real(&mut rng, dim).as_ref())
}

/// Type-1 integrable matrix:
///
/// ```text
/// H_ij = x g_i g_j (d_i - d_j) / (e_i - e_j)                 (i != j)
/// H_jj = d_j - x sum_{k != j} g_k^2 (d_j - d_k) / (e_j - e_k)
/// ```
pub fn build_type1(params: &Type1Params) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let n = params.dim();
    let (g, d, e, x) = (&params.gamma, &params.d_values, &params.e_values, params.x);
    let scale = e.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut h = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = e[i] - e[j];
            if gap.abs() <= 4.0 * f64::EPSILON * scale {
                return Err(Error::SingularParametrization { i, j });
            }
            let v = x * (g[i] * g[j]) * ((d[i] - d[j]) / gap);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    for j in 0..n {
        let mut sum = 0.0;
        for k in 0..n {
            if k != j {
                sum += g[k] * g[k] * (d[j] - d[k]) / (e[j] - e[k]);
            }
        }
        h[(j, j)] = d[j] - x * sum;
    }
    HamiltonianMatrix::from_real(h.as_ref())
}

/// Samples gamma uniformly on the unit sphere and `e`, `d` as sorted spectra
/// of two independent GOE draws, then builds the type-1 matrix. Coincident
/// `e`-values trigger up to 10 resamples.
pub fn sample_type1_ensemble(dim: usize, x: f64, seed: u64) -> Result<HamiltonianMatrix> {
    if dim < 2 {
        return Err(Error::invalid("type-1 ensemble needs dim >= 2"));
    }
    let mut rng = rng_from_seed(seed);
    let mut last_err = None;
    for _ in 0..=10 {
        let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = libm::sqrt(raw.iter().map(|v| v * v).sum::<f64>());
        let gamma = raw.iter().map(|v| v / norm).collect();
        let e_values = symmetric_eigenvalues(goe_real(&mut rng, dim).as_ref())?;
        let d_values = symmetric_eigenvalues(goe_real(&mut rng, dim).as_ref())?;
        match build_type1(&Type1Params { x, gamma, d_values, e_values }) {
            Ok(h) => return Ok(h),
            Err(e @ Error::SingularParametrization { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::NoConvergence("type-1 sampling")))
}

/// `Q diag(E) Q^T` with Haar-random orthogonal `Q` and `E` the spectrum of `h`.
pub fn randomize_eigenvectors(h: &HamiltonianMatrix, seed: u64) -> Result<HamiltonianMatrix> {
    let d = h.dim();
    let eigenvalues = h.eigenvalues()?;
    let mut rng = rng_from_seed(seed);
    let q = linalg::haar_orthogonal(gaussian_matrix(&mut rng, d, d).as_ref());
    let scaled = Mat::from_fn(d, d, |i, j| q[(i, j)] * eigenvalues[j]);
    let full = scaled * q.transpose();
    let sym = Mat::from_fn(d, d, |i, j| 0.5 * (full[(i, j)] + full[(j, i)]));
    HamiltonianMatrix::from_real(sym.as_ref())
}

/// Dense ANNI Hamiltonian
///
/// ```text
/// H = - sum_{i<L} Z_i Z_{i+1} - h sum_i X_i - g sum_{i<L-1} X_i X_{i+2}
/// ```
///
/// Site 1 is the most significant bit of the basis index.
pub fn build_anni(params: &AnniParams) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let l = params.sites;
    let dim = params.dim();
    let mask = |site: usize| 1usize << (l - site);
    let mut h = Mat::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let z = |site: usize| if s & mask(site) == 0 { 1.0 } else { -1.0 };
        let zz: f64 = (1..l).map(|i| z(i) * z(i + 1)).sum();
        h[(s, s)] -= zz;
        for i in 1..=l {
            h[(s ^ mask(i), s)] -= params.h;
        }
        for i in 1..l.saturating_sub(1) {
            h[(s ^ mask(i) ^ mask(i + 2), s)] -= params.g;
        }
    }
    HamiltonianMatrix::new(Mat::from_fn(dim, dim, |i, j| real(h[(i, j)])))
}

/// Mean consecutive-gap ratio `<min(s_i, s_{i+1}) / max(s_i, s_{i+1})>`.
///
/// A gap below `1e-13` of the spectral range counts as degenerate: a ratio
/// with one degenerate gap is 0, and a pair of degenerate gaps is skipped.
pub fn mean_gap_ratio(eigenvalues: &[f64]) -> Result<f64> {
    if eigenvalues.len() < 3 {
        return Err(Error::invalid("gap ratio needs at least 3 levels"));
    }
    if eigenvalues.iter().any(|v| v.is_nan()) || eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("eigenvalues must be sorted ascending"));
    }
    let range = eigenvalues[eigenvalues.len() - 1] - eigenvalues[0];
    let floor = 1e-13 * range;
    let gaps: Vec<f64> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    for pair in gaps.windows(2) {
        let (lo, hi) = if pair[0] <= pair[1] { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        if hi <= floor {
            continue;
        }
        total += if lo <= floor { 0.0 } else { lo / hi };
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("spectrum is fully degenerate"));
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn goe_is_exactly_symmetric_and_seeded() {
        let h = sample_goe(50, 7).unwrap();
        let r = h.real_entries();
        for i in 0..50 {
            for j in 0..50 {
                assert_eq!(r[(i, j)], r[(j, i)]);
            }
        }
        assert_eq!(h, sample_goe(50, 7).unwrap());
        assert_ne!(h, sample_goe(50, 8).unwrap());
        assert!(sample_goe(0, 1).is_err());
        assert_eq!(sample_goe(1, 3).unwrap().dim(), 1);
    }

    #[test]
    fn type1_two_level_entry() {
        let s = 1.0 / libm::sqrt(2.0);
        let p = Type1Params { x: 1.0, gamma: vec![s, s], d_values: vec![1.0, -1.0], e_values: vec![2.0, 0.0] };
        let h = build_type1(&p).unwrap().real_entries();
        assert!((h[(0, 1)] - 0.5).abs() < 1e-15);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
        // diagonal: d_j - x g_k^2 (d_j - d_k)/(e_j - e_k)
        assert!((h[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((h[(1, 1)] + 1.5).abs() < 1e-15);
    }

    #[test]
    fn type1_at_zero_coupling_is_diagonal() {
        let p = Type1Params {
            x: 0.0,
            gamma: vec![0.6, 0.8, 0.0],
            d_values: vec![3.0, -1.0, 0.25],
            e_values: vec![1.0, 2.0, 3.0],
        };
        let h = build_type1(&p).unwrap().real_entries();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { p.d_values[i] } else { 0.0 };
                assert_eq!(h[(i, j)], expected);
            }
        }
    }

    #[test]
    fn type1_rejects_bad_params() {
        let p = Type1Params { x: 0.5, gamma: vec![0.6, 0.8], d_values: vec![1.0, 2.0], e_values: vec![1.0, 1.0] };
        assert!(matches!(build_type1(&p), Err(Error::SingularParametrization { i: 0, j: 1 })));
        let p = Type1Params { x: 0.5, gamma: vec![1.0, 1.0], d_values: vec![1.0, 2.0], e_values: vec![1.0, 2.0] };
        assert!(matches!(build_type1(&p), Err(Error::InvalidArgument(_))));
        let p = Type1Params { x: 1.5, gamma: vec![0.6, 0.8], d_values: vec![1.0, 2.0], e_values: vec![1.0, 2.0] };
        assert!(build_type1(&p).is_err());
    }

    #[test]
    fn type1_ensemble_is_deterministic() {
        let a = sample_type1_ensemble(20, 0.5, 11).unwrap();
        let b = sample_type1_ensemble(20, 0.5, 11).unwrap();
        assert_eq!(a, b);
        assert!(sample_type1_ensemble(1, 0.5, 11).is_err());
    }

    #[test]
    fn randomized_eigenvectors_keep_spectrum() {
        let h = sample_goe(30, 5).unwrap();
        let r = randomize_eigenvectors(&h, 6).unwrap();
        let (a, b) = (h.eigenvalues().unwrap(), r.eigenvalues().unwrap());
        let range = a[29] - a[0];
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10 * range);
        }
        let one = HamiltonianMatrix::from_real(Mat::from_fn(1, 1, |_, _| 2.5).as_ref()).unwrap();
        assert_eq!(randomize_eigenvectors(&one, 3).unwrap(), one);
    }

    #[test]
    fn haar_matrix_is_orthogonal() {
        let mut rng = rng_from_seed(3);
        let q = linalg::haar_orthogonal(gaussian_matrix(&mut rng, 50, 50).as_ref());
        let g = q.transpose() * &q;
        for i in 0..50 {
            for j in 0..50 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn anni_two_sites_ignores_g() {
        let a = build_anni(&AnniParams::new(2, 0.7, 1.0).unwrap()).unwrap();
        let b = build_anni(&AnniParams::new(2, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(a, b);
        let r = a.real_entries();
        // basis |00>, |01>, |10>, |11>
        assert_eq!(r[(0, 0)], -1.0);
        assert_eq!(r[(1, 1)], 1.0);
        assert_eq!(r[(0, 1)], -1.0);
        assert_eq!(r[(0, 2)], -1.0);
        assert_eq!(r[(0, 3)], 0.0);
        assert!(AnniParams::new(1, 0.1, 1.0).is_err());
        assert!(AnniParams::new(13, 0.1, 1.0).is_err());
    }

    #[test]
    fn gap_ratio_edge_cases() {
        assert_eq!(mean_gap_ratio(&[0.0, 1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert!(mean_gap_ratio(&[0.0, 1.0]).is_err());
        assert!(mean_gap_ratio(&[1.0, 0.0, 2.0]).is_err());
        // one degenerate gap next to a finite one contributes 0
        assert_eq!(mean_gap_ratio(&[0.0, 0.0, 1.0]).unwrap(), 0.0);
        // doubly degenerate window is skipped
        assert_eq!(mean_gap_ratio(&[0.0, 0.0, 0.0, 1.0, 2.0]).unwrap(), 0.5);
    }
}
