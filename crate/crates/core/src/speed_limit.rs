//! Operator quantum speed limits.
//!
//! Angles are obtained from the deficit `G(0) - Re G(tau)`, accumulated as
//! `sum |c|^2 * 2 sin^2(omega tau / 2)`, and `arccos(1 - x) = 2 asin(sqrt(x/2))`.
//! This is the clamped `arccos(Re G(tau) / G(0))` of the textbook form without
//! the cancellation that form suffers at short times.

use alloc::vec::Vec;

use faer::{Mat, MatRef};

use crate::krylov::{complexity_diagonal, LanczosResult, TridiagonalSpectrum};
use crate::linalg::abs2;
use crate::operator::{OperatorVector, SpectralDecomposition};
use crate::{Error, Result};

/// Default degeneracy tolerance relative to the spectral range.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Speed-limit quantities at a single horizon `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OqslResult {
    pub tau: f64,
    /// Geodesic distance covered by the (non-stationary part of the) evolution.
    pub geodesic: f64,
    /// Average speed `V(tau)`.
    pub path_speed: f64,
    /// Bound without kernel refinement.
    pub tau_qsl: f64,
    /// Bound after removing the stationary part.
    pub tau_ref: f64,
    /// Norm of the removed stationary part.
    pub stationary_norm: f64,
    /// `Re (A | A(tau))` of the operator whose overlap enters the bound.
    pub overlap: f64,
}

/// Resonance counts of a spectrum at an absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceReport {
    /// Unordered pairs `m < n` with `|E_m - E_n| <= tol`.
    pub count1: u64,
    /// Unordered pairs of distinct index pairs `{j <= k} != {m <= n}` with
    /// `|E_j + E_k - E_m - E_n| <= tol`.
    pub count2: u64,
    pub tol: f64,
}

/// `arccos(1 - x)` for `x = 1 - cos(theta)`, clamped to `[0, pi]`.
fn angle_from_deficit(x: f64) -> f64 {
    let x = x.clamp(0.0, 2.0);
    2.0 * libm::asin(libm::sqrt(0.5 * x))
}

/// `||O|| arccos(Re (O|U) / ||O||^2)` for `O`, `U` on the same sphere.
pub fn geodesic_distance(o: &OperatorVector, u: &OperatorVector) -> Result<f64> {
    if o.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), found: u.dim() });
    }
    let (no, nu) = (o.norm(), u.norm());
    if (no - nu).abs() > 1e-8 * no.max(nu).max(1.0) {
        return Err(Error::invalid("operators do not share a norm"));
    }
    if no == 0.0 {
        return Ok(0.0);
    }
    // chord length avoids the cancellation of arccos near 1
    let chord = (o - u).norm();
    Ok(no * 2.0 * libm::asin((0.5 * chord / no).min(1.0)))
}

struct EigenbasisDynamics {
    /// `|O_mn|^2`, column-major `m + n d`.
    weights: Vec<f64>,
    freqs: Vec<f64>,
    norm2: f64,
}

impl EigenbasisDynamics {
    fn new(spec: &SpectralDecomposition, o: &OperatorVector) -> Result<Self> {
        let d = spec.dim();
        let w = spec.to_eigenbasis(o)?;
        let mut weights = Vec::with_capacity(d * d);
        let mut freqs = Vec::with_capacity(d * d);
        for col in 0..d {
            for row in 0..d {
                weights.push(abs2(w[(row, col)]));
                freqs.push(spec.frequency(row, col));
            }
        }
        let norm2 = weights.iter().sum();
        Ok(Self { weights, freqs, norm2 })
    }

    /// `||L O(t)||`, constant in `t` for a time-independent `H`.
    fn liouvillian_norm(&self) -> f64 {
        libm::sqrt(self.weights.iter().zip(&self.freqs).map(|(p, f)| p * f * f).sum())
    }

    /// `G(0) - Re G(tau)` restricted to entries with `|omega| > tol`.
    fn deficit(&self, tau: f64, tol: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.freqs)
            .filter(|(_, f)| f.abs() > tol)
            .map(|(p, f)| {
                let s = libm::sin(0.5 * f * tau);
                2.0 * p * s * s
            })
            .sum()
    }

    fn stationary_norm2(&self, tol: f64) -> f64 {
        self.weights.iter().zip(&self.freqs).filter(|(_, f)| f.abs() <= tol).map(|(p, _)| p).sum()
    }
}

/// `V(tau) = (1/tau) int_0^tau ||L O(t)|| dt`, trapezoidal rule on
/// `grid_points` nodes.
pub fn average_speed(spec: &SpectralDecomposition, o: &OperatorVector, tau: f64, grid_points: usize) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau must be positive"));
    }
    if grid_points < 2 {
        return Err(Error::invalid("quadrature needs at least 2 nodes"));
    }
    let d = spec.dim();
    let base = spec.to_eigenbasis(o)?;
    let h = tau / (grid_points - 1) as f64;
    let mut integral = 0.0;
    for k in 0..grid_points {
        let t = k as f64 * h;
        let mut m = base.clone();
        spec.evolve_eigenbasis(&mut m, t);
        let mut acc = 0.0;
        for col in 0..d {
            for row in 0..d {
                let f = spec.frequency(row, col);
                acc += f * f * abs2(m[(row, col)]);
            }
        }
        let weight = if k == 0 || k + 1 == grid_points { 0.5 } else { 1.0 };
        integral += weight * libm::sqrt(acc);
    }
    Ok(integral * h / tau)
}

/// Basic operator speed limit
/// `tau_QSL = sqrt(G(0)) arccos(Re G(tau) / G(0)) / V(tau)`.
pub fn oqsl(spec: &SpectralDecomposition, o: &OperatorVector, tau: f64, grid_points: usize) -> Result<OqslResult> {
    let speed = average_speed(spec, o, tau, grid_points)?;
    if speed == 0.0 {
        return Err(Error::stationary("[H, O] = 0"));
    }
    let dyn_ = EigenbasisDynamics::new(spec, o)?;
    let deficit = dyn_.deficit(tau, 0.0);
    let geodesic = libm::sqrt(dyn_.norm2) * angle_from_deficit(deficit / dyn_.norm2);
    let tau_qsl = geodesic / speed;
    Ok(OqslResult {
        tau,
        geodesic,
        path_speed: speed,
        tau_qsl,
        tau_ref: tau_qsl,
        stationary_norm: 0.0,
        overlap: dyn_.norm2 - deficit,
    })
}

/// Refined bound with the stationary part `S` (projection of `O` onto
/// `Ker L`) removed. Eigenbasis entries with `|E_m - E_n|` below
/// `1e-10` of the spectral range count as stationary.
pub fn refined_oqsl(
    spec: &SpectralDecomposition,
    o: &OperatorVector,
    tau: f64,
    grid_points: usize,
) -> Result<OqslResult> {
    let tol = DEFAULT_DEGENERACY_TOL * spec.spectral_range();
    refined_oqsl_with_tolerance(spec, o, tau, grid_points, tol)
}

/// [`refined_oqsl`] with an absolute degeneracy tolerance.
pub fn refined_oqsl_with_tolerance(
    spec: &SpectralDecomposition,
    o: &OperatorVector,
    tau: f64,
    grid_points: usize,
    tol: f64,
) -> Result<OqslResult> {
    let dyn_ = EigenbasisDynamics::new(spec, o)?;
    let s2 = dyn_.stationary_norm2(tol);
    let rest = dyn_.norm2 - s2;
    if rest <= 1e-28 * dyn_.norm2 || dyn_.liouvillian_norm() == 0.0 {
        return Err(Error::stationary("operator lies in the kernel of the Liouvillian"));
    }
    let basic = oqsl(spec, o, tau, grid_points)?;
    let deficit = dyn_.deficit(tau, tol);
    let geodesic = libm::sqrt(rest) * angle_from_deficit(deficit / rest);
    Ok(OqslResult {
        tau,
        geodesic,
        path_speed: basic.path_speed,
        tau_qsl: basic.tau_qsl,
        tau_ref: geodesic / basic.path_speed,
        stationary_norm: libm::sqrt(s2),
        overlap: dyn_.norm2 - deficit,
    })
}

/// The traceless complexity operator `K~ = K - Tr(K)/D_K` evolved by the
/// Krylov tridiagonal `T`, expressed in the eigenbasis of `T`.
///
/// Precomputes `P_ab = |(W^T K~ W)_ab|^2` once so that bounds on a whole
/// horizon grid cost `O(D_K^2)` per horizon.
#[derive(Debug, Clone)]
pub struct ComplexityOperatorDynamics {
    eigenvalues: Vec<f64>,
    weights: Mat<f64>,
    norm2: f64,
    speed: f64,
}

impl ComplexityOperatorDynamics {
    pub fn new(result: &LanczosResult) -> Result<Self> {
        if result.krylov_dim() < 2 {
            return Err(Error::invalid("complexity operator is trivial for D_K = 1"));
        }
        Self::from_spectrum(result, &result.tridiagonal_spectrum()?)
    }

    pub fn from_spectrum(result: &LanczosResult, spectrum: &TridiagonalSpectrum) -> Result<Self> {
        let n = result.krylov_dim();
        if n < 2 {
            return Err(Error::invalid("complexity operator is trivial for D_K = 1"));
        }
        if spectrum.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: spectrum.dim() });
        }
        let shift = (n - 1) as f64 / 2.0;
        let centred: Vec<f64> = complexity_diagonal(n).into_iter().map(|k| k - shift).collect();
        let w = spectrum.eigenvectors.as_ref();
        let scaled = Mat::from_fn(n, n, |i, j| centred[i] * w[(i, j)]);
        let m = w.transpose() * scaled;
        let weights = Mat::from_fn(n, n, |i, j| {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            v * v
        });
        let norm2 = centred.iter().map(|k| k * k).sum();
        // [T, K~]_ij = T_ij (k_j - k_i): only the off-diagonals survive
        let speed = libm::sqrt(2.0 * result.b.iter().map(|b| b * b).sum::<f64>());
        if speed == 0.0 {
            return Err(Error::stationary("[T, K] = 0"));
        }
        Ok(Self { eigenvalues: spectrum.eigenvalues.clone(), weights, norm2, speed })
    }

    pub fn krylov_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `||K~||`.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm2)
    }

    /// `||[T, K~]||`.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// `1e-10` of the spectral range of `T`.
    pub fn default_kernel_tol(&self) -> f64 {
        let n = self.eigenvalues.len();
        DEFAULT_DEGENERACY_TOL * (self.eigenvalues[n - 1] - self.eigenvalues[0])
    }

    /// `||K~||^2 - Re Tr(K~(tau) K~)`.
    pub fn deficit(&self, tau: f64) -> f64 {
        let n = self.eigenvalues.len();
        let (s, c): (Vec<f64>, Vec<f64>) = self.eigenvalues.iter().map(|l| libm::sincos(0.5 * l * tau)).unzip();
        let p = self.weights.as_ref();
        let mut total = 0.0;
        for b in 1..n {
            let col = p.col(b);
            let (sb, cb) = (s[b], c[b]);
            let mut acc = 0.0;
            for a in 0..b {
                // sin((l_a - l_b) tau / 2)
                let u = s[a] * cb - c[a] * sb;
                acc += col[a] * u * u;
            }
            total += acc;
        }
        // pairs (a, b) and (b, a), each contributing 2 sin^2
        4.0 * total
    }

    /// Pairs `a < b` with `|l_a - l_b| <= tol` (the diagonal is always stationary).
    fn stationary_pairs(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.eigenvalues.len() {
            for b in (a + 1)..self.eigenvalues.len() {
                if self.eigenvalues[b] - self.eigenvalues[a] > tol {
                    break;
                }
                out.push((a, b));
            }
        }
        out
    }

    /// Norm of the projection of `K~` onto `ker [T, .]`.
    pub fn stationary_norm(&self, tol: f64) -> f64 {
        libm::sqrt(self.stationary_mass(&self.stationary_pairs(tol)))
    }

    fn stationary_mass(&self, pairs: &[(usize, usize)]) -> f64 {
        let diag: f64 = (0..self.krylov_dim()).map(|a| self.weights[(a, a)]).sum();
        diag + 2.0 * pairs.iter().map(|&(a, b)| self.weights[(a, b)]).sum::<f64>()
    }

    fn pair_deficit(&self, pairs: &[(usize, usize)], tau: f64) -> f64 {
        pairs
            .iter()
            .map(|&(a, b)| {
                let s = libm::sin(0.5 * (self.eigenvalues[a] - self.eigenvalues[b]) * tau);
                4.0 * self.weights[(a, b)] * s * s
            })
            .sum()
    }

    /// `tau_ref = ||K~|| arccos(Re Tr(K~(tau) K~) / ||K~||^2) / ||[T, K~]||`.
    pub fn oqsl(&self, tau: f64) -> Result<OqslResult> {
        check_tau(tau)?;
        let deficit = self.deficit(tau);
        let geodesic = self.norm() * angle_from_deficit(deficit / self.norm2);
        let bound = geodesic / self.speed;
        Ok(OqslResult {
            tau,
            geodesic,
            path_speed: self.speed,
            tau_qsl: bound,
            tau_ref: bound,
            stationary_norm: 0.0,
            overlap: self.norm2 - deficit,
        })
    }

    /// [`Self::oqsl`] after subtracting the part of `K~` stationary under
    /// `T`: entries `(a, b)` of `W^T K~ W` with `|l_a - l_b| <= tol`.
    pub fn kernel_refined(&self, tau: f64, tol: f64) -> Result<OqslResult> {
        check_tau(tau)?;
        let pairs = self.stationary_pairs(tol);
        let stationary = self.stationary_mass(&pairs);
        let rest = self.norm2 - stationary;
        if rest <= 1e-24 * self.norm2 {
            return Err(Error::stationary("complexity operator lies in ker [T, .]"));
        }
        let full = self.deficit(tau);
        let deficit = (full - self.pair_deficit(&pairs, tau)).max(0.0);
        let geodesic = libm::sqrt(rest) * angle_from_deficit(deficit / rest);
        let unrefined = self.norm() * angle_from_deficit(full / self.norm2) / self.speed;
        Ok(OqslResult {
            tau,
            geodesic,
            path_speed: self.speed,
            tau_qsl: unrefined,
            tau_ref: geodesic / self.speed,
            stationary_norm: libm::sqrt(stationary),
            overlap: rest - deficit,
        })
    }

    /// Eigenvalues of `T`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> MatRef<'_, f64> {
        self.weights.as_ref()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau must be finite and nonnegative"));
    }
    Ok(())
}

/// Speed limit of the complexity operator on the Krylov subspace.
pub fn complexity_oqsl(result: &LanczosResult, tau: f64) -> Result<OqslResult> {
    ComplexityOperatorDynamics::new(result)?.oqsl(tau)
}

/// [`complexity_oqsl`] with the `ker [T, .]` component removed.
pub fn kernel_refined_complexity_oqsl(result: &LanczosResult, tau: f64, tol: f64) -> Result<OqslResult> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid("tolerance must be nonnegative"));
    }
    ComplexityOperatorDynamics::new(result)?.kernel_refined(tau, tol)
}

/// Counts 1- and 2-resonances of `eigenvalues` at absolute tolerance `tol`.
pub fn count_resonances(eigenvalues: &[f64], tol: f64) -> Result<ResonanceReport> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid("tolerance must be nonnegative"));
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count1 = count_close_pairs(&sorted, tol);
    let n = sorted.len();
    let mut sums = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for k in j..n {
            sums.push(sorted[j] + sorted[k]);
        }
    }
    sums.sort_by(f64::total_cmp);
    let count2 = count_close_pairs(&sums, tol);
    Ok(ResonanceReport { count1, count2, tol })
}

/// Pairs `i < j` of a sorted slice with `v_j - v_i <= tol`.
fn count_close_pairs(sorted: &[f64], tol: f64) -> u64 {
    let mut count = 0u64;
    let mut hi = 0usize;
    for lo in 0..sorted.len() {
        if hi < lo + 1 {
            hi = lo + 1;
        }
        while hi < sorted.len() && sorted[hi] - sorted[lo] <= tol {
            hi += 1;
        }
        count += (hi - lo - 1) as u64;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianMatrix;
    use crate::krylov::lanczos;
    use crate::operator::evolve_operator;
    use crate::paulis::{pauli_x, pauli_z};
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

    fn zx() -> (SpectralDecomposition, HamiltonianMatrix, OperatorVector) {
        let h = HamiltonianMatrix::new(pauli_z()).unwrap();
        (h.spectral_decomposition().unwrap(), h, OperatorVector::new(pauli_x()).unwrap())
    }

    #[test]
    fn geodesic_cases() {
        let (spec, _, x) = zx();
        assert_eq!(geodesic_distance(&x, &x).unwrap(), 0.0);
        let z = OperatorVector::new(pauli_z()).unwrap();
        assert!((geodesic_distance(&x, &z).unwrap() - SQRT_2 * PI / 2.0).abs() < 1e-14);
        let xt = evolve_operator(&spec, &x, 0.3).unwrap();
        assert!((geodesic_distance(&x, &xt).unwrap() - 0.6 * SQRT_2).abs() < 1e-10);
        let big = x.scaled(faer::c64::new(2.0, 0.0));
        assert!(geodesic_distance(&x, &big).is_err());
    }

    #[test]
    fn speed_of_x_under_z() {
        let (spec, _, x) = zx();
        for tau in [0.1, 1.0, 7.5] {
            assert!((average_speed(&spec, &x, tau, 17).unwrap() - 2.0 * SQRT_2).abs() < 1e-10);
        }
        let z = OperatorVector::new(pauli_z()).unwrap();
        assert_eq!(average_speed(&spec, &z, 1.0, 5).unwrap(), 0.0);
        assert!(average_speed(&spec, &x, 0.0, 5).is_err());
    }

    #[test]
    fn basic_bound_saturates_for_two_levels() {
        let (spec, _, x) = zx();
        let r = oqsl(&spec, &x, 0.5, 11).unwrap();
        assert!((r.tau_qsl - 0.5).abs() < 1e-9);
        let late = oqsl(&spec, &x, 2.0, 11).unwrap();
        assert!(late.tau_qsl < 2.0);
        let z = OperatorVector::new(pauli_z()).unwrap();
        assert!(matches!(oqsl(&spec, &z, 1.0, 5), Err(Error::StationaryOperator(_))));
    }

    #[test]
    fn refined_bound_drops_kernel() {
        let (spec, _, x) = zx();
        let z = OperatorVector::new(pauli_z()).unwrap();
        assert!(matches!(refined_oqsl(&spec, &z, 1.0, 5), Err(Error::StationaryOperator(_))));
        let r = refined_oqsl(&spec, &x, 0.5, 11).unwrap();
        assert_eq!(r.stationary_norm, 0.0);
        assert!((r.tau_ref - r.tau_qsl).abs() < 1e-15);
        let xz = &x + &z;
        let r = refined_oqsl(&spec, &xz, 0.5, 11).unwrap();
        assert!((r.stationary_norm - SQRT_2).abs() < 1e-14);
        assert!((r.tau_ref - 0.5).abs() < 1e-9);
        assert!(r.tau_qsl < r.tau_ref);
    }

    #[test]
    fn complexity_bound_saturates_for_two_levels() {
        let (_, h, x) = zx();
        let r = lanczos(&h, &x, 1e-8, 10).unwrap();
        let dynamics = ComplexityOperatorDynamics::new(&r).unwrap();
        assert!((dynamics.norm() - 1.0 / SQRT_2).abs() < 1e-14);
        assert!((dynamics.speed() - 2.0 * SQRT_2).abs() < 1e-14);
        for tau in [0.01, 0.2, FRAC_PI_8] {
            let b = complexity_oqsl(&r, tau).unwrap();
            assert!((b.tau_ref - tau).abs() < 1e-8, "{tau}: {}", b.tau_ref);
            assert!((b.overlap - 0.5 * libm::cos(4.0 * tau)).abs() < 1e-12);
            let k = kernel_refined_complexity_oqsl(&r, tau, 1e-10).unwrap();
            assert!(k.stationary_norm < 1e-12);
            assert!((k.tau_ref - b.tau_ref).abs() < 1e-12);
        }
        assert_eq!(complexity_oqsl(&r, 0.0).unwrap().tau_ref, 0.0);
        assert_eq!(kernel_refined_complexity_oqsl(&r, 0.0, 1e-10).unwrap().tau_ref, 0.0);
        let _ = FRAC_PI_4;
    }

    #[test]
    fn complexity_bound_needs_two_krylov_vectors() {
        let (_, h, _) = zx();
        let z = OperatorVector::new(pauli_z()).unwrap();
        let r = lanczos(&h, &z, 1e-8, 10).unwrap();
        assert!(complexity_oqsl(&r, 0.1).is_err());
    }

    #[test]
    fn resonance_examples() {
        let r = count_resonances(&[0.0, 1.0, 2.0], 1e-12).unwrap();
        assert_eq!((r.count1, r.count2), (0, 1));
        let r = count_resonances(&[0.0, 0.0], 1e-12).unwrap();
        assert_eq!(r.count1, 1);
        assert!(count_resonances(&[0.0], -1.0).is_err());
    }
}
