//! Closed-form checks on the two-level `H = Z`, `O = X` system and a few
//! Pauli identities.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use krylovlab_core::paulis::{identity2, kron, pauli_x, pauli_z, site_operator};
use krylovlab_core::{
    autocorrelation, c64, complexity_oqsl, count_resonances, influence, ipr, k_complexity, krylov_evolve, lanczos,
    opee, oqsl, pauli_decompose, HamiltonianMatrix, Mat, OperatorVector, Result,
};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, deviation: f64, tol: f64) -> Check {
    Check { name, passed: deviation <= tol, detail: format!("deviation {deviation:.3e} (tol {tol:.0e})") }
}

fn max_dev(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

pub fn run_checks() -> Result<Vec<Check>> {
    let h = HamiltonianMatrix::new(pauli_z())?;
    let x = OperatorVector::new(pauli_x())?;
    let spec = h.spectral_decomposition()?;
    let mut out = Vec::new();

    let lz = lanczos(&h, &x, 1e-8, 16)?;
    let b_dev = if lz.b.len() == 1 { (lz.b[0] - 2.0).abs() } else { f64::INFINITY };
    out.push(check("lanczos b = [2]", b_dev, 1e-10));
    out.push(Check {
        name: "krylov dimension 2",
        passed: lz.krylov_dim() == 2,
        detail: format!("D_K = {}", lz.krylov_dim()),
    });

    let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
    let ck = k_complexity(&krylov_evolve(&lz, &times)?);
    let dev = max_dev(times.iter().zip(&ck).map(|(t, c)| (c - (2.0 * t).sin().powi(2)).abs()));
    out.push(check("C_K(t) = sin^2(2t)", dev, 1e-9));

    let mut dev = 0.0f64;
    for &t in &times {
        let g = autocorrelation(&spec, &x, t)?;
        dev = dev.max((g - c64::new(2.0 * (2.0 * t).cos(), 0.0)).norm());
    }
    out.push(check("G(t) = 2 cos(2t)", dev, 1e-10));

    let mut dev = 0.0f64;
    for k in 1..=20 {
        let tau = FRAC_PI_4 * k as f64 / 20.0;
        dev = dev.max((oqsl(&spec, &x, tau, 33)?.tau_qsl - tau).abs());
    }
    out.push(check("tau_QSL = tau on (0, pi/4]", dev, 1e-9));

    let mut dev = 0.0f64;
    for k in 1..=20 {
        let tau = FRAC_PI_8 * k as f64 / 20.0;
        dev = dev.max((complexity_oqsl(&lz, tau)?.tau_ref - tau).abs());
    }
    out.push(check("complexity tau_ref = tau on (0, pi/8]", dev, 1e-8));

    let r = count_resonances(&[0.0, 1.0, 2.0], 1e-12)?;
    out.push(Check {
        name: "resonances of {0,1,2}",
        passed: (r.count1, r.count2) == (0, 1),
        detail: format!("({}, {})", r.count1, r.count2),
    });

    let mut swap = Mat::<c64>::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(i, j)] = c64::new(1.0, 0.0);
    }
    let swap = OperatorVector::new(swap)?;
    out.push(check("OpEE(SWAP) = 2 bits", (opee(&swap, 2, 1)?.entropy_bits - 2.0).abs(), 1e-9));
    let xz = OperatorVector::new(kron(pauli_x().as_ref(), pauli_z().as_ref()))?;
    out.push(check("OpEE(X Z) = 0", opee(&xz, 2, 1)?.entropy_bits.abs(), 1e-12));

    let xi = site_operator(3, 2, pauli_x().as_ref())?;
    let w = influence(&pauli_decompose(&xi, 3)?);
    out.push(Check { name: "influence(X_i) = 1", passed: w == 1.0, detail: format!("{w}") });
    let id = OperatorVector::new(kron(identity2().as_ref(), pauli_z().as_ref()))?;
    out.push(check("IPR(single Pauli) = 1", (ipr(&pauli_decompose(&id, 2)?)? - 1.0).abs(), 1e-12));
    Ok(out)
}
