//! Krylov-space operator dynamics on dense Hermitian models.
//!
//! The crate is organized in layers:
//!
//! * [`hamiltonian`]: GOE samples, type-1 integrable matrices, eigenvector
//!   randomization and the ANNI spin chain.
//! * [`operator`]: the Hilbert–Schmidt operator space, the Liouvillian and
//!   Heisenberg evolution through a spectral decomposition.
//! * [`krylov`]: Lanczos with reorthogonalization, Krylov amplitudes and
//!   Krylov complexity.
//! * [`speed_limit`]: operator quantum speed limits, including the bound for
//!   the complexity operator and its kernel-projected refinement.
//! * [`scrambling`]: Pauli-basis decomposition, influence, IPR and operator
//!   entanglement entropy.
//!
//! Heisenberg evolution uses `O(t) = exp(-iHt) O exp(+iHt)` throughout.
//!
//! The crate is `no_std` + `alloc`. Enable the `std` feature to let the dense
//! kernels use runtime SIMD dispatch.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod linalg;

pub mod hamiltonian;
pub mod krylov;
pub mod operator;
pub mod paulis;
pub mod scrambling;
pub mod speed_limit;

pub use error::{Error, Result};
pub use faer;
pub use faer::{c64, Mat, MatRef};

pub use hamiltonian::{
    build_anni, build_type1, mean_gap_ratio, randomize_eigenvectors, sample_goe, sample_type1_ensemble, AnniParams,
    HamiltonianMatrix, Type1Params,
};
pub use krylov::{
    complexity_matrix, k_complexity, krylov_evolve, krylov_evolve_with, krylov_project, lanczos, lanczos_dense,
    lanczos_with_spectrum, orthonormality_defect, KrylovAmplitudes, KrylovBasis, LanczosResult, TridiagonalSpectrum,
    DEFAULT_LANCZOS_TOL,
};
pub use operator::{
    autocorrelation, evolve_operator, hs_inner, liouvillian_apply, OperatorVector, SpectralDecomposition,
};
pub use scrambling::{
    influence, ipr, opee, opee_from_coefficients, opee_reshuffle, pauli_decompose, pauli_size, size_resolved_map,
    OpeeResult, PauliCoefficients,
};
pub use speed_limit::{
    average_speed, complexity_oqsl, count_resonances, geodesic_distance, kernel_refined_complexity_oqsl, oqsl,
    refined_oqsl, ComplexityOperatorDynamics, OqslResult, ResonanceReport,
};
