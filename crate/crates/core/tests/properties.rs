mod common;

use common::*;
use krylovlab_core::{
    build_type1, c64, complexity_oqsl, count_resonances, influence, ipr, k_complexity, kernel_refined_complexity_oqsl,
    krylov_evolve, lanczos, opee, opee_reshuffle, oqsl, pauli_decompose, randomize_eigenvectors, refined_oqsl,
    sample_goe, size_resolved_map, OperatorVector, Type1Params,
};
use proptest::prelude::*;

/// Reverses the tensor-factor order, so site `i` becomes site `n + 1 - i`.
fn reverse_sites(o: &OperatorVector, n: usize) -> OperatorVector {
    let rev = |k: usize| (0..n).fold(0, |acc, b| acc | (((k >> b) & 1) << (n - 1 - b)));
    let m = o.entries();
    OperatorVector::from_fn(1 << n, |i, j| m[(rev(i), rev(j))]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn speed_limits_never_exceed_tau(seed in any::<u64>(), d in 2usize..=16, tau in 0.01f64..4.0) {
        let mut r = rng(seed);
        let h = random_hamiltonian(&mut r, d);
        let o = random_observable(&mut r, d);
        let spec = h.spectral_decomposition().unwrap();
        let basic = oqsl(&spec, &o, tau, 9).unwrap();
        prop_assert!(basic.tau_qsl <= tau + 1e-9);
        let refined = refined_oqsl(&spec, &o, tau, 9).unwrap();
        prop_assert!(refined.tau_ref <= tau + 1e-9);
        let lz = lanczos(&h, &o, 1e-8, 100_000).unwrap();
        prop_assert!(complexity_oqsl(&lz, tau).unwrap().tau_ref <= tau + 1e-9);
        prop_assert!(kernel_refined_complexity_oqsl(&lz, tau, 1e-10).unwrap().tau_ref <= tau + 1e-9);
    }

    #[test]
    fn krylov_weight_is_conserved(seed in any::<u64>(), d in 2usize..=12) {
        let mut r = rng(seed);
        let h = random_hamiltonian(&mut r, d);
        let o = random_observable(&mut r, d);
        let lz = lanczos(&h, &o, 1e-8, 100_000).unwrap();
        let times: Vec<f64> = (0..30).map(|k| 0.5 * k as f64).collect();
        let amps = krylov_evolve(&lz, &times).unwrap();
        let ck = k_complexity(&amps);
        for (i, c) in ck.iter().enumerate() {
            prop_assert!((amps.total_weight(i) - 1.0).abs() < 1e-6);
            prop_assert!(*c >= 0.0 && *c <= (lz.krylov_dim() - 1) as f64 + 1e-9);
        }
    }

    #[test]
    fn pauli_diagnostics(seed in any::<u64>(), n in 1usize..=4, phase in 0.0f64..6.3) {
        let mut r = rng(seed);
        let o = random_observable(&mut r, 1 << n);
        let c = pauli_decompose(&o, n).unwrap();
        prop_assert!((c.norm_sqr() - 1.0).abs() < 1e-10);
        let rows = size_resolved_map(&c);
        let masses: Vec<f64> = rows.iter().map(|row| row.iter().map(|v| v * v).sum()).collect();
        prop_assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let weighted: f64 = masses.iter().enumerate().map(|(k, m)| k as f64 * m).sum();
        prop_assert!((weighted - influence(&c)).abs() < 1e-12);
        let p = ipr(&c).unwrap();
        prop_assert!(p >= 1.0 - 1e-12 && p <= 4f64.powi(n as i32) + 1e-9);

        let rotated = o.scaled(c64::new(phase.cos(), phase.sin()));
        let cr = pauli_decompose(&rotated, n).unwrap();
        prop_assert!((influence(&cr) - influence(&c)).abs() < 1e-12);
        prop_assert!((ipr(&cr).unwrap() - p).abs() < 1e-12 * p);
    }

    #[test]
    fn opee_bounds_and_symmetry(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let o = OperatorVector::new(complex_gaussian(&mut r, 1 << n)).unwrap();
        for cut in 1..n {
            let a = opee(&o, n, cut).unwrap();
            // the same bipartition with the roles of A and B swapped
            let b = opee(&reverse_sites(&o, n), n, n - cut).unwrap();
            let bound = 2.0 * cut.min(n - cut) as f64;
            prop_assert!(a.entropy_bits >= 0.0 && a.entropy_bits <= bound + 1e-9);
            prop_assert!((a.schmidt_sq.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!((a.entropy_bits - b.entropy_bits).abs() < 1e-8);
            let c = opee_reshuffle(&o, n, cut).unwrap();
            prop_assert!((a.entropy_bits - c.entropy_bits).abs() < 1e-8);
        }
    }

    #[test]
    fn resonance_counts_grow_with_tolerance(seed in any::<u64>(), d in 2usize..=24) {
        let e = sample_goe(d, seed).unwrap().eigenvalues().unwrap();
        let tight = count_resonances(&e, 1e-12).unwrap();
        let loose = count_resonances(&e, 1e-6).unwrap();
        prop_assert!(loose.count1 >= tight.count1 && loose.count2 >= tight.count2);
        // brute force
        let mut c1 = 0u64;
        let mut pairs = Vec::new();
        for m in 0..d {
            for n in m..d {
                if n > m && (e[m] - e[n]).abs() <= 1e-6 {
                    c1 += 1;
                }
                pairs.push(e[m] + e[n]);
            }
        }
        let mut c2 = 0u64;
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                if (pairs[i] - pairs[j]).abs() <= 1e-6 {
                    c2 += 1;
                }
            }
        }
        prop_assert_eq!((loose.count1, loose.count2), (c1, c2));
    }

    #[test]
    fn eigenvector_randomization_keeps_spectrum(seed in any::<u64>(), d in 1usize..=30) {
        let h = sample_goe(d, seed).unwrap();
        let before = h.eigenvalues().unwrap();
        let after = randomize_eigenvectors(&h, seed ^ 1).unwrap().eigenvalues().unwrap();
        let range = (before[d - 1] - before[0]).max(1.0);
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() <= 1e-10 * range);
        }
    }

    #[test]
    fn type1_is_exactly_symmetric(seed in any::<u64>(), d in 2usize..=20, x in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let mut gamma: Vec<f64> = (0..d).map(|_| normal(&mut r)).collect();
        let norm = gamma.iter().map(|g| g * g).sum::<f64>().sqrt();
        gamma.iter_mut().for_each(|g| *g /= norm);
        let d_values = (0..d).map(|_| normal(&mut r)).collect();
        let e_values = (0..d).map(|k| k as f64 + 0.3 * normal(&mut r).tanh()).collect();
        let h = build_type1(&Type1Params { x, gamma, d_values, e_values }).unwrap().real_entries();
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }
}
