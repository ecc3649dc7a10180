use hmin_core::basis::{bloch_decompose, gamma_of_sqrt};
use hmin_core::linalg::{herm_eig, hs_inner, kron, partial_trace, psd_sqrt};
use hmin_core::measurements::{
    apply_local_measurement, projective_from_unitary, sequential_state, weak_apply, WeakScheme,
};
use hmin_core::measures::{h_min_bell_diagonal, h_min_isotropic, h_min_upper_bound, h_min_werner, seq_distance};
use hmin_core::optimizer::{optimize_measurement, Goal, OptimizerConfig};
use hmin_core::states::{bell_diagonal, isotropic, random_density, random_density_with, random_unitary, werner};
use hmin_core::{ComplexMatrix, ProjectiveMeasurement, Subsystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
    let g = random_density(d, 1, d, seed).unwrap();
    let u = random_unitary(d, &mut rng(seed ^ 0x5a5a));
    // spread the spectrum over negative values too
    let shifted = g.matrix() - &ComplexMatrix::identity(d).scale(0.6 / d as f64);
    &u * &shifted * u.adjoint()
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstruction(d in 1usize..7, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let spec = herm_eig(&h).unwrap();
        prop_assert!((spec.reconstruct() - &h).hs_norm() < 1e-9);
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_of_square(d in 1usize..7, seed in any::<u64>()) {
        let s = psd_sqrt(random_density(d, 1, d, seed).unwrap().matrix()).unwrap();
        let back = psd_sqrt(&(&s * &s)).unwrap();
        prop_assert!((back - &s).hs_norm() < 1e-8);
    }

    #[test]
    fn kron_and_partial_trace(seed in any::<u64>(), (m, n) in dims(), t in -2.0f64..2.0) {
        let a = random_hermitian(m, seed);
        let b = random_hermitian(n, seed.wrapping_add(1));
        let b2 = random_hermitian(n, seed.wrapping_add(2));
        let ab = kron(&a, &b);
        prop_assert!((ab.trace() - a.trace() * b.trace()).norm() < 1e-12);
        // bilinear in the second slot
        let lhs = kron(&a, &(&b + &b2.scale(t)));
        let rhs = &ab + &kron(&a, &b2).scale(t);
        prop_assert!((lhs - rhs).hs_norm() < 1e-12);

        let r1 = random_density(m, n, 2, seed).unwrap();
        let r2 = random_density(m, n, 3, seed.wrapping_add(9)).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let mix = r1.matrix() + &r2.matrix().scale(t);
            let lin = partial_trace(&mix, (m, n), keep).unwrap();
            let sum = partial_trace(r1.matrix(), (m, n), keep).unwrap()
                + partial_trace(r2.matrix(), (m, n), keep).unwrap().scale(t);
            prop_assert!((lin - sum).hs_norm() < 1e-12);
            prop_assert!((partial_trace(r1.matrix(), (m, n), keep).unwrap().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bloch_round_trip(seed in any::<u64>(), (m, n) in dims()) {
        let rho = random_density(m, n, m * n, seed).unwrap();
        let dec = bloch_decompose(rho.matrix(), m, n).unwrap();
        prop_assert!((dec.reconstruct().unwrap() - rho.matrix()).hs_norm() < 1e-10);
        prop_assert!((dec.gamma()[(0, 0)] - 1.0 / ((m * n) as f64).sqrt()).abs() < 1e-12);
        let h = random_hermitian(m * n, seed);
        let dec = bloch_decompose(&h, m, n).unwrap();
        prop_assert!((dec.reconstruct().unwrap() - &h).hs_norm() < 1e-10);
    }

    #[test]
    fn constructors_validate(seed in any::<u64>(), (m, n) in dims(), rank in 1usize..5) {
        let rho = random_density(m, n, rank, seed).unwrap();
        let spec = rho.spectrum().unwrap();
        prop_assert!(spec.min() > -1e-10);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.matrix().hermiticity_defect() < 1e-12);
    }

    #[test]
    fn bell_diagonal_marginals_are_mixed(u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
        // barycentric point inside the tetrahedron with vertices at the Bell states
        let weights = [u * v, u * (1.0 - v), (1.0 - u) * w, (1.0 - u) * (1.0 - w)];
        let vertices = [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, -1.0]];
        let mut cs = [0.0; 3];
        for (wt, vert) in weights.iter().zip(vertices) {
            for k in 0..3 {
                cs[k] += wt * vert[k];
            }
        }
        let rho = bell_diagonal(cs).unwrap();
        let dec = bloch_decompose(rho.matrix(), 2, 2).unwrap();
        prop_assert!(dec.x().amax() < 1e-12);
        prop_assert!(dec.y().amax() < 1e-12);
        let f = h_min_bell_diagonal(cs).unwrap();
        prop_assert!((0.0..=0.5 + 1e-12).contains(&f));
        prop_assert!(h_min_upper_bound(&rho).unwrap() >= f - 1e-8);
    }

    #[test]
    fn family_symmetries(seed in any::<u64>(), x in 0.0f64..1.0, y in -1.0f64..1.0, d in 2usize..4) {
        let u = random_unitary(d, &mut rng(seed));
        let iso = isotropic(d, x).unwrap();
        let conj = ComplexMatrix::from_fn(d, d, |i, j| u[(i, j)].conj());
        prop_assert!((iso.local_unitary(&u, &conj).unwrap().matrix() - iso.matrix()).hs_norm() < 1e-9);
        let w = werner(d, y).unwrap();
        prop_assert!((w.local_unitary(&u, &u).unwrap().matrix() - w.matrix()).hs_norm() < 1e-9);
        prop_assert!(h_min_isotropic(d, x).unwrap() >= 0.0);
        prop_assert!(h_min_werner(d, y).unwrap() >= 0.0);
    }

    #[test]
    fn measurement_projection(seed in any::<u64>(), (m, n) in dims()) {
        let mut r = rng(seed);
        let p = projective_from_unitary(&random_unitary(m, &mut r)).unwrap();
        prop_assert!(ProjectiveMeasurement::new(p.projectors().to_vec()).is_ok());
        let op = random_density_with(m, n, m * n, &mut r).unwrap();
        let pm = apply_local_measurement(op.matrix(), &p).unwrap();
        let residual = op.matrix() - &pm;
        prop_assert!(hs_inner(&residual, &pm).unwrap().norm() < 1e-10);
    }

    #[test]
    fn weak_completeness(x in 1e-4f64..30.0, seed in any::<u64>()) {
        let p = projective_from_unitary(&random_unitary(2, &mut rng(seed))).unwrap();
        let w = WeakScheme::qubit(x, &p).unwrap();
        let (a, b) = (w.omega_plus(), w.omega_minus());
        let sum = &a * a.adjoint() + &b * b.adjoint();
        prop_assert!((sum - ComplexMatrix::identity(2)).hs_norm() < 1e-10);
        prop_assert!((w.tau() - 1.0 / x.cosh()).abs() < 1e-12);
    }

    #[test]
    fn sequential_closed_form(x in 0.05f64..4.0, seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let rho = random_density_with(2, n, 2 * n, &mut r).unwrap();
        let p = projective_from_unitary(&random_unitary(2, &mut r)).unwrap();
        let s = rho.sqrt().unwrap();
        let w = WeakScheme::qubit(x, &p).unwrap();
        let mut iterated = s.clone();
        for k in 1..=10u32 {
            iterated = weak_apply(&iterated, &w).unwrap();
            let closed = sequential_state(&s, &p, w.tau(), k).unwrap();
            prop_assert!((&closed - &iterated).hs_norm() < 1e-10);
        }
    }

    #[test]
    fn seq_distance_two_routes(seed in any::<u64>(), x in 0.1f64..3.0, a in 0u32..6, b in 0u32..6) {
        let mut r = rng(seed);
        let rho = random_density_with(2, 2, 4, &mut r).unwrap();
        let p = projective_from_unitary(&random_unitary(2, &mut r)).unwrap();
        let d = seq_distance(&rho, &p, x, a, b).unwrap();
        prop_assert!((d.direct - d.formula).abs() < 1e-10);
    }

    #[test]
    fn gram_trace_is_one(seed in any::<u64>(), (m, n) in dims()) {
        // ΓΓᵗ of √ρ has trace tr ρ = 1
        let rho = random_density(m, n, 3, seed).unwrap();
        let g = gamma_of_sqrt(&rho).unwrap().gram();
        prop_assert!((g.trace() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn budget_monotone(seed in any::<u64>(), budget in 1usize..6000) {
        let rho = random_density(2, 2, 4, seed).unwrap();
        let s = rho.sqrt().unwrap();
        let objective = |p: &ProjectiveMeasurement| {
            Ok(hmin_core::linalg::trace_product(&s, &apply_local_measurement(&s, p)?).re)
        };
        let small = OptimizerConfig { budget, ..OptimizerConfig::default() };
        let large = OptimizerConfig { budget: budget * 2, ..OptimizerConfig::default() };
        let a = optimize_measurement(objective, 2, Goal::Minimize, None, &small).unwrap();
        let b = optimize_measurement(objective, 2, Goal::Minimize, None, &large).unwrap();
        prop_assert!(b.best_value <= a.best_value);
        prop_assert!(a.evaluations <= budget);
    }

    #[test]
    fn constrained_optimum_commutes(seed in any::<u64>(), m in 2usize..4) {
        let rho = random_density(m, 2, 2 * m, seed).unwrap();
        let marginal = rho.marginal(Subsystem::A);
        let r = optimize_measurement(|_| Ok(0.0), m, Goal::Minimize, Some(&marginal), &OptimizerConfig::default())
            .unwrap();
        for q in r.best_measurement.projectors() {
            prop_assert!(q.commutator(&marginal).hs_norm() < 1e-8);
        }
    }
}
