//! Property-based checks of the structural invariants.

use dicke_trap::analytic::{analytic_coefficients, state_from_coefficients};
use dicke_trap::concurrence::{
    conditional_pair_concurrence, pair_reduced_density, wootters_concurrence, PairState,
};
use dicke_trap::dicke::conditioned_state;
use dicke_trap::lindblad::{apply_generator, propagate, GeneratorSpec, PropagateOptions};
use dicke_trap::model::{build_kernel, AtomGeometry, Geometry, SystemParams};
use dicke_trap::space::{self, max_abs, max_abs_diff, DensityMatrix};
use dicke_trap::transform::build_u;
use dicke_trap::{CMatrix, CVector, Complex64};
use nalgebra::Matrix4;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Random density matrix `AA† / tr(AA†)` on the `N + 2` space.
fn density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    let d = space::dim(n);
    proptest::collection::vec(complex(), d * d).prop_map(move |v| {
        let a = CMatrix::from_vec(d, d, v);
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityMatrix::new(m / tr).unwrap()
    })
}

fn params() -> impl Strategy<Value = SystemParams> {
    (1usize..=6, 0.1..2.0f64, 0.0..1.0f64, 0.0..0.5f64, -3.0..3.0f64, -0.3..0.3f64).prop_map(
        |(n, eps, k, gamma, det, lamb)| {
            SystemParams::new(n, eps, k, gamma, 10.0, 10.0 + det)
                .unwrap()
                .with_lamb_shift(lamb)
        },
    )
}

/// Textbook Lindblad right-hand side from the public generator pieces.
fn dense_generator(spec: &GeneratorSpec, rho: &CMatrix) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    let h = spec.hamiltonian();
    let mut out = (h * rho - rho * h) * (-i);
    for ch in spec.channels() {
        let l = &ch.op;
        let ld = l.adjoint();
        let r = Complex64::new(ch.rate, 0.0);
        out += (l * rho * &ld * Complex64::new(2.0, 0.0) - &ld * l * rho - rho * &ld * l) * r;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_is_traceless_and_hermitian(p in params(), seed in 0u64..1000) {
        let n = p.n_atoms;
        let kernel = build_kernel(&p, &Geometry::PointLike).unwrap();
        let spec = GeneratorSpec::from_params(&p, &kernel).unwrap();
        let d = space::dim(n);
        let m = CMatrix::from_fn(d, d, |r, c| {
            let x = ((seed as usize + 7 * r + 13 * c) % 17) as f64 / 17.0;
            Complex64::new(x, if r == c { 0.0 } else { x - 0.5 })
        });
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::new_unchecked(&herm / herm.trace());
        let drho = apply_generator(&spec, &rho).unwrap();
        let scale = max_abs(&drho).max(1.0);
        prop_assert!(drho.trace().norm() <= 1e-12 * scale);
        prop_assert!(max_abs_diff(&drho, &drho.adjoint()) <= 1e-12 * scale);
        let dense = dense_generator(&spec, rho.matrix());
        prop_assert!(max_abs_diff(&drho, &dense) <= 1e-12 * scale);
    }

    #[test]
    fn propagation_keeps_a_valid_state(p in params(), rho in density(3)) {
        let p = SystemParams { n_atoms: 3, ..p };
        let kernel = build_kernel(&p, &Geometry::PointLike).unwrap();
        let spec = GeneratorSpec::in_frame(&p, &kernel, 0.0, false).unwrap();
        let times: Vec<f64> = (0..6).map(|i| i as f64 * 0.4).collect();
        let traj = propagate(&spec, &rho, &times, &PropagateOptions::default()).unwrap();
        prop_assert!(traj.max_trace_drift <= 1e-9);
        prop_assert!(traj.min_eigenvalue >= -1e-9);
        for s in &traj.states {
            prop_assert!(s.hermiticity_error() <= 1e-12);
        }
    }

    #[test]
    fn rotation_is_unitary_and_preserves_excitations(n in 1usize..=12) {
        let u = build_u(n);
        let d = space::dim(n);
        prop_assert!(max_abs_diff(&(u.matrix().adjoint() * u.matrix()), &CMatrix::identity(d, d)) <= 1e-12);
        let num = space::excitation_number(n);
        prop_assert!(max_abs(&(u.matrix() * &num - &num * u.matrix())) <= 1e-12);
    }

    #[test]
    fn wootters_concurrence_is_bounded(v in proptest::collection::vec(complex(), 16)) {
        let a = Matrix4::from_iterator(v);
        let m = a * a.adjoint();
        let pair = PairState { matrix: m / m.trace() };
        let c = wootters_concurrence(&pair).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&c));
    }

    #[test]
    fn wootters_is_invariant_under_local_phases(theta in 0.0..6.3f64, p in 0.05..0.9f64, chi in complex()) {
        // Scale χ so the X-state stays positive: |χ|² ≤ p_eg p_ge.
        let q = 1.0 - p;
        let p_eg = p * 0.6;
        let p_ge = p * 0.4;
        let chi = chi * ((p_eg * p_ge).sqrt() / 2.0f64.sqrt());
        let pair = PairState::x_state(q, p_eg, p_ge, chi);
        let rotated = PairState::x_state(q, p_eg, p_ge, chi * Complex64::from_polar(1.0, theta));
        let a = wootters_concurrence(&pair).unwrap();
        let b = wootters_concurrence(&rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
        prop_assert!((a - 2.0 * chi.norm()).abs() <= 1e-9);
    }

    #[test]
    fn closed_form_stays_physical(p in params(), frac in 0.0..30.0f64) {
        let co = analytic_coefficients(&p);
        let t = frac / p.total_rate().max(1e-3);
        let st = state_from_coefficients(&co, t);
        let rho = st.to_density_matrix();
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-9);
        prop_assert!(st.min_eigenvalue() >= -1e-9);
        prop_assert!(rho.min_eigenvalue() >= -1e-9);
        if p.n_atoms >= 2 && st.survival() > 1e-6 {
            let c = conditional_pair_concurrence(&st).unwrap();
            prop_assert!((0.0..=1.0 + 1e-9).contains(&c));
        }
    }

    #[test]
    fn partial_trace_preserves_trace(rho in density(4), i in 0usize..4, j in 0usize..4) {
        prop_assume!(i < j);
        let pair = pair_reduced_density(&rho, i, j).unwrap();
        prop_assert!((pair.matrix.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        let cond = conditioned_state(&rho).unwrap();
        prop_assert!((cond.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn explicit_kernel_is_symmetric_with_rate_diagonal(
        coords in proptest::collection::vec(-2e-6..2e-6f64, 12),
    ) {
        let positions: Vec<[f64; 3]> = coords.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let geom = AtomGeometry::new(positions, [0.0, 0.0, 1.0]).unwrap();
        let p = SystemParams::new(4, 1.0, 1.0, 2.0, 3e15, 3e15).unwrap();
        let kernel = build_kernel(&p, &Geometry::Explicit(geom)).unwrap();
        let g = &kernel.gamma_matrix;
        for a in 0..4 {
            prop_assert_eq!(g[(a, a)], 2.0);
            for b in 0..4 {
                prop_assert!((g[(a, b)] - g[(b, a)]).abs() <= 1e-12);
                prop_assert!(g[(a, b)].abs() <= 2.0 + 1e-12);
            }
        }
        prop_assert!(kernel.min_gamma_eigenvalue() >= -1e-9);
    }
}

#[test]
fn oracle_equivalence_for_each_size() {
    // One deterministic detuned case per N, complementing the randomised
    // acceptance run.
    for n in [1usize, 2, 3, 5, 10] {
        let eps = 1.0;
        let p = SystemParams::new(n, eps, 0.7, 0.2, 50.0, 50.0 + 2.0 * (n as f64).sqrt() * eps)
            .unwrap()
            .with_lamb_shift(0.05);
        let kernel = build_kernel(&p, &Geometry::PointLike).unwrap();
        let spec = GeneratorSpec::from_params(&p, &kernel).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25 * p.tau_ac()).collect();
        let traj = propagate(&spec, &DensityMatrix::uniform_atomic_mixture(n), &times, &PropagateOptions::default())
            .unwrap();
        let u = build_u(n);
        let co = analytic_coefficients(&p);
        for (t, s) in times.iter().zip(&traj.states) {
            let rt = u.forward(s).unwrap();
            let a = state_from_coefficients(&co, *t).to_density_matrix();
            let dev = max_abs_diff(rt.matrix(), a.matrix());
            assert!(dev <= 1e-6, "N={n} t={t}: {dev:e}");
        }
    }
}

#[test]
fn bright_state_is_the_only_coupled_direction() {
    for n in 2..=6 {
        let u = build_u(n);
        let mut bright = CVector::zeros(space::dim(n));
        for h in 1..=n {
            bright[h] = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        }
        let first = u.matrix().column(1).into_owned();
        assert!((first - bright).norm() <= 1e-12);
    }
}
