use nalgebra::Matrix2;
use proptest::prelude::*;

use condeng::conditional::{conditional_operator, oracle_conditional, photon_add_operator, OracleSource};
use condeng::couplers::{heisenberg_matrix, inverse_params, params_from_angles, swap_modes, two_mode_unitary};
use condeng::feedback::{amplify_and_detect, loss_channel, unconditional_mean};
use condeng::fock::{fidelity, mandel_q, thermal_diagonal};
use condeng::multiport::{coupling_from_angles, upq_matrix, verify_pseudo_unitarity};
use condeng::sorder::reorder_monomial;
use condeng::synthesis::{fock_probability, optimal_r2, q_function_zeros, SynthesisPlan};
use condeng::{
    CMatrix, CouplerAngles, CouplerKind, CouplerParams, DensityDiagonal, FockVector, HermitianCoupling,
    ModePartition, NormalPoly, PolynomialState, C64,
};

fn max_norm2(m: &Matrix2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn kind() -> impl Strategy<Value = CouplerKind> {
    prop_oneof![Just(CouplerKind::Amplifier), Just(CouplerKind::Converter)]
}

fn angles(scale: f64) -> impl Strategy<Value = CouplerAngles> {
    (kind(), prop::array::uniform4(-scale..scale)).prop_map(|(k, a)| CouplerAngles::new(k, a))
}

fn complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| C64::new(re, im))
}

fn diagonal(cutoff: usize, support: usize) -> impl Strategy<Value = DensityDiagonal> {
    prop::collection::vec(0.0..1.0f64, support).prop_filter_map("empty distribution", move |w| {
        let mut p = vec![0.0; cutoff];
        p[..w.len()].copy_from_slice(&w);
        DensityDiagonal::new(p).ok()?.normalized().ok()
    })
}

fn idler_state() -> impl Strategy<Value = PolynomialState> {
    prop_oneof![
        (0usize..=3).prop_map(PolynomialState::fock),
        (0.0..1.0f64, 0.0..std::f64::consts::TAU)
            .prop_map(|(r, th)| PolynomialState::coherent(C64::from_polar(r, th), 12).unwrap()),
    ]
}

proptest! {
    #[test]
    fn coupler_constraints_hold(a in angles(3.0)) {
        let p = params_from_angles(&a);
        prop_assert!(p.constraint_residual() <= 1e-12);
        prop_assert!(p.ordering_parameter() >= 1.0);
    }

    #[test]
    fn heisenberg_matrix_preserves_its_metric(a in angles(3.0)) {
        let m = heisenberg_matrix(&params_from_angles(&a));
        let g = match a.kind {
            CouplerKind::Amplifier => Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)),
            CouplerKind::Converter => Matrix2::identity(),
        };
        prop_assert!(max_norm2(&(m * g * m.adjoint() - g)) < 1e-12);
    }

    #[test]
    fn inverse_and_swap_are_involutions(a in angles(2.0)) {
        let p = params_from_angles(&a);
        prop_assert_eq!(inverse_params(&inverse_params(&p)), p);
        let back = swap_modes(&swap_modes(&p));
        prop_assert!((back.t() - p.t()).norm() < 1e-15 && (back.r() - p.r()).norm() < 1e-15 && (back.p() - p.p()).norm() < 1e-15);
        let prod = heisenberg_matrix(&inverse_params(&p)) * heisenberg_matrix(&p);
        prop_assert!(max_norm2(&(prod - Matrix2::identity())) < 1e-12);
    }

    #[test]
    fn truncated_inverse_is_adjoint(a in angles(0.8)) {
        let p = params_from_angles(&a);
        prop_assume!(a.kind == CouplerKind::Amplifier || p.t().norm() > 1e-3);
        let d = 10;
        let (u, _) = two_mode_unitary(&p, d, d).unwrap();
        let (ui, _) = two_mode_unitary(&inverse_params(&p), d, d).unwrap();
        prop_assert!(ui.max_diff_interior(&u.adjoint(), d / 2) < 1e-10);
    }

    #[test]
    fn upq_is_pseudo_unitary(n in 1usize..=6, p_frac in 0.0..=1.0f64, seed in prop::collection::vec(-1.0..1.0f64, 72)) {
        let p = ((n as f64) * p_frac).round() as usize;
        let a = CMatrix::from_fn(n, n, |i, j| C64::new(seed[2 * (i * 6 + j)], seed[2 * (i * 6 + j) + 1]));
        let h = HermitianCoupling::new((&a + a.adjoint()) * C64::new(0.5, 0.0)).unwrap();
        let part = ModePartition::new(p, n - p).unwrap();
        let m = upq_matrix(&h, &part).unwrap();
        prop_assert!(verify_pseudo_unitarity(&m, &part) < 1e-10);
    }

    #[test]
    fn multiport_reduces_to_the_coupler(a in angles(2.0)) {
        let (h, part) = coupling_from_angles(&a);
        let m = upq_matrix(&h, &part).unwrap();
        let hm = heisenberg_matrix(&params_from_angles(&a));
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((m[(i, j)] - hm[(i, j)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn reordering_round_trips(m in 0usize..6, n in 0usize..6, s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let there = reorder_monomial(m, n, s, t);
        let back = there.reorder(t, s);
        let want = NormalPoly::monomial(m, n);
        let scale = 1.0 + there.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        prop_assert!(back.max_diff(&want) < 1e-10 * scale * scale);
    }

    #[test]
    fn closed_form_conditional_matches_oracle(a in angles(0.6), f in idler_state(), g in idler_state()) {
        let d = 12;
        let p = params_from_angles(&a);
        prop_assume!(a.kind == CouplerKind::Amplifier || p.t().norm() > 1e-3);
        let y = conditional_operator(&p, &f, &g, d).unwrap();
        let o = oracle_conditional(OracleSource::Angles(&a), &f, &g, d).unwrap();
        prop_assert!(y.matrix().max_diff_leading(&o, d / 2 + 1) < 1e-8);
    }

    #[test]
    fn photon_adding_raises_degree_by_one(r2 in 0.05..2.0f64, alpha in complex(3.0), n in 0usize..6) {
        let p = CouplerParams::amplifier_with_gain(r2).unwrap();
        let d = 12;
        let y = photon_add_operator(&p, alpha, d).unwrap();
        let out = y.matrix().apply(&FockVector::fock(n, d));
        prop_assert!(out.amps()[n + 1].norm() > 0.0);
        prop_assert!(out.tail_mass_from(n + 2) == 0.0);
    }

    #[test]
    fn povm_is_complete(rho in diagonal(48, 10), r2 in 0.01..0.3f64, eta_d in 0.0..=1.0f64) {
        let total: f64 = (0..48)
            .map(|k| match amplify_and_detect(&rho, r2, eta_d, k) {
                Ok((_, p)) => p,
                Err(condeng::Error::ZeroProbability { p, .. }) => p,
                Err(e) => panic!("{e}"),
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn losses_compose(rho in diagonal(24, 24), e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64) {
        let two = loss_channel(&loss_channel(&rho, e1), e2);
        let one = loss_channel(&rho, e1 * e2);
        for (a, b) in two.probs().iter().zip(one.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((two.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loss_keeps_thermal_states_thermal(mean in 0.0..2.0f64, eta in 0.0..=1.0f64) {
        let d = 80;
        let out = loss_channel(&thermal_diagonal(mean, d), eta);
        let want = thermal_diagonal(eta * mean, d);
        for (a, b) in out.probs().iter().zip(want.probs()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn unconditional_mean_grows(n in 0usize..2000, r2 in 1e-4..0.5f64, eta in 0.5..=1.0f64) {
        prop_assert!(unconditional_mean(n + 1, r2, eta) >= unconditional_mean(n, r2, eta));
    }

    #[test]
    fn fock_states_are_sub_poissonian(n in 1usize..20, d in 24usize..40) {
        let q = mandel_q(&DensityDiagonal::fock(n, d)).unwrap();
        prop_assert!((q + 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_gain_maximizes_fock_probability(n in 1usize..30, r2 in 1e-3..5.0f64) {
        prop_assert!(fock_probability(n, r2) <= fock_probability(n, optimal_r2(n)) * (1.0 + 1e-12));
    }

    #[test]
    fn synthesis_reaches_random_targets(
        amps in prop::collection::vec(complex(1.0), 3),
        top in complex(1.0).prop_filter("leading amplitude", |z| z.norm() > 0.2),
        r2 in 0.1..1.0f64,
    ) {
        let mut v = amps;
        v.push(top);
        v.resize(12, C64::new(0.0, 0.0));
        let target = FockVector::normalized(v).unwrap();
        prop_assert_eq!(q_function_zeros(&target).unwrap().len(), 3);
        let plan = SynthesisPlan::new(&target, &CouplerParams::amplifier_with_gain(r2).unwrap()).unwrap();
        let (psi, prob) = plan.execute(16).unwrap();
        prop_assert!(fidelity(&psi, &target.with_cutoff(16)) > 1.0 - 1e-9);
        prop_assert!((prob - plan.probability()).abs() < 1e-9 * prob.max(1e-3));
    }
}
