use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use cohfeed_core::linalg::{c, cis, outer, phase_distance, ComplexMatrix};
use cohfeed_core::optics::{equal_up_to_phase, verify};
use cohfeed_core::schemes::*;
use cohfeed_core::{apply_channel, fidelity, reconstruct, PureState};
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn target_strategy() -> impl Strategy<Value = PureState> {
    (0.05..3.0f64, -PI..PI).prop_map(|(t, p)| {
        let (s, co) = (t / 2.0).sin_cos();
        PureState::qubit(c(co, 0.0), cis(p) * s).unwrap()
    })
}

#[test]
fn weak_swap_listed_factorization() {
    for &lam in &[0.1, 0.7, FRAC_PI_4, 1.3, FRAC_PI_2] {
        let u = weak_swap_unitary(lam);
        assert!(equal_up_to_phase(&hadamard_layout_product(lam, true), &u, TOL));
        let f = weak_swap_factors(lam).unwrap();
        assert!(phase_distance(&reconstruct(&f).unwrap(), &u).distance < TOL, "lambda {lam}");
    }
}

#[test]
fn target_dep_listed_factorization() {
    for &lam in &[0.1, 0.7, FRAC_PI_4, 1.3, FRAC_PI_2] {
        let u = target_dep_unitary(lam).unwrap();
        assert!(equal_up_to_phase(&hadamard_layout_product(lam, false), &u, TOL));
        let f = target_dep_factors(lam).unwrap();
        assert!(phase_distance(&reconstruct(&f).unwrap(), &u).distance < TOL, "lambda {lam}");
    }
}

#[test]
fn basic_products_for_ground_target() {
    let s = basic_scheme(&PureState::basis(2, 0)).unwrap();
    assert!(equal_up_to_phase(&basic_cs_product(), &s.coupling, TOL));
    let simplified = basic_simplified_product();
    assert!(!equal_up_to_phase(&simplified, &s.coupling, 1e-3));
    let fix = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)]).kron(&ComplexMatrix::identity(2));
    assert!(equal_up_to_phase(&(&fix * &simplified), &s.coupling, TOL));
}

#[test]
fn basic_circuit_matches() {
    let s = basic_scheme(&PureState::basis(2, 0)).unwrap();
    for ell in [-2, 1, 2, 3] {
        let plain = basic_circuit(ell, false).unwrap();
        assert!(equal_up_to_phase(&plain.matrix().unwrap(), &basic_simplified_product(), TOL));
        assert!(verify(&basic_circuit(ell, true).unwrap(), &s.coupling, TOL).unwrap().pass);
    }
}

#[test]
fn hadamard_layout_circuits_verify() {
    for ell in 1..=3 {
        for &lam in &[0.2, FRAC_PI_4, 1.1, FRAC_PI_2] {
            let ws = weak_swap_circuit(lam, ell).unwrap();
            assert!(verify(&ws, &weak_swap_unitary(lam), TOL).unwrap().pass);
            let td = target_dep_circuit(lam, ell).unwrap();
            assert!(verify(&td, &target_dep_unitary(lam).unwrap(), TOL).unwrap().pass);
        }
    }
}

#[test]
fn full_swap_aliases_on_fifth_order() {
    let circ = weak_swap_circuit(FRAC_PI_2, 1).unwrap();
    let alias = circ.with_ell(5).unwrap();
    assert!(verify(&alias, &cohfeed_core::gates::swap(), TOL).unwrap().pass);
    let off = circ.with_ell(2).unwrap();
    assert!(!verify(&off, &cohfeed_core::gates::swap(), 1e-3).unwrap().pass);
}

#[test]
fn decay_parameterizations_disagree() {
    let d = decay_comparison(0.3, 1);
    assert!((d.decay_channel - (0.6f64).cos().powi(2)).abs() < 1e-15);
    assert!((d.decay_printed - (0.3f64).cos().powi(2)).abs() < 1e-15);
    assert!((d.decay_channel - d.decay_printed).abs() > 0.1);
}

#[test]
fn iteration_estimate_example() {
    let e = iterations_needed(0.99, 0.5, 0.5).unwrap();
    assert!((e.n_exact - 50f64.ln() / 2f64.ln()).abs() < 1e-12);
    assert_eq!(e.operational, 6);
    assert!((e.n_paper - 2.0 * (0.02f64).ln()).abs() < 1e-12);
    assert!(iterations_needed(0.99, 0.5, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_swap_kraus_closed_form(t in target_strategy(), lam in 0.01..1.5f64) {
        let s = weak_swap(lam, &t).unwrap();
        let tp = t.perp().unwrap();
        let (a, b) = (t.amplitudes(), tp.amplitudes());
        let k0 = outer(a, a).scale(cis(-lam)).try_add(&outer(b, b).scale_re(lam.cos())).unwrap();
        let k1 = outer(a, b).scale_re(lam.sin());
        prop_assert!(s.k0().dist(&k0) < TOL);
        prop_assert!(s.k1().dist(&k1) < TOL);
    }

    #[test]
    fn channel_decay_is_cos_squared(t in target_strategy(), psi in target_strategy(), lam in 0.1..1.4f64) {
        let s = weak_swap(lam, &t).unwrap();
        let mut rho = psi.to_density();
        let gap0 = 1.0 - fidelity(&rho, &t).unwrap();
        let mut gap = gap0;
        for _ in 0..5 {
            rho = apply_channel(&s.kraus, &rho).unwrap();
            let next = 1.0 - fidelity(&rho, &t).unwrap();
            prop_assert!((next - gap * lam.cos().powi(2)).abs() < 1e-10);
            gap = next;
        }
    }

    #[test]
    fn basic_scheme_resets_in_one_step(t in target_strategy(), psi in target_strategy()) {
        let s = basic_scheme(&t).unwrap();
        let rho = apply_channel(&s.kraus, &psi.to_density()).unwrap();
        prop_assert!((fidelity(&rho, &t).unwrap() - 1.0).abs() < 1e-10);
        let eff = kraus_pair_of(&s.coupling);
        prop_assert!(eff.0.dist(s.k0()) < TOL && eff.1.dist(s.k1()) < TOL);
    }
}

#[test]
fn target_dep_kraus_closed_form() {
    let t = target_dep_target();
    let tp = t.perp().unwrap();
    let (a, b) = (t.amplitudes(), tp.amplitudes());
    for &lam in &[0.3, 0.9, 1.4] {
        let s = target_dep_scheme(lam).unwrap();
        let base = outer(a, a).try_add(&outer(b, b).scale_re(lam.cos())).unwrap();
        let off = outer(a, b).scale_re(lam.sin());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let k0 = base.try_add(&off).unwrap().scale_re(r);
        let k1 = base.try_sub(&off).unwrap().scale_re(r);
        assert!(s.k0().dist(&k0) < TOL, "{lam}");
        assert!(s.k1().dist(&k1) < TOL, "{lam}");
    }
}

fn kraus_pair_of(u: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    (u.block(0, 0, 2, 2).unwrap(), u.block(2, 0, 2, 2).unwrap())
}
