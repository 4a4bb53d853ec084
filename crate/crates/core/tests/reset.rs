use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use cohfeed_core::linalg::{c, cis};
use cohfeed_core::reset::*;
use cohfeed_core::schemes::{basic_scheme, target_dep_scheme, target_dep_target, weak_swap, SchemeKind};
use cohfeed_core::{iterate_channel, Error, KrausSet, PureState};
use proptest::prelude::*;

fn state(theta: f64, phi: f64) -> PureState {
    let (s, co) = (theta / 2.0).sin_cos();
    PureState::qubit(c(co, 0.0), cis(phi) * s).unwrap()
}

fn states() -> impl Strategy<Value = PureState> {
    (0.0..PI, -PI..PI).prop_map(|(t, p)| state(t, p))
}

fn plus_of(t: &PureState) -> PureState {
    let tp = t.perp().unwrap();
    let v = t.amplitudes().iter().zip(tp.amplitudes()).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
    PureState::new(v).unwrap()
}

#[test]
fn weak_swap_filter_matches_closed_form() {
    let t = state(1.1, 0.4);
    let s = weak_swap(0.4, &t).unwrap();
    let psi = plus_of(&t);
    let num = filtered_fidelity_numeric(&s.kraus, &psi, &t, 5).unwrap();
    let ana = filtered_fidelity_analytic(SchemeKind::WeakSwap, 0.4, &psi, &t, 5).unwrap();
    assert!((num - ana).abs() < 1e-10);
    let tp = t.perp().unwrap();
    let num = filtered_fidelity_numeric(&s.kraus, &tp, &t, 2).unwrap();
    let ana = filtered_fidelity_analytic(SchemeKind::WeakSwap, 0.4, &tp, &t, 2).unwrap();
    assert!((num - ana).abs() < 1e-10);
}

#[test]
fn target_dep_filter_examples() {
    let t = target_dep_target();
    let tp = t.perp().unwrap();
    let lam = 0.9;
    let s = target_dep_scheme(lam).unwrap();
    let out = filter_step(&s.kraus, &FilteredState::new(&tp)).unwrap();
    let want: Vec<_> = tp.amplitudes().iter().map(|z| z * lam.cos()).collect();
    for (a, b) in out.amplitudes().iter().zip(&want) {
        assert!((a - b).norm() < 1e-12);
    }
    assert!((out.norm2() - lam.cos().powi(2)).abs() < 1e-12);

    let id = target_dep_scheme(0.0).unwrap();
    let psi = state(0.7, 0.2);
    let out = filter_step(&id.kraus, &FilteredState::new(&psi)).unwrap();
    for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
        assert!((a - b).norm() < 1e-12);
    }

    let psi = plus_of(&t);
    let f = filtered_fidelity_analytic(SchemeKind::TargetDep, 0.5, &psi, &t, 3).unwrap();
    assert!((f - 1.0 / (1.0 + 0.5f64.cos().powi(6))).abs() < 1e-15);
    let f = filtered_fidelity_analytic(SchemeKind::TargetDep, FRAC_PI_2, &psi, &t, 1).unwrap();
    assert!((f - 1.0).abs() < 1e-15);
}

#[test]
fn basic_filter_proviso() {
    let t = state(0.8, -0.3);
    let s = basic_scheme(&t).unwrap();
    let tp = t.perp().unwrap();
    let v = t.amplitudes().iter().zip(tp.amplitudes()).map(|(a, b)| (a - b) * FRAC_1_SQRT_2).collect();
    let bad = PureState::new(v).unwrap();
    assert_eq!(filtered_fidelity_numeric(&s.kraus, &bad, &t, 1), Err(Error::FilteredToZero));
    assert!(matches!(filtered_fidelity_analytic(SchemeKind::Basic, 0.0, &bad, &t, 1), Err(Error::Proviso(_))));
}

#[test]
fn filtering_loss_ledger() {
    let t = target_dep_target();
    let s = target_dep_scheme(FRAC_PI_2 / 1.5).unwrap();
    let run = filter_run(&s.kraus, &t.perp().unwrap(), 1).unwrap();
    let last = run.last().unwrap();
    let lam = FRAC_PI_2 / 1.5;
    assert!((last.required_gain().unwrap() - 1.0 / lam.cos().powi(2)).abs() < 1e-12);
    assert!(run.windows(2).all(|w| w[1].norm2() <= w[0].norm2() + 1e-15));
    assert_eq!(required_gain(0.75).unwrap(), 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_matches_numeric(t in states(), psi in states(), lam in 0.05..1.5f64, n in 0usize..=20) {
        let s = weak_swap(lam, &t).unwrap();
        if let Ok(ana) = filtered_fidelity_analytic(SchemeKind::WeakSwap, lam, &psi, &t, n) {
            let num = filtered_fidelity_numeric(&s.kraus, &psi, &t, n).unwrap();
            prop_assert!((num - ana).abs() < 1e-10);
        }
        let td = target_dep_scheme(lam).unwrap();
        let tt = target_dep_target();
        if let Ok(ana) = filtered_fidelity_analytic(SchemeKind::TargetDep, lam, &psi, &tt, n) {
            let num = filtered_fidelity_numeric(&td.kraus, &psi, &tt, n).unwrap();
            prop_assert!((num - ana).abs() < 1e-10);
        }
        let b = basic_scheme(&t).unwrap();
        if let Ok(ana) = filtered_fidelity_analytic(SchemeKind::Basic, 0.0, &psi, &t, n) {
            let num = filtered_fidelity_numeric(&b.kraus, &psi, &t, n).unwrap();
            prop_assert!((num - ana).abs() < 1e-10);
        }
    }

    #[test]
    fn ancillas_purify_channel(t in states(), psi in states(), lam in 0.05..1.5f64, n in 1usize..=6) {
        let s = weak_swap(lam, &t).unwrap();
        let trace = iterate_channel(&s.kraus, &psi.to_density(), &t, n).unwrap();
        let tb = timebin_run(&s.kraus, &psi, n, 1.0).unwrap();
        prop_assert!((tb.total_norm2() - 1.0).abs() < 1e-10);
        prop_assert!(tb.reduced_matrix().dist(trace.final_state.matrix()) < 1e-10);
        let oam = oam_run(&s.kraus, &psi, n, &EfficiencyTable::ideal()).unwrap();
        prop_assert!(oam.as_train().reduced_matrix().dist(trace.final_state.matrix()) < 1e-10);
        let dev = timebin_device(&s.effective_unitary(), &psi, n, 1.0).unwrap();
        for (m, p) in &tb.bins {
            let q = &dev.bins[m];
            prop_assert_eq!(p.delay, q.delay);
            for (a, b) in p.amplitudes.iter().zip(&q.amplitudes) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gain_is_at_least_one(gamma in 0.0..5.0f64, dk in 0.0..20.0f64, l in 0.0..2.0f64) {
        let p = GainParams { gamma: Some(gamma), delta_k: dk, length: l, omega1: 1.0, omega2: 1.0, ..Default::default() };
        let r = parametric_gain(&p).unwrap();
        prop_assert!(r.gain >= 1.0);
        prop_assert!(r.gain.is_finite());
    }
}

fn kk(k: &KrausSet, seq: &[usize], psi: &PureState) -> Vec<cohfeed_core::C64> {
    seq.iter().fold(psi.amplitudes().to_vec(), |v, &i| k.operators()[i].apply(&v))
}

#[test]
fn bin_orders_for_two_iterations() {
    let t = state(0.9, 0.3);
    let s = weak_swap(0.6, &t).unwrap();
    let psi = state(2.0, -1.0);
    // Sequences in application order: first iteration first.
    let want = [[0, 0], [1, 0], [0, 1], [1, 1]];
    let tb = timebin_run(&s.kraus, &psi, 2, 0.5).unwrap();
    for (m, seq) in want.iter().enumerate() {
        let v = kk(&s.kraus, seq, &psi);
        let p = &tb.bins[&(m as u64)];
        assert_eq!(p.delay, m as f64 * 0.5);
        assert!(p.amplitudes.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-14));
    }
    let oam = oam_run(&s.kraus, &psi, 2, &EfficiencyTable::ideal()).unwrap();
    let want_oam = [[0, 0], [0, 1], [1, 0], [1, 1]];
    for (m, seq) in want_oam.iter().enumerate() {
        let v = kk(&s.kraus, seq, &psi);
        assert!(oam.modes[&(m as u64)].iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-14));
    }
}

#[test]
fn basic_single_iteration_bins() {
    let t = state(1.3, 0.5);
    let s = basic_scheme(&t).unwrap();
    let psi = state(0.4, 2.0);
    let tb = timebin_run(&s.kraus, &psi, 1, 1.0).unwrap();
    assert_eq!(tb.bins.len(), 2);
    for p in tb.bins.values() {
        let n2: f64 = p.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        assert!((t.overlap(&p.amplitudes).norm_sqr() - n2).abs() < 1e-14);
    }
}

#[test]
fn timebin_fidelity_equals_channel() {
    let t = state(0.5, 1.0);
    let s = weak_swap(0.6, &t).unwrap();
    let psi = state(2.5, 0.1);
    let tb = timebin_run(&s.kraus, &psi, 3, 1.0).unwrap();
    let trace = iterate_channel(&s.kraus, &psi.to_density(), &t, 3).unwrap();
    assert!((tb.fidelity(&t) - trace.records[3].fidelity).abs() < 1e-12);
}

#[test]
fn lossy_oam_deficit() {
    let t = state(0.5, 1.0);
    let s = weak_swap(0.6, &t).unwrap();
    let psi = state(2.5, 0.1);
    let run = oam_run(&s.kraus, &psi, 2, &EfficiencyTable::default()).unwrap();
    let k1w: f64 = s.kraus.operators()[1].apply(psi.amplitudes()).iter().map(|z| z.norm_sqr()).sum();
    assert!((1.0 - run.norm2 - 0.03 * k1w).abs() < 1e-12);
    assert!(matches!(oam_run(&s.kraus, &psi, 4, &EfficiencyTable::default()), Err(Error::EfficiencyMissing(_))));
}

#[test]
fn delays_are_distinct() {
    for n in 1..=10usize {
        let mut seen = std::collections::HashSet::new();
        for a in 0u32..(1 << n) {
            let bits: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
            assert!(seen.insert(timebin_delay(&bits, 1.0).to_bits()));
        }
    }
}

#[test]
fn gain_examples() {
    let p = GainParams { gamma: Some(2.0), length: 0.5, omega1: 1.0, omega2: 1.0, ..Default::default() };
    let r = parametric_gain(&p).unwrap();
    assert!((r.gain - 1f64.cosh().powi(2)).abs() < 1e-12);
    let p0 = GainParams { gamma: Some(0.0), length: 0.5, ..p };
    assert_eq!(parametric_gain(&p0).unwrap().gain, 1.0);
    let base = GainParams { gamma: Some(1.0), length: 0.7, delta_k: 2.0, ..p };
    let at = parametric_gain(&base).unwrap().gain;
    for dk in [2.0 + 1e-8, 2.0 - 1e-8] {
        let g = parametric_gain(&GainParams { delta_k: dk, ..base }).unwrap().gain;
        assert!((g - at).abs() < 1e-8);
    }
}

#[test]
fn gain_from_fields() {
    let p = GainParams {
        d_eff: 2e-12,
        omega1: 2e15,
        omega2: 1.5e15,
        k1: 1.1e7,
        k2: 0.8e7,
        a3_abs: 1e7,
        delta_k: 0.0,
        length: 0.01,
        gamma: None,
    };
    let r = parametric_gain(&p).unwrap();
    let cc = 299_792_458.0f64;
    let g2 = 4.0 * 4e-24 * 4e30 * 2.25e30 * 1e14 / (1.1e7 * 0.8e7 * cc.powi(4));
    assert!((r.gamma2 - g2).abs() < 1e-12 * g2);
    let amp = (g2.sqrt() * 0.01).sinh().powi(2);
    assert!((r.i2_ratio.unwrap() - 0.75 * amp).abs() < 1e-12 * amp.max(1.0));
}

#[test]
fn cloner_limit_values() {
    for n in 1..6u64 {
        let lim = cloner_limit(n).unwrap();
        assert!((lim - (n as f64 + 1.0) / (n as f64 + 2.0)).abs() < 1e-12);
        assert!((cloner_fidelity(n, 1 << 40).unwrap() - lim).abs() < 1e-11);
    }
}
