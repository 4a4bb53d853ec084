//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use cohfeed_core::linalg::{c, phase_distance, ComplexMatrix};
use cohfeed_core::optics::{
    compile_path_pol, euler_rotation, hwp_matrix, local_product, qqh, qwp_matrix, reorder_qh, simulate, verify,
    waveplate_sandwich,
};
use cohfeed_core::random::{haar_unitary, random_kraus_pair, random_state};
use cohfeed_core::reset::{
    cloner_fidelity, cloner_limit, filtered_fidelity_analytic, filtered_fidelity_numeric, oam_run, parametric_gain,
    timebin_delay, timebin_run, EfficiencyTable, GainParams,
};
use cohfeed_core::schemes::{
    basic_circuit, basic_scheme, decay_comparison, fit_log_gap, target_dep_circuit, target_dep_scheme,
    target_dep_target, target_dep_unitary, weak_swap, weak_swap_circuit, weak_swap_unitary, SchemeKind,
};
use cohfeed_core::{
    control_unitary_from_kraus, cs_decompose, gates, iterate_channel, kraus_from_unitary, reconstruct, PureState, C64,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cs_matrix(th: &[f64]) -> ComplexMatrix {
    let cm = ComplexMatrix::diag(&th.iter().map(|t| c(t.cos(), 0.0)).collect::<Vec<_>>());
    let sm = ComplexMatrix::diag(&th.iter().map(|t| c(t.sin(), 0.0)).collect::<Vec<_>>());
    ComplexMatrix::from_blocks(&cm, &sm, &-&sm, &cm).unwrap()
}

fn cs_round_trip() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let u = haar_unitary(&mut r, 4);
        let f = cs_decompose(&u, 2).map_err(|e| e.to_string())?;
        worst = worst.max(reconstruct(&f).map_err(|e| e.to_string())?.dist(&u));
    }
    let bases = [0.0, 1e-9, 1e-6, 0.3, FRAC_PI_4, 1.2, FRAC_PI_2 - 1e-9];
    let mut clustered = 0.0f64;
    for (i, &b) in bases.iter().enumerate() {
        for k in 0..20 {
            let th = [b, (b + 1e-9 * (k % 3) as f64).min(FRAC_PI_2)];
            let l = haar_unitary(&mut r, 2).direct_sum(&haar_unitary(&mut r, 2));
            let rr = haar_unitary(&mut r, 2).direct_sum(&haar_unitary(&mut r, 2));
            let u = &(&l * &cs_matrix(&th)) * &rr;
            let f = cs_decompose(&u, 2).map_err(|e| format!("clustered set {i}: {e}"))?;
            clustered = clustered.max(reconstruct(&f).map_err(|e| e.to_string())?.dist(&u));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-9, || format!("Haar error {worst:e}"))?;
    check(clustered < 1e-9, || format!("clustered error {clustered:e}"))?;
    check(secs < 5.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("max error {worst:.1e}, clustered {clustered:.1e}, {secs:.2} s"))
}

fn kraus_round_trip() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = random_kraus_pair(&mut r, 2);
        let (k0, k1) = (&k.operators()[0], &k.operators()[1]);
        let (u, _) = control_unitary_from_kraus(k0, k1).map_err(|e| e.to_string())?;
        let back = kraus_from_unitary(&u, 2, 2, 0).map_err(|e| e.to_string())?;
        for (a, b) in back.operators().iter().zip([k0, k1]) {
            worst = worst.max(a.try_sub(b).unwrap().max_abs());
        }
    }
    check(worst < 1e-10, || format!("entrywise error {worst:e}"))?;
    Ok(format!("max entrywise error {worst:.1e}"))
}

fn angle(r: &mut ChaCha8Rng) -> f64 {
    use rand_chacha::rand_core::RngCore;
    (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 * PI - PI
}

fn waveplate_identities() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (xi, eta, zeta) = (angle(&mut r), angle(&mut r), angle(&mut r));
        let d = phase_distance(&local_product(&qqh(xi, eta, zeta), 1), &euler_rotation(xi, eta, zeta)).distance;
        worst = worst.max(d);

        let (q, h) = (angle(&mut r), angle(&mut r));
        let (h2, q2) = reorder_qh(q, h);
        let d = phase_distance(&(&qwp_matrix(q) * &hwp_matrix(h)), &(&hwp_matrix(h2) * &qwp_matrix(q2))).distance;
        worst = worst.max(d);

        let (a, lam) = (angle(&mut r), angle(&mut r));
        let rhs = &(&hwp_matrix(a / 2.0) * &gates::phase(lam / 2.0)) * &gates::hadamard();
        let d = phase_distance(&local_product(&waveplate_sandwich(a, lam), 1), &rhs).distance;
        worst = worst.max(d);
    }
    check(worst < 1e-9, || format!("distance {worst:e}"))?;
    Ok(format!("200 draws per identity, max distance {worst:.1e}"))
}

fn circuit_verification() -> Outcome {
    let tol = 1e-9;
    let mut worst = 0.0f64;
    let mut track = |d: f64| worst = worst.max(d);
    let basic = basic_scheme(&PureState::basis(2, 0)).map_err(|e| e.to_string())?;
    for ell in 1..=3 {
        let rep = verify(&basic_circuit(ell, true).map_err(|e| e.to_string())?, &basic.coupling, tol)
            .map_err(|e| e.to_string())?;
        check(rep.pass, || format!("basic l={ell}: distance {:e}", rep.distance))?;
        track(rep.distance);
    }
    for k in 1..=20 {
        let lam = k as f64 * FRAC_PI_2 / 20.0;
        let rep = verify(&weak_swap_circuit(lam, 1).map_err(|e| e.to_string())?, &weak_swap_unitary(lam), tol)
            .map_err(|e| e.to_string())?;
        check(rep.pass, || format!("weak swap lambda={lam}: distance {:e}", rep.distance))?;
        track(rep.distance);
    }
    for &lam in &[0.2, 0.5, 1.0, FRAC_PI_2] {
        let u = target_dep_unitary(lam).map_err(|e| e.to_string())?;
        let rep =
            verify(&target_dep_circuit(lam, 1).map_err(|e| e.to_string())?, &u, tol).map_err(|e| e.to_string())?;
        check(rep.pass, || format!("target-dep lambda={lam}: distance {:e}", rep.distance))?;
        track(rep.distance);
    }
    let mut r = rng(4);
    for i in 0..100 {
        let k = random_kraus_pair(&mut r, 2);
        let (u, f) = control_unitary_from_kraus(&k.operators()[0], &k.operators()[1]).map_err(|e| e.to_string())?;
        let rep = verify(&compile_path_pol(&f).map_err(|e| e.to_string())?, &u, tol).map_err(|e| e.to_string())?;
        check(rep.pass, || format!("path/pol pair {i}: distance {:e}", rep.distance))?;
        track(rep.distance);
    }
    Ok(format!("max distance {worst:.1e}"))
}

fn system_fidelity(out: &[C64], want: &[C64]) -> f64 {
    // out is indexed controller * 2 + system.
    let mut f = 0.0;
    for ctl in 0..2 {
        let v = [out[2 * ctl], out[2 * ctl + 1]];
        f += (want[0].conj() * v[0] + want[1].conj() * v[1]).norm_sqr();
    }
    f
}

fn swap_transfer() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for ell in 1..=5 {
        let circ = weak_swap_circuit(FRAC_PI_2, ell).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let ctl = random_state(&mut r, 2);
            let sys = random_state(&mut r, 2);
            let out = simulate(&circ, &ctl.tensor(&sys)).map_err(|e| e.to_string())?;
            worst = worst.max((1.0 - system_fidelity(out.amplitudes(), ctl.amplitudes())).abs());
        }
    }
    check(worst < 1e-10, || format!("transfer fidelity deficit {worst:e}"))?;
    let alias = weak_swap_circuit(FRAC_PI_2, 1).and_then(|c| c.with_ell(5)).map_err(|e| e.to_string())?;
    let rep = verify(&alias, &gates::swap(), 1e-10).map_err(|e| e.to_string())?;
    check(rep.pass, || format!("aliasing at l'=5: distance {:e}", rep.distance))?;
    Ok(format!("max deficit {worst:.1e}; l=1 device swaps l'=5 (distance {:.1e})", rep.distance))
}

fn convergence_law() -> Outcome {
    let mut r = rng(6);
    let t = target_dep_target();
    let mut lines = Vec::new();
    for &lam in &[0.2, 0.5, 1.0] {
        let s = target_dep_scheme(lam).map_err(|e| e.to_string())?;
        let psi = random_state(&mut r, 2);
        let trace = iterate_channel(&s.kraus, &psi.to_density(), &t, 10).map_err(|e| e.to_string())?;
        let fit = fit_log_gap(&trace.fidelities(), 1e-12).ok_or("too few points above the floor")?;
        let want = lam.cos().powi(2).ln();
        check((fit.slope - want).abs() < 1e-8, || format!("lambda={lam}: slope {} vs {want}", fit.slope))?;
        let d = decay_comparison(lam / 2.0, 1);
        lines.push(format!(
            "lambda={lam}: slope {:.10} (ln cos^2 lambda {:.10}); 1-sin^2(alpha l)={:.6} vs cos^2 lambda={:.6}",
            fit.slope, want, d.decay_printed, d.decay_channel
        ));
    }
    Ok(lines.join("\n      "))
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    let mut basic_worst = 0.0f64;
    for kind in [SchemeKind::Basic, SchemeKind::WeakSwap, SchemeKind::TargetDep] {
        for i in 0..100 {
            let lam = 0.05 + 1.45 * (i as f64 + 0.5) / 100.0;
            let psi = random_state(&mut r, 2);
            let (kraus, t) = match kind {
                SchemeKind::Basic => {
                    let t = random_state(&mut r, 2);
                    (basic_scheme(&t).map_err(|e| e.to_string())?.kraus, t)
                }
                SchemeKind::WeakSwap => {
                    let t = random_state(&mut r, 2);
                    (weak_swap(lam, &t).map_err(|e| e.to_string())?.kraus, t)
                }
                SchemeKind::TargetDep => {
                    (target_dep_scheme(lam).map_err(|e| e.to_string())?.kraus, target_dep_target())
                }
            };
            for n in 0..=20 {
                let Ok(ana) = filtered_fidelity_analytic(kind, lam, &psi, &t, n) else {
                    skipped += 1;
                    continue;
                };
                let num = filtered_fidelity_numeric(&kraus, &psi, &t, n).map_err(|e| e.to_string())?;
                worst = worst.max((num - ana).abs());
                if kind == SchemeKind::Basic && n >= 1 {
                    basic_worst = basic_worst.max((num - 1.0).abs());
                }
            }
        }
    }
    check(worst < 1e-10, || format!("numeric vs analytic {worst:e}"))?;
    check(basic_worst < 1e-10, || format!("basic filtered fidelity off unity by {basic_worst:e}"))?;
    Ok(format!("max difference {worst:.1e}, basic deficit {basic_worst:.1e}, {skipped} proviso skips"))
}

fn purification() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for _ in 0..10 {
            let t = random_state(&mut r, 2);
            let psi = random_state(&mut r, 2);
            let lam = 0.3 + 0.1 * n as f64;
            for kraus in [
                weak_swap(lam, &t).map_err(|e| e.to_string())?.kraus,
                basic_scheme(&t).map_err(|e| e.to_string())?.kraus,
            ] {
                let rho = iterate_channel(&kraus, &psi.to_density(), &t, n).map_err(|e| e.to_string())?.final_state;
                let tb = timebin_run(&kraus, &psi, n, 1.0).map_err(|e| e.to_string())?;
                worst = worst.max(tb.reduced_matrix().dist(rho.matrix()));
                let oam = oam_run(&kraus, &psi, n, &EfficiencyTable::ideal()).map_err(|e| e.to_string())?;
                worst = worst.max(oam.as_train().reduced_matrix().dist(rho.matrix()));
            }
        }
    }
    check(worst < 1e-10, || format!("reduced state error {worst:e}"))?;
    for n in 1..=10usize {
        let mut seen = std::collections::HashSet::new();
        for a in 0u32..(1 << n) {
            let bits: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
            check(seen.insert(timebin_delay(&bits, 1.0).to_bits()), || format!("repeated delay at N={n}"))?;
        }
    }
    Ok(format!("max reduced-state error {worst:.1e}; 2^N delays distinct for N <= 10"))
}

fn gain_formulas() -> Outcome {
    let base = GainParams { omega1: 1.0, omega2: 1.0, ..Default::default() };
    let mut worst = 0.0f64;
    for &(gamma, l) in &[(2.0, 0.5), (0.3, 1.7), (1.0, 0.01), (4.0, 0.9)] {
        let g = parametric_gain(&GainParams { gamma: Some(gamma), length: l, ..base }).map_err(|e| e.to_string())?.gain;
        worst = worst.max((g - (gamma * l).cosh().powi(2)).abs());
    }
    check(worst < 1e-12, || format!("cosh^2 error {worst:e}"))?;
    // g^2 = gamma^2 - (dk/2)^2 crosses zero at dk = 2 gamma.
    let at = GainParams { gamma: Some(1.0), length: 0.7, delta_k: 2.0, ..base };
    let g0 = parametric_gain(&at).map_err(|e| e.to_string())?.gain;
    let mut jump = 0.0f64;
    for dk in [2.0 - 1e-8, 2.0 + 1e-8] {
        let g = parametric_gain(&GainParams { delta_k: dk, ..at }).map_err(|e| e.to_string())?.gain;
        jump = jump.max((g - g0).abs());
    }
    check(jump < 1e-8, || format!("discontinuity {jump:e}"))?;
    let f12 = cloner_fidelity(1, 2).map_err(|e| e.to_string())?;
    check((f12 - 5.0 / 6.0).abs() < 1e-12, || format!("1->2 cloner {f12}"))?;
    for n in 1..=5u64 {
        let lim = cloner_limit(n).map_err(|e| e.to_string())?;
        let want = (n as f64 + 1.0) / (n as f64 + 2.0);
        check((lim - want).abs() < 1e-12, || format!("cloner limit N={n}: {lim}"))?;
    }
    Ok(format!("cosh^2 error {worst:.1e}, jump across g=0 {jump:.1e}, F(1->2)={f12}"))
}

const DETERMINISM_CONFIG: &str = "\
scheme=weak_swap
lambda=0.37
target=0.6+0.2i,0.3-0.7141428428542850i
initial=random
n=6
seed=20240611
";

fn run_all(cfg: &Path, out: &Path) -> Result<(), String> {
    let jobs: &[&[&str]] = &[
        &["converge"],
        &["filter"],
        &["timebin"],
        &["oam", "n=3", "efficiency=ideal"],
        &["compile"],
        &["decompose"],
        &["converge", "--format", "json"],
    ];
    for (i, job) in jobs.iter().enumerate() {
        let dir = out.join(i.to_string());
        let st = Command::new(env!("CARGO_BIN_EXE_cohfeed"))
            .args(*job)
            .arg("--config")
            .arg(cfg)
            .arg("--out")
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        check(st.status.success(), || format!("{job:?}: {}", String::from_utf8_lossy(&st.stderr)))?;
    }
    Ok(())
}

fn collect(dir: &Path, base: &Path, acc: &mut Vec<(String, Vec<u8>)>) -> std::io::Result<()> {
    for e in fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            collect(&p, base, acc)?;
        } else {
            acc.push((p.strip_prefix(base).unwrap().display().to_string(), fs::read(&p)?));
        }
    }
    acc.sort();
    Ok(())
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("scenario.cfg");
    fs::write(&cfg, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_all(&cfg, &a)?;
    run_all(&cfg, &b)?;
    let (mut fa, mut fb) = (Vec::new(), Vec::new());
    collect(&a, &a, &mut fa).map_err(|e| e.to_string())?;
    collect(&b, &b, &mut fb).map_err(|e| e.to_string())?;
    check(!fa.is_empty() && fa.len() == fb.len(), || format!("{} vs {} files", fa.len(), fb.len()))?;
    for (x, y) in fa.iter().zip(&fb) {
        check(x == y, || format!("{} differs", x.0))?;
    }
    Ok(format!("{} files bit-identical across two runs", fa.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("CS round trip", cs_round_trip),
        ("Kraus round trip", kraus_round_trip),
        ("wave-plate identities", waveplate_identities),
        ("scheme circuit verification", circuit_verification),
        ("single-shot swap and aliasing", swap_transfer),
        ("convergence law", convergence_law),
        ("filtered fidelity oracles", oracle_equivalence),
        ("ancilla purification", purification),
        ("gain and cloner formulas", gain_formulas),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
