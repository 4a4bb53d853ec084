use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cohfeed::config::ScenarioConfig;
use cohfeed::formats::{format_netlist, parse_netlist};
use cohfeed_core::optics::{compile_path_pol, compile_pol_oam};
use cohfeed_core::random::{haar_unitary, random_kraus_pair};
use cohfeed_core::{control_unitary_from_kraus, cs_decompose};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn cohfeed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohfeed")).args(args).output().expect("binary runs")
}

fn cohfeed_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohfeed")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gain_example() {
    let out = cohfeed(&["gain", "gamma=2", "length=0.5", "delta_k=0"]);
    assert_eq!(out.status.code(), Some(0));
    let g = json_of(&out)["G"].as_f64().unwrap();
    assert!((g - 1f64.cosh().powi(2)).abs() < 1e-12);
    assert!((g - 2.381).abs() < 5e-4);
}

#[test]
fn converge_follows_geometric_law() {
    let lambda = "0.7854";
    let out = cohfeed(&["converge", "scheme=target_dep", &format!("lambda={lambda}"), "n=10", "initial=1,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,F_sim,F_analytic,gap"));
    let decay = lambda.parse::<f64>().unwrap().cos().powi(2);
    let mut rows = 0;
    for (n, line) in lines.enumerate() {
        let f: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((f - (1.0 - 0.5 * decay.powi(n as i32))).abs() < 1e-10, "n={n}");
        rows += 1;
    }
    assert_eq!(rows, 11);
}

#[test]
fn compile_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = cohfeed_in(d, &["compile", "scheme=weak_swap", "lambda=0.9", "--out", "."]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cohfeed_in(d, &["verify", "netlist=circuit.net", "unitary=target.unitary"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["pass"], Value::Bool(true));
    assert!(r["distance"].as_f64().unwrap() < 1e-9);

    let net = fs::read_to_string(d.join("circuit.net")).unwrap();
    let bent = net.replacen("HWP 22.5000", "HWP 23.5000", 1);
    assert_ne!(bent, net);
    fs::write(d.join("bent.net"), bent).unwrap();
    let out = cohfeed_in(d, &["verify", "netlist=bent.net", "unitary=target.unitary"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["pass"], Value::Bool(false));
}

#[test]
fn input_errors_exit_one_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "scheme=weak_swap\n# comment\nlambda=0.3\nwobble=1\n").unwrap();
    let out = cohfeed(&["converge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.cfg:4"), "{err}");

    fs::write(dir.path().join("x.net"), "PLATFORM POL_OAM l=1\nHWP 10\nQWP banana\n").unwrap();
    fs::write(
        dir.path().join("id.unitary"),
        "dim=4\n1 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 1 0 0 0\n0 0 0 0 0 0 1 0\n",
    )
    .unwrap();
    let out = cohfeed_in(dir.path(), &["verify", "netlist=x.net", "unitary=id.unitary"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("x.net:3"), "{err}");

    let out = cohfeed(&["converge", "scheme=weak_swap"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_controls_random_initial_state() {
    let args = ["filter", "scheme=weak_swap", "lambda=0.4", "initial=random", "n=4"];
    let a = cohfeed(&[&args[..], &["--seed", "7"]].concat());
    let b = cohfeed(&[&args[..], &["--seed", "7"]].concat());
    let c = cohfeed(&[&args[..], &["--seed", "8"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_tables() {
    let out = cohfeed(&["timebin", "scheme=basic", "n=2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_of(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let total: f64 = rows.iter().map(|r| r["norm2"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

const SAMPLE_CONFIG: &str = "\
# scenario
scheme = target_dep
lambda=0.7854
initial=1,0.5-0.25i
n=12
reset=filter
efficiency=eff.txt
extrapolate=false
seed=99
format=json
gamma=1e-3
";

#[test]
fn config_print_is_idempotent() {
    let once = ScenarioConfig::parse(SAMPLE_CONFIG).unwrap().print();
    let parsed = ScenarioConfig::parse(&once).unwrap();
    assert_eq!(parsed, ScenarioConfig::parse(SAMPLE_CONFIG).unwrap());
    assert_eq!(parsed.print(), once);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn netlists_round_trip_bit_exact(seed in any::<u64>(), ell in prop::sample::select(vec![-1, 1])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = cs_decompose(&haar_unitary(&mut rng, 4), 2).unwrap();
        let circ = compile_pol_oam(&f, ell).unwrap();
        let text = format_netlist(&circ);
        let back = parse_netlist(&text).unwrap();
        prop_assert_eq!(&back, &circ);
        prop_assert_eq!(format_netlist(&back), text);

        let k = random_kraus_pair(&mut rng, 2);
        let (_, f) = control_unitary_from_kraus(&k.operators()[0], &k.operators()[1]).unwrap();
        let circ = compile_path_pol(&f).unwrap();
        let back = parse_netlist(&format_netlist(&circ)).unwrap();
        prop_assert_eq!(back, circ);
    }

    #[test]
    fn config_reals_round_trip(lambda in -10.0..10.0f64, tau in 1e-12..1e3f64, re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let text = format!("lambda={lambda:?}\ntau={tau:?}\ntarget=1+0i,{re:?}{im:+?}i\n");
        let a = ScenarioConfig::parse(&text).unwrap();
        let b = ScenarioConfig::parse(&a.print()).unwrap();
        prop_assert_eq!(a.lambda, Some(lambda));
        prop_assert_eq!(&a, &b);
    }
}
