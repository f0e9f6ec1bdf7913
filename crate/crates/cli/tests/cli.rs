use std::path::PathBuf;
use std::process::Command;

use dissipate_cli::formats::{
    load_automaton, load_tm, load_wiring, parse_automaton, write_automaton, AutomatonFile,
};
use dissipate_core::composition::{equivalent, reachable_subgraph, wire};
use dissipate_core::figures;
use dissipate_core::random::small_automaton;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn asset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(name)
}

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dissipate"))
        .args(args)
        .env_remove("DISSIPATE_TEMPERATURE")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(name: &str) -> String {
    asset(name).display().to_string()
}

#[test]
fn assets_match_reference_definitions() {
    assert_eq!(
        load_automaton(&asset("fig5.aut")).unwrap().automaton,
        figures::one_bit_memory()
    );
    assert_eq!(
        load_automaton(&asset("fig7.aut")).unwrap().automaton,
        figures::fig7()
    );
    assert_eq!(
        load_automaton(&asset("fig8.aut")).unwrap().automaton,
        figures::mod4_counter()
    );
    assert_eq!(
        load_automaton(&asset("tff.aut")).unwrap().automaton,
        figures::t_flip_flop()
    );
    assert_eq!(
        load_automaton(&asset("fig11.aut")).unwrap().automaton,
        figures::mod2_counter()
    );
    assert_eq!(load_tm(&asset("bb2.tm")).unwrap(), figures::busy_beaver2());
    assert_eq!(
        load_tm(&asset("bincount.tm")).unwrap(),
        figures::binary_counter()
    );
    assert_eq!(
        load_tm(&asset("sweep.tm")).unwrap(),
        figures::right_sweeper()
    );

    let chain = load_automaton(&asset("chain.aut")).unwrap().automaton;
    assert_eq!(chain, figures::linear_chain(5));
}

#[test]
fn bundled_wirings_close_onto_the_four_cycle() {
    let mod4 = figures::mod4_counter();
    for name in ["counter2.wiring", "fig12.wiring"] {
        let w = load_wiring(&asset(name)).unwrap();
        let closed = wire(&w.wiring).unwrap();
        let reach = reachable_subgraph(closed.automaton()).unwrap();
        assert_eq!(reach.state_count(), 4, "{name}");
        assert!(equivalent(&reach, &mod4).unwrap(), "{name}");
    }
    let w = load_wiring(&asset("counter2.wiring")).unwrap();
    let reference = wire(&figures::two_bit_counter_wiring()).unwrap();
    assert_eq!(
        wire(&w.wiring).unwrap().into_automaton().with_name("x"),
        reference.automaton().clone().with_name("x")
    );
}

#[test]
fn asset_files_round_trip() {
    for name in [
        "fig5.aut",
        "fig7.aut",
        "fig8.aut",
        "tff.aut",
        "fig11.aut",
        "chain.aut",
    ] {
        let f = load_automaton(&asset(name)).unwrap();
        let text = write_automaton(&f);
        let again = parse_automaton(&text).unwrap();
        assert_eq!(again.automaton, f.automaton, "{name}");
        assert_eq!(write_automaton(&again), text, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_automata_round_trip(seed in any::<u64>()) {
        let a = small_automaton(&mut ChaCha8Rng::seed_from_u64(seed), 8, 4);
        let text = write_automaton(&AutomatonFile::uniform(a.clone()));
        let back = parse_automaton(&text).unwrap();
        prop_assert_eq!(&back.automaton, &a);
        prop_assert_eq!(write_automaton(&back), text);
    }
}

#[test]
fn run_reports_word_bits() {
    let (code, out, _) = bin(&[
        "run",
        &path("fig7.aut"),
        "--start",
        "A",
        "--word",
        "0100001010",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("total_bits            7.000000"), "{out}");
    assert!(out.contains("path                  A B C C C C C D F G Stop"));
    let (_, out, _) = bin(&["run", &path("fig7.aut"), "--word", "0011100110"]);
    assert!(out.contains("total_bits            4.000000"), "{out}");
}

#[test]
fn temperature_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dissipate"))
        .args(["run", &path("fig7.aut"), "--word", "0100001010", "--json"])
        .env("DISSIPATE_TEMPERATURE", "600")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["temperature_k"], 600.0);
    let expected = 7.0 * 1.38e-23 * 600.0 * std::f64::consts::LN_2;
    assert!((v["landauer_joules"].as_f64().unwrap() - expected).abs() < 1e-30);
}

#[test]
fn exit_codes() {
    let (code, _, err) = bin(&["run", &path("fig7.aut"), "--start", "E", "--word", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("position 0"), "{err}");

    let (code, _, err) = bin(&["analyze", "missing.aut"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.aut"), "{err}");

    let (code, _, _) = bin(&["frobnicate"]);
    assert_eq!(code, 2);

    let (code, _, _) = bin(&[
        "run",
        &path("fig7.aut"),
        "--word",
        "0",
        "--start",
        "Nowhere",
    ]);
    assert_eq!(code, 2);

    let (code, _, err) = bin(&["test", &path("fig7.aut"), "--start", "Stop"]);
    assert_eq!(code, 1);
    assert!(err.contains("not testable"), "{err}");

    let (code, _, _) = bin(&["tm", "bennett", &path("sweep.tm"), "--max-steps", "50"]);
    assert_eq!(code, 1);

    let (code, _, _) = bin(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = std::env::temp_dir().join(format!("dissipate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.aut");
    std::fs::write(
        &bad,
        "automaton x\ninputs a\nstates q\noutput q o\ntrans q a q\ntrans q a r\n",
    )
    .unwrap();
    let (code, _, err) = bin(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line "), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_is_byte_stable() {
    let cases: Vec<Vec<String>> = vec![
        vec!["analyze".into(), path("fig7.aut")],
        vec!["product".into(), path("tff.aut"), path("tff.aut")],
        vec!["wire".into(), path("counter2.wiring")],
        vec!["tm".into(), "bennett".into(), path("bb2.tm")],
        vec!["test".into(), path("fig7.aut")],
    ];
    for args in cases {
        let mut args: Vec<&str> = args.iter().map(String::as_str).collect();
        args.push("--json");
        let (c1, a, _) = bin(&args);
        let (c2, b, _) = bin(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}

#[test]
fn dot_output() {
    let (code, dot, _) = bin(&["dot", &path("fig5.aut")]);
    assert_eq!(code, 0);
    assert_eq!(dot.matches("[label=\"").count(), 2 + 4);
    let (_, again, _) = bin(&["dot", &path("fig5.aut")]);
    assert_eq!(dot, again);

    let (_, dot, _) = bin(&["dot", &path("fig7.aut")]);
    assert_eq!(dot.matches("style=filled").count(), 2);
    assert_eq!(dot.matches("doublecircle").count(), 3);

    let (_, dot, _) = bin(&["dot", &path("chain.aut")]);
    assert!(!dot.contains("filled") && !dot.contains("doublecircle"));
}

#[test]
fn analysis_commands() {
    let (_, out, _) = bin(&["analyze", &path("fig8.aut"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reversible"], true);
    assert_eq!(v["convergent"], serde_json::json!([]));
    assert_eq!(v["divergent"], serde_json::json!([]));

    let (_, out, _) = bin(&["product", &path("tff.aut"), &path("tff.aut"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        (v["states"].as_u64(), v["arrows"].as_u64()),
        (Some(4), Some(16))
    );

    let (_, out, _) = bin(&[
        "equiv",
        &path("counter2.wiring"),
        &path("fig8.aut"),
        "--json",
    ]);
    assert!(out.contains("\"equivalent\": true"));
    let (_, out, _) = bin(&["equiv", &path("fig8.aut"), &path("fig11.aut"), "--json"]);
    assert!(out.contains("\"equivalent\": false"));

    let (_, out, _) = bin(&["test", &path("fig5.aut"), "--start", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["length"], 4);

    let (_, out, _) = bin(&["tm", "head", &path("bb2.tm"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        (v["states"].as_u64(), v["arrows"].as_u64()),
        (Some(3), Some(3))
    );
    assert_eq!(v["convergent"], serde_json::json!([]));

    let (_, out, _) = bin(&["tm", "bennett", &path("bb2.tm"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["total_steps"], 16);
    assert_eq!(v["history_empty"], true);
}

#[test]
fn outputs_written_to_files() {
    let dir = std::env::temp_dir().join(format!("dissipate-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("loop.aut");
    let (code, _, _) = bin(&[
        "reach",
        &path("counter2.wiring"),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let reach = load_automaton(&out).unwrap().automaton;
    assert!(equivalent(&reach, &figures::mod4_counter()).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
