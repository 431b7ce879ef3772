//! End-to-end runs of the compiled binary: pinned JSON documents, exit
//! codes, and cache behavior observable from outside.

use std::fs;
use std::process::Command;

use serde_json::Value;

fn arborab_env(args: &[&str], envs: &[(&str, &str)]) -> (String, String, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_arborab"));
    // The host environment must not leak a cache directory into the runs.
    cmd.args(args).env_remove("ARBORAB_CACHE");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("stdout is utf8"),
        String::from_utf8(out.stderr).expect("stderr is utf8"),
        out.status.code().expect("exit code"),
    )
}

fn arborab(args: &[&str]) -> (String, String, i32) {
    arborab_env(args, &[])
}

fn parse(doc: &str) -> Value {
    serde_json::from_str(doc.trim()).expect("stdout is one JSON document")
}

fn as_f64(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().expect("parses")
}

// ---- Pinned documents ----

#[test]
fn abelian_worked_example_is_pinned() {
    let (out, _, code) = arborab(&["abelian", "--c=-1", "--alpha=-1/2"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "{\"verdict\":\"NonAbelian\",\"reason\":\"SquareClassWitness\",\"indices\":[1,3]}\n"
    );
}

#[test]
fn tree_act_example_is_pinned() {
    let (out, _, code) = arborab(&["tree", "act", "--portrait", "1,01,1010", "--level", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"cycles\":\"(1 7 3 6)(2 8 4 5)\"}\n");
}

#[test]
fn local_sieve_is_pinned() {
    let (out, _, code) = arborab(&["local-sieve"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "{\"candidates\":[\"0\",\"-1\",\"1\",\"-2\",\"-1/2\"]}\n"
    );
}

// ---- Exit codes ----

#[test]
fn undecided_exits_two() {
    let (out, _, code) = arborab(&["abelian", "--c=-1", "--alpha=0", "--depth", "0"]);
    assert_eq!(code, 2);
    assert_eq!(out, "{\"verdict\":\"Undecided\"}\n");
}

#[test]
fn exceptional_pair_is_an_error() {
    let (out, _, code) = arborab(&["abelian", "--c=0", "--alpha=0"]);
    assert_eq!(code, 1);
    let doc = parse(&out);
    assert!(doc["error"].as_str().unwrap().contains("exceptional pair"));
}

#[test]
fn malformed_rationals_are_errors() {
    let (out, _, code) = arborab(&["abelian", "--c=1/0", "--alpha=2"]);
    assert_eq!(code, 1);
    assert!(parse(&out)["error"]
        .as_str()
        .unwrap()
        .contains("zero denominator"));

    let (out, _, code) = arborab(&["orbit", "--c=half", "--x0=0"]);
    assert_eq!(code, 1);
    assert!(parse(&out)["error"].as_str().unwrap().contains("malformed"));
}

#[test]
fn unknown_flags_are_json_errors() {
    let (out, _, code) = arborab(&["orbit", "--c=1", "--x0=0", "--bogus"]);
    assert_eq!(code, 1);
    assert!(parse(&out).get("error").is_some());
}

#[test]
fn help_exits_zero() {
    let (out, _, code) = arborab(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("arborab"));
}

// ---- Orbits ----

#[test]
fn orbit_reports_the_basilica_cycle() {
    let (out, _, code) = arborab(&["orbit", "--c=-1", "--x0=0"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert_eq!(doc["points"][0], "0");
    assert_eq!(doc["outcome"]["type"], "Cycle");
    assert_eq!(doc["outcome"]["preperiod"], 0);
    assert_eq!(doc["outcome"]["period"], 2);
}

#[test]
fn pcf_distinguishes_escape() {
    let (out, _, code) = arborab(&["pcf", "--c=-1"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["pcf"], true);

    let (out, _, code) = arborab(&["pcf", "--c=1"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert_eq!(doc["pcf"], false);
    assert_eq!(doc["certificate"]["outcome"]["type"], "Escaped");
}

#[test]
fn adjusted_orbit_values() {
    let (out, _, code) = arborab(&["adjusted-orbit", "--c=-1", "--alpha=-1/2", "--depth", "3"]);
    assert_eq!(code, 0);
    assert_eq!(
        parse(&out)["values"],
        serde_json::json!(["1/2", "1/2", "-1/2"])
    );
}

#[test]
fn special_pair_kinds() {
    for (c, alpha, kind) in [
        ("0", "1", "Power"),
        ("-2", "2", "Chebyshev"),
        ("0", "0", "Exceptional"),
        ("3", "1", "NotSpecial"),
    ] {
        let (out, _, code) =
            arborab(&["special", &format!("--c={c}"), &format!("--alpha={alpha}")]);
        assert_eq!(code, 0);
        assert_eq!(parse(&out)["kind"], kind, "({c}, {alpha})");
    }
}

// ---- Tree subcommands ----

#[test]
fn compose_applies_rhs_first() {
    let (out, _, code) = arborab(&["tree", "compose", "--lhs", "1,00", "--rhs", "1,00"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert_eq!(doc["portrait"], "0,00");
    assert_eq!(doc["cycles"], "()");

    let (out, _, code) = arborab(&["tree", "compose", "--lhs", "1", "--rhs", "0"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["cycles"], "(1 2)");
}

#[test]
fn compose_depth_mismatch_is_an_error() {
    let (out, _, code) = arborab(&["tree", "compose", "--lhs", "1", "--rhs", "1,00"]);
    assert_eq!(code, 1);
    assert!(parse(&out)["error"].as_str().unwrap().contains("depth"));
}

#[test]
fn act_level_must_match_depth() {
    let (out, _, code) = arborab(&["tree", "act", "--portrait", "1,01", "--level", "3"]);
    assert_eq!(code, 1);
    assert!(parse(&out)["error"].as_str().unwrap().contains("depth"));
}

#[test]
fn verify_commutation_small_depth() {
    let (out, _, code) = arborab(&["tree", "verify-commutation", "--depth", "2"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert_eq!(doc["depth"], 2);
    assert_eq!(doc["pairs_checked"], 64);
    assert!(doc["qualifying_pairs"].as_u64().unwrap() > 0);
    assert_eq!(doc["violations"].as_array().unwrap().len(), 0);
}

// ---- Heights ----

#[test]
fn weil_height_of_three_halves() {
    let (out, _, code) = arborab(&["height", "weil", "--x", "3/2"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert!((as_f64(&doc["value"]) - 3f64.ln()).abs() < 1e-12);
    assert!(as_f64(&doc["error"]) < 1e-30);
}

#[test]
fn canonical_height_functional_equation() {
    let (out, _, code) = arborab(&["height", "canonical", "--c=-1", "--gamma=2/3"]);
    assert_eq!(code, 0);
    let h1 = as_f64(&parse(&out)["value"]);
    let (out, _, code) = arborab(&["height", "canonical", "--c=-1", "--gamma=-5/9"]);
    assert_eq!(code, 0);
    let h2 = as_f64(&parse(&out)["value"]);
    assert!(
        (h2 - 2.0 * h1).abs() < 1e-9,
        "h(f(g)) = 2h(g): {h2} vs {h1}"
    );
}

#[test]
fn mahler_of_x_squared_minus_two() {
    let (out, _, code) = arborab(&["mahler", "--poly", r#"["-2","0","1"]"#, "--prec", "128"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert_eq!(doc["degree"], 2);
    assert!((as_f64(&doc["mahler"]["value"]) - 2.0).abs() < 1e-20);
    assert!((as_f64(&doc["house"]["value"]) - 2f64.sqrt()).abs() < 1e-15);
    assert!((as_f64(&doc["average"]["value"]) - 2f64.ln() / 2.0).abs() < 1e-15);
}

#[test]
fn cyclo_scan_finds_divisors() {
    let (out, _, code) = arborab(&["cyclo-scan", "--poly", r#"["1","1","1","1","1"]"#]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["orders"], serde_json::json!([5]));

    let (out, _, code) = arborab(&["cyclo-scan", "--poly", r#"["-1","0","1"]"#]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["orders"], serde_json::json!([1, 2]));
}

#[test]
fn bounds_for_backward_orbit() {
    let (out, _, code) = arborab(&["bounds", "--c=-1", "--alpha=3"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert!(as_f64(&doc["house_bound"]) >= 2.9);
    assert_eq!(doc["denominator_bound"], "1");
}

#[test]
fn fz_bound_is_a_number() {
    let (out, _, code) = arborab(&["fz-bound", "--n", "3", "--d", "2"]);
    assert_eq!(code, 0);
    let doc = parse(&out);
    assert!((doc["bound"].as_f64().unwrap() - (-4.296_98)).abs() < 1e-4);

    let (out, _, code) = arborab(&["fz-bound", "--n", "1", "--d", "2"]);
    assert_eq!(code, 1);
    assert!(parse(&out).get("error").is_some());
}

// ---- Cache behavior ----

#[test]
fn cache_roundtrip_corruption_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let dir_s = dir.path().to_str().unwrap().to_owned();
    let args = [
        "az",
        "--c=-1",
        "--alpha=3",
        "--n",
        "2",
        "--prec",
        "128",
        "--cache",
        &dir_s,
    ];

    let (out1, err1, code) = arborab(&args);
    assert_eq!(code, 0);
    assert!(err1.is_empty(), "unexpected warnings: {err1}");
    assert_eq!(parse(&out1)["levels"].as_array().unwrap().len(), 2);

    let path = dir.path().join("cache.jsonl");
    let body = fs::read_to_string(&path).unwrap();
    for key in [
        "az:128:-1:3:1",
        "az:128:-1:3:2",
        "preimage:-1:3:1",
        "preimage:-1:3:2",
    ] {
        assert!(body.contains(key), "cache is missing {key}");
    }

    // Warm run: same document, no new writes needed.
    let (out2, err2, code) = arborab(&args);
    assert_eq!(code, 0);
    assert!(err2.is_empty());
    assert_eq!(out2, out1);
    assert_eq!(fs::read_to_string(&path).unwrap(), body);

    // A clobbered line is skipped with a warning and recomputed.
    let mut lines: Vec<String> = body.lines().map(str::to_owned).collect();
    lines[0].replace_range(0..1, "x");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let (out3, err3, code) = arborab(&args);
    assert_eq!(code, 0);
    assert!(err3.contains("unreadable entry"), "stderr: {err3}");
    assert_eq!(out3, out1);

    // A version bump invalidates silently and the run recomputes.
    let bumped = body.replace("\"version\":1", "\"version\":999");
    fs::write(&path, bumped).unwrap();
    let (out4, err4, code) = arborab(&args);
    assert_eq!(code, 0);
    assert!(err4.is_empty(), "version skew must be silent: {err4}");
    assert_eq!(out4, out1);
}

#[test]
fn cache_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let dir_s = dir.path().to_str().unwrap();
    let args = ["az", "--c=-1", "--alpha=3", "--n", "1", "--prec", "128"];
    let (_, _, code) = arborab_env(&args, &[("ARBORAB_CACHE", dir_s)]);
    assert_eq!(code, 0);
    let body = fs::read_to_string(dir.path().join("cache.jsonl")).unwrap();
    assert!(body.contains("az:128:-1:3:1"));

    // Identical output with and without the cache.
    let (cached, _, _) = arborab_env(&args, &[("ARBORAB_CACHE", dir_s)]);
    let (bare, _, _) = arborab(&args);
    assert_eq!(cached, bare);
}

#[test]
fn mahler_results_are_cached() {
    let dir = tempfile::tempdir().unwrap();
    let dir_s = dir.path().to_str().unwrap().to_owned();
    let args = [
        "mahler",
        "--poly",
        r#"["-2","0","1"]"#,
        "--prec",
        "128",
        "--cache",
        &dir_s,
    ];
    let (out1, _, code) = arborab(&args);
    assert_eq!(code, 0);
    let body = fs::read_to_string(dir.path().join("cache.jsonl")).unwrap();
    assert!(body.contains("mahler:128:"));
    assert!(body.contains("house:128:"));
    assert!(body.contains("average:128:"));
    let (out2, _, code) = arborab(&args);
    assert_eq!(code, 0);
    assert_eq!(out2, out1);
}
