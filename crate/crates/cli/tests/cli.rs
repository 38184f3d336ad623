use std::process::{Command, Output};

use lcentropy::io::{emit_density_spec, parse_density_spec};
use lcentropy::{Density, ExpAffineSegment, GridDensity, PiecewiseExpAffineDensity};
use proptest::prelude::*;
use serde_json::Value;

const EXP1: &str = r#"{"type":"piecewise_exp_affine","segments":[{"lo":0,"hi":40,"p":1,"q":0}]}"#;
const TENT: &str = r#"{"type":"piecewise_exp_affine","segments":[{"lo":-1,"hi":0,"p":-1,"q":0},{"lo":0,"hi":2,"p":0.5,"q":0}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcentropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn stats_of_the_exponential() {
    let out = run(&["stats", EXP1]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert!((v["h"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((v["var"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(v["gap"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["log_concavity"], "log_concave");
}

#[test]
fn stats_from_a_file_with_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    std::fs::write(&path, r#"{"type":"piecewise_exp_affine","segments":[{"lo":0,"hi":2,"p":0,"q":0}]}"#).unwrap();
    let path = path.to_str().unwrap();
    assert_eq!(code(&run(&["stats", path])), 2, "mass 2 is rejected without --normalize");
    let v = json_of(&run(&["stats", "--normalize", path]));
    assert!((v["h"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn certify_p4_is_proven() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("p4.json");
    let out = run(&["certify", "--family", "P4", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v[0]["status"], "proven");
    let full: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let first = &full[0]["small_n"][0]["certificate"]["witness"]["value"];
    assert!(first.is_string(), "witness values are exact strings: {first}");
    assert!(full[0]["checkpoints"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn certify_all_is_deterministic_across_thread_counts() {
    let one = run(&["certify", "--threads", "1", "--csv"]);
    let four = run(&["certify", "--threads", "4", "--csv"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(String::from_utf8_lossy(&one.stdout).lines().count(), 6);
}

#[test]
fn verify_theorem_small_grid() {
    let a = run(&["verify-theorem", "--grid", "40,40,40", "--threads", "1"]);
    let b = run(&["verify-theorem", "--grid", "40,40,40", "--threads", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert!(v["min_gap"].as_f64().unwrap() >= -1e-9);
    assert!(v["min_G"].as_f64().unwrap() >= -1e-9);
    assert!(v["identity_max_err"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["argmin"], serde_json::json!([1.0, 5.0, -6.0]));
}

#[test]
fn verify_theorem_csv_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&["verify-theorem", "--grid", "3,3,3", "--csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,x,y,gap,g,l"));
    assert_eq!(lines.count(), 27 - 3);
}

#[test]
fn constants_table() {
    let out = run(&["constants", "--alpha", "2,3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "alpha,c_minus,c_plus,ratio");
    assert!(rows[1].starts_with("2.0,4.0,13.8888888888"));
    assert_eq!(code(&run(&["constants", "--alpha", "1"])), 2);
    let v = json_of(&run(&["constants", "--json", "--alpha", "2"]));
    assert_eq!(v[0]["c_minus"], 4.0);
}

#[test]
fn capacity_epi_and_alpha_star() {
    let v = json_of(&run(&["capacity", EXP1, "--power", "1"]));
    assert!((v["relative_entropy"].as_f64().unwrap() - 0.418_938_5).abs() < 1e-7);
    assert_eq!(v["within_log_concave_bound"], true);
    let v = json_of(&run(&["epi", EXP1, EXP1]));
    assert_eq!(v["shannon_stam_holds"], true);
    assert_eq!(v["reverse_holds"], true);
    let v = json_of(&run(&["alpha-star"]));
    assert!((1.2405..=1.2415).contains(&v["alpha_star"].as_f64().unwrap()));
}

#[test]
fn rearrange_emits_a_reparsable_spec() {
    assert_eq!(code(&run(&["rearrange", TENT])), 2, "unnormalized input is rejected");
    let out = run(&["rearrange", "--normalize", TENT]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let d = parse_density_spec(&v["rearranged"].to_string(), false).unwrap();
    let reemitted: Value = serde_json::from_str(&emit_density_spec(&d)).unwrap();
    assert_eq!(reemitted, v["rearranged"]);
    let (before, after) = (&v["before"], &v["after"]);
    assert!((before["h"].as_f64().unwrap() - after["h"].as_f64().unwrap()).abs() < 1e-10);
    assert!(after["var"].as_f64().unwrap() >= before["var"].as_f64().unwrap() - 1e-10);
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["verify-theorem", "--grid", "1,2"])), 2);
    assert_eq!(code(&run(&["certify", "--family", "P7"])), 2);
    let nested = r#"{"type":"step","pieces":[{"lo":0,"hi":2,"weight":0.5},{"lo":1,"hi":3,"weight":0.5}]}"#;
    let out = run(&["stats", nested]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("intervals not nested"));
    let negative = r#"{"type":"grid","origin":0,"step":1,"values":[0,-1,0]}"#;
    assert_eq!(code(&run(&["stats", negative])), 2);
    let missing = r#"{"type":"piecewise_exp_affine","segments":[{"lo":0,"hi":1,"p":0}]}"#;
    let out = run(&["stats", missing]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `q`"));
    assert_eq!(code(&run(&["stats", "/nonexistent/density.json"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn non_log_concave_inputs_skip_the_reverse_bound() {
    let bimodal = GridDensity::sample(-6.0, 6.0, 1201, |t| {
        (1.0 - (t - 5.0).abs() / 0.5).max(0.0) + (1.0 - (t + 5.0).abs() / 0.5).max(0.0)
    })
    .unwrap()
    .normalize()
    .unwrap();
    let spec = emit_density_spec(&bimodal.into());
    let out = run(&["epi", &spec, &spec]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["log_concave_inputs"], false);
}

fn exp_affine() -> impl Strategy<Value = Density> {
    (1usize..4)
        .prop_flat_map(|k| {
            (-5.0f64..5.0, prop::collection::vec((0.1f64..3.0, -3.0f64..3.0, -2.0f64..2.0), k))
        })
        .prop_map(|(start, segs)| {
            let mut lo = start;
            let segments = segs
                .into_iter()
                .map(|(len, slope, offset)| {
                    let s = ExpAffineSegment::new(lo, lo + len, slope, offset).unwrap();
                    lo += len;
                    s
                })
                .collect();
            PiecewiseExpAffineDensity::new(segments).unwrap().into()
        })
}

fn grid() -> impl Strategy<Value = Density> {
    (-5.0f64..5.0, 0.01f64..1.0, prop::collection::vec(0.0f64..10.0, 2..40))
        .prop_filter("zero mass", |(_, _, v)| v.iter().any(|x| *x > 0.0))
        .prop_map(|(origin, step, values)| GridDensity::new(origin, step, values).unwrap().into())
}

const VOCABULARY: &[&str] = &[
    "stats", "certify", "constants", "alpha-star", "epi", "capacity", "rearrange", "verify-theorem",
    "--family", "P2", "P9", "all", "--alpha", "2", "0.5", "--json", "--csv", "--grid", "2,2,2",
    "--threads", "2", "--power", "-1", EXP1, "{", "--bogus",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn emitted_specs_round_trip(d in prop_oneof![exp_affine(), grid()]) {
        let text = emit_density_spec(&d);
        let back = parse_density_spec(&text, false).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(emit_density_spec(&back), text);
    }

    #[test]
    fn exit_codes_stay_in_contract(args in prop::collection::vec(prop::sample::select(VOCABULARY), 0..5)) {
        let out = run(&args);
        let c = code(&out);
        prop_assert!([0, 1, 2].contains(&c), "{:?} exited {}", args, c);
        if c == 2 {
            prop_assert!(!out.stderr.is_empty());
        }
    }
}
