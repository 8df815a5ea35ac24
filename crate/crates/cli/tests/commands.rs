//! End-to-end runs of the `monty` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

use threedoors::exact::unconditional_win_prob;
use threedoors::model::{make_preset, PresetParams};

fn monty(args: &[&str]) -> Output {
    monty_with_input(args, "")
}

fn monty_with_input(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_monty"))
        .args(args)
        .env_remove("MONTY_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn monty");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = monty(&full);
    assert!(o.status.success() || o.status.code() == Some(5), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn num(v: &Value, path: &str) -> f64 {
    v.pointer(path).and_then(Value::as_f64).unwrap_or_else(|| panic!("no number at {path} in {v}"))
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

#[test]
fn analyze_classic_with_observation() {
    let v = json(&["analyze", "--preset", "classic", "--observe", "p=1,O=3"]);
    assert!((num(&v, "/conditional/win_prob") - 2.0 / 3.0).abs() <= 1e-12);
    let post: Vec<f64> = serde_json::from_value(v["conditional"]["posterior"].clone()).unwrap();
    for (got, want) in post.iter().zip([1.0 / 3.0, 2.0 / 3.0, 0.0]) {
        assert!((got - want).abs() <= 1e-12);
    }
    let text = stdout(&monty(&["analyze", "--preset", "classic", "--observe", "p=1,O=3"]));
    assert!(text.contains("0.666666667"), "{text}");
    assert!(text.contains("1: 0.333333333, 2: 0.666666667, 3: 0"), "{text}");
}

#[test]
fn analyze_unconditional_and_biased() {
    let v = json(&["analyze", "--preset", "classic"]);
    assert!((num(&v, "/win_prob") - 2.0 / 3.0).abs() <= 1e-12);
    let v = json(&["analyze", "--preset", "host-biased", "--q", "0.25", "--observe", "p=1,O=3"]);
    assert!((num(&v, "/conditional/win_prob") - 0.8).abs() <= 1e-9);
}

#[test]
fn analyze_all_observations() {
    let v = json(&["analyze", "--all-observations"]);
    assert_eq!(v["observations"]["rows"].as_array().unwrap().len(), 6);
    assert!((num(&v, "/observations/weighted_average") - 2.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn analyze_exit_codes() {
    let unreachable = monty(&["analyze", "--preset", "fixed-pick", "--observe", "p=2,O=3"]);
    assert_eq!(unreachable.status.code(), Some(3));
    let illegal = monty(&["analyze", "--observe", "p=1,O=1"]);
    assert_eq!(illegal.status.code(), Some(2));
    let garbled = monty(&["analyze", "--observe", "door three"]);
    assert_eq!(garbled.status.code(), Some(2));
    let unknown = monty(&["analyze", "--preset", "four-doors"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_q = monty(&["analyze", "--preset", "host-biased", "--q", "1.5"]);
    assert_eq!(bad_q.status.code(), Some(2));
}

#[test]
fn invalid_model_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cheat.json");
    // The host reveals the car behind door 2.
    std::fs::write(
        &path,
        r#"{"n_doors":3,"k_opened":1,"car_placement":[0,1,0],"pick":[1,0,0],"open_rule":{"2,1":{"2":1}}}"#,
    )
    .unwrap();
    let o = monty(&["analyze", "--model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reveals car"));

    let missing = monty(&["analyze", "--model", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn shipped_model_files_load() {
    let v = json(&["analyze", "--model", repo_file("models/classic.json").to_str().unwrap()]);
    assert!((num(&v, "/win_prob") - 2.0 / 3.0).abs() <= 1e-12);
    let biased = repo_file("models/biased-host.json");
    let v = json(&["analyze", "--model", biased.to_str().unwrap(), "--observe", "p=1,O=3"]);
    assert!((num(&v, "/conditional/win_prob") - 1.0 / 1.8).abs() <= 1e-12);
}

#[test]
fn solve_classic() {
    let o = monty(&["solve", "--doors", "3", "--open", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("value            0.666666667"), "{text}");
    assert!(text.contains("recommendation   switch"), "{text}");

    let v = json(&["solve", "--doors", "3", "--open", "1", "--tol", "1e-12"]);
    assert!(num(&v, "/duality_gap") <= 1e-12);
    assert_eq!(v["recommendation"], "switch");
}

#[test]
fn solve_four_doors_two_opened() {
    let v = json(&["solve", "--doors", "4", "--open", "2"]);
    assert!((num(&v, "/value") - 0.75).abs() <= 1e-9);
    assert_eq!(v["recommendation"], "switch");
}

#[test]
fn solve_and_analyze_agree_on_classic() {
    let value = num(&json(&["solve"]), "/value");
    let engine = num(&json(&["analyze", "--preset", "classic"]), "/win_prob");
    let library = unconditional_win_prob(&make_preset("classic", &PresetParams::default()).unwrap());
    assert!((value - engine).abs() <= 1e-9);
    assert_eq!(engine, library);
}

#[test]
fn solve_errors() {
    assert_eq!(monty(&["solve", "--doors", "8", "--open", "1"]).status.code(), Some(4));
    assert_eq!(monty(&["solve", "--doors", "4", "--open", "1", "--cap", "10"]).status.code(), Some(4));
    assert_eq!(monty(&["solve", "--doors", "3", "--open", "2"]).status.code(), Some(2));
    assert_eq!(monty(&["solve", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_classic() {
    let o = monty(&["simulate", "--preset", "classic", "-n", "100000", "--seed", "42", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let est = num(&v, "/comparison/sim/estimate");
    let se = num(&v, "/comparison/sim/std_error");
    assert!((est - 2.0 / 3.0).abs() <= 4.0 * se);
    assert_eq!(v["comparison"]["sim"]["seed"], 42);
}

#[test]
fn simulate_hundred_doors() {
    let v = json(&["simulate", "--preset", "hundred-doors", "-n", "100000", "--seed", "7"]);
    let est = num(&v, "/comparison/sim/estimate");
    assert!((est - 0.99).abs() <= 4.0 * num(&v, "/comparison/sim/std_error"));
}

#[test]
fn simulate_usage_errors() {
    assert_eq!(monty(&["simulate", "--preset", "classic", "-n", "0"]).status.code(), Some(2));
    assert_eq!(monty(&["simulate", "-n", "ten"]).status.code(), Some(2));
    assert_eq!(monty(&["simulate", "-n", "10", "--seed", "-3"]).status.code(), Some(2));
    assert_eq!(monty(&["simulate", "-n", "10", "--seed", "0x10"]).status.code(), Some(2));
}

#[test]
fn simulate_seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_monty"));
        cmd.args(["simulate", "-n", "1000", "--format", "json"]).args(extra);
        match env {
            Some(s) => cmd.env("MONTY_SEED", s),
            None => cmd.env_remove("MONTY_SEED"),
        };
        let o = cmd.output().unwrap();
        serde_json::from_slice::<Value>(&o.stdout).unwrap()["comparison"]["sim"]["seed"].clone()
    };
    assert_eq!(run(Some("17"), &[]), 17);
    assert_eq!(run(Some("17"), &["--seed", "5"]), 5);
    assert!(run(None, &[]).is_u64());
}

#[test]
fn flagged_comparison_exits_five() {
    use threedoors::model::FinalPolicy;
    use threedoors::sim::{compare_result, simulate};
    use threedoors_cli::commands::{ModelSummary, Report, SimulateReport};

    // Stay-model plays checked against the switch model's exact values.
    let classic = make_preset("classic", &PresetParams::default()).unwrap();
    let stay = classic.with_policy(FinalPolicy::Stay).unwrap();
    let sim = simulate(&stay, 20_000, 1).unwrap();
    let model = ModelSummary { source: "classic-symmetric".into(), n_doors: 3, k_opened: 1 };
    let report = SimulateReport { model, comparison: compare_result(&classic, sim) };
    assert_eq!(report.exit_code(), 5);
    assert!(report.table().contains("FLAG"));
}

#[test]
fn sweep_grid() {
    let v = json(&["sweep", "--q-from", "0", "--q-to", "1", "--steps", "11"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
    assert!((num(&v, "/global_min") - 0.5).abs() <= 1e-9);
    for row in v["rows"].as_array().unwrap() {
        let q = row["q"].as_f64().unwrap();
        assert!((row["closed_form"].as_f64().unwrap() - 1.0 / (1.0 + q)).abs() <= 1e-12);
    }
    let single = json(&["sweep", "--q-from", "0.5", "--q-to", "0.5", "--steps", "1"]);
    assert_eq!(single["rows"].as_array().unwrap().len(), 1);
    assert!((num(&single, "/rows/0/min_conditional") - 2.0 / 3.0).abs() <= 1e-12);

    let csv = stdout(&monty(&["sweep", "--steps", "3", "--format", "csv"]));
    assert_eq!(csv.lines().next().unwrap(), "q,\"p=1,O=2\",\"p=1,O=3\",min_conditional,closed_form");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn sweep_domain_errors() {
    assert_eq!(monty(&["sweep", "--q-from", "0", "--q-to", "2"]).status.code(), Some(2));
    assert_eq!(monty(&["sweep", "--q-from", "0.8", "--q-to", "0.2"]).status.code(), Some(2));
    assert_eq!(monty(&["sweep", "--steps", "0"]).status.code(), Some(2));
}

#[test]
fn presets_listing() {
    let o = monty(&["presets"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("classic-symmetric"));
    let v = json(&["presets"]);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["classic-symmetric", "host-biased", "hundred-doors", "fixed-pick"]);
    assert_eq!(monty(&["presets", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn play_immediate_eof() {
    let o = monty_with_input(&["play", "--seed", "1"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("plays  0"));
    let o = monty_with_input(&["play", "--seed", "1", "--format", "json"], "");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["plays"], 0);
}

#[test]
fn play_always_switch_matches_two_thirds() {
    // Pick door 1 and switch, 300 times.
    let script = "1\nswitch\n".repeat(300);
    let o = monty_with_input(&["play", "--seed", "2024", "--format", "json"], &script);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["switch"]["plays"], 300);
    let wins = v["switch"]["wins"].as_f64().unwrap();
    let freq = wins / 300.0;
    let se = (2.0 / 9.0 / 300.0f64).sqrt();
    assert!((freq - 2.0 / 3.0).abs() <= 4.0 * se, "{freq}");
    // Prompts went to stderr so stdout stays parseable.
    assert!(String::from_utf8_lossy(&o.stderr).contains("Round 300"));
}

#[test]
fn play_with_host_bias() {
    let o = monty_with_input(&["play", "--seed", "9", "--host-bias", "1"], "1\nstay\n2\nswitch\nq\n");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Round 2"));
    assert_eq!(monty_with_input(&["play", "--host-bias", "2"], "").status.code(), Some(2));
    assert_eq!(monty_with_input(&["play", "--record", "x.json"], "").status.code(), Some(2));
}

#[test]
fn record_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("run.json");
    let rec_s = rec.to_str().unwrap();
    let o = monty(&["simulate", "--preset", "host-biased", "--q", "0.3", "-n", "20000", "--shards", "4", "--record", rec_s]);
    assert_eq!(o.status.code(), Some(0));

    let record: Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(record["invocation"]["command"], "simulate");
    assert!(record["invocation"]["seed"].is_u64(), "seed must be resolved: {record}");
    assert_eq!(record["tool_version"], env!("CARGO_PKG_VERSION"));

    let o = monty(&["replay", rec_s, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["matches"], true);
    assert_eq!(v["output"], record["output"]);

    // Tampering with a recorded number is detected.
    let mut tampered = record.clone();
    tampered["output"]["comparison"]["sim"]["wins"] = Value::from(1);
    std::fs::write(&rec, tampered.to_string()).unwrap();
    let o = monty(&["replay", rec_s]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("/comparison/sim/wins"));
}

#[test]
fn record_every_batch_command() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["analyze", "--all-observations", "--observe", "p=2,O=1"],
        &["solve", "--doors", "4", "--open", "2"],
        &["sweep", "--steps", "5"],
        &["presets"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let rec = dir.path().join(format!("{i}.json"));
        let mut full = args.to_vec();
        full.extend(["--record", rec.to_str().unwrap()]);
        assert!(monty(&full).status.success());
        let o = monty(&["replay", rec.to_str().unwrap()]);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).contains("outputs match"));
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(monty(&["--help"]).status.code(), Some(0));
    assert_eq!(monty(&["--version"]).status.code(), Some(0));
    assert_eq!(monty(&[]).status.code(), Some(2));
    assert_eq!(monty(&["dance"]).status.code(), Some(2));
}
