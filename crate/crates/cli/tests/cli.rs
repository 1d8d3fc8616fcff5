use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numradius")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn rotation_on_the_real_plane_has_radius_zero() {
    let o = run(&["radius", "--space", "l2:2", "--matrix", &data("rot90.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["result"]["lower"], 0.0);
    assert_eq!(v["result"]["upper"], 0.0);
    assert_eq!(v["config"]["command"], "radius");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn cpwl_bracket_closes() {
    let o = run(&["radius", "--space", "linf:2", "--pwl", &data("abs2d.json"), "--tol", "1e-6"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["result"];
    let (lo, hi) = (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap());
    assert!(lo >= hi - 1e-6, "[{lo}, {hi}]");
}

#[test]
fn malformed_space_is_an_input_error() {
    let o = run(&["radius", "--space", "l2:nope", "--matrix", &data("rot90.json")]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("position 3"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_json_reports_its_position() {
    let dir = std::env::temp_dir().join(format!("numradius-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "[[1, 2],\n [3, }").unwrap();
    let o = run(&["norm", "--space", "l2:2", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn space_and_matrix_must_agree() {
    let o = run(&["radius", "--space", "l2:3", "--matrix", &data("rot90.json")]);
    assert_eq!(code(&o), 2);
    let o = run(&["radius", "--space", "l1:2", "--pwl", &data("abs2d.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_suite_exits_two() {
    assert_eq!(code(&run(&["verify", "--suite", "bogus"])), 2);
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    assert_eq!(code(&run(&["radius", "--bogus-flag"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verify"));
}

#[test]
fn no_color_output_is_plain() {
    let o = Command::new(env!("CARGO_BIN_EXE_numradius"))
        .args(["radius", "--bogus-flag"])
        .env("NO_COLOR", "1")
        .output()
        .unwrap();
    assert!(!o.stderr.contains(&0x1b));
}

#[test]
fn bk_suite_passes_on_complex_plane() {
    let o = run(&["verify", "--suite", "bk", "--space", "cl2:2", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["cases"].as_array().unwrap().len(), 200);
    assert_eq!(v["config"]["run"]["suite"], "bk");
    assert_eq!(v["config"]["run"]["budget"], 200);
    // Witnesses only on request.
    assert!(v["cases"][0]["witness"].is_null());
}

#[test]
fn bk_suite_on_a_real_space_is_an_input_error() {
    assert_eq!(code(&run(&["verify", "--suite", "bk", "--space", "l2:2"])), 2);
}

#[test]
fn known_suite_passes() {
    let o = run(&["verify", "--suite", "known", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn verify_csv_has_one_row_per_case() {
    let o = run(&["verify", "--suite", "ck", "--budget", "6", "--format", "csv", "--seed", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("suite,seed,name,status,value,expected,tol,relation"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn hilbert_index_through_the_cli() {
    let args = ["index", "--space", "l2:2", "--mode", "linear", "--seed", "7", "--budget", "10000"];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    let v = json(&a);
    assert!(v["result"]["upper"].as_f64().unwrap() <= 5e-3);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn index_one_in_lipschitz_mode() {
    let o = run(&["index", "--space", "linf:2", "--mode", "lipschitz", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["result"]["upper"].as_f64().unwrap() >= 1.0 - 5e-3);
    assert_eq!(v["config"]["budget"], 10000);
    assert_eq!(v["config"]["mode"], "lipschitz");
}

#[test]
fn reports_replay_from_their_config() {
    let first = run(&["index", "--space", "cl2:2", "--seed", "3", "--budget", "50"]);
    let c = &json(&first)["config"];
    let replay = run(&[
        c["command"].as_str().unwrap(),
        "--space",
        c["space"].as_str().unwrap(),
        "--seed",
        &c["seed"].to_string(),
        "--budget",
        &c["budget"].to_string(),
        "--mode",
        c["mode"].as_str().unwrap(),
    ]);
    assert_eq!(first.stdout, replay.stdout);
}

#[test]
fn zero_budget_is_rejected() {
    assert_eq!(code(&run(&["index", "--space", "l2:2", "--budget", "0"])), 2);
}

#[test]
fn loose_brackets_exit_three() {
    // No sharp norm bound on l3: the limit-formula upper end stays loose.
    let o = run(&["radius", "--space", "l3:2", "--matrix", &data("rot90.json")]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["result"]["converged"], false);
}

#[test]
fn norm_csv_round_trips_floats() {
    let o = run(&["norm", "--space", "l1:3", "--matrix", &data("block_shift.json"), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "lower,upper,converged\n1.0,1.0,true\n");
}

#[test]
fn describe_reports_the_known_index() {
    let o = run(&["describe", "--space", "sum:l1(cl2:2,cl1:1)"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["result"];
    assert_eq!(r["dim"], 3);
    assert_eq!(r["field"], "complex");
    assert_eq!(r["known_index"], 0.5);
}

#[test]
fn segment_extension_passes_its_pair_checks() {
    let o = run(&[
        "construct", "extend", "--space", "l1:2", "--x", "[0,0]", "--y", "[1,1]", "--fx", "[0,0]", "--fy", "[2,0]",
        "--emit-witnesses",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json(&o)["result"];
    assert_eq!(r["residuals"]["endpoint_x1"], 0.0);
    assert_eq!(r["residuals"]["endpoint_x2"], 0.0);
    assert!(r["record"]["outputs"].is_object());
    // ||fy - fx|| = 2 = ||y - x||; a constant below one is infeasible.
    let o = run(&[
        "construct", "extend", "--space", "l1:2", "--x", "[0,0]", "--y", "[1,1]", "--fx", "[0,0]", "--fy", "[2,0]",
        "--lipschitz", "0.5",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn constructions_run_from_the_command_line() {
    let lift = run(&["construct", "lift", "--pwl", &data("abs2d.json"), "--blocks", "2"]);
    assert_eq!(code(&lift), 0);
    assert_eq!(json(&lift)["result"]["summary"]["space"], "sum:l1(linf:2,linf:2)");
    let boost = run(&["construct", "boost", "--pwl", &data("abs2d.json"), "--eps", "0.01"]);
    assert_eq!(code(&boost), 0);
    assert!(json(&boost)["result"]["residuals"]["margin"].as_f64().unwrap() > 0.0);
    let compress = run(&["construct", "compress", "--space", "sum:linf(l2:2,l1:1)", "--matrix", &data("block_shift.json")]);
    assert_eq!(code(&compress), 0);
    let s = &json(&compress)["result"]["summary"];
    assert!(s["normalized_radius_after"].as_f64().unwrap() <= s["normalized_radius_before"].as_f64().unwrap() + 2e-2);
    let join = run(&["construct", "join", "--space", "l2:2", "--x", "[1,0]", "--y", "[0,1]"]);
    assert_eq!(code(&join), 0);
    let lush = run(&["construct", "lush", "--space", "linf:2", "--x", "[1,0.5]", "--y", "[0,1]"]);
    assert_eq!(code(&lush), 0);
    assert_eq!(code(&run(&["construct", "lift", "--space", "l2:2", "--matrix", &data("rot90.json")])), 2);
}
