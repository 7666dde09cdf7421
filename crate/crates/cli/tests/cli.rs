use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussrelax")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

const COOL: [&str; 16] = [
    "--mu0", "0.2", "--r0", "0.7", "--theta0", "0.4", "--mu-fp", "0.5", "--r-fp", "0", "--theta-fp", "0", "--gamma",
    "1", "--epsilon", "1e-4",
];

#[test]
fn fixed_point_from_bath() {
    let v = run_json(&["fixed-point", "--gamma", "1", "--n-occ", "1", "--m-re", "-1", "--m-im", "0"]);
    let o = &v["outputs"];
    assert!((num(&o["mu_fp"]) - 0.4472136).abs() < 1e-7);
    assert!((num(&o["r_fp"]) - 0.4023595).abs() < 1e-7);
    assert_eq!(num(&o["theta_fp"]), 0.0);

    let v = run_json(&["fixed-point", "--n-occ", "0", "--m-re", "0", "--m-im", "0"]);
    assert_eq!(num(&v["outputs"]["mu_fp"]), 1.0);
    assert_eq!(num(&v["outputs"]["r_fp"]), 0.0);
}

#[test]
fn invalid_input_exits_with_2() {
    assert_eq!(code(&["fixed-point", "--n-occ", "0.3", "--m-re", "1", "--m-im", "0"]), 2);
    assert_eq!(code(&["fixed-point"]), 2);
    assert_eq!(code(&["time", "free", "--mu0", "1.5", "--mu-fp", "0.5"]), 2);
    assert_eq!(code(&["time", "free", "--mu0", "0.2", "--mu-fp", "0.5", "--n-occ", "1"]), 2);
    assert_eq!(code(&["time", "free", "--mu0", "0.2", "--mu-fp", "0.5", "--epsilon", "2"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
}

#[test]
fn cooling_time_example() {
    let mut args = vec!["time", "cool"];
    args.extend(COOL);
    let v = run_json(&args);
    let t = num(&v["outputs"]["asymptotic"]["time"]);
    assert!((t - 4.4437).abs() < 5e-4, "{t}");
    assert!((t - 4.443856886819369).abs() < 1e-12, "{t}");

    args.extend(["--mode", "both"]);
    let v = run_json(&args);
    let exact = num(&v["outputs"]["exact"]["time"]);
    assert!((exact - 4.449748297248829).abs() < 1e-9, "{exact}");
    assert!(v["outputs"]["asymptotic"].is_object());
}

#[test]
fn heating_time_example() {
    let v = run_json(&["time", "heat", "--mu0", "0.8", "--mu-fp", "0.5", "--r-max", "1", "--epsilon", "1e-12"]);
    let t = num(&v["outputs"]["asymptotic"]["time"]);
    assert!((t - 0.127303).abs() < 1e-5, "{t}");
}

#[test]
fn wrong_direction_and_budget_exit_with_3() {
    assert_eq!(code(&["time", "cool", "--mu0", "0.8", "--mu-fp", "0.5"]), 3);
    assert_eq!(code(&["time", "heat", "--mu0", "0.2", "--mu-fp", "0.5", "--r-max", "1"]), 3);
    assert_eq!(code(&["protocol", "plan", "heat", "--mu0", "0.8", "--mu-fp", "0.5", "--r-max", "0"]), 3);
    assert_eq!(code(&["stop-set", "--mu", "0.7", "--mu-fp", "0.5"]), 3);
}

#[test]
fn step_limit_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"segments":[{"type":"free_decay","duration":10.0}],"budget":{"r_max":null}}"#).unwrap();
    let p = path.to_str().unwrap();
    let args = ["protocol", "simulate", "--protocol", p, "--mu0", "0.2", "--mu-fp", "0.5", "--max-steps", "10"];
    assert_eq!(code(&args), 4);
}

#[test]
fn output_is_deterministic() {
    let mut args = vec!["time", "cool", "--mode", "both"];
    args.extend(COOL);
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains("wall_clock"));

    args.push("--timing");
    let v = run_json(&args);
    assert!(num(&v["meta"]["wall_clock_s"]) >= 0.0);
}

#[test]
fn sweep_keeps_grid_order() {
    let args = [
        "sweep", "cool", "--vary", "mu0", "--from", "0.05", "--to", "0.45", "--points", "9", "--mu0", "0.1", "--mu-fp",
        "0.5", "--r-fp", "0.3",
    ];
    let v = run_json(&args);
    let pts = v["outputs"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 9);
    let xs: Vec<f64> = pts.iter().map(|p| num(&p["mu0"])).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    let ts: Vec<f64> = pts.iter().map(|p| num(&p["time"])).collect();
    assert!(ts.windows(2).all(|w| w[1] < w[0]), "{ts:?}");
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

const SQUEEZED: [&str; 12] =
    ["--mu0", "0.2", "--r0", "0.7", "--theta0", "0.4", "--mu-fp", "0.5", "--r-fp", "0.3", "--theta-fp", "0.2"];

fn plan_to(dir: &Path, direction: &str, state: &[&str], extra: &[&str]) -> String {
    let path = dir.join(format!("{direction}.json"));
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["protocol", "plan", direction, "--mode", "exact", "--output", &p];
    args.extend(state);
    args.extend(extra);
    run_json(&args);
    p
}

#[test]
fn planned_protocols_replay_to_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan_to(dir.path(), "cool", &SQUEEZED, &["--epsilon", "1e-4"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert!(doc["segments"].is_array() && doc["budget"].is_object() && doc["predicted_time"].is_number());

    let mut args = vec!["protocol", "simulate", "--protocol", &p];
    args.extend(SQUEEZED);
    let v = run_json(&args);
    let f = num(&v["outputs"]["final_fidelity"]);
    assert!((f - (1.0 - 1e-4)).abs() < 1e-6, "{f}");
    assert_eq!(num(&v["outputs"]["elapsed"]), num(&doc["predicted_time"]));

    let heat_state = ["--mu0", "0.8", "--r0", "0.1", "--mu-fp", "0.5", "--r-fp", "0.3", "--theta-fp", "0.2"];
    let p = plan_to(dir.path(), "heat", &heat_state, &["--epsilon", "1e-6", "--r-max", "1"]);
    let mut args = vec!["protocol", "simulate", "--protocol", &p, "--dt", "1e-5"];
    args.extend(heat_state);
    let v = run_json(&args);
    let f = num(&v["outputs"]["final_fidelity"]);
    assert!((f - (1.0 - 1e-6)).abs() < 1e-6, "{f}");
}

#[test]
fn plan_document_round_trips() {
    let mut args = vec!["protocol", "plan", "cool", "--mode", "exact"];
    args.extend(SQUEEZED);
    let out = run(&args);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("doc.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let p = path.to_str().unwrap();
    let mut sim = vec!["protocol", "simulate", "--protocol", p];
    sim.extend(SQUEEZED);
    let v = run_json(&sim);
    assert_eq!(v["outputs"]["predicted_time"], doc["predicted_time"]);
}

#[test]
fn empty_protocol_keeps_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, r#"{"segments":[],"budget":{"r_max":1.0}}"#).unwrap();
    let p = path.to_str().unwrap();
    let mut args = vec!["protocol", "simulate", "--protocol", p, "--q0", "0.3"];
    args.extend(SQUEEZED);
    let v = run_json(&args);
    assert_eq!(num(&v["outputs"]["elapsed"]), 0.0);
    let evolve = {
        let mut a = vec!["evolve", "--t", "0", "--q0", "0.3"];
        a.extend(SQUEEZED);
        run_json(&a)
    };
    let f0 = num(&evolve["outputs"]["fidelity_to_fp"]);
    assert!((num(&v["outputs"]["final_fidelity"]) - f0).abs() < 1e-15);
    assert!(f0 < 1.0);

    std::fs::write(&path, "{not json").unwrap();
    args[3] = p;
    assert_eq!(code(&args), 2);
}

#[test]
fn trajectory_csv_layout() {
    let mut args = vec!["trajectory", "--t-max", "2", "--steps", "2"];
    args.extend(SQUEEZED);
    let out = run(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,mu,r,theta,sigma_xx,sigma_xy,sigma_yy,fidelity_to_fp");
    assert_eq!(lines.len(), 3);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 0.2).abs() < 1e-12 && (first[2] - 0.7).abs() < 1e-12 && (first[3] - 0.4).abs() < 1e-12);

    let bad = ["trajectory", "--t-max", "2", "--steps", "1", "--mu0", "0.2", "--mu-fp", "0.5"];
    assert_eq!(code(&bad), 2);
}

#[test]
fn trajectory_sources_agree() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("run");
    let pre = prefix.to_str().unwrap();
    let mut args = vec!["trajectory", "--t-max", "5", "--steps", "26", "--source", "both", "--output", pre];
    args.extend(SQUEEZED);
    let v = run_json(&args);
    assert!(num(&v["outputs"]["max_deviation"]) <= 1e-8);
    assert_eq!(v["outputs"]["agree"], Value::Bool(true));
    for tag in ["closed", "oracle"] {
        let text = std::fs::read_to_string(format!("{pre}.{tag}.csv")).unwrap();
        assert_eq!(text.lines().count(), 27);
    }
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn curves_match_trajectory_samples() {
    let mut base = vec!["trajectory", "--t-max", "4", "--steps", "21"];
    base.extend(SQUEEZED);
    let traj = csv_rows(&String::from_utf8(run(&base).stdout).unwrap());

    let mut args = base.clone();
    args.extend(["--curve", "mu-of-r"]);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("r,mu\n"));
    for (row, t) in csv_rows(&text).iter().zip(&traj) {
        assert!((row[0] - t[2]).abs() < 1e-12);
        assert!((row[1] - t[1]).abs() < 1e-8, "{row:?} vs {t:?}");
    }

    let mut args = base.clone();
    args.extend(["--curve", "theta-param"]);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (row, t) in csv_rows(&String::from_utf8(out.stdout).unwrap()).iter().zip(&traj) {
        assert!((row[1] - t[0]).abs() < 1e-8 && (row[2] - t[1]).abs() < 1e-8 && (row[3] - t[2]).abs() < 1e-8);
    }
}

#[test]
fn stop_set_and_worst_case_examples() {
    let v = run_json(&["stop-set", "--mu", "0.25", "--mu-fp", "0.5", "--r-fp", "0"]);
    let rs: Vec<f64> = v["outputs"]["canonical"].as_array().unwrap().iter().map(|p| num(&p["r"])).collect();
    assert!(rs.iter().any(|r| (r - 0.6584789).abs() < 1e-7));
    assert!(rs.iter().any(|r| (r + 0.6584789).abs() < 1e-7));

    let v = run_json(&["worst-case", "--r0", "20", "--mu-ratio", "1e-3", "--epsilon", "1e-6"]);
    assert!((num(&v["outputs"]["gain"]) - 3.8953).abs() < 1e-4);
    let v = run_json(&["worst-case", "--r0", "0", "--mu-ratio", "1e-3", "--epsilon", "1e-6"]);
    assert_eq!(num(&v["outputs"]["gain"]), 1.0);
}

#[test]
fn evolve_sources_agree() {
    let mut a = vec!["evolve", "--t", "1.3", "--q0", "1", "--p0", "-0.5"];
    a.extend(SQUEEZED);
    let closed = run_json(&a);
    a.extend(["--source", "oracle"]);
    let oracle = run_json(&a);
    for k in ["xx", "xy", "yy"] {
        let d = num(&closed["outputs"]["cov"][k]) - num(&oracle["outputs"]["cov"][k]);
        assert!(d.abs() < 1e-8);
    }
}

#[test]
fn pure_fixed_point_times() {
    let v = run_json(&["time", "cool", "--mu0", "0.5", "--r0", "0.4", "--theta0", "0.3", "--mu-fp", "1", "--r-fp", "0.4",
        "--theta-fp", "0.3", "--epsilon", "1e-12", "--mode", "both"]);
    let t = num(&v["outputs"]["asymptotic"]["time"]);
    assert!(((1.0f64 - 0.5) / (2.0 * 0.5 * 1e-12)).ln() - t < 1e-9);
    assert!(num(&v["outputs"]["exact"]["time"]) > 0.0);
    assert_eq!(code(&["time", "heat", "--mu0", "0.5", "--mu-fp", "1"]), 3);
}
