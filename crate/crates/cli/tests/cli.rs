use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn homflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homflow")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SU2_SU2: &str = r#"{"dim":6,"brackets":[[0,1,2,1],[1,2,0,1],[0,2,1,-1],[3,4,5,1],[4,5,3,1],[3,5,4,-1]]}"#;

#[test]
fn check_builtin_passes() {
    let out = homflow(&["check", "--builtin", "su2_r", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["ideal"]["compact_semisimple"], true);
}

#[test]
fn check_reports_ineffective_kernel() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "su2su2.json", SU2_SU2);
    let space = write(
        dir.path(),
        "space.json",
        r#"{"algebra":"su2su2.json","isotropy_basis":[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0]]}"#,
    );
    let out = homflow(&["check", "--space-file", &space, "--format", "json"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["presentation"]["valid"], false);
    assert_eq!(v["effectiveness_kernel"].as_array().unwrap().len(), 3);

    let diag = write(
        dir.path(),
        "diag.json",
        r#"{"algebra":"su2su2.json","isotropy_basis":[[1,0,0,1,0,0],[0,1,0,0,1,0],[0,0,1,0,0,1]]}"#,
    );
    let out = homflow(&["check", "--space-file", &diag, "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["effectiveness_kernel"].as_array().unwrap().len(), 0);
}

#[test]
fn check_rejects_jacobi_perturbation() {
    let dir = TempDir::new().unwrap();
    let space = write(
        dir.path(),
        "bad.json",
        r#"{"algebra":{"dim":3,"brackets":[[0,1,2,1],[1,2,0,1],[0,2,1,-1],[0,1,0,0.1]]}}"#,
    );
    let out = homflow(&["check", "--space-file", &space, "--format", "json"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["jacobi_ok"], false);
    assert!(v["jacobi_residual"].as_f64().unwrap() > 0.05);
}

#[test]
fn invalid_inputs_exit_with_two() {
    assert_eq!(code(&homflow(&["check", "--builtin", "nonexistent"])), 2);
    assert_eq!(code(&homflow(&["check", "--builtin", "su2", "--space-file", "x.json"])), 2);
    assert_eq!(code(&homflow(&["check", "--space-file", "/nonexistent/space.json"])), 2);
    assert_eq!(code(&homflow(&["flow", "--builtin", "su2", "--t-max", "-1"])), 2);
    assert_eq!(code(&homflow(&["ricci", "--builtin", "su2", "--metric", "/nonexistent/metric.json"])), 2);
    // no compact semisimple part in a nilpotent algebra
    assert_eq!(code(&homflow(&["bochner", "--builtin", "heisenberg", "--auto"])), 2);
    assert_eq!(code(&homflow(&["bochner", "--builtin", "heisenberg"])), 2);
}

#[test]
fn ricci_anchors_and_verification() {
    let out = homflow(&["ricci", "--builtin", "heisenberg", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["ricci"]["scalar"].as_f64().unwrap() + 0.5).abs() < 1e-12);

    let out = homflow(&["ricci", "--builtin", "abelian_3", "--metric", "random", "--seed", "5", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["ricci"]["scalar"], 0.0);
    assert!(v["ricci"]["tensor"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).all(|x| x == 0.0));

    let out = homflow(&["ricci", "--builtin", "so3_sl2r", "--metric", "random", "--verify", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verify"]["passed"], true);
}

#[test]
fn ricci_accepts_metric_files() {
    let dir = TempDir::new().unwrap();
    let metric = write(dir.path(), "m.json", r#"{"matrix":[[4,0,0],[0,4,0],[0,0,4]]}"#);
    let out = homflow(&["ricci", "--builtin", "su2", "--metric", &metric, "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["ricci"]["tensor"][0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["ricci"]["scalar"].as_f64().unwrap() - 0.375).abs() < 1e-12);

    // not invariant under the isotropy rotation
    let bad = write(dir.path(), "bad.json", r#"{"matrix":[[2,0],[0,1]]}"#);
    assert_eq!(code(&homflow(&["ricci", "--builtin", "s2", "--metric", &bad])), 2);
}

#[test]
fn bochner_bound_holds_on_catalog() {
    for name in ["su2_r", "su2_r2_so2", "so3_e2", "su2_su2_r_diag"] {
        let out = homflow(&["bochner", "--builtin", name, "--metric", "random", "--seed", "11", "--format", "json"]);
        assert_eq!(code(&out), 0, "{name}");
        let v = json(&out);
        assert!(v["ric"].as_f64().unwrap() >= v["bound"].as_f64().unwrap() - 1e-8);
    }
    let out = homflow(&["bochner", "--builtin", "so3_e2", "--auto", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["fiber_dim"], 2);
}

#[test]
fn flow_writes_trajectory_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("su2.csv");
    let plot = dir.path().join("plot.csv");
    let out = homflow(&[
        "flow",
        "--builtin",
        "su2",
        "--t-max",
        "2",
        "--out",
        csv.to_str().unwrap(),
        "--emit-plot-data",
        plot.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"]["kind"], "extinct");
    assert!((v["verdict"]["t"].as_f64().unwrap() - 1.0).abs() < 1e-4);

    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,p_11,p_12,p_13,p_22,p_23,p_33,lambda_min,lambda_max,scalar,k_fiber,ric_norm\n"));
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("su2.verdict.json")).unwrap()).unwrap();
    assert_eq!(sidecar["within_bound"], true);
    let plot = fs::read_to_string(&plot).unwrap();
    assert!(plot.starts_with("t,series,value\n"));
    assert!(plot.contains(",k_bound,"));
}

#[test]
fn flow_outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = homflow(&[
            "flow", "--builtin", "su2_r", "--metric", "random", "--seed", "9", "--t-max", "5", "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        (fs::read(&csv).unwrap(), fs::read(csv.with_extension("verdict.json")).unwrap())
    };
    let (a_csv, a_json) = run("a.csv");
    let (b_csv, b_json) = run("b.csv");
    assert_eq!(a_csv, b_csv);
    assert_eq!(a_json, b_json);
}

#[test]
fn heisenberg_reaches_horizon() {
    let out = homflow(&["flow", "--builtin", "heisenberg", "--t-max", "1000", "--sample-dt", "10", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"]["kind"], "reached_horizon");
    assert_eq!(v["scalar_violations"], 0);
}

#[test]
fn sweep_on_su2_r() {
    let dir = TempDir::new().unwrap();
    let agg = dir.path().join("sweep.json");
    let out = homflow(&[
        "flow",
        "--builtin",
        "su2_r",
        "--sweep",
        "50",
        "--seed",
        "100",
        "--t-max",
        "50",
        "--sample-dt",
        "1",
        "--out",
        agg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["extinct"], 50);
    assert_eq!(v["within_bound"], 50);
    assert_eq!(v["slope_clean"], 50);
    let seeds: Vec<u64> = v["results"].as_array().unwrap().iter().map(|r| r["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, (100..150).collect::<Vec<_>>());
    let written: Value = serde_json::from_str(&fs::read_to_string(&agg).unwrap()).unwrap();
    assert_eq!(written, v);
}

#[test]
fn export_round_trips_through_space_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("so3_e2.json");
    assert_eq!(code(&homflow(&["export", "--builtin", "so3_e2", "--out", path.to_str().unwrap()])), 0);
    let from_file = homflow(&["ricci", "--space-file", path.to_str().unwrap(), "--metric", "random", "--format", "json"]);
    let builtin = homflow(&["ricci", "--builtin", "so3_e2", "--metric", "random", "--format", "json"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(json(&from_file)["ricci"], json(&builtin)["ricci"]);
    let check = homflow(&["check", "--space-file", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&check), 0);
}

#[test]
fn list_names_every_entry() {
    let out = homflow(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["su2", "su2_r", "so3_e2", "su2_semidirect_r3", "heisenberg", "abelian_3"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
