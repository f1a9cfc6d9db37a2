use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn lab(args: &[&str]) -> i32 {
    let mut argv = vec!["gkp-lab"];
    argv.extend_from_slice(args);
    gkp_lab::run(argv)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    let bin = env!("CARGO_BIN_EXE_gkp-lab");
    let out = Command::new(bin).args(["lattice-mvt", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(Command::new(bin).output().unwrap().status.code(), Some(2));
    assert_eq!(Command::new(bin).arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(lab(&["channel-coeffs", "--code", "octagonal"]), 2);
    assert_eq!(lab(&["channel-coeffs", "--povm", "homodyne"]), 2);
    assert_eq!(lab(&["compile-symplectic", "--n", "1", "--d", "2", "--matrix", "1,1,0,0"]), 2);
    assert_eq!(lab(&["compile-symplectic", "--n", "1", "--d", "2", "--matrix", "1,0,1"]), 2);
    assert_eq!(lab(&["lattice-mvt", "--f", "cube:1"]), 2);
    assert_eq!(lab(&["cv-shadow", "--state", "vacuum", "--observable", "vacuum", "--mode", "tomography", "--seed", "1"]), 2);
}

#[test]
fn click_coefficients_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("click.json");
    assert_eq!(lab(&["channel-coeffs", "--code", "hexagonal", "--povm", "click", "--out", path_str(&out)]), 0);
    let v = read_json(&out);
    assert!((v["theta"].as_f64().unwrap() - 1.1596).abs() < 5e-4);
    assert_eq!(v["manifest"]["config"]["command"], "channel-coeffs");
    assert_eq!(v["manifest"]["config"]["povm"], "click");
    assert!(v["manifest"]["version"].is_string());
    assert!(dir.path().join("click.json.manifest.json").exists());
}

#[test]
fn heterodyne_and_parity_reports() {
    let dir = tempfile::tempdir().unwrap();
    let het = dir.path().join("het.json");
    let args = ["channel-coeffs", "--povm", "heterodyne", "--samples", "20000", "--seed", "3", "--out", path_str(&het)];
    assert_eq!(lab(&args), 0);
    let v = read_json(&het);
    assert!((v["coefficients"]["alpha"].as_f64().unwrap() - 0.19705563).abs() < 1e-7);
    assert!((v["p0_series_bound"].as_f64().unwrap() - 0.455).abs() < 1e-3);
    let par = dir.path().join("par.json");
    assert_eq!(lab(&["channel-coeffs", "--code", "square", "--povm", "parity", "--out", path_str(&par)]), 0);
    assert!((read_json(&par)["parity_bound"]["fidelity_lower"].as_f64().unwrap() - 0.5625).abs() < 1e-12);
}

#[test]
fn compile_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq.json");
    assert_eq!(lab(&["compile-symplectic", "--n", "1", "--d", "2", "--matrix", "0,1,1,0", "--out", path_str(&out)]), 0);
    let v = read_json(&out);
    assert_eq!(v["verified"], true);
    assert!(v["length"].as_u64().unwrap() <= v["length_bound"].as_u64().unwrap());
}

#[test]
fn lattice_mvt_ball() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mvt.json");
    assert_eq!(lab(&["lattice-mvt", "--f", "ball:1", "--samples", "100000", "--out", path_str(&out)]), 0);
    let mean = read_json(&out)["mvt"]["mc_mean"].as_f64().unwrap();
    assert!((mean / 1.9099 - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn shadow_run_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let state = "grid:hexagonal,delta=0.2,logical=0";
    let run = ["shadow-run", "--state", state, "--code", "hexagonal", "--n-total", "3000", "--seed", "5", "--out", path_str(&records)];
    assert_eq!(lab(&run), 0);
    let text = std::fs::read_to_string(&records).unwrap();
    assert_eq!(text.lines().count(), 3001);
    let header: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["manifest"]["config"]["seed"], 5);

    let est = dir.path().join("est.json");
    let csv = dir.path().join("conv.csv");
    let args = [
        "shadow-estimate", "--records", path_str(&records), "--observable", "Z", "--observable", "X",
        "--csv", path_str(&csv), "--out", path_str(&est),
    ];
    assert_eq!(lab(&args), 0);
    let v = read_json(&est);
    assert_eq!(v["records"], 3000);
    let z = v["estimates"][0]["report"]["value"].as_f64().unwrap();
    let x = v["estimates"][1]["report"]["value"].as_f64().unwrap();
    assert!(z > 0.6, "Z estimate {z}");
    assert!(x.abs() < 0.4, "X estimate {x}");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("n,observable,running_mean"));
    assert!(rows.lines().any(|l| l.starts_with("3000,Z,")));
}

#[test]
fn shadow_run_rejects_other_povms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let args = ["shadow-run", "--state", "vacuum", "--code", "square", "--povm", "click", "--seed", "1", "--out", path_str(&out)];
    assert_eq!(lab(&args), 2);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let base = ["shadow-run", "--state", "coherent:0.1,0.2", "--code", "square", "--n-total", "9000", "--seed", "11"];
    let mut run_a = base.to_vec();
    run_a.extend(["--workers", "1", "--out", path_str(&a)]);
    let mut run_b = base.to_vec();
    run_b.extend(["--workers", "3", "--out", path_str(&b)]);
    assert_eq!(lab(&run_a), 0);
    assert_eq!(lab(&run_b), 0);
    let body = |p: &Path| std::fs::read_to_string(p).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# lattice experiment\nf = ball:2\nsamples = 2000\nseed = 9\n").unwrap();
    let out = dir.path().join("mvt.json");
    assert_eq!(lab(&["lattice-mvt", "--config", path_str(&cfg), "--samples", "3000", "--out", path_str(&out)]), 0);
    let v = read_json(&out);
    assert_eq!(v["manifest"]["config"]["function"], "ball:2");
    assert_eq!(v["manifest"]["config"]["seed"], 9);
    assert_eq!(v["mvt"]["samples"], 3000);
    std::fs::write(&cfg, "not a pair\n").unwrap();
    assert_eq!(lab(&["lattice-mvt", "--config", path_str(&cfg)]), 2);
}

#[test]
fn cv_shadow_oracle_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cv.json");
    let args = [
        "cv-shadow", "--state", "coherent:0.2,0.1", "--observable", "coherent:0,0.1", "--sigma", "1.0", "--eps", "0.3",
        "--delta", "0.1", "--mode", "oracle", "--seed", "4", "--out", path_str(&out),
    ];
    assert_eq!(lab(&args), 0);
    let v = read_json(&out);
    let o = &v["report"]["observables"][0];
    let est = o["estimate"]["value"].as_f64().unwrap();
    let target = o["target"].as_f64().unwrap();
    let tol = 0.3 + o["epsilon_sigma"].as_f64().unwrap().abs();
    assert!((est - target).abs() <= tol, "{est} vs {target}");
    assert_eq!(v["report"]["mode"]["mode"], "oracle");
}

#[test]
fn twirl_viz_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nu.svg");
    let args = ["twirl-viz", "--code", "hexagonal", "--twirl", "walk:3", "--grid", "40", "--out", path_str(&out)];
    assert_eq!(lab(&args), 0);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<rect").count(), 40 * 40 + 2);
    assert_eq!(lab(&["twirl-viz", "--twirl", "none", "--out", path_str(&out)]), 2);
}
