//! End-to-end runs of the `relcont` binary on the bundled scenarios and on
//! deliberately broken inputs.

use relcont_cli::{Compiled, Scenario};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn relcont(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relcont")).args(args).env("RELCONT_THREADS", "2").output().expect("binary runs")
}

fn bundled(name: &str) -> String {
    scenarios().join(format!("{name}.toml")).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn identical_runs_give_identical_reports() {
    let s = bundled("dielectric_interface");
    let a = relcont(&["junction", "--scenario", &s]);
    let b = relcont(&["junction", "--scenario", &s]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let recs = lines(&a);
    let names: Vec<&str> = recs.iter().filter_map(|r| r["name"].as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted, "records are ordered by name");
    assert!(recs.last().unwrap()["summary"]["pass"].as_bool().unwrap());
}

#[test]
fn every_bundled_scenario_round_trips() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let a = Scenario::load(&path).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let out = dir.path().join("s.toml");
            a.save(&out).unwrap();
            let mut b = Scenario::load(&out).unwrap();
            b.base_dir = a.base_dir.clone();
            assert_eq!(a, b, "{}", path.display());
            Compiled::new(&a).unwrap();
            n += 1;
        }
    }
    assert!(n >= 7);
}

#[test]
fn normalize_prints_a_loadable_scenario() {
    let out = relcont(&["normalize", "--scenario", &bundled("euler_maxwell_static")]);
    assert_eq!(out.status.code(), Some(0));
    let s = Scenario::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(s.name, "euler_maxwell_static");
}

fn modified(name: &str, from: &str, to: &str) -> String {
    let text = std::fs::read_to_string(bundled(name)).unwrap();
    assert!(text.contains(from), "{from}");
    text.replacen(from, to, 1)
}

fn assert_input_error(text: &str, command: &str, needle: &str) {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.toml", text);
    let out = relcont(&[command, "--scenario", &p]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(2), "{err}");
    assert!(err.contains(needle), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_metric_expression_is_an_input_error_with_a_span() {
    let text = modified("smooth_fields_oracles", "\"1 + 0.05*cos(x0)\"", "\"1 + *cos(x0)\"");
    assert_input_error(&text, "all", "metric.components[1][1]: 1:5:");
}

#[test]
fn schema_violations_name_the_field() {
    assert_input_error(&modified("euler_maxwell_static", "rho = 1.2", "rho = 1.2\nsigma = 1"), "all", "sigma");
    let both = modified(
        "euler_maxwell_static",
        "u = [1.0, 0.0, 0.0, 0.0]",
        "u = [1.0, 0.0, 0.0, 0.0]\nw = [1.0, 0.0, 0.0, 0.0]",
    );
    assert_input_error(&both, "all", "exactly one of 'u' and 'w'");
    assert_input_error(
        &modified("euler_maxwell_static", "a = [\"0.5*x1\", 0.0,", "a = [\"0.5*x1\","),
        "all",
        "fields.a",
    );
    assert_input_error(&modified("euler_maxwell_static", "rho = 1.2", "rho = \"x7\""), "all", "uses x7");
    assert_input_error(&modified("euler_maxwell_static", "rho = 1.2", "rho = \"1 + x3\""), "all", "frozen");
}

#[test]
fn velocity_must_be_unit_and_timelike() {
    let spacelike = modified("euler_maxwell_static", "u = [1.0, 0.0, 0.0, 0.0]", "u = [0.1, 1.0, 0.0, 0.0]");
    assert_input_error(&spacelike, "sem", "not timelike");
    let slow = modified("euler_maxwell_static", "u = [1.0, 0.0, 0.0, 0.0]", "u = [1.0, 0.1, 0.0, 0.0]");
    assert_input_error(&slow, "sem", "not unit");
    // the same vector given as w is normalized
    let w = modified("euler_maxwell_static", "u = [1.0, 0.0, 0.0, 0.0]", "w = [1.0, 0.1, 0.0, 0.0]");
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.toml", &w);
    assert_eq!(relcont(&["sem", "--scenario", &p]).status.code(), Some(0));
}

#[test]
fn a_direct_faraday_form_must_be_closed() {
    let really_open = modified(
        "reissner_nordstrom",
        "f = [\"-0.8/x1^2\", 0.0, 0.0, 0.0, 0.0, 0.0]",
        "f = [\"-0.8/x1^2\", 0.0, 0.0, 0.0, 0.0, \"0.1*x1\"]",
    );
    assert_input_error(&really_open, "einstein", "F is not closed");
}

#[test]
fn evaluation_errors_carry_the_point() {
    assert_input_error(
        &modified("euler_maxwell_static", "rho = 1.2", "rho = \"log(x1)\""),
        "sem",
        "fields.rho at x = ",
    );
}

#[test]
fn constructed_jump_violations_fail_the_run() {
    // a tangential mismatch of the exterior potential
    let text = modified("dielectric_interface", "\"0.3*sin(x2) + 1.5*", "\"0.35*sin(x2) + 1.5*");
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.toml", &text);
    let out = relcont(&["junction", "--scenario", &p]);
    assert_eq!(out.status.code(), Some(1));
    let recs = lines(&out);
    let failed: Vec<&str> = recs.iter().filter(|r| r["status"] == "fail").filter_map(|r| r["name"].as_str()).collect();
    for name in ["jump_e_tangential", "jump_potential_tangential"] {
        assert!(failed.contains(&name), "{failed:?}");
    }
    let worst = recs.iter().find(|r| r["name"] == "jump_e_tangential").unwrap();
    assert_eq!(worst["worst"].as_array().unwrap().len(), 4);
}

#[test]
fn tolerance_overrides_and_plots() {
    let s = bundled("plane_wave_vacuum");
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let out =
        relcont(&["maxwell", "--scenario", &s, "--tol", "maxwell_first.ratio=8", "--plot", plots.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let recs = lines(&out);
    let first = recs.iter().find(|r| r["name"] == "maxwell_first").unwrap();
    assert_eq!(first["status"], "fail");
    assert_eq!(first["expected_ratio"], 8.0);
    let csv = std::fs::read_to_string(plots.join("maxwell_first.csv")).unwrap();
    assert!(csv.starts_with("x0,x1,x2,x3,residual\n"));
    assert!(csv.lines().count() > 10);
    let out = relcont(&["maxwell", "--scenario", &s, "--tol", "nonsense=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_level_cannot_establish_convergence() {
    let out = relcont(&["balance", "--scenario", &bundled("plane_wave_vacuum"), "--refine", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let recs = lines(&out);
    let r = recs.iter().find(|r| r["name"] == "sem_divergence").unwrap();
    assert!(r["note"].as_str().unwrap().contains("two refinement levels"));
}

#[test]
fn sem_form_selects_the_writings() {
    let s = bundled("euler_maxwell_static");
    let out = relcont(&["sem", "--form", "faraday", "--scenario", &s]);
    let names: Vec<String> = lines(&out).iter().filter_map(|r| r["name"].as_str().map(String::from)).collect();
    assert_eq!(names, ["sem_faraday_vs_eb"]);
    let out = relcont(&["sem", "--form", "phi", "--scenario", &s]);
    assert_eq!(lines(&out).len(), 3);
}

#[test]
fn boundary_points_can_be_included() {
    let s = bundled("plane_wave_vacuum");
    let interior = lines(&relcont(&["maxwell", "--scenario", &s]));
    let whole = lines(&relcont(&["maxwell", "--scenario", &s, "--include-boundary"]));
    let linf =
        |v: &[serde_json::Value]| v.iter().find(|r| r["name"] == "maxwell_first").unwrap()["linf"].as_f64().unwrap();
    assert!(linf(&whole) > linf(&interior));
}

#[test]
fn blobs_are_read_row_major_little_endian() {
    let text = std::fs::read_to_string(bundled("euler_maxwell_static")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    // 3 × 9 × 9 × 3 base grid, ρ = 1.2 + 0.1·x1 written as a blob
    let mut bytes = Vec::new();
    for _t in 0..3 {
        for i in 0..9 {
            for _j in 0..9 {
                for _z in 0..3 {
                    let x1 = -1.0 + 0.25 * i as f64;
                    bytes.extend_from_slice(&(1.2f64 + 0.1 * x1).to_le_bytes());
                }
            }
        }
    }
    std::fs::write(dir.path().join("rho.bin"), &bytes).unwrap();
    let p =
        write(dir.path(), "s.toml", &text.replace("rho = 1.2", "rho = { file = \"rho.bin\", shape = [3, 9, 9, 3] }"));
    let out = relcont(&["balance", "--scenario", &p]);
    // a density gradient at rest is still mass-conserving, but not in mechanical equilibrium
    let recs = lines(&out);
    let r = |n: &str| recs.iter().find(|r| r["name"] == n).unwrap().clone();
    assert_eq!(r("mass_continuity")["status"], "pass");
    assert!(r("momentum_balance")["linf"].as_f64().unwrap() > 1e-3);
    let bad =
        write(dir.path(), "t.toml", &text.replace("rho = 1.2", "rho = { file = \"rho.bin\", shape = [3, 9, 9] }"));
    assert_eq!(relcont(&["balance", "--scenario", &bad]).status.code(), Some(2));
}
