use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn gaugekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaugekit")).args(args).env_remove("GAUGEKIT_SEED").output().unwrap()
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    v["report"].clone()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn constants_rho_in_the_plane() {
    let out = gaugekit(&["constants", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let rho = report(&out)["rho"].as_f64().unwrap();
    assert!((rho - 1.0 / (2f64.powf(1.5) * 16.0)).abs() < 1e-15);
    assert!((rho - 0.02210).abs() < 5e-6);
}

#[test]
fn geom_two_unit_squares() {
    let out = gaugekit(&["geom", "--figure", &data("two-unit-squares.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["perimeter"], "6/1");
    assert_eq!(r["volume"], "2/1");
    assert_eq!(r["diameter_sq"], "5/1");
}

#[test]
fn geom_reads_line_sets() {
    let out = gaugekit(&["geom", "--figure", &data("line.json"), "--tag", "0"]);
    let r = report(&out);
    assert_eq!(r["dim"], 1);
    assert_eq!(r["volume"], "3/4");
    assert_eq!(r["perimeter"], "4/1");
}

#[test]
fn gauss_green_quadratic_unit_square() {
    let out = gaugekit(&["gauss-green", "--field", "quadratic", "--figure", &data("unit-square.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r["abs_error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(r["exact"]["equal"], true);

    let out = gaugekit(&["gauss-green", "--field", "quadratic", "--figure", &data("two-unit-squares.json"), "--div", "numeric"]);
    assert!(report(&out)["abs_error"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn partition_four_balls() {
    let out = gaugekit(&["partition", "--input", &data("four-balls.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let cubes = r["partition"]["cubes"].as_array().unwrap();
    assert_eq!(cubes.len(), 4);
    for c in cubes {
        let idx: Vec<i64> = c["cube"]["index"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).collect();
        assert_eq!(c["cube"]["level"], 1);
        assert_eq!(c["ball"].as_u64().unwrap() as i64, idx[0] + 2 * idx[1]);
    }
    assert_eq!(r["check"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_exit_codes() {
    let refuted = gaugekit(&["verify", "--claim", &data("double-lebesgue.json"), "--gauge", &data("gauge-0.6.json"), "--trials", "4"]);
    assert_eq!(code(&refuted), 2);
    let v = report(&refuted)["verdict"].clone();
    assert_eq!(v["verdict"], "refuted");
    assert_eq!(v["eps"], 0.01);

    let ok = gaugekit(&["verify", "--claim", &data("lebesgue.json"), "--gauge", &data("gauge-0.6.json"), "--trials", "4"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(report(&ok)["verdict"]["verdict"], "consistent-at-depth");

    let no_gauge = gaugekit(&["verify", "--claim", &data("lebesgue.json")]);
    assert_eq!(code(&no_gauge), 3);
}

#[test]
fn hk_check_and_integrate() {
    let out = gaugekit(&["hk", "check", "--claim", &data("hk-singular.json"), "--trials", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!((r["definite"].as_f64().unwrap() - 1f64.sin()).abs() < 1e-12);
    for run in r["runs"].as_array().unwrap() {
        let o = &run["outcomes"][0];
        assert!(o["max_sum"].as_f64().unwrap() < o["eps"].as_f64().unwrap());
    }

    let out = gaugekit(&["hk", "integrate", "--f", "half-inverse-sqrt", "--singular", "0"]);
    assert_eq!(code(&out), 0);
    assert!((report(&out)["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn charge_check_separates() {
    assert_eq!(code(&gaugekit(&["charge-check", "--charge", &data("segment.json"), "--trials", "32"])), 2);
    assert_eq!(code(&gaugekit(&["charge-check", "--charge", &data("density.json"), "--trials", "32"])), 0);
}

#[test]
fn input_errors_exit_3() {
    let missing = gaugekit(&["geom", "--figure", &data("missing.json")]);
    assert_eq!(code(&missing), 3);
    let schema = gaugekit(&["geom", "--figure", &data("hk-singular.json")]);
    assert_eq!(code(&schema), 3);
    assert!(String::from_utf8_lossy(&schema.stderr).contains("`dim`"));
    assert_eq!(code(&gaugekit(&["constants"])), 3);
    assert_eq!(code(&gaugekit(&["gauss-green", "--field", "nope", "--figure", &data("unit-square.json")])), 3);
}

#[test]
fn budget_exit_4() {
    let out = gaugekit(&["hk", "integrate", "--budget", "1000"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1000"));
}

#[test]
fn seed_resolution_and_reproducibility() {
    let a = gaugekit(&["verify", "--claim", &data("lebesgue.json"), "--gauge", &data("gauge-0.6.json"), "--trials", "3", "--seed", "11"]);
    let b = gaugekit(&["verify", "--claim", &data("lebesgue.json"), "--gauge", &data("gauge-0.6.json"), "--trials", "3", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["config"]["args"]["verify"]["trials"], 3);

    let run_env = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_gaugekit")).args(args).env("GAUGEKIT_SEED", "5").output().unwrap()
    };
    let env: Value = serde_json::from_slice(&run_env(&["constants", "--n", "1"]).stdout).unwrap();
    assert_eq!(env["config"]["seed"], 5);
    assert_eq!(env["config"]["seed_source"], "env");
    let flag: Value = serde_json::from_slice(&run_env(&["constants", "--n", "1", "--seed", "6"]).stdout).unwrap();
    assert_eq!(flag["config"]["seed"], 6);

    let garbage = Command::new(env!("CARGO_BIN_EXE_gaugekit"))
        .args(["constants", "--n", "1"])
        .env("GAUGEKIT_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(code(&garbage), 3);
}

#[test]
fn config_file_seed() {
    let dir = std::env::temp_dir().join(format!("gaugekit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"seed": 42}"#).unwrap();
    let out = gaugekit(&["constants", "--n", "2", "--config", cfg.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["config"]["seed_source"], "config");

    let target = dir.join("out.csv");
    let out = gaugekit(&["constants", "--n", "2", "--format", "csv", "--output", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("command,key,value\n"));
    assert!(text.contains("constants,rho,0.0220970869"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn diagram_supports_every_edge() {
    let out = gaugekit(&["diagram", "--trials", "2", "--queries", "4"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["entries"].as_array().unwrap().len(), 7);
    assert!(r["entries"].as_array().unwrap().iter().all(|e| e["supports"] == true));
}
