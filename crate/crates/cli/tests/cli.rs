use std::process::{Command, Output};

fn tandem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tandem"))
        .args(args)
        .env_remove("TANDEM_PRECISION")
        .output()
        .expect("run tandem")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &serde_json::Value) -> f64 {
    v.to_string().parse().unwrap()
}

#[test]
fn kt00_value_between_stationary_and_one() {
    let out = tandem(&["kt00", "--rates", "1,2,4", "--t", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("t,value,abs_error,method\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let v: f64 = rows[0][1].parse().unwrap();
    assert!(v > 0.375 && v < 1.0, "{v}");
    assert_eq!(rows[0][3], "thm32");
}

#[test]
fn kt00_coincident_services_rejected() {
    let out = tandem(&["kt00", "--rates", "1,2,2", "--method", "thm31"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rates not distinct"), "{}", stderr(&out));
}

#[test]
fn kt00_small_time_and_grid() {
    let out = tandem(&["kt00", "--rates", "1,2", "--t", "0.001", "--format", "json"]);
    assert!(out.status.success());
    let v = num(&json(&out)[0]["value"]);
    assert!((v - 1.0).abs() < 2e-3, "{v}");

    let out = tandem(&["kt00", "--rates", "1,2,2", "--t", "0.5:1.5:0.5"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[3] == "intertwining"));
}

#[test]
fn kt00_methods_agree() {
    let a = csv_rows(&tandem(&["kt00", "--rates", "1,3,2", "--t", "2", "--method", "thm31"]));
    let b = csv_rows(&tandem(&["kt00", "--rates", "1,3,2", "--t", "2", "--method", "thm32"]));
    let c = csv_rows(&tandem(&["kt00", "--rates", "1,3,2", "--t", "2", "--precision", "high"]));
    let x: f64 = a[0][1].parse().unwrap();
    let y: f64 = b[0][1].parse().unwrap();
    let z: f64 = c[0][1].parse().unwrap();
    assert!((x - y).abs() < 1e-9 && (y - z).abs() < 1e-9, "{x} {y} {z}");
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tandem"))
        .args(["kt00", "--rates", "1,2,4"])
        .env("TANDEM_PRECISION", "nonsense")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kt_dispatch_paths() {
    let cases = [
        (&["--rates", "1,2", "--q", "1", "--q2", "0"][..], "bessel"),
        (&["--rates", "1,1,1", "--q", "1,0", "--q2", "0,0"][..], "equal-rates"),
        (&["--rates", "1,2,3", "--q", "1,0", "--q2", "0,1"][..], "intertwining"),
    ];
    for (args, path) in cases {
        let mut full = vec!["kt"];
        full.extend_from_slice(args);
        let out = tandem(&full);
        assert!(out.status.success(), "{}", stderr(&out));
        let rows = csv_rows(&out);
        assert_eq!(rows[0][5], path);
        let v: f64 = rows[0][3].parse().unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
}

#[test]
fn kt_tolerance_failure_exit_code() {
    let out = tandem(&["kt", "--rates", "1,2,3", "--q", "3,0", "--q2", "0,0", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn kt_dimension_mismatch() {
    let out = tandem(&["kt", "--rates", "1,2,3", "--q", "1", "--q2", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn relaxation_reports() {
    let r = json(&tandem(&["relaxation", "--rates", "1,4,2,3"]));
    assert!((num(&r["relaxation_time"]) - 5.828427124746190).abs() < 1e-12);
    assert_eq!(r["bottleneck_station"], 2);
    assert_eq!(num(&r["prefactor"]), 12.0);

    let r = json(&tandem(&["relaxation", "--rates", "1,1.5"]));
    let want = 1.0 / (2.5 - 2.0 * 1.5f64.sqrt());
    assert!((num(&r["relaxation_time"]) - want).abs() < 1e-10);

    let out = tandem(&["relaxation", "--rates", "2,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unstable"));
}

#[test]
fn relaxation_with_grid() {
    let out = tandem(&["relaxation", "--rates", "1,2,4", "--t", "20:300:20", "--precision", "high"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    let series = r["series"].as_array().unwrap();
    assert_eq!(series.len(), 15);
    let at_100 = num(&series[4]["ratio"]);
    assert!((at_100 - 1.0).abs() < 1e-6, "{at_100}");
    let rel = num(&r["fit_relative_error"]);
    assert!(rel < 0.1, "{rel}");
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "kt", "--rates", "1,2,4", "--t", "1", "--seed", "3", "--reps", "20000"];
    let a = tandem(&args);
    let b = tandem(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows = csv_rows(&a);
    assert_eq!(rows[0][4], "20000");
    assert_eq!(rows[0][5], "3");
}

#[test]
fn simulate_preconditions() {
    let out = tandem(&["simulate", "kt", "--rates", "1,2", "--t", "1", "--reps", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tandem(&["simulate", "noncross", "--rates", "1,2", "--t", "1", "--x", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tandem(&["simulate", "noncross", "--rates", "1,2", "--t", "1", "--x", "1,0", "--format", "json"]);
    assert!(out.status.success());
    let v = num(&json(&out)[0]["estimate"]);
    assert!(v > 0.0 && v < 1.0);
}

#[test]
fn usage_errors() {
    assert_eq!(tandem(&["kt00"]).status.code(), Some(2));
    assert_eq!(tandem(&["kt00", "--rates", "1,x"]).status.code(), Some(2));
    assert_eq!(tandem(&["kt00", "--rates", "1,2", "--t", "0"]).status.code(), Some(2));
    assert_eq!(tandem(&["bogus"]).status.code(), Some(2));
}

#[test]
fn verify_identities_named_checks() {
    let out = tandem(&["verify", "identities"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("cauchy-binet: exact"));
    assert!(text.contains("pi-lambda-inverse: exact"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_oracles_fast() {
    let out = tandem(&["verify", "oracles", "--budget", "fast", "--format", "json"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let rows = json(&out);
    assert!(rows.as_array().unwrap().iter().all(|r| r["status"] == "pass"));
    assert!(rows[0]["detail"].as_str().unwrap().contains("points"));
}
