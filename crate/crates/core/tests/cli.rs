use std::process::{Command, Output};

use parasasaki::cli::SuiteReport;

fn psl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psl")).args(args).env_remove("PSL_SEED").output().unwrap()
}

fn psl_with_seed(seed: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psl")).args(args).env("PSL_SEED", seed).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(o: &Output) -> SuiteReport {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn example1_suite_passes() {
    let o = psl(&["verify", "example1", "--points", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r.schema, "1");
    assert!(r.pass);
    let names: Vec<_> = r.checks.iter().map(|c| c.check.as_str()).collect();
    assert!(names.contains(&"lie:para_sasaki_like") && names.contains(&"chart:para_sasaki_like"));
    assert!((r.values["ric_xi_xi"] + 4.0).abs() < 1e-9);
}

#[test]
fn extension_einstein_reports_lambda_and_scal() {
    let o = psl(&["verify", "extension-einstein", "--n", "2", "--points", "8"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!((r.values["lambda"] + 4.0).abs() < 1e-7);
    assert!((r.values["scal"] + 20.0).abs() < 1e-6);
}

#[test]
fn injected_defect_exits_1_and_names_the_residual() {
    let o = psl(&["verify", "parallel", "--points", "4"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("FAIL para_sasaki_like/") && err.contains("residual"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&psl(&["verify", "nonesuch"])), 2);
    assert_eq!(code(&psl(&["transform", "example1", "--u", "0.1*("])), 2);
    assert_eq!(code(&psl(&["transform", "example1", "--u", "x9"])), 2);
    assert_eq!(code(&psl(&["cone", "example4"])), 2);
    assert_eq!(code(&psl(&["verify", "example4", "--curve", "eta-einstein", "--t", "1:0:1"])), 2);
    assert_eq!(code(&psl(&["frobnicate"])), 2);
}

#[test]
fn reports_are_byte_identical_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (a, b, c, d) = (path("a.json"), path("b.json"), path("c.json"), path("d.json"));
    assert_eq!(code(&psl(&["verify", "example2", "--lambda", "1", "--points", "8", "-o", &a])), 0);
    assert_eq!(code(&psl(&["verify", "example2", "--lambda", "1", "--points", "8", "-o", &b])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    assert_eq!(code(&psl_with_seed("7", &["verify", "example2", "--lambda", "1", "--points", "8", "-o", &c])), 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    let rc: SuiteReport = serde_json::from_slice(&std::fs::read(&c).unwrap()).unwrap();
    assert_eq!(rc.config.seed, 7);

    // the flag wins over the environment
    let flag = ["verify", "example2", "--lambda", "1", "--points", "8", "--seed", "20190419", "-o", &d];
    assert_eq!(code(&psl_with_seed("7", &flag)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn eta_einstein_curve_csv() {
    let o = psl(&["verify", "example4", "--n", "2", "--a", "2", "--b", "1", "--curve", "eta-einstein", "--t", "-1:1:0.25"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,alpha,beta,gamma"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 9);
    let mid = &rows[4];
    assert_eq!(mid[0], 0.0);
    assert!((mid[1] - 4.0 / 3.0).abs() < 1e-9 && (mid[2] + 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn transform_and_cone_verdicts() {
    assert_eq!(code(&psl(&["transform", "example1", "--u", "0.2", "--points", "8"])), 0);
    let o = psl(&["transform", "example1", "--u", "0.3", "--v", "0.2", "--w", "0.1", "--points", "8"]);
    assert_eq!(code(&o), 1);
    assert!(report(&o).checks.iter().any(|c| c.check == "f_transformation" && c.pass));
    assert_eq!(code(&psl(&["transform", "extension-einstein", "--p", "2", "--q", "1", "--points", "8"])), 0);
    let o = psl(&["cone", "example1", "--points", "4"]);
    assert_eq!(code(&o), 1);
    assert!(!report(&o).checks[0].pass);
}

#[test]
fn report_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    psl(&["verify", "generic", "--points", "4", "-o", good.to_str().unwrap()]);
    psl(&["verify", "parallel", "--points", "4", "-o", bad.to_str().unwrap()]);
    let o = psl(&["report", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).ends_with("PASS\n"));
    assert_eq!(code(&psl(&["report", bad.to_str().unwrap()])), 1);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{}").unwrap();
    assert_eq!(code(&psl(&["report", junk.to_str().unwrap()])), 2);
}
