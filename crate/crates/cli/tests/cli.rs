use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymptotic-means"))
        .args(args)
        .env_remove("ASYMPTOTIC_MEANS_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn upper_p_of_blocks_is_one() {
    let out = run(&["upper", "--kind", "P", repo("specs/blocks4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() <= 5e-3);
    assert_eq!(v["functional"], "P");
    assert_eq!(v["direction"], "upper");
    assert_eq!(v["monotone_ok"], true);
}

#[test]
fn density_of_evens_is_one_half() {
    let out = run(&["density", repo("specs/evens.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    for key in ["natural_density", "polya_upper", "polya_lower", "log_polya_upper", "log_polya_lower"] {
        let x = v[key].as_f64().unwrap_or_else(|| panic!("{key} missing"));
        assert!((x - 0.5).abs() <= 1e-2, "{key} = {x}");
    }
}

#[test]
fn density_of_blocks_has_no_natural_density() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("blocks.json");
    std::fs::write(&spec, r#"{"kind":"exponent_blocks","base":4,"pattern":"10"}"#).unwrap();
    let out = run(&["density", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!(v["natural_density"].is_null());
    assert!((v["natural_band"][0].as_f64().unwrap() - 0.2).abs() <= 1e-2);
    assert!((v["natural_band"][1].as_f64().unwrap() - 0.8).abs() <= 1e-2);
    assert!(v["polya_lower"].as_f64().unwrap().abs() <= 1e-2);
    assert!((v["polya_upper"].as_f64().unwrap() - 1.0).abs() <= 1e-2);
}

#[test]
fn density_rejects_non_indicators() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("half.json");
    std::fs::write(&spec, r#"{"kind":"periodic_word","values":[0.5]}"#).unwrap();
    let out = run(&["density", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("half.json"));
}

#[test]
fn verify_default_corpus_passes() {
    let out = run(&["verify", repo("corpus").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["outcome"] != "fail" && r["outcome"] != "error"));
}

#[test]
fn verify_reports_failures_with_exit_one() {
    let corpus = tempfile::tempdir().unwrap();
    std::fs::copy(repo("corpus/05_log_sinusoid.json"), corpus.path().join("05.json")).unwrap();
    // with a zero window tolerance the P = Q comparison is held to exact equality
    let params = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(params.path(), r#"{"sweep":{"window_tol":0.0}}"#).unwrap();
    let out = run(&["verify", corpus.path().to_str().unwrap(), "--params-file", params.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let reports = json(&out);
    assert!(reports.as_array().unwrap().iter().any(|r| r["outcome"] == "fail"));
}

#[test]
fn verify_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), r#"{"kind":"sinusoid","amplitude":1.0}"#).unwrap();
    let out = run(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.json"), "{}", stderr(&out));
    let reports = json(&out);
    assert_eq!(reports[0]["name"], "parse");
}

#[test]
fn sweep_csv_has_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--kind",
        "K",
        repo("corpus/02_square_wave.json").to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--theta-steps",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,limsup_estimate,argmax_anchor"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.25);
    assert!(rows.iter().all(|r| r.len() == 3 && (r[1] - 1.0).abs() < 1e-12));
}

#[test]
fn range_and_lower_sweep_agree() {
    let spec = repo("corpus/05_log_sinusoid.json");
    let range = json(&run(&["range", "--kind", "Q", spec.to_str().unwrap()]));
    let lower = json(&run(&["sweep", "--kind", "Q", "--lower", spec.to_str().unwrap()]));
    assert_eq!(range["lo"], lower["value"]);
    assert!((range["hi"].as_f64().unwrap() - 1.0).abs() <= 5e-3);
    assert!((range["lo"].as_f64().unwrap() + 1.0).abs() <= 5e-3);
}

#[test]
fn mean_kinds_match_inputs() {
    let square = repo("corpus/02_square_wave.json");
    let out = run(&["mean", "--kind", "R", square.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["converged"], false);
    let e = std::f64::consts::E;
    assert!((v["lo"].as_f64().unwrap() - 1.0 / (1.0 + e)).abs() <= 1e-3);
    assert!((v["hi"].as_f64().unwrap() - e / (1.0 + e)).abs() <= 1e-3);

    let out = run(&["mean", "--kind", "M", square.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let evens = repo("specs/evens.json");
    let v = json(&run(&["mean", "--kind", "Md", evens.to_str().unwrap(), "--n-max", "1e5"]));
    assert_eq!(v["converged"], true);
    assert_eq!(v["criterion"]["x_max"], 1e5);
}

#[test]
fn invalid_input_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"constant\",\n \"domain\": \"multiplicative\", \"value\": }").unwrap();
    let out = run(&["upper", "--kind", "P", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("bad.json") && err.contains("line 2"), "{err}");

    let out = run(&["upper", "--kind", "K", repo("specs/blocks4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["upper", "--kind", "P", "--n-max", "10", repo("specs/blocks4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["upper", "--kind", "P", "--no-such-flag", repo("specs/blocks4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["mean", "--kind", "X", repo("specs/blocks4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_from_environment() {
    let spec = repo("specs/blocks4.json");
    let out = Command::new(env!("CARGO_BIN_EXE_asymptotic-means"))
        .args(["upper", "--kind", "P", spec.to_str().unwrap()])
        .env("ASYMPTOTIC_MEANS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], json(&run(&["upper", "--kind", "P", spec.to_str().unwrap()]))["value"]);

    let out = Command::new(env!("CARGO_BIN_EXE_asymptotic-means"))
        .args(["upper", "--kind", "P", spec.to_str().unwrap()])
        .env("ASYMPTOTIC_MEANS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn params_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    std::fs::write(&params, r#"{"sweep":{"theta_steps":6}}"#).unwrap();
    let spec = repo("specs/blocks4.json");
    let v = json(&run(&["upper", "--kind", "P", spec.to_str().unwrap(), "--params-file", params.to_str().unwrap()]));
    assert_eq!(v["per_theta"].as_array().unwrap().len(), 5);
    let v = json(&run(&[
        "upper",
        "--kind",
        "P",
        spec.to_str().unwrap(),
        "--params-file",
        params.to_str().unwrap(),
        "--theta-steps",
        "7",
    ]));
    assert_eq!(v["per_theta"].as_array().unwrap().len(), 6);

    std::fs::write(&params, r#"{"sweep":{"thetas":4}}"#).unwrap();
    let out = run(&["upper", "--kind", "P", spec.to_str().unwrap(), "--params-file", params.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
