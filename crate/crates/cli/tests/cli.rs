use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shadowcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowcal"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = shadowcal(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&ok(&all)).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const DECADE_MODEL: &str =
    r#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"sigma":{"constant_db":2}}"#;

#[test]
fn predict_decade() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", DECADE_MODEL);
    let v = json(&["predict", "--model", &m, "--d", "10"]);
    let p = &v["predictions"][0];
    assert!((p["mean_rss_dbm"].as_f64().unwrap() + 60.0).abs() < 1e-12);
    assert_eq!(p["sigma_db"].as_f64(), Some(2.0));
    assert!(ok(&["predict", "--model", &m, "--d", "10"]).contains("-60.0000 dBm"));
}

#[test]
fn localize_inverse_case() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", DECADE_MODEL);
    let v = json(&["localize", "--model", &m, "--rss", "-60", "--level", "0.95"]);
    assert!((v["d_hat_m"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    assert!((v["d_lo_m"].as_f64().unwrap() - 6.37).abs() < 0.01);
    assert!((v["d_hi_m"].as_f64().unwrap() - 15.70).abs() < 0.01);
}

#[test]
fn missing_source_names_the_path() {
    let out = shadowcal(&["fit", "missing.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));
}

#[test]
fn four_rows_is_insufficient_for_quartic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "four.csv",
        "distance_m,mean_dbm,sd_db,prr_pct,n\n1,-50,1,,20\n2,-55,2,,20\n3,-58,3,,20\n4,-60,2,,20\n",
    );
    let out = shadowcal(&["sigma-fit", &f, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn degenerate_regression_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "flat.csv",
        "distance_m,mean_dbm,sd_db,prr_pct,n\n5,-60,1,,20\n5,-61,1,,20\n5,-62,1,,20\n",
    );
    let out = shadowcal(&["fit", &f]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_usage_exits_one() {
    assert_eq!(shadowcal(&["fit"]).status.code(), Some(1));
    assert_eq!(
        shadowcal(&["fit", "longwall-face", "--intercept", "sideways"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(shadowcal(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_dataset_lists_alternatives() {
    let out = shadowcal(&["datasets", "export", "nowhere"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("longwall-face"));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["fit", "longwall-face", "--compare-paper"][..],
        &["sigma-fit", "gateroad-conveyor", "--target", "residual-y"],
        &[
            "simulate", "--eta", "2.5", "--rss-d0", "-45", "--sigma", "3", "--seed", "9",
        ],
        &["datasets", "list"],
    ] {
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        assert_eq!(ok(&a), ok(&a), "{args:?}");
    }
    let a = [
        "simulate", "--eta", "2", "--rss-d0", "-40", "--sigma", "2", "--seed", "3",
    ];
    assert_eq!(ok(&a), ok(&a));
    let b = [
        "simulate", "--eta", "2", "--rss-d0", "-40", "--sigma", "2", "--seed", "4",
    ];
    assert_ne!(ok(&a), ok(&b));
}

#[test]
fn export_then_fit_matches_embedded_fit() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["longwall-face", "gateroad-conveyor"] {
        let path = dir.path().join(format!("{name}.csv"));
        let p = path.to_str().unwrap();
        ok(&["datasets", "export", name, "-o", p]);
        for cmd in ["fit", "sigma-fit"] {
            let mut from_name = json(&[cmd, name]);
            let mut from_file = json(&[cmd, p]);
            // Only embedded sources carry published values and the note.
            for v in [&mut from_name, &mut from_file] {
                let obj = v.as_object_mut().unwrap();
                obj.remove("source");
                obj.remove("note");
            }
            assert_eq!(from_name, from_file, "{cmd} {name}");
        }
    }
}

#[test]
fn export_matches_fixture_bytes() {
    let stdout = ok(&["datasets", "export", "gateroad-conveyor"]);
    let fixture = include_str!("../../core/tests/fixtures/gateroad-conveyor.csv");
    assert_eq!(stdout, fixture);
}

#[test]
fn fit_reports_published_values() {
    let v = json(&["fit", "gateroad-conveyor", "--compare-paper"]);
    assert_eq!(v["published"]["eta"].as_f64(), Some(1.568));
    assert!(v["note"].is_null());
    let v = json(&["fit", "longwall-face"]);
    assert!(v["published"].is_null());
    assert!(v["note"].as_str().unwrap().contains("2.14"));
    assert!(ok(&["fit", "longwall-face"]).contains("NOTE:"));
    let v = json(&["fit", "longwall-face", "--intercept", "anchored"]);
    assert_eq!(v["rss_d0_dbm"].as_f64(), Some(-51.65));
    assert_eq!(v["residuals"].as_array().unwrap().len(), 20);
}

#[test]
fn emit_curve_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    ok(&[
        "sigma-fit",
        "longwall-face",
        "--emit-curve",
        curve.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&curve).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("distance_m,fitted,observed"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first[0], 1.0);
    assert_eq!(first[2], 0.48936);
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn calibrate_predict_localize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("gr.json");
    let m = model.to_str().unwrap();
    ok(&["calibrate", "gateroad-conveyor", "-o", m]);
    let p = json(&["predict", "--model", m, "--d", "5,25"]);
    let rows = p["predictions"].as_array().unwrap();
    assert_eq!(rows[0]["sigma_clamped"], Value::Bool(false));
    assert_eq!(rows[1]["sigma_clamped"], Value::Bool(true));
    let rss = rows[0]["mean_rss_dbm"].as_f64().unwrap().to_string();
    let l = json(&["localize", "--model", m, "--rss", &rss]);
    assert!((l["d_hat_m"].as_f64().unwrap() - 5.0).abs() < 1e-9);
}

#[test]
fn simulated_survey_feeds_fit() {
    let dir = tempfile::tempdir().unwrap();
    let survey = dir.path().join("sim.csv");
    let s = survey.to_str().unwrap();
    ok(&[
        "simulate",
        "--eta",
        "3",
        "--rss-d0",
        "-35",
        "--sigma",
        "1.5",
        "--samples",
        "200",
        "--seed",
        "5",
        "-o",
        s,
    ]);
    assert!(std::fs::read_to_string(&survey)
        .unwrap()
        .starts_with("site,distance_m,rssi_dbm\n"));
    let v = json(&["fit", s]);
    assert!((v["eta"].as_f64().unwrap() - 3.0).abs() < 0.1);
}

#[test]
fn plan_with_outage_probability() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", DECADE_MODEL);
    let by_z = json(&["plan", "--model", &m, "--z", "1.6448536269514722"]);
    let by_p = json(&["plan", "--model", &m, "--outage", "0.05"]);
    let a = by_z["max_range_m"].as_f64().unwrap();
    let b = by_p["max_range_m"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-3);
    let out = shadowcal(&["plan", "--model", &m, "--sensitivity", "-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_model_document_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "bad.json",
        r#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"sigma":{"constant_db":2},"extra":1}"#,
    );
    let out = shadowcal(&["predict", "--model", &m, "--d", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
}
