use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn dimer(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimer")).current_dir(dir).args(args).output().expect("binary runs")
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn error_line(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("error line");
    serde_json::from_str(line).expect("machine-parsable error")
}

const SMALL: &str = r#"{
  "evolution": {"method": "trotter", "n_steps": 12},
  "estimator": {"shots": 300, "seed": 5},
  "spectrum": {"channels": "same_site"}
}"#;

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.json"), SMALL).unwrap();
    let a = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "a", "--threads", "1", "dsf"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "b", "--threads", "4", "dsf"]);
    assert!(b.status.success());
    let (fa, fb) = (files(&tmp.path().join("a")), files(&tmp.path().join("b")));
    assert!(fa.len() > 10);
    assert_eq!(fa, fb);
    let c = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "c", "--seed", "6", "dsf"]);
    assert!(c.status.success());
    assert_ne!(fa["series_C_xx_1_1.csv"], files(&tmp.path().join("c"))["series_C_xx_1_1.csv"]);
}

#[test]
fn manifest_traces_config_and_seed() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.json"), SMALL).unwrap();
    let out = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "o", "correlate"]);
    assert!(out.status.success());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 5);
    assert_eq!(m["command"], "correlate");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert!(m["versions"]["dimer-core"].is_string());
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 12);
    let rms = m["rms"].as_object().unwrap();
    assert_eq!(rms.len(), 6);
    assert!(rms.values().all(|r| r["rms_time"].as_f64().unwrap() >= 0.0));
    let text = String::from_utf8(std::fs::read(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    assert!(!text.contains("timestamp"));
}

#[test]
fn empty_config_runs_documented_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("empty.json"), "").unwrap();
    let out = dimer(tmp.path(), &["--config", "empty.json", "--out-dir", "o", "exact-spectrum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let energies = std::fs::read_to_string(tmp.path().join("o/energies.csv")).unwrap();
    let values: Vec<f64> = energies.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values, vec![-3.0, -1.0, 1.0, 3.0]);
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    let c = &m["config"];
    assert_eq!(c["evolution"]["n_steps"], 100);
    assert_eq!(c["evolution"]["dt"], 0.3);
    assert_eq!(c["estimator"]["shots"], 8000);
    assert_eq!(c["model"]["jxx"], 1.0);
    assert_eq!(c["model"]["h"], 1.0);
}

#[test]
fn reproduce_fig4_has_triplet_peaks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dimer(tmp.path(), &["--out-dir", "o", "reproduce", "fig4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["dsf_exact.csv", "dsf_reff.csv"] {
        let text = std::fs::read_to_string(tmp.path().join("o").join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("omega,intensity"));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let mut it = l.split(',').map(|x| x.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let mut peaks: Vec<f64> = dimer_core::spectra::top_peaks(&values, 3).into_iter().map(|k| rows[k].0).collect();
        peaks.sort_by(f64::total_cmp);
        let dw = rows[1].0;
        for (p, w) in peaks.iter().zip([2.0, 4.0, 6.0]) {
            assert!((p - w).abs() <= dw, "{name}: {peaks:?}");
        }
    }
}

#[test]
fn malformed_experiment_csv_names_row_and_column() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("exp.csv"), "energy,intensity,error\n1.0,0.5,0.1\n1.5,oops,0.1\n").unwrap();
    std::fs::write(tmp.path().join("run.json"), r#"{"experiment": {"path": "exp.csv"}, "evolution": {"n_steps": 8}}"#).unwrap();
    let out = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "o", "compare-experiment"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_line(&out);
    assert_eq!(e["error"], "config");
    let msg = e["message"].as_str().unwrap();
    assert!(msg.contains("row 3") && msg.contains("intensity"), "{msg}");
}

#[test]
fn compare_experiment_aligns_the_middle_peak() {
    let tmp = tempfile::tempdir().unwrap();
    // synthetic three-peak table with the centre line near 23 in model units
    let mut table = String::from("energy,intensity\n");
    for k in 0..60 {
        let e = 10.0 + 0.5 * k as f64;
        let line = |c: f64, w: f64| (-(e - c) * (e - c) / (2.0 * w * w)).exp();
        table.push_str(&format!("{e},{}\n", 0.6 * line(15.0, 0.8) + line(23.0, 0.8) + 0.5 * line(33.0, 0.8)));
    }
    std::fs::write(tmp.path().join("exp.csv"), table).unwrap();
    let cfg = r#"{
      "model": {"jxx": 11.4, "jyy": 11.4, "jzz": 0.16, "h": 0.0},
      "evolution": {"dt": 0.1, "n_steps": 100},
      "estimator": {"shots": "exact", "noise": null, "analytic": true},
      "experiment": {"path": "exp.csv", "middle_window": [20.0, 26.0]}
    }"#;
    std::fs::write(tmp.path().join("run.json"), cfg).unwrap();
    let out = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "o", "compare-experiment"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("o/dsf_xx_overlay.json")).unwrap()).unwrap();
    assert_eq!(r["oracle_gap"].as_f64().unwrap(), 23.12);
    assert_eq!(r["within_one_bin"], true);
    assert_eq!(r["aligned"], true);
    assert_eq!(r["experiment_peak"], 23.0);
    let exp = std::fs::read_to_string(tmp.path().join("o/experiment.csv")).unwrap();
    assert!(exp.lines().nth(1).unwrap().ends_with(','), "absent errors stay empty");
}

#[test]
fn config_errors_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.json"), r#"{"model": {"jxx": 1, "jyy": 1, "jzz": 1, "hh": 2}}"#).unwrap();
    let out = dimer(tmp.path(), &["--config", "bad.json", "exact-spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_line(&out)["code"], 2);
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim().lines().count(), 1);

    let out = dimer(tmp.path(), &["--config", "missing.json", "exact-spectrum"]);
    assert_eq!(out.status.code(), Some(2));

    let out = dimer(tmp.path(), &["compare-experiment", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_threshold_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.json"), r#"{"reff": {"epsilon": 0.1, "n_targ": 100}}"#).unwrap();
    let out = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "o", "reff-train"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_line(&out)["error"], "numerical");
}

#[test]
fn trained_parameters_can_be_reused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dimer(tmp.path(), &["--out-dir", "train", "reff-train"]);
    assert!(out.status.success());
    let cfg = r#"{
      "evolution": {"method": "reff", "n_steps": 20},
      "estimator": {"shots": "exact", "noise": null},
      "reff": {"parameters": "train/reff_parameters.json"},
      "spectrum": {"channels": "same_site"}
    }"#;
    std::fs::write(tmp.path().join("run.json"), cfg).unwrap();
    let out = dimer(tmp.path(), &["--config", "run.json", "--out-dir", "o", "--format", "json", "correlate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    assert!(m["metrics"]["reff.loaded_cost"].as_f64().unwrap() <= 1e-6);
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("o/series_C_zz_1_1.json")).unwrap()).unwrap();
    assert_eq!(s["t"].as_array().unwrap().len(), 20);
    for r in m["rms"].as_object().unwrap().values() {
        assert!(r["rms_time"].as_f64().unwrap() < 0.05);
    }
}
