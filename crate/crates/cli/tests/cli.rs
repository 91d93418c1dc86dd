use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use zetacast_core::hmm::default_phase_emissions;
use zetacast_core::HmmModel;

/// First nontrivial zero height, from published zero tables.
const FIRST_ZERO: f64 = 14.134725141734693;

fn zetacast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetacast"))
        .args(args)
        .output()
        .unwrap()
}

fn run_ok(args: &[&str]) -> Output {
    let out = zetacast(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty(), "data must not go to stdout");
    out
}

fn out_dir(root: &Path, name: &str) -> (PathBuf, String) {
    let p = root.join(name);
    let s = p.to_string_lossy().into_owned();
    (p, s)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let j = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[j].parse().unwrap()).collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn zeta_grid_and_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "zeta");
    run_ok(&["zeta", "--t-min", "10", "--t-max", "30", "--step", "0.1", "--out", &o]);
    let (header, rows) = read_csv(&out.join("zeta_signal.csv"));
    assert_eq!(header, ["t", "re", "im", "modulus", "signal"]);
    assert_eq!(rows.len(), 201);

    let t = column(&out.join("zeta_zeros.csv"), "t");
    let modulus = column(&out.join("zeta_zeros.csv"), "modulus");
    assert_eq!(t.len(), 3, "{t:?}");
    assert!((t[0] - FIRST_ZERO).abs() < 1e-2);
    assert!(modulus.iter().all(|m| *m < 1e-3));

    // the grid itself brackets the dip: |ζ| is smallest at the sample next to the zero
    let ts = column(&out.join("zeta_signal.csv"), "t");
    let ms = column(&out.join("zeta_signal.csv"), "modulus");
    let near = ts.iter().zip(&ms).filter(|(x, _)| (13.5..14.8).contains(*x));
    let (t_min, _) = near.min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert!((t_min - FIRST_ZERO).abs() <= 0.05 + 1e-9);
}

#[test]
fn empty_zeta_range_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "zeta");
    let res = zetacast(&["zeta", "--t-min", "30", "--t-max", "10", "--out", &o]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("empty range"));
    assert!(res.stdout.is_empty());
    assert!(!out.exists());
}

#[test]
fn forecast_reproduces_worked_corrections() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "fc");
    run_ok(&[
        "forecast",
        "--table",
        "fixture:table2",
        "--alpha",
        "0.5",
        "--zeta-mean",
        "0.73",
        "--out",
        &o,
    ]);
    let delta = column(&out.join("forecast.csv"), "delta");
    for (d, want) in delta.iter().zip([-0.04, 0.04, -0.055, 0.05]) {
        assert!((d - want).abs() <= 0.01, "{d} vs {want}");
    }
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["job"]["command"], "forecast");
    assert_eq!(manifest["artifacts"].as_array().unwrap().len(), 2);
}

#[test]
fn zero_alpha_returns_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "fc");
    run_ok(&["forecast", "--table", "fixture:table1", "--alpha", "0", "--out", &o]);
    let csv = out.join("forecast.csv");
    assert_eq!(column(&csv, "fpas"), column(&csv, "fpas_zeta"));
}

#[test]
fn missing_inputs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let (_, o) = out_dir(dir.path(), "fc");
    let missing = dir.path().join("absent.csv");
    let res = zetacast(&["forecast", "--table", missing.to_str().unwrap(), "--out", &o]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("not found"));

    let res = zetacast(&["forecast", "--out", &o]);
    assert_eq!(res.status.code(), Some(2));

    let res = zetacast(&[
        "forecast",
        "--table",
        "fixture:table2",
        "--signal-column",
        "nope",
        "--out",
        &o,
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn compare_ranks_fixture_models() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "cmp");
    run_ok(&["compare", "--table", "fixture:table5", "--method", "all", "--out", &o]);
    let report = json(&out.join("ranking.json"));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    assert_eq!(results[0]["method"], "row-sum");
    assert_eq!(results[0]["ranking"], serde_json::json!(["FPAS+zeta", "ARIMA", "FPAS"]));
    let scores = column(&out.join("ranking_row-sum.csv"), "score");
    for (s, printed) in scores.iter().zip([0.265, 0.875, 0.307]) {
        assert!((s - printed).abs() <= 0.001 + 1e-12);
    }
}

#[test]
fn compare_with_ahp_weights() {
    let dir = tempfile::tempdir().unwrap();
    let pairwise = dir.path().join("pairwise.csv");
    std::fs::write(&pairwise, "1,1,1,1,1\n1,1,1,1,1\n1,1,1,1,1\n1,1,1,1,1\n1,1,1,1,1\n").unwrap();
    let (out, o) = out_dir(dir.path(), "cmp");
    run_ok(&[
        "compare",
        "--table",
        "fixture:table5",
        "--method",
        "standard-topsis",
        "--pairwise",
        pairwise.to_str().unwrap(),
        "--out",
        &o,
    ]);
    let report = json(&out.join("ranking.json"));
    for w in report["weights"].as_array().unwrap() {
        assert!((w.as_f64().unwrap() - 0.2).abs() < 1e-12);
    }
    assert_eq!(report["results"][0]["ranking"][0], "FPAS+zeta");
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, ao) = out_dir(dir.path(), "a");
    let (b, bo) = out_dir(dir.path(), "b");
    let (c, co) = out_dir(dir.path(), "c");
    let args = [
        "simulate",
        "--table",
        "fixture:table1",
        "--iterations",
        "2000",
        "--seed",
        "11",
    ];
    run_ok(&[&args[..], &["--out", &ao]].concat());
    run_ok(&[&args[..], &["--out", &bo]].concat());
    run_ok(&[
        "simulate",
        "--table",
        "fixture:table1",
        "--iterations",
        "2000",
        "--seed",
        "12",
        "--out",
        &co,
    ]);
    for f in ["bands.csv", "bands.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
    }
    assert_ne!(
        std::fs::read(a.join("bands.csv")).unwrap(),
        std::fs::read(c.join("bands.csv")).unwrap()
    );
    assert_eq!(json(&a.join("manifest.json"))["seed"], 11);
}

#[test]
fn phase_shares_sum_to_hundred() {
    let dir = tempfile::tempdir().unwrap();
    let model = HmmModel::four_phase(default_phase_emissions()).unwrap();
    let model_path = dir.path().join("model.json");
    std::fs::write(&model_path, serde_json::to_vec(&model).unwrap()).unwrap();
    let (_, obs) = model.sample(60, 5);
    let mut table = String::from("t,inflation\n");
    for (i, x) in obs.iter().enumerate() {
        table.push_str(&format!("{},{x}\n", i + 1));
    }
    let table_path = dir.path().join("obs.csv");
    std::fs::write(&table_path, table).unwrap();

    let (out, o) = out_dir(dir.path(), "ph");
    run_ok(&[
        "phases",
        "--table",
        table_path.to_str().unwrap(),
        "--column",
        "inflation",
        "--model",
        model_path.to_str().unwrap(),
        "--out",
        &o,
    ]);
    let (header, rows) = read_csv(&out.join("phase_shares.csv"));
    assert_eq!(header, ["period", "Stable", "Growth", "Volatile", "Crash"]);
    assert_eq!(rows.len(), 60);
    for r in rows {
        let sum: f64 = r[1..].iter().map(|v| v.parse::<f64>().unwrap()).sum();
        assert!((sum - 100.0).abs() < 1e-9, "{sum}");
    }
    let report = json(&out.join("phases.json"));
    assert_eq!(report["viterbi"]["path"].as_array().unwrap().len(), 60);
}

#[test]
fn trained_phases_report_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "ph");
    run_ok(&[
        "phases",
        "--input",
        "fixture:macro_synthetic",
        "--train",
        "20",
        "--out",
        &o,
    ]);
    let report = json(&out.join("phases.json"));
    let trace: Vec<f64> = report["training"]["loglik_trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(trace.len() >= 2);
    assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-8));
}

#[test]
fn calibrate_recovers_constructed_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let signal = [0.65, 0.74, 0.81, 0.71, 0.62, 0.83];
    let baseline = [3.8, 4.0, 4.2, 4.0, 3.6, 4.3];
    let mean = signal.iter().sum::<f64>() / 6.0;
    let mut table = String::from("t,zeta,fpas,actual\n");
    for i in 0..6 {
        let actual = baseline[i] + 0.5 * (signal[i] - mean);
        table.push_str(&format!("{},{},{},{actual}\n", i + 1, signal[i], baseline[i]));
    }
    let path = dir.path().join("t.csv");
    std::fs::write(&path, table).unwrap();
    let (out, o) = out_dir(dir.path(), "cal");
    run_ok(&[
        "calibrate",
        "--table",
        path.to_str().unwrap(),
        "--actual-column",
        "actual",
        "--out",
        &o,
    ]);
    let report = json(&out.join("calibration.json"));
    assert_eq!(report["calibration"]["alpha_star"], 0.5);
    assert!(report["accuracy"]["rmse"].as_f64().unwrap() < 1e-12);
    assert_eq!(column(&out.join("rmse_curve.csv"), "alpha").len(), 10);
}

#[test]
fn spectrum_of_table_column() {
    let dir = tempfile::tempdir().unwrap();
    let n = 64;
    let dt = 2.0 * std::f64::consts::PI / n as f64;
    let mut table = String::from("t,x\n");
    for i in 0..n {
        let t = i as f64 * dt;
        table.push_str(&format!("{i},{}\n", (4.0 * t).cos() + 0.5 * (9.0 * t).cos()));
    }
    let path = dir.path().join("x.csv");
    std::fs::write(&path, table).unwrap();
    let (out, o) = out_dir(dir.path(), "sp");
    let spacing = dt.to_string();
    run_ok(&[
        "spectrum",
        "--table",
        path.to_str().unwrap(),
        "--column",
        "x",
        "--spacing",
        &spacing,
        "--peaks",
        "2",
        "--out",
        &o,
    ]);
    let omega = column(&out.join("peaks.csv"), "omega");
    assert!(
        (omega[0] - 4.0).abs() < 1e-9 && (omega[1] - 9.0).abs() < 1e-9,
        "{omega:?}"
    );
}

#[test]
fn arima_forecast_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = out_dir(dir.path(), "ar");
    run_ok(&[
        "arima",
        "--input",
        "fixture:macro_synthetic",
        "--arima",
        "1,0,0",
        "--horizon",
        "6",
        "--out",
        &o,
    ]);
    assert_eq!(column(&out.join("arima_forecast.csv"), "forecast").len(), 6);
    let res = zetacast(&[
        "arima",
        "--input",
        "fixture:macro_synthetic",
        "--arima",
        "1,x,0",
        "--out",
        &o,
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zetacast.toml");
    std::fs::write(&cfg, "table = \"fixture:table2\"\nalpha = 0.0\nzeta_mean = \"0.73\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let (a, ao) = out_dir(dir.path(), "a");
    run_ok(&["--config", cfg, "forecast", "--out", &ao]);
    assert!(column(&a.join("forecast.csv"), "delta").iter().all(|d| *d == 0.0));

    let (b, bo) = out_dir(dir.path(), "b");
    run_ok(&["--config", cfg, "forecast", "--alpha", "0.5", "--out", &bo]);
    assert!((column(&b.join("forecast.csv"), "delta")[0] + 0.04).abs() < 1e-9);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "alfa = 1\n").unwrap();
    let res = zetacast(&["--config", bad.to_str().unwrap(), "forecast", "--out", &bo]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn replay_reproduces_and_detects_drift() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("macro.csv");
    std::fs::write(&input, zetacast_core::fixtures::MACRO_SYNTHETIC_CSV).unwrap();
    let (out, o) = out_dir(dir.path(), "run");
    run_ok(&[
        "pipeline",
        "--input",
        input.to_str().unwrap(),
        "--iterations",
        "1000",
        "--out",
        &o,
    ]);

    let (again, ao) = out_dir(dir.path(), "again");
    let manifest = out.join("manifest.json");
    run_ok(&["replay", manifest.to_str().unwrap(), "--out", &ao]);
    for name in ["pipeline.json", "bands.csv", "forecast.csv"] {
        assert_eq!(
            std::fs::read(out.join(name)).unwrap(),
            std::fs::read(again.join(name)).unwrap()
        );
    }

    std::fs::write(
        &input,
        zetacast_core::fixtures::MACRO_SYNTHETIC_CSV.replace("8.2", "8.3"),
    )
    .unwrap();
    let (_, do_) = out_dir(dir.path(), "drift");
    let res = zetacast(&["replay", manifest.to_str().unwrap(), "--out", &do_]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("differs"));
}

#[test]
fn every_subcommand_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 10] = [
        &["zeta", "--t-max", "15"],
        &["forecast", "--table", "fixture:table1"],
        &["calibrate", "--table", "fixture:table1", "--actual-column", "fpas_zeta"],
        &["phases", "--input", "fixture:macro_synthetic"],
        &["spectrum", "--len", "64"],
        &["simulate", "--table", "fixture:table2", "--iterations", "100"],
        &["compare", "--table", "fixture:table5"],
        &["arima", "--input", "fixture:macro_synthetic"],
        &["pipeline", "--input", "fixture:macro_synthetic", "--iterations", "200"],
        &["fixtures"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (out, o) = out_dir(dir.path(), &format!("r{i}"));
        run_ok(&[*args, &["--out", &o]].concat());
        let m = json(&out.join("manifest.json"));
        assert_eq!(m["tool"], "zetacast");
        for a in m["artifacts"].as_array().unwrap() {
            let file = out.join(a["file"].as_str().unwrap());
            assert_eq!(std::fs::metadata(&file).unwrap().len(), a["bytes"].as_u64().unwrap());
        }
        let (_, ro) = out_dir(dir.path(), &format!("r{i}-replay"));
        run_ok(&["replay", &o, "--out", &ro]);
    }
}
