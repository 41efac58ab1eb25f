use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rankdiff"));
    cmd.env_remove("RANKDIFF_THREADS");
    cmd
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .args([
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

/// Least-squares slope and R², computed independently of the binary.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

const ATLAS: &str = "seed = 7\nreplicates = 10\n[model]\nkind = \"atlas\"\nn = 100\neta_n = { rule = \"constant\", value = 1.0 }\n";
const PD_HALF: &str =
    "seed = 11\nreplicates = 1000\np_values = [2.0]\n[model]\nkind = \"pd\"\nalpha = 0.5\n";

#[test]
fn sample_writes_top_m_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "atlas.toml", ATLAS);
    let o = run("sample", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv_rows(&dir.path().join("weights.csv"));
    assert_eq!(header.len(), 1 + 50 + 1);
    assert_eq!(header[1], "rank_1");
    assert_eq!(header[50], "rank_50");
    assert_eq!(header[51], "truncated_mass_beyond_rank_50");
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let top: f64 = row[1..51].iter().sum();
        assert!(top <= 1.0 + 1e-12);
        assert!((top + row[51] - 1.0).abs() < 1e-9);
        assert!(row[1..51].windows(2).all(|w| w[0] >= w[1]));
    }
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["n"], 100);
    assert_eq!(summary["replicates"], 10);
    assert_eq!(summary["model"]["kind"], "atlas");
}

#[test]
fn zero_drift_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "zero.toml",
        "seed = 1\n[model]\nkind = \"custom\"\nn = 4\nrows = [[0.0, 0.0, 0.0, 0.0]]\n",
    );
    let o = run("sample", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("α_k > 0 for all 1 ≤ k ≤ n−1"), "{err}");
    assert!(err.contains("alpha_1"), "{err}");
}

#[test]
fn pd_second_moment_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "pd.toml", PD_HALF);
    let o = run("sample", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = json(&dir.path().join("summary.json"));
    // E Σ V_i² = 1 − α for PD(α)
    let d2 = summary["d_p"][0]["mean"].as_f64().unwrap();
    assert!((d2 - 0.5).abs() < 0.05, "D₂ = {d2}");
    assert!(summary["n"].is_null());
}

#[test]
fn pd_curve_slope() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "pd.toml", PD_HALF);
    let o = run("capital-curve", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv_rows(&dir.path().join("curve.csv"));
    assert_eq!(
        header,
        ["rank", "log_rank", "mean_log_weight", "q05", "q95"]
    );
    let range: Vec<&Vec<f64>> = rows
        .iter()
        .filter(|r| (10.0..=100.0).contains(&r[0]))
        .collect();
    let (slope, _) = fit(
        &range.iter().map(|r| r[1]).collect::<Vec<_>>(),
        &range.iter().map(|r| r[2]).collect::<Vec<_>>(),
    );
    assert!((slope + 2.0).abs() < 0.3, "slope {slope}");
    let curve = json(&dir.path().join("curve.json"));
    assert!((curve["fit"]["slope"].as_f64().unwrap() - slope).abs() < 1e-9);
    assert_eq!(curve["reference_slope"], -2.0);
    for r in &rows {
        assert!(r[3] <= r[2] && r[2] <= r[4]);
    }
}

#[test]
fn curve_for_two_particles() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "two.toml",
        "seed = 5\nreplicates = 1\n[model]\nkind = \"atlas\"\nn = 2\neta_n = { rule = \"constant\", value = 1.0 }\n",
    );
    let o = run("capital-curve", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv_rows(&dir.path().join("curve.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[0][2] > rows[1][2]);
    assert!(json(&dir.path().join("curve.json"))["fit"].is_null());
}

#[test]
fn gravity_curve_is_linear_mid_range() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "gravity.toml",
        "seed = 9\nreplicates = 200\n[model]\nkind = \"gravity\"\nn = 2000\neta_n = { rule = \"constant\", value = 0.25 }\n[curve]\nmax_rank = 200\nfit_ranks = [10, 200]\n",
    );
    let o = run("capital-curve", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv_rows(&dir.path().join("curve.csv"));
    let range: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] >= 10.0).collect();
    assert_eq!(range.len(), 191);
    let (_, r2) = fit(
        &range.iter().map(|r| r[1]).collect::<Vec<_>>(),
        &range.iter().map(|r| r[2]).collect::<Vec<_>>(),
    );
    assert!(r2 > 0.95, "R² = {r2}");
}

#[test]
fn outputs_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "pd.toml", PD_HALF);
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    assert!(run("sample", &cfg, &one, &["--threads", "1"])
        .status
        .success());
    let o = bin()
        .env("RANKDIFF_THREADS", "4")
        .args([
            "sample",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            four.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["weights.csv", "summary.json"] {
        assert_eq!(
            std::fs::read(one.join(f)).unwrap(),
            std::fs::read(four.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "atlas.toml", ATLAS);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run("sample", &cfg, &a, &[]).status.success());
    assert!(run("sample", &cfg, &b, &["--seed", "8"]).status.success());
    assert_eq!(json(&b.join("summary.json"))["seed"], 8);
    assert_ne!(
        std::fs::read(a.join("weights.csv")).unwrap(),
        std::fs::read(b.join("weights.csv")).unwrap()
    );
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "noseed.toml", &ATLAS.replace("seed = 7\n", ""));
    let o = run("sample", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `seed`"));
}

#[test]
fn config_errors_name_line_and_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "seed = 1\nreplicates = -3\n");
    let o = run("sample", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("line 2") && err.contains("field `replicates`"),
        "{err}"
    );

    let cfg = write_config(
        dir.path(),
        "bad2.toml",
        "seed = 1\n\n[model]\nkind = \"pd\"\nalpha = 1.2\n",
    );
    let o = run("sample", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("line 5") && err.contains("field `model.alpha`"),
        "{err}"
    );
}

#[test]
fn verify_lemma_suite_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.toml",
        "seed = 20240917\n[verify]\nscenarios = [\"lemma9\"]\n",
    );
    let o = run("verify", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&dir.path().join("lemma9.json"));
    assert_eq!(report["schema_version"], 1);
    assert!(report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v["passed"] == true));
}

#[test]
fn verify_dominance_scenario() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.toml",
        "seed = 20240917\n[verify]\nscenarios = [\"trichotomy-eta0\"]\n",
    );
    let o = run("verify", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("[dominance]"));
    let report = json(&dir.path().join("trichotomy-eta0.json"));
    assert_eq!(report["classification"], "dominance");
    let phase = report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == "phase is dominance")
        .expect("phase verdict");
    assert_eq!(phase["passed"], true);
}

#[test]
fn verify_failure_names_verdict() {
    let dir = TempDir::new().unwrap();
    // three replicates cannot resolve the PD limit: the KS verdict fails
    let cfg = write_config(
        dir.path(),
        "v.toml",
        "seed = 20240917\n[verify]\nscenarios = [\"trichotomy-pd\"]\nreplicates = 3\n",
    );
    let o = run("verify", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(
        err.contains("scenario `trichotomy-pd`") && err.contains("verdict `"),
        "{err}"
    );
    assert!(dir.path().join("trichotomy-pd.json").exists());
}

#[test]
fn malformed_scenario_lists_valid_names() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.toml",
        "seed = 1\n[verify]\nscenarios = [\"lemma-nine\"]\n",
    );
    let o = run("verify", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("lemma-nine") && err.contains("line 3"),
        "{err}"
    );
    for name in [
        "lemma9",
        "trichotomy-pd",
        "counterexample-2",
        "rate-critical",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn asymptotics_table() {
    let o = bin()
        .args(["asymptotics", "--eta", "0.25", "--p", "1,2"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row = |q: &str, p: &str| -> f64 {
        out.lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>())
            .find(|f| f[0] == q && f[1] == p)
            .unwrap_or_else(|| panic!("no {q} row for p = {p}:\n{out}"))[2]
            .parse()
            .unwrap()
    };
    assert!((row("limit_dp", "2") - 0.5).abs() < 1e-12);
    // Γ(2 − α)/(Γ(2)Γ(1 − α)) = 1 at p = 1
    assert!((row("limit_dp", "1") - 1.0).abs() < 1e-12);
    assert!((row("limit_entropy", "-") - 4f64.ln()).abs() < 1e-9);
    assert!(out.contains("1.3862943"));
}

#[test]
fn asymptotics_from_config_writes_json() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.toml",
        "[asymptotics]\neta = 0.25\np = [2.0]\ntol = 1e-9\n",
    );
    let o = run("asymptotics", &cfg, dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let j = json(&dir.path().join("asymptotics.json"));
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["alpha"], 0.5);
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["tolerance"], "1e-9");
}

#[test]
fn asymptotics_eta_out_of_range() {
    for eta in ["0.6", "0.5", "0", "-0.1"] {
        let o = bin()
            .args(["asymptotics", &format!("--eta={eta}")])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(2), "eta = {eta}");
        assert!(stderr(&o).contains("(0, 1/2)"));
    }
}
