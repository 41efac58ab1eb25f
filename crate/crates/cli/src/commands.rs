//! The four subcommands. Each returns the files it wrote.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rankdiff::asymptotics::{limit_dp, limit_entropy, max_weight_moment, EtaParam};
use rankdiff::pd::empirical_weight_statistics;
use rankdiff::stationary::sample_stationary_weights;
use rankdiff::stats::{self, MeanEstimate};
use rankdiff::verification::{run_scenario, ExperimentReport, ScenarioOptions, SCHEMA_VERSION};
use rankdiff::{Streams, WeightSequence};
use serde::Serialize;

use crate::config::{AsymptoticsConfig, Config, ConfigError, ModelConfig};
use crate::error::CliError;

/// Settings shared by every subcommand after flags are merged into the config.
pub struct Run {
    pub config: Config,
    pub config_path: String,
    pub seed_override: Option<u64>,
    pub out: PathBuf,
}

impl Run {
    fn seed(&self) -> Result<u64, CliError> {
        self.seed_override.or(self.config.seed).ok_or_else(|| {
            CliError::Config(ConfigError {
                path: self.config_path.clone(),
                line: None,
                field: "seed".into(),
                message: "a master seed is required (set `seed` or pass --seed)".into(),
            })
        })
    }

    fn model(&self) -> Result<&ModelConfig, CliError> {
        self.config.model.as_ref().ok_or_else(|| {
            CliError::Config(ConfigError {
                path: self.config_path.clone(),
                line: None,
                field: "model".into(),
                message: "this command needs a [model] section".into(),
            })
        })
    }

    fn create(&self, name: &str) -> Result<(PathBuf, File), CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok((path, file))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let (path, mut file) = self.create(name)?;
        let mut text = serde_json::to_string_pretty(value).expect("serializable output");
        text.push('\n');
        file.write_all(text.as_bytes())
            .map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Weight draws for the configured model, replicate `i` on substream `i`.
fn draw_weights(
    model: &ModelConfig,
    replicates: usize,
    seed: u64,
) -> Result<Vec<WeightSequence>, CliError> {
    let streams = Streams::new(seed).derive("weights");
    match model {
        ModelConfig::Drift { model, n } => {
            let spec = model.generate(*n)?;
            Ok(sample_stationary_weights(&spec, replicates, &streams)?)
        }
        ModelConfig::Pd { .. } => {
            let cfg = model.pd_config().expect("validated PD parameter");
            Ok(streams
                .map(replicates, |_, rng| cfg.sample(rng))
                .into_iter()
                .collect::<rankdiff::Result<Vec<_>>>()?)
        }
    }
}

fn csv_writer(run: &Run, name: &str) -> Result<(PathBuf, csv::Writer<File>), CliError> {
    let (path, file) = run.create(name)?;
    Ok((path, csv::Writer::from_writer(file)))
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Serialize)]
struct DpEntry {
    p: f64,
    mean: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct SampleSummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    model: serde_json::Value,
    n: Option<usize>,
    replicates: usize,
    top_m: usize,
    d_p: Vec<DpEntry>,
    entropy: MeanEstimate,
}

/// `weights.csv` (top-`m` weights per replicate plus the remaining mass) and
/// `summary.json` (D_p and entropy means).
pub fn sample(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let seed = run.seed()?;
    let model = run.model()?;
    let cfg = &run.config;
    let draws = draw_weights(model, cfg.replicates, seed)?;
    let n = match model {
        ModelConfig::Drift { n, .. } => Some(*n),
        ModelConfig::Pd { .. } => None,
    };
    let m = n.map_or(cfg.top_m, |n| cfg.top_m.min(n));

    let (csv_path, mut w) = csv_writer(run, "weights.csv")?;
    let mut header = vec!["replicate".to_string()];
    header.extend((1..=m).map(|i| format!("rank_{i}")));
    header.push(format!("truncated_mass_beyond_rank_{m}"));
    w.write_record(&header)
        .map_err(|e| CliError::csv(&csv_path, e))?;
    for (i, ws) in draws.iter().enumerate() {
        let (top, rest) = ws.truncate(m);
        let mut row = vec![i.to_string()];
        row.extend(top.into_iter().map(num));
        row.push(num(rest));
        w.write_record(&row)
            .map_err(|e| CliError::csv(&csv_path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&csv_path, e))?;

    let summary = empirical_weight_statistics(&draws, &cfg.p_values)?;
    let json_path = run.write_json(
        "summary.json",
        &SampleSummary {
            schema_version: SCHEMA_VERSION,
            command: "sample",
            seed,
            model: model.to_json(),
            n,
            replicates: cfg.replicates,
            top_m: m,
            d_p: summary
                .p_values
                .iter()
                .zip(&summary.d_p)
                .map(|(&p, e)| DpEntry {
                    p,
                    mean: e.mean,
                    std_error: e.std_error,
                })
                .collect(),
            entropy: summary.entropy,
        },
    )?;
    Ok(vec![csv_path, json_path])
}

#[derive(Serialize)]
struct CurveFit {
    from_rank: usize,
    to_rank: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

#[derive(Serialize)]
struct CurveSummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    model: serde_json::Value,
    replicates: usize,
    ranks: usize,
    /// Least-squares fit of mean log weight against log rank.
    fit: Option<CurveFit>,
    /// Limiting slope `−1/α` when the model's limit is `PD(α)`.
    reference_slope: Option<f64>,
}

/// `curve.csv` (log rank vs mean and 5%/95% quantiles of the log weight)
/// and `curve.json` (log-log slope over the fit range).
pub fn capital_curve(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let seed = run.seed()?;
    let model = run.model()?;
    let cfg = &run.config;
    let draws = draw_weights(model, cfg.replicates, seed)?;
    let resolved = draws.iter().map(WeightSequence::len).min().unwrap_or(0);
    let ranks = cfg.curve.max_rank.min(resolved);

    let (csv_path, mut w) = csv_writer(run, "curve.csv")?;
    w.write_record(["rank", "log_rank", "mean_log_weight", "q05", "q95"])
        .map_err(|e| CliError::csv(&csv_path, e))?;
    let mut log_rank = Vec::with_capacity(ranks);
    let mut mean_log = Vec::with_capacity(ranks);
    for i in 0..ranks {
        let logs: Vec<f64> = draws.iter().map(|ws| ws.get(i).ln()).collect();
        let x = ((i + 1) as f64).ln();
        let y = stats::mean(&logs);
        w.write_record([
            (i + 1).to_string(),
            num(x),
            num(y),
            num(stats::quantile(&logs, 0.05)),
            num(stats::quantile(&logs, 0.95)),
        ])
        .map_err(|e| CliError::csv(&csv_path, e))?;
        log_rank.push(x);
        mean_log.push(y);
    }
    w.flush().map_err(|e| CliError::io(&csv_path, e))?;

    let [lo, hi] = cfg.curve.fit_ranks;
    let hi = hi.min(ranks);
    let fit = (hi > lo).then(|| {
        let f = stats::linear_fit(&log_rank[lo - 1..hi], &mean_log[lo - 1..hi]);
        CurveFit {
            from_rank: lo,
            to_rank: hi,
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
        }
    });
    let reference_slope = match model {
        ModelConfig::Pd { alpha, .. } => Some(-1.0 / alpha),
        ModelConfig::Drift { model, .. } => model
            .limit_eta()
            .filter(|eta| *eta > 0.0 && *eta < 0.5)
            .map(|eta| -1.0 / (2.0 * eta)),
    };
    let json_path = run.write_json(
        "curve.json",
        &CurveSummary {
            schema_version: SCHEMA_VERSION,
            command: "capital-curve",
            seed,
            model: model.to_json(),
            replicates: cfg.replicates,
            ranks,
            fit,
            reference_slope,
        },
    )?;
    Ok(vec![csv_path, json_path])
}

/// Runs the selected scenarios and writes one `<scenario>.json` report each.
/// Fails with the first failing verdict after all scenarios have run.
pub fn verify(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let seed = run.seed()?;
    let selection = run.config.verify.as_ref().ok_or_else(|| {
        CliError::Config(ConfigError {
            path: run.config_path.clone(),
            line: None,
            field: "verify".into(),
            message: "this command needs a [verify] section listing scenarios".into(),
        })
    })?;
    let opts = ScenarioOptions {
        seed,
        replicates: selection.replicates,
    };
    let mut written = Vec::new();
    let mut first_failure: Option<(String, ExperimentReport)> = None;
    for name in &selection.scenarios {
        let report = run_scenario(name, &opts)?;
        if let Some(rt) = report.runtime {
            eprintln!("{name}: {:.2}s", rt.as_secs_f64());
        }
        let status = if report.passed() { "PASS" } else { "FAIL" };
        let phase = report
            .classification
            .map(|p| format!(" [{}]", p.as_str()))
            .unwrap_or_default();
        println!("{name}: {status}{phase}");
        let (path, mut file) = run.create(&format!("{name}.json"))?;
        let mut text = report.to_json();
        text.push('\n');
        file.write_all(text.as_bytes())
            .map_err(|e| CliError::io(&path, e))?;
        written.push(path);
        if !report.passed() && first_failure.is_none() {
            first_failure = Some((name.clone(), report));
        }
    }
    match first_failure {
        None => Ok(written),
        Some((scenario, report)) => {
            let v = report
                .first_failure()
                .expect("failed report has a failing verdict");
            Err(CliError::VerifyFailed {
                scenario,
                verdict: v.name.clone(),
                measured: v.measured,
                threshold: serde_json::to_string(&v.threshold).expect("threshold serializes"),
            })
        }
    }
}

#[derive(Serialize)]
struct AsymptoticsRow {
    quantity: &'static str,
    p: Option<f64>,
    value: Option<f64>,
    tolerance: String,
}

#[derive(Serialize)]
struct AsymptoticsSummary {
    schema_version: u32,
    command: &'static str,
    eta: f64,
    alpha: f64,
    rows: Vec<AsymptoticsRow>,
}

/// Prints the limiting max-weight moments, `D_p` and entropy at `eta`;
/// with `--out`, also writes `asymptotics.json`.
pub fn asymptotics(
    settings: &AsymptoticsConfig,
    out: Option<&Path>,
) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let eta_value = settings.eta.ok_or_else(|| {
        CliError::Usage("asymptotics needs an eta (config [asymptotics] eta or --eta)".into())
    })?;
    let eta = EtaParam::new(eta_value).map_err(|_| CliError::EtaRange(eta_value))?;
    let tol = settings.tol;
    let mut rows = Vec::new();
    for &p in &settings.p {
        rows.push(AsymptoticsRow {
            quantity: "max_weight_moment",
            p: Some(p),
            value: Some(max_weight_moment(eta, p, tol)),
            tolerance: format!("{tol:e}"),
        });
    }
    for &p in &settings.p {
        let value = limit_dp(eta, p).ok();
        rows.push(AsymptoticsRow {
            quantity: "limit_dp",
            p: Some(p),
            value,
            tolerance: if value.is_some() {
                "closed form".into()
            } else {
                format!("diverges (p ≤ 2η = {})", 2.0 * eta_value)
            },
        });
    }
    rows.push(AsymptoticsRow {
        quantity: "limit_entropy",
        p: None,
        value: Some(limit_entropy(eta, tol)),
        tolerance: format!("{tol:e}"),
    });

    println!(
        "# eta = {eta_value}, PD parameter alpha = 2 eta = {}",
        eta.alpha()
    );
    println!("{:<20} {:>8} {:>24}  tolerance", "quantity", "p", "value");
    for r in &rows {
        println!(
            "{:<20} {:>8} {:>24}  {}",
            r.quantity,
            r.p.map_or("-".into(), |p| p.to_string()),
            r.value.map_or("inf".into(), |v| format!("{v:.16}")),
            r.tolerance
        );
    }
    eprintln!("asymptotics: {:.2}s", started.elapsed().as_secs_f64());

    let Some(out) = out else {
        return Ok(Vec::new());
    };
    let summary = AsymptoticsSummary {
        schema_version: SCHEMA_VERSION,
        command: "asymptotics",
        eta: eta_value,
        alpha: eta.alpha(),
        rows,
    };
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let path = out.join("asymptotics.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable output");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(vec![path])
}
