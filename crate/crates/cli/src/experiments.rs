//! Experiment drivers: bias/variance Monte Carlo, beta sweep, convergence
//! and concentration studies, and single-file estimation.
//!
//! Trials run in parallel with per-trial seeds derived from the master
//! seed, and are collected in trial-index order, so every output is
//! deterministic in the configuration.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use entrate::rng::derive_seed;
use entrate::{
    closed_form_applicable, eta_estimator, expected_r_symmetric, mcdiarmid_tail, variance_bound,
    EstimateReport,
};

use crate::config::{
    build_family, resolve, AutoOr, ExperimentConfig, FamilySpec, ResolvedRun,
};
use crate::io::{format_flag, format_opt, format_sig, parse_sequences, CsvTable};
use crate::HarnessError;

/// One Monte Carlo trial of the estimator.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub family: String,
    pub r_k: f64,
    pub r_k1: f64,
    pub eta: f64,
    /// Wall-clock seconds for this trial. Kept out of the CSV files so
    /// repeated runs stay byte-identical.
    pub wall_secs: f64,
}

/// Aggregates over the trials of one configuration, with the
/// machine-checkable pass/fail flags the study asserts.
#[derive(Debug, Clone)]
pub struct SummaryStats {
    pub n_plus_1: usize,
    pub k: usize,
    pub m: usize,
    pub family: String,
    pub trials: usize,
    pub mean_eta: f64,
    pub var_eta: f64,
    pub stderr_eta: f64,
    /// `1/h` when the source entropy is known and positive.
    pub inverse_h: Option<f64>,
    pub bias_vs_inverse_h: Option<f64>,
    /// Reciprocal of `mean_eta`: the entropy-scale readout.
    pub entropy_estimate: Option<f64>,
    pub mean_r: f64,
    pub var_r: f64,
    pub stderr_r: f64,
    pub variance_bound: f64,
    /// Untruncated closed-form `E r`, when the symmetric-source oracle
    /// applies at this depth.
    pub expected_r: Option<f64>,
    pub eta_within_3se: Option<bool>,
    pub r_within_3se: Option<bool>,
    pub var_r_within_bound: bool,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0);
    (mean, var)
}

/// Whether the closed-form expectation is an admissible oracle for this
/// run: uniform i.i.d. source, matching beta parameter, and a depth at
/// which truncation is immaterial.
fn closed_form_oracle(run: &ResolvedRun) -> Option<f64> {
    let asize = run.source.alphabet_size();
    if !run.source.is_symmetric_bernoulli() {
        return None;
    }
    let beta = run.family.beta_parameter()?;
    if (beta - 1.0 / asize as f64).abs() > 1e-12 {
        return None;
    }
    if !closed_form_applicable(run.n_plus_1, asize, run.m) {
        return None;
    }
    expected_r_symmetric(run.n_plus_1, run.k, asize).ok()
}

/// Run `trials` independent trials of the estimator on fresh samples.
pub fn run_trials(
    run: &ResolvedRun,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<TrialRecord>, HarnessError> {
    let records = (0..trials)
        .into_par_iter()
        .map(|t| {
            let t0 = Instant::now();
            let sample = run
                .source
                .sample(run.n_plus_1, run.m, derive_seed(master_seed, t as u64))?;
            let rep = eta_estimator(&sample, run.k, &run.family)?;
            Ok(TrialRecord {
                trial: t,
                n: rep.n,
                k: rep.k,
                m: rep.m,
                family: rep.family,
                r_k: rep.r_k,
                r_k1: rep.r_k_plus_1,
                eta: rep.eta,
                wall_secs: t0.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>, entrate::Error>>()?;
    Ok(records)
}

fn summarize(run: &ResolvedRun, records: &[TrialRecord]) -> SummaryStats {
    let trials = records.len();
    let etas: Vec<f64> = records.iter().map(|r| r.eta).collect();
    let rs: Vec<f64> = records.iter().map(|r| r.r_k).collect();
    let (mean_eta, var_eta) = mean_and_var(&etas);
    let (mean_r, var_r) = mean_and_var(&rs);
    let stderr_eta = (var_eta / trials as f64).sqrt();
    let stderr_r = (var_r / trials as f64).sqrt();

    let inverse_h = match run.source.true_entropy() {
        Ok(h) if h > 0.0 => Some(1.0 / h),
        _ => None,
    };
    let bias = inverse_h.map(|ih| mean_eta - ih);
    let expected_r = closed_form_oracle(run);
    let bound = variance_bound(run.n_plus_1, run.k, run.m);

    // Unbiasedness holds where the closed form does; only assert there.
    let eta_within_3se = match (inverse_h, expected_r) {
        (Some(ih), Some(_)) => Some((mean_eta - ih).abs() <= 3.0 * stderr_eta),
        _ => None,
    };
    let r_within_3se = expected_r.map(|er| (mean_r - er).abs() <= 3.0 * stderr_r);

    SummaryStats {
        n_plus_1: run.n_plus_1,
        k: run.k,
        m: run.m,
        family: run.family.descriptor(),
        trials,
        mean_eta,
        var_eta,
        stderr_eta,
        inverse_h,
        bias_vs_inverse_h: bias,
        entropy_estimate: (mean_eta > 0.0).then(|| 1.0 / mean_eta),
        mean_r,
        var_r,
        stderr_r,
        variance_bound: bound,
        expected_r,
        eta_within_3se,
        r_within_3se,
        var_r_within_bound: var_r <= bound,
    }
}

/// Bias/variance Monte Carlo for one configuration.
#[derive(Debug)]
pub struct BiasOutcome {
    pub run: ResolvedRun,
    pub records: Vec<TrialRecord>,
    pub summary: SummaryStats,
}

impl BiasOutcome {
    pub fn assertions_pass(&self) -> bool {
        self.summary.var_r_within_bound
            && self.summary.eta_within_3se.unwrap_or(true)
            && self.summary.r_within_3se.unwrap_or(true)
    }
}

pub fn run_bias_experiment(config: &ExperimentConfig) -> Result<BiasOutcome, HarnessError> {
    let run = resolve(config, None)?;
    run_bias_with(run, config.trials, config.seed)
}

pub fn run_bias_with(
    run: ResolvedRun,
    trials: usize,
    master_seed: u64,
) -> Result<BiasOutcome, HarnessError> {
    let records = run_trials(&run, trials, master_seed)?;
    let summary = summarize(&run, &records);
    Ok(BiasOutcome {
        run,
        records,
        summary,
    })
}

/// One row of a beta sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub beta: f64,
    pub summary: SummaryStats,
    pub is_min_abs_bias: bool,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub records: Vec<(f64, Vec<TrialRecord>)>,
    /// For a uniform i.i.d. source whose grid contains `1/|A|`: the
    /// flagged beta is `1/|A|`, or `1/|A|` is within one standard error
    /// of the flagged minimum. `None` when the check does not apply.
    pub flagged_consistent: Option<bool>,
}

impl SweepOutcome {
    pub fn assertions_pass(&self) -> bool {
        self.flagged_consistent.unwrap_or(true)
    }
}

/// One bias experiment per grid beta, sharing trial seeds so the bias
/// comparison across betas rides on common random numbers.
pub fn run_beta_sweep(config: &ExperimentConfig) -> Result<SweepOutcome, HarnessError> {
    let grid = config
        .beta_grid
        .clone()
        .ok_or_else(|| HarnessError::Config("field `beta_grid`: required for a sweep".into()))?;

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &beta in &grid {
        let mut cfg = config.clone();
        cfg.family = FamilySpec::Beta(beta);
        let outcome = run_bias_experiment(&cfg)?;
        rows.push(SweepRow {
            beta,
            summary: outcome.summary,
            is_min_abs_bias: false,
        });
        records.push((beta, outcome.records));
    }

    let biases: Vec<Option<f64>> = rows
        .iter()
        .map(|r| r.summary.bias_vs_inverse_h.map(f64::abs))
        .collect();
    let flagged = if grid.len() >= 2 && biases.iter().all(Option::is_some) {
        biases
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.unwrap().total_cmp(&b.unwrap()))
            .map(|(i, _)| i)
    } else {
        None
    };
    if let Some(i) = flagged {
        rows[i].is_min_abs_bias = true;
    }

    let source = crate::config::build_source(&config.source)?;
    let flagged_consistent = match flagged {
        Some(best) if source.is_symmetric_bernoulli() => {
            let target_beta = 1.0 / source.alphabet_size() as f64;
            rows.iter()
                .position(|r| (r.beta - target_beta).abs() <= 1e-9)
                .map(|target| {
                    best == target
                        || biases[target].unwrap()
                            <= biases[best].unwrap() + rows[target].summary.stderr_eta
                })
        }
        _ => None,
    };

    Ok(SweepOutcome {
        rows,
        records,
        flagged_consistent,
    })
}

/// One row of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub summary: SummaryStats,
    /// `mean r / log n`, the scaled statistic that approaches `1/h`.
    pub r_over_log_n: f64,
    pub abs_error: f64,
}

#[derive(Debug)]
pub struct ConvergenceOutcome {
    pub rows: Vec<ConvergenceRow>,
    pub records: Vec<(usize, Vec<TrialRecord>)>,
    /// Error at the largest grid point strictly below the error at the
    /// smallest; `None` for single-point grids.
    pub trend_ok: Option<bool>,
}

impl ConvergenceOutcome {
    pub fn assertions_pass(&self) -> bool {
        self.trend_ok.unwrap_or(true)
            && self
                .rows
                .iter()
                .all(|r| r.summary.r_within_3se.unwrap_or(true))
    }
}

/// Scaled-statistic convergence along an increasing grid of sample sizes,
/// with k and m resolved per grid point.
pub fn run_convergence_study(config: &ExperimentConfig) -> Result<ConvergenceOutcome, HarnessError> {
    let grid = config.n_grid.clone().ok_or_else(|| {
        HarnessError::Config("field `n_grid`: required for a convergence study".into())
    })?;
    if config.k != AutoOr::Auto || config.m != AutoOr::Auto {
        return Err(HarnessError::Config(
            "field `k`: convergence studies require k = auto and m = auto".into(),
        ));
    }

    let probe = resolve(config, Some(grid[0]))?;
    let h = probe
        .source
        .true_entropy()
        .map_err(|e| HarnessError::Config(format!("field `transition`: {e}")))?;
    if h <= 0.0 {
        return Err(HarnessError::Config(
            "field `source`: convergence study needs a source with positive entropy".into(),
        ));
    }
    let inverse_h = 1.0 / h;

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (g, &n_plus_1) in grid.iter().enumerate() {
        let run = resolve(config, Some(n_plus_1))?;
        let outcome = run_bias_with(run, config.trials, derive_seed(config.seed, g as u64))?;
        let log_n = ((n_plus_1 - 1) as f64).ln();
        let r_over_log_n = outcome.summary.mean_r / log_n;
        rows.push(ConvergenceRow {
            abs_error: (r_over_log_n - inverse_h).abs(),
            r_over_log_n,
            summary: outcome.summary,
        });
        records.push((n_plus_1, outcome.records));
    }

    let trend_ok = (rows.len() >= 2)
        .then(|| rows.last().unwrap().abs_error < rows.first().unwrap().abs_error);

    Ok(ConvergenceOutcome {
        rows,
        records,
        trend_ok,
    })
}

/// One row of a concentration study.
#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub delta: f64,
    pub empirical_freq: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug)]
pub struct ConcentrationOutcome {
    pub summary: SummaryStats,
    pub rows: Vec<ConcentrationRow>,
    pub records: Vec<TrialRecord>,
}

impl ConcentrationOutcome {
    pub fn assertions_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Empirical tail frequencies of `|r - mean r|` against the
/// bounded-differences bound, with a 3-sigma binomial slack.
pub fn run_concentration_study(
    config: &ExperimentConfig,
) -> Result<ConcentrationOutcome, HarnessError> {
    if config.trials < 100 {
        return Err(HarnessError::Config(
            "field `trials`: concentration studies need at least 100 trials".into(),
        ));
    }
    let run = resolve(config, None)?;
    let deltas = config
        .delta_grid
        .clone()
        .unwrap_or_else(|| [0.1, 0.5, 1.0].iter().map(|c| c * run.m as f64 / 8.0).collect());

    let outcome = run_bias_with(run, config.trials, config.seed)?;
    let trials = outcome.records.len();
    let mean_r = outcome.summary.mean_r;

    let rows = deltas
        .iter()
        .map(|&delta| {
            let exceed = outcome
                .records
                .iter()
                .filter(|r| (r.r_k - mean_r).abs() > delta)
                .count();
            let empirical_freq = exceed as f64 / trials as f64;
            let bound =
                mcdiarmid_tail(outcome.summary.n_plus_1, outcome.summary.k, outcome.summary.m, delta)?;
            let slack = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
            Ok(ConcentrationRow {
                delta,
                empirical_freq,
                bound,
                slack,
                pass: empirical_freq <= bound + slack,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    Ok(ConcentrationOutcome {
        summary: outcome.summary,
        rows,
        records: outcome.records,
    })
}

/// Read one sequence per line from `path`, truncate to `m`, and run the
/// estimator with neighbor order `k`.
pub fn estimate_from_file(
    path: &Path,
    k: usize,
    family_spec: &FamilySpec,
    m: Option<usize>,
) -> Result<EstimateReport, HarnessError> {
    let family = build_family(family_spec)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read input {path:?}: {e}")))?;
    let sample = parse_sequences(&text, m)?;
    if sample.num_points() < k + 2 {
        return Err(HarnessError::Config(format!(
            "input file has {} lines; estimating with k = {k} needs at least {}",
            sample.num_points(),
            k + 2
        )));
    }
    Ok(eta_estimator(&sample, k, &family)?)
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

const TRIAL_HEADER: &[&str] = &["trial", "n", "k", "m", "family", "r_k", "r_k1", "eta"];

fn trial_fields(rec: &TrialRecord) -> Vec<String> {
    vec![
        rec.trial.to_string(),
        rec.n.to_string(),
        rec.k.to_string(),
        rec.m.to_string(),
        rec.family.clone(),
        format_sig(rec.r_k),
        format_sig(rec.r_k1),
        format_sig(rec.eta),
    ]
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut table = CsvTable::new(TRIAL_HEADER);
    for rec in records {
        table.row(&trial_fields(rec));
    }
    table.into_string()
}

/// Trials CSV with a leading group column (beta or n_plus_1).
fn grouped_trials_csv<T: ToString>(group_name: &str, groups: &[(T, Vec<TrialRecord>)]) -> String {
    let mut header = vec![group_name];
    header.extend_from_slice(TRIAL_HEADER);
    let mut table = CsvTable::new(&header);
    for (key, records) in groups {
        for rec in records {
            let mut fields = vec![key.to_string()];
            fields.extend(trial_fields(rec));
            table.row(&fields);
        }
    }
    table.into_string()
}

const SUMMARY_HEADER: &[&str] = &[
    "n_plus_1",
    "k",
    "m",
    "family",
    "trials",
    "mean_eta",
    "var_eta",
    "stderr_eta",
    "inverse_h",
    "bias_vs_inverse_h",
    "entropy_estimate",
    "mean_r",
    "var_r",
    "stderr_r",
    "variance_bound",
    "expected_r",
    "eta_within_3se",
    "r_within_3se",
    "var_r_within_bound",
];

fn summary_fields(s: &SummaryStats) -> Vec<String> {
    vec![
        s.n_plus_1.to_string(),
        s.k.to_string(),
        s.m.to_string(),
        s.family.clone(),
        s.trials.to_string(),
        format_sig(s.mean_eta),
        format_sig(s.var_eta),
        format_sig(s.stderr_eta),
        format_opt(s.inverse_h),
        format_opt(s.bias_vs_inverse_h),
        format_opt(s.entropy_estimate),
        format_sig(s.mean_r),
        format_sig(s.var_r),
        format_sig(s.stderr_r),
        format_sig(s.variance_bound),
        format_opt(s.expected_r),
        format_flag(s.eta_within_3se),
        format_flag(s.r_within_3se),
        format_flag(Some(s.var_r_within_bound)),
    ]
}

pub fn summary_csv(summaries: &[&SummaryStats]) -> String {
    let mut table = CsvTable::new(SUMMARY_HEADER);
    for s in summaries {
        table.row(&summary_fields(s));
    }
    table.into_string()
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Write the per-trial and summary CSVs for a bias experiment; returns
/// the two file paths.
pub fn write_bias_csvs(
    outcome: &BiasOutcome,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    let trials_path = out_dir.join("bias_trials.csv");
    let summary_path = out_dir.join("bias_summary.csv");
    write(&trials_path, &trials_csv(&outcome.records))?;
    write(&summary_path, &summary_csv(&[&outcome.summary]))?;
    Ok((trials_path, summary_path))
}

pub fn write_sweep_csvs(
    outcome: &SweepOutcome,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    let trials_path = out_dir.join("sweep_trials.csv");
    write(&trials_path, &grouped_trials_csv("beta", &outcome.records))?;

    let mut header = vec!["beta"];
    header.extend_from_slice(SUMMARY_HEADER);
    header.push("is_min_abs_bias");
    let mut table = CsvTable::new(&header);
    for row in &outcome.rows {
        let mut fields = vec![format_sig(row.beta)];
        fields.extend(summary_fields(&row.summary));
        fields.push(format_flag(Some(row.is_min_abs_bias)));
        table.row(&fields);
    }
    let summary_path = out_dir.join("sweep_summary.csv");
    write(&summary_path, &table.into_string())?;
    Ok((trials_path, summary_path))
}

pub fn write_convergence_csvs(
    outcome: &ConvergenceOutcome,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    let trials_path = out_dir.join("convergence_trials.csv");
    write(&trials_path, &grouped_trials_csv("n_plus_1", &outcome.records))?;

    let mut header = SUMMARY_HEADER.to_vec();
    header.extend_from_slice(&["r_over_log_n", "abs_error", "trend_ok"]);
    let mut table = CsvTable::new(&header);
    for row in &outcome.rows {
        let mut fields = summary_fields(&row.summary);
        fields.push(format_sig(row.r_over_log_n));
        fields.push(format_sig(row.abs_error));
        fields.push(format_flag(outcome.trend_ok));
        table.row(&fields);
    }
    let summary_path = out_dir.join("convergence_summary.csv");
    write(&summary_path, &table.into_string())?;
    Ok((trials_path, summary_path))
}

pub fn write_concentration_csvs(
    outcome: &ConcentrationOutcome,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    let trials_path = out_dir.join("concentration_trials.csv");
    write(&trials_path, &trials_csv(&outcome.records))?;

    let mut table = CsvTable::new(&[
        "delta",
        "empirical_freq",
        "bound",
        "slack",
        "pass",
        "n_plus_1",
        "k",
        "m",
        "trials",
    ]);
    for row in &outcome.rows {
        table.row(&[
            format_sig(row.delta),
            format_sig(row.empirical_freq),
            format_sig(row.bound),
            format_sig(row.slack),
            format_flag(Some(row.pass)),
            outcome.summary.n_plus_1.to_string(),
            outcome.summary.k.to_string(),
            outcome.summary.m.to_string(),
            outcome.summary.trials.to_string(),
        ]);
    }
    let summary_path = out_dir.join("concentration_summary.csv");
    write(&summary_path, &table.into_string())?;
    Ok((trials_path, summary_path))
}

/// Total wall time across records, for console reporting.
pub fn total_wall_secs(records: &[TrialRecord]) -> f64 {
    records.iter().map(|r| r.wall_secs).sum()
}

/// Human-readable estimate report for the CLI.
pub fn render_report(rep: &EstimateReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("points (n+1): {}\n", rep.n + 1));
    out.push_str(&format!("k:            {}\n", rep.k));
    out.push_str(&format!("m:            {}\n", rep.m));
    out.push_str(&format!("family:       {}\n", rep.family));
    out.push_str(&format!("r_k:          {}\n", format_sig(rep.r_k)));
    out.push_str(&format!("r_(k+1):      {}\n", format_sig(rep.r_k_plus_1)));
    out.push_str(&format!(
        "eta:          {}   (inverse-entropy estimate, 1/h)\n",
        format_sig(rep.eta)
    ));
    if rep.eta > 0.0 {
        out.push_str(&format!(
            "1/eta:        {}   (entropy-rate estimate, nats/symbol)\n",
            format_sig(1.0 / rep.eta)
        ));
    } else {
        out.push_str("1/eta:        undefined (eta = 0; sample looks deterministic)\n");
    }
    out
}
