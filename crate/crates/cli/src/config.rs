//! Experiment configuration: a flat `key = value` text format, with every
//! key overridable by a CLI flag of the same name.
//!
//! Nested source parameters are comma-separated lists; Markov transition
//! rows are separated by semicolons, e.g. `transition = 0.9,0.1;0.5,0.5`.

use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use entrate::{truncation_depth, BernoulliSource, LambdaFamily, MarkovSource, Source};

use crate::HarnessError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ENTRATE_OUT_DIR";

const KNOWN_KEYS: &[&str] = &[
    "source",
    "probs",
    "transition",
    "start",
    "n_plus_1",
    "k",
    "m",
    "family",
    "trials",
    "seed",
    "beta_grid",
    "n_grid",
    "delta_grid",
    "out",
];

fn config_err(field: &str, message: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("field `{field}`: {message}"))
}

/// An integer parameter that may be left to the harness to choose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutoOr {
    Auto,
    Fixed(usize),
}

/// Which generative model to simulate.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    Bernoulli {
        probs: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        start: Option<Vec<f64>>,
    },
}

/// Which metric family to evaluate.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Zero,
    Beta(f64),
    Table(PathBuf),
}

/// Fully parsed experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: SourceSpec,
    pub n_plus_1: usize,
    pub k: AutoOr,
    pub m: AutoOr,
    pub family: FamilySpec,
    pub trials: usize,
    pub seed: u64,
    pub beta_grid: Option<Vec<f64>>,
    pub n_grid: Option<Vec<usize>>,
    pub delta_grid: Option<Vec<f64>>,
    pub out_dir: PathBuf,
}

/// Raw string key/value pairs, before typing and validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    map: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {path:?}: {e}")))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut raw = Self::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("config line {}: expected `key = value`", idx + 1))
            })?;
            raw.set(key.trim(), value.trim().to_string())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: String) -> Result<(), HarnessError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(HarnessError::Config(format!("unknown config key `{key}`")));
        }
        self.map.insert(key.to_string(), value);
        Ok(())
    }

    /// Later values win: apply CLI overrides on top of the file.
    pub fn merge(&mut self, overrides: &RawConfig) {
        for (k, v) in &overrides.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn build(&self) -> Result<ExperimentConfig, HarnessError> {
        let source = self.build_source()?;

        let n_plus_1: usize = self
            .get("n_plus_1")
            .ok_or_else(|| config_err("n_plus_1", "required"))?
            .parse()
            .map_err(|e| config_err("n_plus_1", e))?;
        if n_plus_1 < 3 {
            return Err(config_err("n_plus_1", "must be at least 3"));
        }

        let k = parse_auto(self.get("k").unwrap_or("auto")).map_err(|e| config_err("k", e))?;
        let m = parse_auto(self.get("m").unwrap_or("auto")).map_err(|e| config_err("m", e))?;
        if let AutoOr::Fixed(k) = k {
            if n_plus_1 < k + 2 {
                return Err(config_err(
                    "n_plus_1",
                    format!("must be at least k + 2 = {}", k + 2),
                ));
            }
        }
        if let AutoOr::Fixed(0) = m {
            return Err(config_err("m", "must be at least 1"));
        }

        let family = match self.get("family").unwrap_or("zero") {
            "zero" => FamilySpec::Zero,
            spec if spec.starts_with("beta:") => {
                let beta: f64 = spec["beta:".len()..]
                    .parse()
                    .map_err(|e| config_err("family", e))?;
                if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
                    return Err(config_err("family", "beta must lie in (0, 1)"));
                }
                FamilySpec::Beta(beta)
            }
            spec if spec.starts_with("table:") => {
                FamilySpec::Table(PathBuf::from(&spec["table:".len()..]))
            }
            other => {
                return Err(config_err(
                    "family",
                    format!("expected zero | beta:<b> | table:<path>, got `{other}`"),
                ))
            }
        };

        let trials: usize = self
            .get("trials")
            .unwrap_or("100")
            .parse()
            .map_err(|e| config_err("trials", e))?;
        if trials < 1 {
            return Err(config_err("trials", "must be at least 1"));
        }

        let seed: u64 = self
            .get("seed")
            .unwrap_or("0")
            .parse()
            .map_err(|e| config_err("seed", e))?;

        let beta_grid = self
            .get("beta_grid")
            .map(|s| parse_f64_list(s).map_err(|e| config_err("beta_grid", e)))
            .transpose()?;
        if let Some(grid) = &beta_grid {
            if grid.is_empty() {
                return Err(config_err("beta_grid", "must not be empty"));
            }
            if grid.iter().any(|&b| !b.is_finite() || b <= 0.0 || b >= 1.0) {
                return Err(config_err("beta_grid", "values must lie in (0, 1)"));
            }
        }

        let n_grid = self
            .get("n_grid")
            .map(|s| -> Result<Vec<usize>, HarnessError> {
                s.split(',')
                    .map(|tok| tok.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| config_err("n_grid", e))
            })
            .transpose()?;
        if let Some(grid) = &n_grid {
            if grid.is_empty() {
                return Err(config_err("n_grid", "must not be empty"));
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(config_err("n_grid", "must be strictly increasing"));
            }
            if grid[0] < 3 {
                return Err(config_err("n_grid", "entries must be at least 3"));
            }
        }

        let delta_grid = self
            .get("delta_grid")
            .map(|s| parse_f64_list(s).map_err(|e| config_err("delta_grid", e)))
            .transpose()?;
        if let Some(grid) = &delta_grid {
            if grid.is_empty() || grid.iter().any(|&d| !d.is_finite() || d <= 0.0) {
                return Err(config_err("delta_grid", "values must be positive"));
            }
        }

        let out_dir = self
            .get("out")
            .map(PathBuf::from)
            .or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));

        Ok(ExperimentConfig {
            source,
            n_plus_1,
            k,
            m,
            family,
            trials,
            seed,
            beta_grid,
            n_grid,
            delta_grid,
            out_dir,
        })
    }

    fn build_source(&self) -> Result<SourceSpec, HarnessError> {
        match self.get("source") {
            Some("bernoulli") => {
                let probs = self
                    .get("probs")
                    .ok_or_else(|| config_err("probs", "required for a bernoulli source"))?;
                Ok(SourceSpec::Bernoulli {
                    probs: parse_f64_list(probs).map_err(|e| config_err("probs", e))?,
                })
            }
            Some("markov") => {
                let rows = self
                    .get("transition")
                    .ok_or_else(|| config_err("transition", "required for a markov source"))?;
                let transition = rows
                    .split(';')
                    .map(parse_f64_list)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| config_err("transition", e))?;
                let start = self
                    .get("start")
                    .map(|s| parse_f64_list(s).map_err(|e| config_err("start", e)))
                    .transpose()?;
                Ok(SourceSpec::Markov { transition, start })
            }
            Some(other) => Err(config_err(
                "source",
                format!("expected bernoulli | markov, got `{other}`"),
            )),
            None => Err(config_err("source", "required")),
        }
    }
}

fn parse_auto(s: &str) -> Result<AutoOr, String> {
    if s == "auto" {
        Ok(AutoOr::Auto)
    } else {
        s.parse::<usize>()
            .map(AutoOr::Fixed)
            .map_err(|e| e.to_string())
    }
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

/// Parameters of one concrete run, after auto resolution.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub source: Source,
    pub family: LambdaFamily,
    pub n_plus_1: usize,
    pub k: usize,
    pub m: usize,
}

/// Default neighbor order: `max(1, round(log n))`.
pub fn auto_order(n_plus_1: usize) -> usize {
    (((n_plus_1 - 1) as f64).ln().round() as usize).max(1)
}

pub fn build_source(spec: &SourceSpec) -> Result<Source, HarnessError> {
    match spec {
        SourceSpec::Bernoulli { probs } => Ok(Source::Bernoulli(
            BernoulliSource::new(probs.clone()).map_err(|e| config_err("probs", e))?,
        )),
        SourceSpec::Markov { transition, start } => {
            let src = match start {
                Some(start) => MarkovSource::with_start(transition.clone(), start.clone())
                    .map_err(|e| config_err("transition", e))?,
                None => MarkovSource::new(transition.clone())
                    .map_err(|e| config_err("transition", e))?,
            };
            Ok(Source::Markov(src))
        }
    }
}

pub fn build_family(spec: &FamilySpec) -> Result<LambdaFamily, HarnessError> {
    match spec {
        FamilySpec::Zero => Ok(LambdaFamily::zero()),
        FamilySpec::Beta(beta) => {
            LambdaFamily::beta(*beta).map_err(|e| config_err("family", e))
        }
        FamilySpec::Table(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| config_err("family", format!("cannot read table {path:?}: {e}")))?;
            let mut breakpoints = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let mut it = line.split_whitespace();
                let parse = |tok: Option<&str>| -> Result<f64, HarnessError> {
                    tok.ok_or_else(|| {
                        config_err("family", format!("table line {}: expected `t value`", idx + 1))
                    })?
                    .parse::<f64>()
                    .map_err(|e| config_err("family", format!("table line {}: {e}", idx + 1)))
                };
                let t = parse(it.next())?;
                let v = parse(it.next())?;
                breakpoints.push((t, v));
            }
            LambdaFamily::tabulated(breakpoints).map_err(|e| config_err("family", e))
        }
    }
}

/// Resolve a config into concrete run parameters; `n_plus_1` may be
/// overridden per grid point by convergence studies.
pub fn resolve(
    config: &ExperimentConfig,
    n_plus_1: Option<usize>,
) -> Result<ResolvedRun, HarnessError> {
    let source = build_source(&config.source)?;
    let family = build_family(&config.family)?;
    let n_plus_1 = n_plus_1.unwrap_or(config.n_plus_1);

    let k = match config.k {
        AutoOr::Fixed(k) => k,
        AutoOr::Auto => auto_order(n_plus_1),
    };
    if n_plus_1 < k + 2 {
        return Err(config_err(
            "k",
            format!("needs n_plus_1 >= k + 2 = {}, got {n_plus_1}", k + 2),
        ));
    }

    let m = match config.m {
        AutoOr::Fixed(m) => m,
        AutoOr::Auto => {
            let a = source.decay_rate().ok_or_else(|| {
                config_err(
                    "m",
                    "auto depth needs a nondegenerate source (some probability equals 1); \
                     set m explicitly",
                )
            })?;
            truncation_depth(n_plus_1, a, 2.0).map_err(|e| config_err("m", e))?
        }
    };

    Ok(ResolvedRun {
        source,
        family,
        n_plus_1,
        k,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_text() -> &'static str {
        "source = bernoulli\nprobs = 0.5,0.5\nn_plus_1 = 512\nk = 3\nm = 64\n\
         family = beta:0.5\ntrials = 200\nseed = 42\n"
    }

    #[test]
    fn parses_full_config() {
        let cfg = RawConfig::from_text(base_text()).unwrap().build().unwrap();
        assert_eq!(cfg.n_plus_1, 512);
        assert_eq!(cfg.k, AutoOr::Fixed(3));
        assert_eq!(cfg.trials, 200);
        assert!(matches!(cfg.family, FamilySpec::Beta(b) if b == 0.5));
        assert!(matches!(cfg.source, SourceSpec::Bernoulli { .. }));
    }

    #[test]
    fn parses_markov_rows_and_comments() {
        let text = "# chain\nsource = markov\ntransition = 0.9,0.1; 0.5,0.5\n\
                    n_plus_1 = 64\nm = 16\n";
        let cfg = RawConfig::from_text(text).unwrap().build().unwrap();
        match &cfg.source {
            SourceSpec::Markov { transition, start } => {
                assert_eq!(transition.len(), 2);
                assert_eq!(transition[1], vec![0.5, 0.5]);
                assert!(start.is_none());
            }
            _ => panic!("expected markov"),
        }
        let run = resolve(&cfg, None).unwrap();
        assert_eq!(run.m, 16);
        assert_eq!(run.k, auto_order(64));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RawConfig::from_text("sourc = bernoulli\n").unwrap_err();
        assert!(err.to_string().contains("unknown config key"));
    }

    #[test]
    fn errors_name_the_field() {
        let err = RawConfig::from_text("source = bernoulli\nprobs = 0.5,0.5\n")
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("n_plus_1"), "{err}");

        let mut raw = RawConfig::from_text(base_text()).unwrap();
        raw.set("beta_grid", "0.3,1.5".into()).unwrap();
        let err = raw.build().unwrap_err();
        assert!(err.to_string().contains("beta_grid"), "{err}");

        let mut raw = RawConfig::from_text(base_text()).unwrap();
        raw.set("trials", "0".into()).unwrap();
        assert!(raw.build().unwrap_err().to_string().contains("trials"));

        let mut raw = RawConfig::from_text(base_text()).unwrap();
        raw.set("n_grid", "256,128".into()).unwrap();
        assert!(raw.build().unwrap_err().to_string().contains("n_grid"));
    }

    #[test]
    fn overrides_win() {
        let mut raw = RawConfig::from_text(base_text()).unwrap();
        let mut over = RawConfig::default();
        over.set("trials", "7".into()).unwrap();
        over.set("seed", "9".into()).unwrap();
        raw.merge(&over);
        let cfg = raw.build().unwrap();
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn auto_resolution() {
        let mut raw = RawConfig::from_text(base_text()).unwrap();
        raw.set("k", "auto".into()).unwrap();
        raw.set("m", "auto".into()).unwrap();
        let cfg = raw.build().unwrap();
        let run = resolve(&cfg, None).unwrap();
        // n = 511: round(ln 511) = 6; m = ceil(2 ln 511 / ln 2) = 18.
        assert_eq!(run.k, 6);
        assert_eq!(run.m, 18);
    }

    #[test]
    fn degenerate_source_requires_explicit_depth() {
        let text = "source = bernoulli\nprobs = 1.0,0.0\nn_plus_1 = 16\nk = 1\n";
        let cfg = RawConfig::from_text(text).unwrap().build().unwrap();
        let err = resolve(&cfg, None).unwrap_err();
        assert!(err.to_string().contains("field `m`"), "{err}");
    }

    #[test]
    fn k_must_fit_sample() {
        let text = "source = bernoulli\nprobs = 0.5,0.5\nn_plus_1 = 4\nk = 3\nm = 8\n";
        let err = RawConfig::from_text(text).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("n_plus_1"), "{err}");
    }
}
