//! Flat key=value configuration with a fixed precedence chain:
//! built-in defaults, then the config file, then `MISL_*` environment
//! variables, then command-line flags. Unknown file keys are errors so a
//! typo cannot silently fall back to a default.

use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use misl_core::acquire::{AcquireError, Converter, FetchPolicy};
use misl_core::extract::GrammarConfig;
use misl_core::normalize::{JudgeRoster, LookupTable, NormalizeError};
use misl_core::report::ReportOptions;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key {key:?}{}", at(.line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("config line {line} is not `key = value`: {text:?}")]
    Malformed { line: usize, text: String },
    #[error("bad value {value:?} for {key}: {detail}")]
    BadValue { key: String, value: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn at(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!(" at line {n}"),
        None => String::new(),
    }
}

/// Every tunable of the toolkit. Field names mirror the config keys; dots in
/// keys become underscores here and in `MISL_*` variable names.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub root: PathBuf,
    pub index_url: String,
    pub row_selector: String,
    pub converter_cmd: String,
    pub converter_timeout_ms: u64,
    pub fetch_retries: u32,
    pub fetch_backoff_ms: u64,
    pub fetch_timeout_ms: u64,
    pub politeness_ms: u64,
    pub lookup_path: Option<PathBuf>,
    pub roster_path: Option<PathBuf>,
    pub overrides_path: Option<PathBuf>,
    pub split_year: i32,
    pub top_k: usize,
    pub full_bench_size: u64,
    pub jobs: usize,
    pub nonlatin_threshold: f64,
    /// Highest tolerable fraction of indexed documents that fail to reach
    /// converted text before the run exits nonzero.
    pub failure_rate_threshold: f64,
    pub grammar_heading_tokens: Option<Vec<String>>,
    pub grammar_bench_honorifics: Option<Vec<String>>,
    pub grammar_known_courts: Option<Vec<String>>,
    pub grammar_suo_moto_designators: Option<Vec<String>>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            root: PathBuf::from("corpus"),
            index_url: String::new(),
            row_selector: "table tr".to_string(),
            converter_cmd: "pdftotext -layout {in} {out}".to_string(),
            converter_timeout_ms: 30_000,
            fetch_retries: 3,
            fetch_backoff_ms: 250,
            fetch_timeout_ms: 30_000,
            politeness_ms: 500,
            lookup_path: None,
            roster_path: None,
            overrides_path: None,
            split_year: 2009,
            top_k: 10,
            full_bench_size: 17,
            jobs: 0,
            nonlatin_threshold: 0.5,
            failure_rate_threshold: 0.25,
            grammar_heading_tokens: None,
            grammar_bench_honorifics: None,
            grammar_known_courts: None,
            grammar_suo_moto_designators: None,
        }
    }
}

const KEYS: [&str; 22] = [
    "root",
    "index_url",
    "row_selector",
    "converter_cmd",
    "converter_timeout_ms",
    "fetch.retries",
    "fetch.backoff_ms",
    "fetch.timeout_ms",
    "politeness_ms",
    "lookup_path",
    "roster_path",
    "overrides_path",
    "split_year",
    "top_k",
    "full_bench_size",
    "jobs",
    "nonlatin_threshold",
    "failure_rate_threshold",
    "grammar.heading_tokens",
    "grammar.bench_honorifics",
    "grammar.known_courts",
    "grammar.suo_moto_designators",
];

fn env_name(key: &str) -> String {
    format!("MISL_{}", key.replace('.', "_").to_uppercase())
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl Config {
    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
                detail: e.to_string(),
            })
        }
        match key {
            "root" => self.root = PathBuf::from(value),
            "index_url" => self.index_url = value.to_string(),
            "row_selector" => self.row_selector = value.to_string(),
            "converter_cmd" => self.converter_cmd = value.to_string(),
            "converter_timeout_ms" => self.converter_timeout_ms = parse(key, value)?,
            "fetch.retries" => self.fetch_retries = parse(key, value)?,
            "fetch.backoff_ms" => self.fetch_backoff_ms = parse(key, value)?,
            "fetch.timeout_ms" => self.fetch_timeout_ms = parse(key, value)?,
            "politeness_ms" => self.politeness_ms = parse(key, value)?,
            "lookup_path" => self.lookup_path = Some(PathBuf::from(value)),
            "roster_path" => self.roster_path = Some(PathBuf::from(value)),
            "overrides_path" => self.overrides_path = Some(PathBuf::from(value)),
            "split_year" => self.split_year = parse(key, value)?,
            "top_k" => self.top_k = parse(key, value)?,
            "full_bench_size" => self.full_bench_size = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "nonlatin_threshold" => self.nonlatin_threshold = parse(key, value)?,
            "failure_rate_threshold" => self.failure_rate_threshold = parse(key, value)?,
            "grammar.heading_tokens" => self.grammar_heading_tokens = Some(list(value)),
            "grammar.bench_honorifics" => self.grammar_bench_honorifics = Some(list(value)),
            "grammar.known_courts" => self.grammar_known_courts = Some(list(value)),
            "grammar.suo_moto_designators" => {
                self.grammar_suo_moto_designators = Some(list(value))
            }
            _ => {
                return Err(ConfigError::UnknownKey { key: key.to_string(), line: None });
            }
        }
        Ok(())
    }

    /// Apply `key = value` lines. `#` starts a comment, blank lines are
    /// skipped, unknown keys are errors.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed { line: line_no, text: line.to_string() });
            };
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                ConfigError::UnknownKey { key, .. } => {
                    ConfigError::UnknownKey { key, line: Some(line_no) }
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Apply `MISL_<KEY>` variables (dots become underscores, uppercased)
    /// from an explicit variable map. Only declared keys are consulted, so
    /// unrelated `MISL_*` variables are left alone.
    pub fn apply_env_map(
        &mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<(), ConfigError> {
        for key in KEYS {
            if let Some(value) = lookup(&env_name(key)) {
                self.set(key, &value)?;
            }
        }
        Ok(())
    }

    /// Load configuration: defaults, then the file (if any), then the
    /// process environment.
    pub fn load(file: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        if let Some(path) = file {
            cfg.apply_file_text(&std::fs::read_to_string(path)?)?;
        }
        cfg.apply_env_map(|name| std::env::var(name).ok())?;
        Ok(cfg)
    }

    pub fn fetch_policy(&self) -> FetchPolicy {
        FetchPolicy {
            retries: self.fetch_retries,
            backoff: Duration::from_millis(self.fetch_backoff_ms),
            timeout: Duration::from_millis(self.fetch_timeout_ms),
        }
    }

    pub fn grammar(&self) -> GrammarConfig {
        let mut g = GrammarConfig::default();
        if let Some(v) = &self.grammar_heading_tokens {
            g.heading_tokens = v.clone();
        }
        if let Some(v) = &self.grammar_bench_honorifics {
            g.bench_honorifics = v.clone();
        }
        if let Some(v) = &self.grammar_known_courts {
            g.known_courts = v.iter().cloned().collect();
        }
        if let Some(v) = &self.grammar_suo_moto_designators {
            g.suo_moto_designators = v.clone();
        }
        g
    }

    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            split_year: self.split_year,
            top_k: self.top_k,
            full_bench_size: self.full_bench_size,
        }
    }

    pub fn converter(&self) -> Result<Converter, AcquireError> {
        Converter::new(
            &self.converter_cmd,
            Duration::from_millis(self.converter_timeout_ms),
            self.nonlatin_threshold,
        )
    }

    pub fn lookup(&self) -> Result<LookupTable, NormalizeError> {
        match &self.lookup_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| NormalizeError::BadLookup(format!("{}: {e}", path.display())))?;
                LookupTable::parse_csv(&text)
            }
            None => Ok(LookupTable::builtin().clone()),
        }
    }

    pub fn roster(&self) -> Result<JudgeRoster, NormalizeError> {
        match &self.roster_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| NormalizeError::BadRoster(format!("{}: {e}", path.display())))?;
                JudgeRoster::parse_csv(&text)
            }
            None => Ok(JudgeRoster::builtin().clone()),
        }
    }
}
