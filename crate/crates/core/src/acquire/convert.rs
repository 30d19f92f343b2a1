//! Source-to-text conversion through an external converter command.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::AcquireError;

/// Result of converting one fetched source. Only `Converted` carries text;
/// the other variants classify why the document drops out of the funnel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConversionOutcome {
    Converted { text: String },
    /// Conversion succeeded but the text is predominantly non-Latin script,
    /// which the downstream grammars cannot read.
    NonLatinScript,
    /// Conversion produced empty or whitespace-only text.
    CorruptSource,
    /// The converter itself failed: bad exit, timeout, unlaunchable.
    ConverterFailed { detail: String },
}

/// Wraps an external converter command given as a whitespace-separated
/// template containing `{in}` and `{out}` placeholders, e.g.
/// `pdftotext -layout {in} {out}`. Template tokens cannot contain spaces;
/// shell quoting is deliberately not supported.
#[derive(Debug, Clone)]
pub struct Converter {
    argv: Vec<String>,
    timeout: Duration,
    nonlatin_threshold: f64,
}

static CONVERT_SEQ: AtomicU64 = AtomicU64::new(0);

impl Converter {
    pub fn new(
        template: &str,
        timeout: Duration,
        nonlatin_threshold: f64,
    ) -> Result<Self, AcquireError> {
        let argv: Vec<String> = template.split_whitespace().map(str::to_string).collect();
        let bad = |detail: &str| AcquireError::BadTemplate {
            template: template.to_string(),
            detail: detail.to_string(),
        };
        if argv.is_empty() {
            return Err(bad("empty template"));
        }
        for placeholder in ["{in}", "{out}"] {
            if !argv.iter().any(|t| t.contains(placeholder)) {
                return Err(bad(&format!("missing {placeholder} placeholder")));
            }
        }
        if !(0.0..=1.0).contains(&nonlatin_threshold) {
            return Err(bad("nonlatin threshold must be in 0..=1"));
        }
        Ok(Converter {
            argv,
            timeout,
            nonlatin_threshold,
        })
    }

    fn scratch_path(suffix: &str) -> PathBuf {
        let n = CONVERT_SEQ.fetch_add(1, Ordering::Relaxed);
        std::env::temp_dir().join(format!(
            "misl-convert-{}-{}.{}",
            std::process::id(),
            n,
            suffix
        ))
    }

    /// Run the converter on `input`. Never returns an error: every way the
    /// conversion can go wrong is a [`ConversionOutcome`] variant, so the
    /// pipeline can count it and continue.
    pub fn convert(&self, input: &Path) -> ConversionOutcome {
        let out_path = Self::scratch_path("txt");
        let err_path = Self::scratch_path("stderr");
        let outcome = self.run(input, &out_path, &err_path);
        let _ = std::fs::remove_file(&out_path);
        let _ = std::fs::remove_file(&err_path);
        outcome
    }

    fn run(&self, input: &Path, out_path: &Path, err_path: &Path) -> ConversionOutcome {
        let input = input.to_string_lossy();
        let out = out_path.to_string_lossy();
        let argv: Vec<String> = self
            .argv
            .iter()
            .map(|t| t.replace("{in}", &input).replace("{out}", &out))
            .collect();

        // Stderr goes to a file, not a pipe: a chatty converter must not
        // block on a full pipe buffer while we poll for exit.
        let stderr = match std::fs::File::create(err_path) {
            Ok(f) => Stdio::from(f),
            Err(e) => {
                return ConversionOutcome::ConverterFailed {
                    detail: format!("cannot create stderr capture: {e}"),
                }
            }
        };
        let mut child = match Command::new(&argv[0])
            .args(&argv[1..])
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(stderr)
            .spawn()
        {
            Ok(c) => c,
            Err(e) => {
                return ConversionOutcome::ConverterFailed {
                    detail: format!("cannot launch {:?}: {e}", argv[0]),
                }
            }
        };

        let deadline = Instant::now() + self.timeout;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) => {
                    if Instant::now() >= deadline {
                        let _ = child.kill();
                        let _ = child.wait();
                        return ConversionOutcome::ConverterFailed {
                            detail: format!("timed out after {:?}", self.timeout),
                        };
                    }
                    std::thread::sleep(Duration::from_millis(10));
                }
                Err(e) => {
                    return ConversionOutcome::ConverterFailed {
                        detail: format!("wait failed: {e}"),
                    }
                }
            }
        };

        if !status.success() {
            let stderr_excerpt = std::fs::read_to_string(err_path)
                .map(|s| s.trim().chars().take(200).collect::<String>())
                .unwrap_or_default();
            return ConversionOutcome::ConverterFailed {
                detail: format!("{status}: {stderr_excerpt}"),
            };
        }

        let bytes = match std::fs::read(out_path) {
            Ok(b) => b,
            Err(e) => {
                return ConversionOutcome::ConverterFailed {
                    detail: format!("no output file: {e}"),
                }
            }
        };
        let text = String::from_utf8_lossy(&bytes).into_owned();
        classify_text(text, self.nonlatin_threshold)
    }
}

/// Post-conversion filters, in order: empty or whitespace-only text is a
/// corrupt source; text whose alphabetic characters are mostly outside
/// ASCII is non-Latin script; anything else passes through.
fn classify_text(text: String, nonlatin_threshold: f64) -> ConversionOutcome {
    if text.trim().is_empty() {
        return ConversionOutcome::CorruptSource;
    }
    let mut letters = 0u64;
    let mut non_latin = 0u64;
    for c in text.chars() {
        if c.is_alphabetic() {
            letters += 1;
            if !c.is_ascii() {
                non_latin += 1;
            }
        }
    }
    if letters > 0 && (non_latin as f64) > nonlatin_threshold * (letters as f64) {
        return ConversionOutcome::NonLatinScript;
    }
    ConversionOutcome::Converted { text }
}
