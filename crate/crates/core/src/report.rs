//! Deterministic report rendering. Every report is a titled table of string
//! rows emitted as RFC-4180 CSV (header row then data) and as pretty JSON
//! (`{title, columns, rows}`). Rendering the same statistics twice yields
//! byte-identical output.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::analytics::{
    bench_stats, cases_by_year, distribution, suo_moto_by_year, suo_moto_share, top_k, BenchStats,
    Dimension, StatsPartial, YearSeries,
};
use crate::normalize::JudgeRoster;
use crate::store::write_atomic;

/// One report: a title, column headers and string rows. Serializes in
/// declaration order; the JSON emission relies on it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ReportTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReportTable {
    pub fn new(
        title: impl Into<String>,
        columns: impl IntoIterator<Item = impl Into<String>>,
        rows: Vec<Vec<String>>,
    ) -> Self {
        ReportTable {
            title: title.into(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows,
        }
    }

    fn validate(&self) -> Result<(), ReportError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(ReportError::InvalidTable {
                    detail: format!(
                        "row {} has {} fields, table {:?} has {} columns",
                        i + 1,
                        row.len(),
                        self.title,
                        self.columns.len()
                    ),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid table: {detail}")]
    InvalidTable { detail: String },
    #[error("invalid series: {detail}")]
    InvalidSeries { detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Render one table to bytes.
pub fn emit_table(table: &ReportTable, format: ReportFormat) -> Result<Vec<u8>, ReportError> {
    table.validate()?;
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(&table.columns).map_err(csv_io)?;
            for row in &table.rows {
                writer.write_record(row).map_err(csv_io)?;
            }
            writer.into_inner().map_err(|e| ReportError::Io(e.into_error()))
        }
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(table).expect("table serializes");
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

fn csv_io(e: csv::Error) -> ReportError {
    ReportError::Io(std::io::Error::other(e))
}

/// Build a `year,count` table from a series, appending an `undated` trailer
/// row when any undated documents exist. Years must be strictly ascending.
pub fn year_series_table(title: &str, series: &YearSeries) -> Result<ReportTable, ReportError> {
    for pair in series.rows.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(ReportError::InvalidSeries {
                detail: format!("years {} and {} out of order", pair[0].0, pair[1].0),
            });
        }
    }
    let mut rows: Vec<Vec<String>> = series
        .rows
        .iter()
        .map(|(year, count)| vec![year.to_string(), count.to_string()])
        .collect();
    if series.undated > 0 {
        rows.push(vec!["undated".to_string(), series.undated.to_string()]);
    }
    Ok(ReportTable::new(title, ["year", "count"], rows))
}

/// Render a year series directly to bytes.
pub fn emit_year_series(
    series: &YearSeries,
    title: &str,
    format: ReportFormat,
) -> Result<Vec<u8>, ReportError> {
    emit_table(&year_series_table(title, series)?, format)
}

/// Ranked table: serial number, key column, count column.
pub fn ranked_table(title: &str, key_column: &str, rows: &[(String, u64)]) -> ReportTable {
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, (key, count))| vec![(i + 1).to_string(), key.clone(), count.to_string()])
        .collect();
    ReportTable::new(title, ["S#", key_column, "# of Cases"], rows)
}

fn mean_2dp(size_sum: u64, docs: u64) -> String {
    // Half-up to two decimals; exact integer arithmetic.
    let centi = (size_sum * 200 + docs) / (2 * docs);
    format!("{}.{:02}", centi / 100, centi % 100)
}

/// Bench summary table. Without any extracted bench the numeric summary
/// fields are empty rather than zero.
pub fn bench_stats_table(stats: Option<BenchStats>, full_bench_size: u64) -> ReportTable {
    let row = match stats {
        Some(s) => vec![
            s.docs.to_string(),
            s.size_sum.to_string(),
            mean_2dp(s.size_sum, s.docs),
            s.max_size.to_string(),
            s.full_bench_count.to_string(),
            full_bench_size.to_string(),
        ],
        None => vec![
            "0".to_string(),
            "0".to_string(),
            String::new(),
            String::new(),
            "0".to_string(),
            full_bench_size.to_string(),
        ],
    };
    ReportTable::new(
        "Bench sizes",
        ["bench_docs", "bench_size_sum", "mean", "max", "full_bench_count", "full_bench_size"],
        vec![row],
    )
}

/// Suo-moto share table: one row per segment, percent empty when a segment
/// has no dated documents (absent is not 0.0).
pub fn share_table(split: &crate::analytics::ShareSplit) -> ReportTable {
    let row = |segment: &str, share: Option<crate::analytics::Share>| match share {
        Some(s) => vec![
            segment.to_string(),
            s.suo.to_string(),
            s.total.to_string(),
            s.percent_1dp(),
        ],
        None => vec![segment.to_string(), "0".to_string(), "0".to_string(), String::new()],
    };
    ReportTable::new(
        "Suo Moto share",
        ["segment", "suo_cases", "total_cases", "percent"],
        vec![row("pre", split.pre), row("post", split.post)],
    )
}

/// The fixed bundle: report name -> file stem under `reports/`.
pub const BUNDLE_NAMES: [&str; 10] = [
    "cases_by_year",
    "suo_moto_by_year",
    "by_type",
    "by_jurisdiction",
    "top_judges",
    "top_articles",
    "top_pld",
    "top_scmr",
    "bench_stats",
    "suo_moto_share",
];

/// A complete report bundle, one table per fixed name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportBundle {
    tables: Vec<(String, ReportTable)>,
}

impl ReportBundle {
    /// Build from (name, table) pairs; the name set must be exactly
    /// [`BUNDLE_NAMES`], any order.
    pub fn from_tables(mut tables: Vec<(String, ReportTable)>) -> Result<Self, ReportError> {
        tables.sort_by_key(|(name, _)| {
            BUNDLE_NAMES.iter().position(|n| n == name).unwrap_or(usize::MAX)
        });
        let names: Vec<&str> = tables.iter().map(|(n, _)| n.as_str()).collect();
        if names != BUNDLE_NAMES {
            return Err(ReportError::InvalidTable {
                detail: format!("bundle names {names:?} do not match {BUNDLE_NAMES:?}"),
            });
        }
        Ok(ReportBundle { tables })
    }

    pub fn tables(&self) -> impl Iterator<Item = (&str, &ReportTable)> {
        self.tables.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn get(&self, name: &str) -> Option<&ReportTable> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Reporting knobs.
#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub split_year: i32,
    pub top_k: usize,
    pub full_bench_size: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { split_year: 2009, top_k: 10, full_bench_size: 17 }
    }
}

/// Assemble the full bundle from aggregated statistics.
pub fn bundle_from_partial(
    p: &StatsPartial,
    roster: &JudgeRoster,
    opts: &ReportOptions,
) -> Result<ReportBundle, ReportError> {
    let ranked = |title: &str, key: &str, rows: &[(String, u64)]| ranked_table(title, key, rows);
    let tables = vec![
        (
            "cases_by_year".to_string(),
            year_series_table("Cases by year", &cases_by_year(p))?,
        ),
        (
            "suo_moto_by_year".to_string(),
            year_series_table("Suo Moto cases by year", &suo_moto_by_year(p))?,
        ),
        (
            "by_type".to_string(),
            ranked("Cases by type", "Type", &distribution(p, Dimension::Type, roster)),
        ),
        (
            "by_jurisdiction".to_string(),
            ranked(
                "Cases by jurisdiction",
                "Jurisdiction",
                &distribution(p, Dimension::Jurisdiction, roster),
            ),
        ),
        (
            "top_judges".to_string(),
            ranked(
                "Most prolific judges",
                "Name",
                &top_k(p, Dimension::Judge, opts.top_k, roster),
            ),
        ),
        (
            "top_articles".to_string(),
            ranked(
                "Most cited Articles",
                "Article",
                &top_k(p, Dimension::Article, opts.top_k, roster),
            ),
        ),
        (
            "top_pld".to_string(),
            ranked(
                "Most cited PLD citations",
                "Citation",
                &top_k(p, Dimension::Pld, opts.top_k, roster),
            ),
        ),
        (
            "top_scmr".to_string(),
            ranked(
                "Most cited SCMR citations",
                "Citation",
                &top_k(p, Dimension::Scmr, opts.top_k, roster),
            ),
        ),
        (
            "bench_stats".to_string(),
            bench_stats_table(bench_stats(p, opts.full_bench_size), opts.full_bench_size),
        ),
        (
            "suo_moto_share".to_string(),
            share_table(&suo_moto_share(p, opts.split_year)),
        ),
    ];
    ReportBundle::from_tables(tables)
}

/// Render every table of a bundle to `<name>.csv` and `<name>.json` bytes.
pub fn bundle_bytes(bundle: &ReportBundle) -> Result<BTreeMap<String, Vec<u8>>, ReportError> {
    let mut out = BTreeMap::new();
    for (name, table) in bundle.tables() {
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            out.insert(
                format!("{name}.{}", format.extension()),
                emit_table(table, format)?,
            );
        }
    }
    Ok(out)
}

/// Write a bundle into a directory (created if needed), atomically per file.
pub fn write_bundle(dir: &Path, bundle: &ReportBundle) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir)?;
    for (file, bytes) in bundle_bytes(bundle)? {
        write_atomic(&dir.join(file), &bytes)?;
    }
    Ok(())
}
