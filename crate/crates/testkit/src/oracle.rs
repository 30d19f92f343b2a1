//! Independent report oracle: computes the expected report bundle straight
//! from ground truth by direct enumeration.
//!
//! Counting, year filling, ranking and rounding are deliberately written
//! out again here rather than calling the production aggregation code; the
//! whole point of the oracle is that the two implementations can disagree.
//! Only the fact vocabulary (render methods) and the table/bundle rendering
//! contract are shared.

use std::collections::BTreeMap;

use misl_core::normalize::JudgeRoster;
use misl_core::report::{ReportBundle, ReportError, ReportOptions, ReportTable};

use crate::truth::GroundTruth;

fn bump(map: &mut BTreeMap<String, u64>, key: String) {
    *map.entry(key).or_default() += 1;
}

/// Count-descending order, ties by key case-insensitively, then exactly.
fn rank(map: &BTreeMap<String, u64>) -> Vec<(String, u64)> {
    let mut rows: Vec<(String, u64)> = map.iter().map(|(k, v)| (k.clone(), *v)).collect();
    rows.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| a.0.to_lowercase().cmp(&b.0.to_lowercase()))
            .then_with(|| a.0.cmp(&b.0))
    });
    rows
}

fn ranked_rows(rows: &[(String, u64)], limit: Option<usize>) -> Vec<Vec<String>> {
    rows.iter()
        .take(limit.unwrap_or(rows.len()))
        .enumerate()
        .map(|(i, (k, c))| vec![(i + 1).to_string(), k.clone(), c.to_string()])
        .collect()
}

fn year_rows(
    values: &BTreeMap<i32, u64>,
    span: &BTreeMap<i32, u64>,
    undated: u64,
) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    if let (Some(min), Some(max)) = (span.keys().next(), span.keys().next_back()) {
        let mut y = *min;
        while y <= *max {
            rows.push(vec![y.to_string(), values.get(&y).copied().unwrap_or(0).to_string()]);
            y += 1;
        }
    }
    if undated > 0 {
        rows.push(vec!["undated".to_string(), undated.to_string()]);
    }
    rows
}

fn percent_1dp(suo: u64, total: u64) -> String {
    let permille = (suo * 2000 + total) / (2 * total);
    format!("{}.{}", permille / 10, permille % 10)
}

fn mean_2dp(sum: u64, count: u64) -> String {
    let centi = (sum * 200 + count) / (2 * count);
    format!("{}.{:02}", centi / 100, centi % 100)
}

/// Expected report bundle for a corpus whose converted documents carry
/// exactly the facts in `truth`.
pub fn oracle_bundle(
    truth: &GroundTruth,
    roster: &JudgeRoster,
    opts: &ReportOptions,
) -> Result<ReportBundle, ReportError> {
    let mut by_year: BTreeMap<i32, u64> = BTreeMap::new();
    let mut suo_by_year: BTreeMap<i32, u64> = BTreeMap::new();
    let mut undated = 0u64;
    let mut suo_undated = 0u64;
    let mut by_type: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_jurisdiction: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_judge: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_article: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_pld: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_scmr: BTreeMap<String, u64> = BTreeMap::new();
    let mut bench_docs = 0u64;
    let mut bench_sum = 0u64;
    let mut bench_max = 0u64;
    let mut full_benches = 0u64;
    let (mut pre_suo, mut pre_total, mut post_suo, mut post_total) = (0u64, 0u64, 0u64, 0u64);

    for e in &truth.entries {
        match e.year {
            Some(y) => {
                *by_year.entry(y).or_default() += 1;
                if e.suo_moto {
                    *suo_by_year.entry(y).or_default() += 1;
                }
                if y < opts.split_year {
                    pre_total += 1;
                    pre_suo += u64::from(e.suo_moto);
                } else {
                    post_total += 1;
                    post_suo += u64::from(e.suo_moto);
                }
            }
            None => {
                undated += 1;
                suo_undated += u64::from(e.suo_moto);
            }
        }
        for t in &e.types {
            bump(&mut by_type, t.label().to_string());
        }
        bump(&mut by_jurisdiction, e.jurisdiction.render());
        for id in &e.bench {
            let name = roster
                .canonical_name(id)
                .unwrap_or_else(|| id.as_str())
                .to_string();
            bump(&mut by_judge, name);
        }
        for a in &e.articles {
            bump(&mut by_article, a.render());
        }
        for c in &e.pld {
            bump(&mut by_pld, c.to_string());
        }
        for c in &e.scmr {
            bump(&mut by_scmr, c.to_string());
        }
        if !e.bench.is_empty() {
            let size = e.bench.len() as u64;
            bench_docs += 1;
            bench_sum += size;
            bench_max = bench_max.max(size);
            if size == opts.full_bench_size {
                full_benches += 1;
            }
        }
    }

    let ranked = |title: &str, key: &str, map: &BTreeMap<String, u64>, limit: Option<usize>| {
        ReportTable::new(title, ["S#", key, "# of Cases"], ranked_rows(&rank(map), limit))
    };
    let bench_row = if bench_docs > 0 {
        vec![
            bench_docs.to_string(),
            bench_sum.to_string(),
            mean_2dp(bench_sum, bench_docs),
            bench_max.to_string(),
            full_benches.to_string(),
            opts.full_bench_size.to_string(),
        ]
    } else {
        vec![
            "0".to_string(),
            "0".to_string(),
            String::new(),
            String::new(),
            "0".to_string(),
            opts.full_bench_size.to_string(),
        ]
    };
    let share_row = |segment: &str, suo: u64, total: u64| {
        if total > 0 {
            vec![segment.to_string(), suo.to_string(), total.to_string(), percent_1dp(suo, total)]
        } else {
            vec![segment.to_string(), "0".to_string(), "0".to_string(), String::new()]
        }
    };

    ReportBundle::from_tables(vec![
        (
            "cases_by_year".to_string(),
            ReportTable::new(
                "Cases by year",
                ["year", "count"],
                year_rows(&by_year, &by_year, undated),
            ),
        ),
        (
            "suo_moto_by_year".to_string(),
            ReportTable::new(
                "Suo Moto cases by year",
                ["year", "count"],
                year_rows(&suo_by_year, &by_year, suo_undated),
            ),
        ),
        (
            "by_type".to_string(),
            ranked("Cases by type", "Type", &by_type, None),
        ),
        (
            "by_jurisdiction".to_string(),
            ranked("Cases by jurisdiction", "Jurisdiction", &by_jurisdiction, None),
        ),
        (
            "top_judges".to_string(),
            ranked("Most prolific judges", "Name", &by_judge, Some(opts.top_k)),
        ),
        (
            "top_articles".to_string(),
            ranked("Most cited Articles", "Article", &by_article, Some(opts.top_k)),
        ),
        (
            "top_pld".to_string(),
            ranked("Most cited PLD citations", "Citation", &by_pld, Some(opts.top_k)),
        ),
        (
            "top_scmr".to_string(),
            ranked("Most cited SCMR citations", "Citation", &by_scmr, Some(opts.top_k)),
        ),
        (
            "bench_stats".to_string(),
            ReportTable::new(
                "Bench sizes",
                ["bench_docs", "bench_size_sum", "mean", "max", "full_bench_count", "full_bench_size"],
                vec![bench_row],
            ),
        ),
        (
            "suo_moto_share".to_string(),
            ReportTable::new(
                "Suo Moto share",
                ["segment", "suo_cases", "total_cases", "percent"],
                vec![
                    share_row("pre", pre_suo, pre_total),
                    share_row("post", post_suo, post_total),
                ],
            ),
        ),
    ])
}
