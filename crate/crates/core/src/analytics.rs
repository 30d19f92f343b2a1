//! Mergeable corpus statistics. A [`StatsPartial`] summarizes any subset of
//! documents; [`merge`] combines partials associatively and commutatively
//! with [`StatsPartial::empty`] as identity, so a corpus can be aggregated in
//! any partition order with identical results.
//!
//! Counts are document-presence counts: a citation appearing five times in
//! one document contributes one to its citation count. Article occurrence
//! totals are kept in a separate counter namespace. All arithmetic is exact
//! integer arithmetic; rounding happens only when reports render.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{ArticleRef, DocFacts, JudgeRef, PldCitation, ScmrCitation};
use crate::normalize::{CaseType, JudgeRoster};

// Counter maps serialize as [key, count] pairs: JSON object keys must be
// strings, and most keys here are structured.
mod pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<K, S>(map: &BTreeMap<K, u64>, ser: S) -> Result<S::Ok, S::Error>
    where
        K: Serialize,
        S: Serializer,
    {
        ser.collect_seq(map.iter())
    }

    pub fn deserialize<'de, K, D>(de: D) -> Result<BTreeMap<K, u64>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        D: Deserializer<'de>,
    {
        let pairs: Vec<(K, u64)> = Vec::deserialize(de)?;
        Ok(pairs.into_iter().collect())
    }
}

/// Statistics over a subset of documents. Forms a commutative monoid under
/// [`merge`] with [`StatsPartial::empty`] as identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsPartial {
    pub docs_total: u64,
    pub docs_dated: u64,
    /// Suo-moto documents without a release date (dated ones are in
    /// `suo_by_year`).
    pub suo_undated: u64,
    #[serde(with = "pairs")]
    pub by_year: BTreeMap<i32, u64>,
    #[serde(with = "pairs")]
    pub suo_by_year: BTreeMap<i32, u64>,
    #[serde(with = "pairs")]
    pub by_type: BTreeMap<CaseType, u64>,
    #[serde(with = "pairs")]
    pub by_jurisdiction: BTreeMap<String, u64>,
    #[serde(with = "pairs")]
    pub by_judge: BTreeMap<JudgeRef, u64>,
    #[serde(with = "pairs")]
    pub by_article: BTreeMap<ArticleRef, u64>,
    #[serde(with = "pairs")]
    pub article_occurrences: BTreeMap<ArticleRef, u64>,
    #[serde(with = "pairs")]
    pub by_pld: BTreeMap<PldCitation, u64>,
    #[serde(with = "pairs")]
    pub by_scmr: BTreeMap<ScmrCitation, u64>,
    /// Bench size -> number of documents with that bench size. Documents
    /// where no bench was extracted do not appear.
    #[serde(with = "pairs")]
    pub bench_sizes: BTreeMap<u64, u64>,
}

impl StatsPartial {
    pub fn empty() -> Self {
        StatsPartial::default()
    }
}

/// Summarize a single document.
pub fn facts_to_partial(facts: &DocFacts) -> StatsPartial {
    let mut p = StatsPartial::empty();
    p.docs_total = 1;
    match facts.year {
        Some(year) => {
            p.docs_dated = 1;
            *p.by_year.entry(year).or_default() += 1;
            if facts.suo_moto {
                *p.suo_by_year.entry(year).or_default() += 1;
            }
        }
        None => {
            if facts.suo_moto {
                p.suo_undated = 1;
            }
        }
    }
    for t in &facts.types {
        *p.by_type.entry(*t).or_default() += 1;
    }
    // Jurisdiction comes from text; without text the document would always
    // land in Unknown and the table would stop summing to analyzed documents.
    if facts.text_analyzed {
        *p.by_jurisdiction.entry(facts.jurisdiction.render()).or_default() += 1;
    }
    for judge in &facts.bench {
        *p.by_judge.entry(judge.clone()).or_default() += 1;
    }
    for article in &facts.articles {
        *p.by_article.entry(*article).or_default() += 1;
    }
    for article in &facts.article_occurrences {
        *p.article_occurrences.entry(*article).or_default() += 1;
    }
    for cite in &facts.pld {
        *p.by_pld.entry(cite.clone()).or_default() += 1;
    }
    for cite in &facts.scmr {
        *p.by_scmr.entry(*cite).or_default() += 1;
    }
    if !facts.bench.is_empty() {
        *p.bench_sizes.entry(facts.bench.len() as u64).or_default() += 1;
    }
    p
}

fn add_map<K: Ord>(into: &mut BTreeMap<K, u64>, from: BTreeMap<K, u64>) {
    for (k, v) in from {
        *into.entry(k).or_default() += v;
    }
}

/// Pointwise sum of two partials.
pub fn merge(mut a: StatsPartial, b: StatsPartial) -> StatsPartial {
    a.docs_total += b.docs_total;
    a.docs_dated += b.docs_dated;
    a.suo_undated += b.suo_undated;
    add_map(&mut a.by_year, b.by_year);
    add_map(&mut a.suo_by_year, b.suo_by_year);
    add_map(&mut a.by_type, b.by_type);
    add_map(&mut a.by_jurisdiction, b.by_jurisdiction);
    add_map(&mut a.by_judge, b.by_judge);
    add_map(&mut a.by_article, b.by_article);
    add_map(&mut a.article_occurrences, b.article_occurrences);
    add_map(&mut a.by_pld, b.by_pld);
    add_map(&mut a.by_scmr, b.by_scmr);
    add_map(&mut a.bench_sizes, b.bench_sizes);
    a
}

/// Year-indexed counts, ascending, with gap years zero-filled across the
/// corpus year span. Undated documents are reported beside the series, never
/// inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YearSeries {
    pub rows: Vec<(i32, u64)>,
    pub undated: u64,
}

fn filled_series(values: &BTreeMap<i32, u64>, span: &BTreeMap<i32, u64>) -> Vec<(i32, u64)> {
    let (Some(min), Some(max)) = (span.keys().next(), span.keys().next_back()) else {
        return Vec::new();
    };
    (*min..=*max)
        .map(|y| (y, values.get(&y).copied().unwrap_or(0)))
        .collect()
}

pub fn cases_by_year(p: &StatsPartial) -> YearSeries {
    YearSeries {
        rows: filled_series(&p.by_year, &p.by_year),
        undated: p.docs_total - p.docs_dated,
    }
}

/// Suo-moto counts over the same year span as the full series, so the two
/// series align row for row.
pub fn suo_moto_by_year(p: &StatsPartial) -> YearSeries {
    YearSeries {
        rows: filled_series(&p.suo_by_year, &p.by_year),
        undated: p.suo_undated,
    }
}

/// Exact share of suo-moto documents in one year segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Share {
    pub suo: u64,
    pub total: u64,
}

impl Share {
    /// Percentage rounded half-up to one decimal, e.g. "8.1". Rendering is
    /// the only place rounding happens.
    pub fn percent_1dp(&self) -> String {
        let permille = (self.suo * 2000 + self.total) / (2 * self.total);
        format!("{}.{}", permille / 10, permille % 10)
    }
}

/// Suo-moto share before and at-or-after a split year, computed over dated
/// documents only. A segment with no dated documents has no share.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShareSplit {
    pub pre: Option<Share>,
    pub post: Option<Share>,
}

pub fn suo_moto_share(p: &StatsPartial, split_year: i32) -> ShareSplit {
    let segment = |pre: bool| {
        let in_segment = |y: i32| if pre { y < split_year } else { y >= split_year };
        let total: u64 = p.by_year.iter().filter(|(y, _)| in_segment(**y)).map(|(_, c)| c).sum();
        let suo: u64 = p
            .suo_by_year
            .iter()
            .filter(|(y, _)| in_segment(**y))
            .map(|(_, c)| c)
            .sum();
        (total > 0).then_some(Share { suo, total })
    };
    ShareSplit { pre: segment(true), post: segment(false) }
}

/// Ranked-query dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Type,
    Jurisdiction,
    Judge,
    Article,
    Pld,
    Scmr,
}

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("invalid dimension {0:?} (expected type, jurisdiction, judge, article, pld or scmr)")]
    InvalidDimension(String),
}

impl FromStr for Dimension {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "type" => Ok(Dimension::Type),
            "jurisdiction" => Ok(Dimension::Jurisdiction),
            "judge" => Ok(Dimension::Judge),
            "article" => Ok(Dimension::Article),
            "pld" => Ok(Dimension::Pld),
            "scmr" => Ok(Dimension::Scmr),
            other => Err(AnalyticsError::InvalidDimension(other.to_string())),
        }
    }
}

/// Full ranked distribution for a dimension: count descending, ties by
/// rendered key (case-insensitive, then exact). The ordering is total, so
/// `top_k` results are prefixes of longer results.
pub fn distribution(p: &StatsPartial, dim: Dimension, roster: &JudgeRoster) -> Vec<(String, u64)> {
    let mut rows: Vec<(String, u64)> = match dim {
        Dimension::Type => p.by_type.iter().map(|(t, c)| (t.label().to_string(), *c)).collect(),
        Dimension::Jurisdiction => {
            p.by_jurisdiction.iter().map(|(k, c)| (k.clone(), *c)).collect()
        }
        Dimension::Judge => p.by_judge.iter().map(|(j, c)| (j.render(roster), *c)).collect(),
        Dimension::Article => p.by_article.iter().map(|(a, c)| (a.render(), *c)).collect(),
        Dimension::Pld => p.by_pld.iter().map(|(x, c)| (x.to_string(), *c)).collect(),
        Dimension::Scmr => p.by_scmr.iter().map(|(x, c)| (x.to_string(), *c)).collect(),
    };
    rows.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| a.0.to_lowercase().cmp(&b.0.to_lowercase()))
            .then_with(|| a.0.cmp(&b.0))
    });
    rows
}

/// First `k` rows of [`distribution`].
pub fn top_k(
    p: &StatsPartial,
    dim: Dimension,
    k: usize,
    roster: &JudgeRoster,
) -> Vec<(String, u64)> {
    let mut rows = distribution(p, dim, roster);
    rows.truncate(k);
    rows
}

/// Bench-size summary over documents where a bench was extracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchStats {
    pub docs: u64,
    pub size_sum: u64,
    pub max_size: u64,
    pub full_bench_count: u64,
}

/// `None` when no document has an extracted bench. The mean is `size_sum /
/// docs`, left exact here and rendered by reporting.
pub fn bench_stats(p: &StatsPartial, full_bench_size: u64) -> Option<BenchStats> {
    if p.bench_sizes.is_empty() {
        return None;
    }
    let docs: u64 = p.bench_sizes.values().sum();
    let size_sum: u64 = p.bench_sizes.iter().map(|(size, count)| size * count).sum();
    let max_size = *p.bench_sizes.keys().next_back().unwrap();
    let full_bench_count = p.bench_sizes.get(&full_bench_size).copied().unwrap_or(0);
    Some(BenchStats { docs, size_sum, max_size, full_bench_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{Jurisdiction, JurisdictionKind};
    use crate::normalize::JudgeId;
    use crate::store::DocId;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn facts(id: &str, year: Option<i32>, suo: bool, bench: usize) -> DocFacts {
        DocFacts {
            id: DocId::from(id),
            year,
            types: [CaseType::Constitution].into_iter().collect(),
            ambiguities: Vec::new(),
            suo_moto: suo,
            jurisdiction: Jurisdiction::of([JurisdictionKind::Original]),
            bench: (0..bench)
                .map(|i| JudgeRef::Roster(JudgeId::new(format!("J{i:02}"))))
                .collect(),
            articles: [ArticleRef { article: 184, suffix: None, clause: Some(3) }]
                .into_iter()
                .collect(),
            article_occurrences: vec![
                ArticleRef { article: 184, suffix: None, clause: Some(3) },
                ArticleRef { article: 184, suffix: None, clause: Some(3) },
            ],
            pld: BTreeSet::new(),
            scmr: BTreeSet::new(),
            text_analyzed: true,
        }
    }

    #[test]
    fn presence_vs_occurrence_counting() {
        let p = facts_to_partial(&facts("a", Some(2010), false, 3));
        assert_eq!(
            p.by_article[&ArticleRef { article: 184, suffix: None, clause: Some(3) }],
            1,
            "document presence counts once"
        );
        assert_eq!(
            p.article_occurrences[&ArticleRef { article: 184, suffix: None, clause: Some(3) }],
            2
        );
        assert_eq!(p.bench_sizes[&3], 1);
        assert_eq!(p.by_jurisdiction["Original"], 1);
    }

    #[test]
    fn metadata_only_documents_skip_jurisdiction() {
        let mut f = facts("a", Some(2010), false, 0);
        f.text_analyzed = false;
        f.jurisdiction = Jurisdiction::unknown();
        let p = facts_to_partial(&f);
        assert!(p.by_jurisdiction.is_empty());
        assert_eq!(p.docs_total, 1);
    }

    #[test]
    fn undated_suo_documents_are_tracked() {
        let p = facts_to_partial(&facts("a", None, true, 0));
        assert_eq!(p.suo_undated, 1);
        assert!(p.suo_by_year.is_empty());
        assert_eq!(p.docs_total - p.docs_dated, 1);
    }

    #[test]
    fn year_series_zero_fill_and_alignment() {
        let docs = [
            facts("a", Some(2008), false, 0),
            facts("b", Some(2010), true, 0),
            facts("c", Some(2010), false, 0),
            facts("d", None, false, 0),
        ];
        let p = docs.iter().map(facts_to_partial).fold(StatsPartial::empty(), merge);
        let cases = cases_by_year(&p);
        assert_eq!(cases.rows, [(2008, 1), (2009, 0), (2010, 2)]);
        assert_eq!(cases.undated, 1);
        let suo = suo_moto_by_year(&p);
        assert_eq!(suo.rows, [(2008, 0), (2009, 0), (2010, 1)]);
        assert_eq!(suo.undated, 0);
        // Pointwise dominance.
        for ((_, total), (_, s)) in cases.rows.iter().zip(&suo.rows) {
            assert!(s <= total);
        }
    }

    #[test]
    fn share_split_and_rounding() {
        let mut p = StatsPartial::empty();
        p.by_year = [(2005, 100), (2006, 60), (2010, 400), (2012, 100)].into_iter().collect();
        p.suo_by_year = [(2005, 10), (2006, 3), (2010, 70), (2012, 8)].into_iter().collect();
        let split = suo_moto_share(&p, 2009);
        let pre = split.pre.unwrap();
        let post = split.post.unwrap();
        assert_eq!((pre.suo, pre.total), (13, 160));
        assert_eq!(pre.percent_1dp(), "8.1", "8.125 rounds to 8.1");
        assert_eq!((post.suo, post.total), (78, 500));
        assert_eq!(post.percent_1dp(), "15.6");
        // Half-up at the boundary.
        assert_eq!(Share { suo: 1, total: 16 }.percent_1dp(), "6.3");
        assert_eq!(Share { suo: 0, total: 7 }.percent_1dp(), "0.0");
        assert_eq!(Share { suo: 7, total: 7 }.percent_1dp(), "100.0");
    }

    #[test]
    fn share_sides_absent_without_dated_docs() {
        let zero = suo_moto_share(&StatsPartial::empty(), 2009);
        assert_eq!(zero.pre, None);
        assert_eq!(zero.post, None);
        let mut p = StatsPartial::empty();
        p.by_year.insert(2010, 5);
        let split = suo_moto_share(&p, 2009);
        assert_eq!(split.pre, None);
        assert_eq!(split.post, Some(Share { suo: 0, total: 5 }));
        assert_eq!(split.post.unwrap().percent_1dp(), "0.0");
    }

    #[test]
    fn ranking_orders_by_count_then_key() {
        let mut p = StatsPartial::empty();
        p.by_jurisdiction = [
            ("Original".to_string(), 5),
            ("Appellate".to_string(), 5),
            ("Review".to_string(), 7),
            ("Unknown".to_string(), 1),
        ]
        .into_iter()
        .collect();
        let rows = distribution(&p, Dimension::Jurisdiction, JudgeRoster::builtin());
        let keys: Vec<&str> = rows.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["Review", "Appellate", "Original", "Unknown"]);
        assert_eq!(top_k(&p, Dimension::Jurisdiction, 2, JudgeRoster::builtin()), rows[..2]);
    }

    #[test]
    fn judge_rows_render_canonical_names() {
        let roster = JudgeRoster::builtin();
        let mut p = StatsPartial::empty();
        p.by_judge.insert(JudgeRef::Roster(JudgeId::new("J04")), 3);
        p.by_judge.insert(JudgeRef::Unlisted("someone else".into()), 1);
        let rows = distribution(&p, Dimension::Judge, roster);
        assert_eq!(rows[0], ("Gulzar Ahmed".to_string(), 3));
        assert_eq!(rows[1], ("someone else".to_string(), 1));
    }

    #[test]
    fn dimension_parsing() {
        assert_eq!("judge".parse::<Dimension>().unwrap(), Dimension::Judge);
        assert!(matches!(
            "benches".parse::<Dimension>(),
            Err(AnalyticsError::InvalidDimension(_))
        ));
    }

    #[test]
    fn bench_stats_summary() {
        let docs = [
            facts("a", Some(2010), false, 3),
            facts("b", Some(2010), false, 3),
            facts("c", Some(2011), false, 9),
            facts("d", Some(2011), false, 0),
        ];
        let p = docs.iter().map(facts_to_partial).fold(StatsPartial::empty(), merge);
        let stats = bench_stats(&p, 9).unwrap();
        assert_eq!(stats.docs, 3, "benchless documents are excluded");
        assert_eq!(stats.size_sum, 15);
        assert_eq!(stats.max_size, 9);
        assert_eq!(stats.full_bench_count, 1);
        assert_eq!(bench_stats(&StatsPartial::empty(), 17), None);
    }

    #[test]
    fn partial_serde_round_trip() {
        let p = facts_to_partial(&facts("a", Some(2010), true, 2));
        let json = serde_json::to_string(&p).unwrap();
        let back: StatsPartial = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    fn arb_partial() -> impl Strategy<Value = StatsPartial> {
        let years = proptest::collection::btree_map(2001i32..=2014, 0u64..50, 0..6);
        let types = proptest::collection::btree_map(
            proptest::sample::select(CaseType::NAMED.to_vec()),
            1u64..20,
            0..5,
        );
        let judges = proptest::collection::btree_map(
            prop_oneof![
                (0u8..10).prop_map(|i| JudgeRef::Roster(JudgeId::new(format!("J{i:02}")))),
                "[a-z]{3,10}".prop_map(JudgeRef::Unlisted),
            ],
            1u64..20,
            0..5,
        );
        (years.clone(), years, types, judges, 0u64..100, 0u64..100, 0u64..10).prop_map(
            |(by_year, suo_by_year, by_type, by_judge, docs_total, docs_dated, suo_undated)| {
                StatsPartial {
                    docs_total,
                    docs_dated,
                    suo_undated,
                    by_year,
                    suo_by_year,
                    by_type,
                    by_judge,
                    ..StatsPartial::empty()
                }
            },
        )
    }

    proptest! {
        #[test]
        fn merge_is_a_commutative_monoid(a in arb_partial(), b in arb_partial(), c in arb_partial()) {
            prop_assert_eq!(
                merge(merge(a.clone(), b.clone()), c.clone()),
                merge(a.clone(), merge(b.clone(), c.clone()))
            );
            prop_assert_eq!(merge(a.clone(), b.clone()), merge(b, a.clone()));
            prop_assert_eq!(merge(a.clone(), StatsPartial::empty()), a.clone());
            prop_assert_eq!(merge(StatsPartial::empty(), a.clone()), a);
        }

        #[test]
        fn top_k_is_a_prefix_of_larger_k(p in arb_partial(), k in 0usize..8) {
            let roster = JudgeRoster::builtin();
            let small = top_k(&p, Dimension::Judge, k, roster);
            let large = top_k(&p, Dimension::Judge, k + 3, roster);
            prop_assert_eq!(&large[..small.len().min(large.len())], &small[..]);
        }
    }
}
