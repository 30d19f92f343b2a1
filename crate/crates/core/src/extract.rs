//! Legal-fact extraction: case types and the suo-moto flag from the title,
//! jurisdiction and bench from the document preamble, Constitution Article
//! references and PLD/SCMR citations from the full text.
//!
//! Grammars are small and deliberate. Extraction never throws on messy text;
//! what does not match a grammar is simply not a fact.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{
    canonicalize_judge, resolve_case_types, Ambiguity, CaseType, JudgeId, JudgeRoster,
    LookupTable, MatchResult,
};
use crate::store::{DocId, Document};

/// One reference to a Constitution Article: number, optional letter suffix
/// (stored uppercase), optional clause. Renders as "9", "2A", "184 (3)".
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ArticleRef {
    pub article: u16,
    pub suffix: Option<char>,
    pub clause: Option<u16>,
}

impl ArticleRef {
    pub fn render(&self) -> String {
        let mut s = self.article.to_string();
        if let Some(c) = self.suffix {
            s.push(c);
        }
        if let Some(clause) = self.clause {
            s.push_str(&format!(" ({clause})"));
        }
        s
    }
}

impl fmt::Display for ArticleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Citation into the PLD law journal, e.g. "PLD 2009 SC 879".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PldCitation {
    pub year: u16,
    pub court: String,
    pub number: u32,
}

impl fmt::Display for PldCitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLD {} {} {}", self.year, self.court, self.number)
    }
}

/// Citation into the SCMR law journal, e.g. "1991 SCMR 1041".
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ScmrCitation {
    pub year: u16,
    pub number: u32,
}

impl fmt::Display for ScmrCitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} SCMR {}", self.year, self.number)
    }
}

/// Jurisdictions a court may exercise, in their fixed rendering order.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum JurisdictionKind {
    Original,
    Appellate,
    Review,
    Advisory,
    Contempt,
}

impl JurisdictionKind {
    pub fn label(self) -> &'static str {
        match self {
            JurisdictionKind::Original => "Original",
            JurisdictionKind::Appellate => "Appellate",
            JurisdictionKind::Review => "Review",
            JurisdictionKind::Advisory => "Advisory",
            JurisdictionKind::Contempt => "Contempt",
        }
    }
}

/// Set of jurisdictions claimed by one document. Empty renders as "Unknown",
/// multiple members join in fixed order: "Original/Appellate".
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Jurisdiction(pub BTreeSet<JurisdictionKind>);

impl Jurisdiction {
    pub fn unknown() -> Self {
        Jurisdiction(BTreeSet::new())
    }

    pub fn of(kinds: impl IntoIterator<Item = JurisdictionKind>) -> Self {
        Jurisdiction(kinds.into_iter().collect())
    }

    pub fn is_unknown(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self) -> String {
        if self.0.is_empty() {
            return "Unknown".to_string();
        }
        self.0
            .iter()
            .map(|k| k.label())
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// A bench member: either a roster judge or a name the roster does not list
/// (kept in normalized form, never guessed into the roster).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeRef {
    Roster(JudgeId),
    Unlisted(String),
}

impl JudgeRef {
    pub fn render(&self, roster: &JudgeRoster) -> String {
        match self {
            JudgeRef::Roster(id) => roster
                .canonical_name(id)
                .unwrap_or(id.as_str())
                .to_string(),
            JudgeRef::Unlisted(name) => name.clone(),
        }
    }
}

/// Everything extracted from one document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocFacts {
    pub id: DocId,
    pub year: Option<i32>,
    pub types: BTreeSet<CaseType>,
    pub ambiguities: Vec<Ambiguity>,
    pub suo_moto: bool,
    pub jurisdiction: Jurisdiction,
    pub bench: Vec<JudgeRef>,
    pub articles: BTreeSet<ArticleRef>,
    pub article_occurrences: Vec<ArticleRef>,
    pub pld: BTreeSet<PldCitation>,
    pub scmr: BTreeSet<ScmrCitation>,
    pub text_analyzed: bool,
}

/// Tunable grammar surface: heading tokens ending the preamble, honorifics
/// recognizing bench lines, court codes considered known, title designators
/// implying a suo-moto proceeding.
#[derive(Clone, Debug)]
pub struct GrammarConfig {
    pub heading_tokens: Vec<String>,
    pub preamble_max_lines: usize,
    pub bench_honorifics: Vec<String>,
    pub known_courts: BTreeSet<String>,
    pub suo_moto_designators: Vec<String>,
}

impl Default for GrammarConfig {
    fn default() -> Self {
        GrammarConfig {
            heading_tokens: ["JUDGMENT", "ORDER", "O R D E R"]
                .map(String::from)
                .to_vec(),
            preamble_max_lines: 120,
            bench_honorifics: ["mr", "mrs", "ms", "justice", "chief"]
                .map(String::from)
                .to_vec(),
            known_courts: ["SC", "FC", "Lah", "Kar", "Pesh", "Quetta", "AJK"]
                .map(String::from)
                .into_iter()
                .collect(),
            suo_moto_designators: ["suo moto", "suo motu", "s.m.c"].map(String::from).to_vec(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("document {id} not analyzable without text (status {status})")]
    NotAnalyzable { id: DocId, status: String },
}

// An Article item: 1-3 digits, optional letter suffix, optional "(clause)".
// The \b after the digits (or suffix) keeps "Article 1998" from matching as
// article 199.
const ARTICLE_ITEM: &str = r"\d{1,3}(?:[A-Za-z]\b|\b)(?:\s?\(\d{1,3}\))?";

/// Compiled extraction grammars over one [`GrammarConfig`].
pub struct Extractor {
    config: GrammarConfig,
    article_run: Regex,
    article_item: Regex,
    pld: Regex,
    scmr: Regex,
    jurisdiction: Regex,
    jurisdiction_kind: Regex,
}

impl Extractor {
    pub fn new(config: GrammarConfig) -> Self {
        let run = format!(
            r"\bArticles?\s+({item}(?:(?:\s*,\s*(?:and\s+)?|\s+and\s+){item})*)",
            item = ARTICLE_ITEM
        );
        Extractor {
            config,
            article_run: Regex::new(&run).unwrap(),
            article_item: Regex::new(r"(\d{1,3})(?:([A-Za-z])\b|\b)(?:\s?\((\d{1,3})\))?")
                .unwrap(),
            pld: Regex::new(r"\bPLD\s+(\d{4})\s+([A-Za-z]{1,8})\s+(\d+)\b").unwrap(),
            scmr: Regex::new(r"\b(\d{4})\s+SCMR\s+(\d+)\b").unwrap(),
            jurisdiction: Regex::new(
                r"(?i)\b(?:original|appellate|review|advisory|contempt)(?:\s*/\s*(?:original|appellate|review|advisory|contempt))*\s+jurisdiction\b",
            )
            .unwrap(),
            jurisdiction_kind: Regex::new(r"(?i)\b(original|appellate|review|advisory|contempt)\b")
                .unwrap(),
        }
    }

    /// Extractor over the default grammar.
    pub fn default_grammar() -> &'static Extractor {
        static EXTRACTOR: OnceLock<Extractor> = OnceLock::new();
        EXTRACTOR.get_or_init(|| Extractor::new(GrammarConfig::default()))
    }

    pub fn config(&self) -> &GrammarConfig {
        &self.config
    }

    /// Preamble: everything before the first heading line (a line whose
    /// trimmed content equals a heading token), capped at a line budget.
    pub fn preamble<'a>(&self, text: &'a str) -> &'a str {
        let mut end = 0;
        let mut lines = 0;
        for line in text.split_inclusive('\n') {
            let trimmed = line.trim();
            if self.config.heading_tokens.iter().any(|t| t == trimmed) {
                break;
            }
            end += line.len();
            lines += 1;
            if lines >= self.config.preamble_max_lines {
                break;
            }
        }
        &text[..end]
    }

    /// Jurisdictions claimed in the preamble. Slash-joined phrases
    /// ("Original/Appellate Jurisdiction") and separate phrases both
    /// contribute; no phrase at all is the empty (Unknown) set.
    pub fn extract_jurisdiction(&self, text: &str) -> Jurisdiction {
        let preamble = self.preamble(text);
        let mut kinds = BTreeSet::new();
        for m in self.jurisdiction.find_iter(preamble) {
            for k in self.jurisdiction_kind.find_iter(m.as_str()) {
                let kind = match k.as_str().to_lowercase().as_str() {
                    "original" => JurisdictionKind::Original,
                    "appellate" => JurisdictionKind::Appellate,
                    "review" => JurisdictionKind::Review,
                    "advisory" => JurisdictionKind::Advisory,
                    _ => JurisdictionKind::Contempt,
                };
                kinds.insert(kind);
            }
        }
        Jurisdiction(kinds)
    }

    fn is_bench_line(&self, line: &str) -> bool {
        let first = line.split_whitespace().next().unwrap_or("");
        let bare: String = first
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        !bare.is_empty() && self.config.bench_honorifics.contains(&bare)
    }

    /// Raw judge names from the preamble's presence block: the lines after a
    /// "PRESENT" marker that start with an honorific, stopping at the first
    /// line that does not. Exact duplicates collapse, order is preserved.
    pub fn extract_bench(&self, text: &str) -> Vec<String> {
        let preamble = self.preamble(text);
        let mut in_block = false;
        let mut names: Vec<String> = Vec::new();
        for line in preamble.lines() {
            let trimmed = line.trim();
            if !in_block {
                if trimmed.trim_end_matches(':').trim().eq_ignore_ascii_case("present") {
                    in_block = true;
                }
                continue;
            }
            if trimmed.is_empty() {
                if names.is_empty() {
                    continue;
                }
                break;
            }
            if !self.is_bench_line(trimmed) {
                break;
            }
            if !names.iter().any(|n| n == trimmed) {
                names.push(trimmed.to_string());
            }
        }
        names
    }

    /// Every Article reference in the text, in order, multiplicity preserved.
    /// List syntax after one keyword ("Articles 9, 10 and 14") yields one
    /// reference per item. Article numbers outside 1..=280 are dropped.
    pub fn extract_article_refs(&self, text: &str) -> Vec<ArticleRef> {
        let mut refs = Vec::new();
        for run in self.article_run.captures_iter(text) {
            for item in self.article_item.captures_iter(run.get(1).unwrap().as_str()) {
                let article: u16 = match item[1].parse() {
                    Ok(n) => n,
                    Err(_) => continue,
                };
                if !(1..=280).contains(&article) {
                    continue;
                }
                let suffix = item
                    .get(2)
                    .and_then(|m| m.as_str().chars().next())
                    .map(|c| c.to_ascii_uppercase());
                let clause = match item.get(3) {
                    None => None,
                    Some(m) => match m.as_str().parse::<u16>() {
                        Ok(n) if n >= 1 => Some(n),
                        _ => continue,
                    },
                };
                refs.push(ArticleRef { article, suffix, clause });
            }
        }
        refs
    }

    /// Every PLD citation occurrence, in order. Years outside 1947..=2100 and
    /// zero citation numbers are dropped; unknown court codes are kept.
    pub fn extract_pld(&self, text: &str) -> Vec<PldCitation> {
        self.pld
            .captures_iter(text)
            .filter_map(|c| {
                let year: u16 = c[1].parse().ok()?;
                let number: u32 = c[3].parse().ok()?;
                if !(1947..=2100).contains(&year) || number == 0 {
                    return None;
                }
                Some(PldCitation { year, court: c[2].to_string(), number })
            })
            .collect()
    }

    /// Every SCMR citation occurrence, in order, same year/number filters.
    pub fn extract_scmr(&self, text: &str) -> Vec<ScmrCitation> {
        self.scmr
            .captures_iter(text)
            .filter_map(|c| {
                let year: u16 = c[1].parse().ok()?;
                let number: u32 = c[2].parse().ok()?;
                if !(1947..=2100).contains(&year) || number == 0 {
                    return None;
                }
                Some(ScmrCitation { year, number })
            })
            .collect()
    }

    pub fn is_known_court(&self, code: &str) -> bool {
        self.config.known_courts.contains(code)
    }

    /// A document is suo moto when its resolved types say so or its title
    /// carries a suo-moto designator.
    pub fn is_suo_moto(&self, types: &BTreeSet<CaseType>, title: &str) -> bool {
        if types.contains(&CaseType::SuoMoto) {
            return true;
        }
        let lowered = title.to_lowercase();
        self.config
            .suo_moto_designators
            .iter()
            .any(|d| lowered.contains(d.as_str()))
    }
}

/// Shared inputs for per-document analysis.
pub struct AnalysisContext<'a> {
    pub extractor: &'a Extractor,
    pub lookup: &'a LookupTable,
    pub roster: &'a JudgeRoster,
}

/// Analyze one document. With text, all facts are extracted; without text,
/// `metadata_only` permits a degraded result carrying only title/date facts
/// (`text_analyzed = false`), otherwise the document is not analyzable.
pub fn analyze_document(
    doc: &Document,
    text: Option<&str>,
    ctx: &AnalysisContext<'_>,
    metadata_only: bool,
) -> Result<DocFacts, ExtractError> {
    if text.is_none() && !metadata_only {
        return Err(ExtractError::NotAnalyzable {
            id: doc.id.clone(),
            status: doc.status.name().to_string(),
        });
    }
    let (types, ambiguities) = resolve_case_types(&doc.meta.title, ctx.lookup);
    let suo_moto = ctx.extractor.is_suo_moto(&types, &doc.meta.title);
    let mut facts = DocFacts {
        id: doc.id.clone(),
        year: doc.meta.release_date.map(|d| chrono::Datelike::year(&d)),
        types,
        ambiguities,
        suo_moto,
        jurisdiction: Jurisdiction::unknown(),
        bench: Vec::new(),
        articles: BTreeSet::new(),
        article_occurrences: Vec::new(),
        pld: BTreeSet::new(),
        scmr: BTreeSet::new(),
        text_analyzed: false,
    };
    let Some(text) = text else {
        return Ok(facts);
    };
    let ex = ctx.extractor;
    facts.jurisdiction = ex.extract_jurisdiction(text);
    for raw in ex.extract_bench(text) {
        let member = match canonicalize_judge(&raw, ctx.roster) {
            MatchResult::Matched(id) => JudgeRef::Roster(id),
            MatchResult::New(name) => JudgeRef::Unlisted(name),
        };
        // Dedup by resolved identity: two spellings of one judge count once.
        if !facts.bench.contains(&member) {
            facts.bench.push(member);
        }
    }
    facts.article_occurrences = ex.extract_article_refs(text);
    facts.articles = facts.article_occurrences.iter().copied().collect();
    let pld = ex.extract_pld(text);
    for cite in &pld {
        if !ex.is_known_court(&cite.court) {
            log::warn!("{}: unknown court code in citation {cite}", doc.id);
        }
    }
    facts.pld = pld.into_iter().collect();
    facts.scmr = ex.extract_scmr(text).into_iter().collect();
    facts.text_analyzed = true;
    Ok(facts)
}
