//! Judge-name canonicalization against a curated roster. Preamble spellings
//! vary (honorifics, post-nominals, single-character typos); matching is
//! Levenshtein distance over normalized names with a fixed threshold.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::NormalizeError;

/// Maximum edit distance accepted as a roster match. The roster loader
/// requires pairwise separation greater than 2x this, so a match within the
/// threshold is always unique.
pub const MATCH_THRESHOLD: usize = 2;

const LEADING_HONORIFICS: [&str; 6] = ["mr", "mrs", "ms", "mister", "justice", "chief"];
const TRAILING_POST_NOMINALS: [&str; 3] = ["hcj", "cj", "acj"];

/// Stable roster identifier for one judge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JudgeId(String);

impl JudgeId {
    pub fn new(id: impl Into<String>) -> Self {
        JudgeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for JudgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug)]
pub struct Judge {
    pub id: JudgeId,
    pub canonical: String,
    pub aliases: Vec<String>,
}

/// Curated judge roster. Order is significant: distance ties resolve to the
/// earliest entry.
#[derive(Clone, Debug)]
pub struct JudgeRoster {
    judges: Vec<Judge>,
    // One (judge index, normalized form) per canonical name and alias.
    forms: Vec<(usize, String)>,
}

/// Result of canonicalization: a roster judge, or the normalized form of a
/// name the roster does not know.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchResult {
    Matched(JudgeId),
    New(String),
}

/// Normalized name form: lowercase, punctuation to spaces, collapsed
/// whitespace, leading honorifics and trailing post-nominals dropped.
pub fn normalize_judge_name(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    let mut words: Vec<&str> = cleaned.split_whitespace().collect();
    while words.first().is_some_and(|w| LEADING_HONORIFICS.contains(w)) {
        words.remove(0);
    }
    while words.last().is_some_and(|w| TRAILING_POST_NOMINALS.contains(w)) {
        words.pop();
    }
    words.join(" ")
}

/// Levenshtein distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

impl JudgeRoster {
    /// Parse the `id,canonical_name,aliases` CSV (aliases `|`-separated).
    /// Every pair of names belonging to different judges must sit further
    /// than 2x the match threshold apart, otherwise matching could become
    /// ambiguous and the roster is rejected.
    pub fn parse_csv(text: &str) -> Result<Self, NormalizeError> {
        let bad = |msg: String| NormalizeError::BadRoster(msg);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["id", "canonical_name", "aliases"] {
            return Err(bad(format!(
                "expected header id,canonical_name,aliases, got {headers:?}"
            )));
        }
        let mut judges = Vec::new();
        let mut forms: Vec<(usize, String)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != 3 {
                return Err(bad(format!("row with {} fields: {record:?}", record.len())));
            }
            let id = record[0].trim();
            let canonical = record[1].trim();
            if id.is_empty() || canonical.is_empty() {
                return Err(bad(format!("empty id or name in {record:?}")));
            }
            if judges.iter().any(|j: &Judge| j.id.as_str() == id) {
                return Err(bad(format!("duplicate id {id:?}")));
            }
            let idx = judges.len();
            let mut names = vec![canonical.to_string()];
            let aliases: Vec<String> = record[2]
                .split('|')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            names.extend(aliases.iter().cloned());
            for name in &names {
                let norm = normalize_judge_name(name);
                if norm.is_empty() {
                    return Err(bad(format!("name {name:?} normalizes to nothing")));
                }
                forms.push((idx, norm));
            }
            judges.push(Judge {
                id: JudgeId::new(id),
                canonical: canonical.to_string(),
                aliases,
            });
        }
        for (i, (ja, fa)) in forms.iter().enumerate() {
            for (jb, fb) in forms.iter().skip(i + 1) {
                if ja == jb {
                    continue;
                }
                let d = levenshtein(fa, fb);
                if d <= 2 * MATCH_THRESHOLD {
                    return Err(bad(format!(
                        "names {fa:?} and {fb:?} are only distance {d} apart"
                    )));
                }
            }
        }
        Ok(JudgeRoster { judges, forms })
    }

    /// Roster shipped with the crate.
    pub fn builtin() -> &'static JudgeRoster {
        static ROSTER: OnceLock<JudgeRoster> = OnceLock::new();
        ROSTER.get_or_init(|| {
            JudgeRoster::parse_csv(include_str!("../../data/judge_roster.csv"))
                .expect("builtin roster is valid")
        })
    }

    pub fn judges(&self) -> &[Judge] {
        &self.judges
    }

    pub fn len(&self) -> usize {
        self.judges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judges.is_empty()
    }

    pub fn get(&self, id: &JudgeId) -> Option<&Judge> {
        self.judges.iter().find(|j| &j.id == id)
    }

    pub fn canonical_name(&self, id: &JudgeId) -> Option<&str> {
        self.get(id).map(|j| j.canonical.as_str())
    }
}

/// Match a raw preamble name against the roster. Within-threshold distances
/// match (nearest form wins, ties to the earliest roster entry); anything
/// further comes back as `New` with the normalized form.
pub fn canonicalize_judge(raw: &str, roster: &JudgeRoster) -> MatchResult {
    let norm = normalize_judge_name(raw);
    if norm.is_empty() {
        return MatchResult::New(norm);
    }
    let mut best: Option<(usize, usize)> = None; // (distance, judge index)
    for (idx, form) in &roster.forms {
        let d = levenshtein(&norm, form);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, *idx));
        }
    }
    match best {
        Some((d, idx)) if d <= MATCH_THRESHOLD => {
            MatchResult::Matched(roster.judges[idx].id.clone())
        }
        _ => MatchResult::New(norm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_basics() {
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("abc", "abd"), 1);
        assert_eq!(levenshtein("abc", "ab"), 1);
        assert_eq!(levenshtein("abc", "xabc"), 1);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }

    #[test]
    fn normalization_strips_honorifics_and_post_nominals() {
        assert_eq!(
            normalize_judge_name("MR. JUSTICE IFTIKHAR MUHAMMAD CHAUDHRY, HCJ"),
            "iftikhar muhammad chaudhry"
        );
        assert_eq!(
            normalize_judge_name("Mr. Justice Jawwad S. Khawaja"),
            "jawwad s khawaja"
        );
        assert_eq!(normalize_judge_name("Chief Justice Gulzar Ahmed"), "gulzar ahmed");
        assert_eq!(normalize_judge_name("Justice"), "");
    }

    #[test]
    fn builtin_roster_passes_separation_validation() {
        let roster = JudgeRoster::builtin();
        assert_eq!(roster.len(), 10);
        assert_eq!(
            roster.canonical_name(&JudgeId::new("J01")),
            Some("Iftikhar Muhammad Chaudhry")
        );
    }

    #[test]
    fn exact_and_typo_forms_match() {
        let roster = JudgeRoster::builtin();
        assert_eq!(
            canonicalize_judge("MR. JUSTICE GULZAR AHMED", roster),
            MatchResult::Matched(JudgeId::new("J04"))
        );
        // One substitution.
        assert_eq!(
            canonicalize_judge("Mr. Justice Gulzar Ahmad", roster),
            MatchResult::Matched(JudgeId::new("J04"))
        );
        // One deletion and one insertion.
        assert_eq!(
            canonicalize_judge("Justice Gulzaar Ahmd", roster),
            MatchResult::Matched(JudgeId::new("J04"))
        );
    }

    #[test]
    fn aliases_match_their_judge() {
        let roster = JudgeRoster::builtin();
        assert_eq!(
            canonicalize_judge("Mr. Justice Sheikh Azmat Saeed", roster),
            MatchResult::Matched(JudgeId::new("J06"))
        );
        assert_eq!(
            canonicalize_judge("MR. JUSTICE SH. AZMAT SAEED", roster),
            MatchResult::Matched(JudgeId::new("J06"))
        );
    }

    #[test]
    fn distant_names_come_back_as_new() {
        let roster = JudgeRoster::builtin();
        assert_eq!(
            canonicalize_judge("Justice Completely Unknown", roster),
            MatchResult::New("completely unknown".to_string())
        );
    }

    #[test]
    fn roster_too_close_is_rejected() {
        let csv = "id,canonical_name,aliases\nJ1,Tariq Parvez,\nJ2,Tariq Pervez,\n";
        match JudgeRoster::parse_csv(csv) {
            Err(NormalizeError::BadRoster(msg)) => assert!(msg.contains("distance"), "{msg}"),
            other => panic!("expected BadRoster, got {other:?}"),
        }
    }

    #[test]
    fn roster_alias_near_another_judge_is_rejected() {
        let csv = "id,canonical_name,aliases\nJ1,Gulzar Ahmed,\nJ2,Hani Muslim,Gulzar Ahmad\n";
        assert!(JudgeRoster::parse_csv(csv).is_err());
    }

    #[test]
    fn every_single_char_corruption_of_a_roster_name_matches_back() {
        let roster = JudgeRoster::builtin();
        for judge in roster.judges() {
            let norm = normalize_judge_name(&judge.canonical);
            let chars: Vec<char> = norm.chars().collect();
            for i in 0..chars.len() {
                if !chars[i].is_alphabetic() {
                    continue;
                }
                let mut corrupted = chars.clone();
                corrupted[i] = if chars[i] == 'x' { 'y' } else { 'x' };
                let s: String = corrupted.iter().collect();
                assert_eq!(
                    canonicalize_judge(&s, roster),
                    MatchResult::Matched(judge.id.clone()),
                    "corruption {s:?} of {norm:?}"
                );
            }
        }
    }
}
