//! Ground truth for a generated corpus: the exact facts every document was
//! built to contain, in the same vocabulary the extraction pipeline reports.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use misl_core::extract::{ArticleRef, Jurisdiction, PldCitation, ScmrCitation};
use misl_core::normalize::{CaseType, JudgeId};
use misl_core::store::DocId;

/// The planted facts for one successfully converted document. Field names
/// track the extracted-facts shape so comparisons read one-to-one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub id: DocId,
    /// Release year; `None` when the generator withheld the date.
    pub year: Option<i32>,
    pub types: BTreeSet<CaseType>,
    pub suo_moto: bool,
    pub jurisdiction: Jurisdiction,
    /// Bench in presence-list order. Generated benches are roster-only;
    /// noise corrupts spellings, never identities.
    pub bench: Vec<JudgeId>,
    pub articles: BTreeSet<ArticleRef>,
    pub pld: BTreeSet<PldCitation>,
    pub scmr: BTreeSet<ScmrCitation>,
}

/// Noise accounting across the whole corpus: how many judge mentions were
/// written, and how many of those were deliberately misspelled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionTally {
    pub judge_mentions: u64,
    pub corrupted_mentions: u64,
}

/// Complete ground truth for one generated corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub entries: Vec<TruthEntry>,
    pub mentions: MentionTally,
}

impl GroundTruth {
    pub fn get(&self, id: &DocId) -> Option<&TruthEntry> {
        self.entries.iter().find(|e| &e.id == id)
    }

    /// Serialize as JSON lines: a mention-tally header line, then one entry
    /// per line in corpus order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&self.mentions).expect("tally serializes"));
        out.push('\n');
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mentions = match lines.next() {
            Some(first) => serde_json::from_str(first)?,
            None => MentionTally::default(),
        };
        let entries = lines
            .map(serde_json::from_str)
            .collect::<Result<Vec<TruthEntry>, _>>()?;
        Ok(GroundTruth { entries, mentions })
    }

    pub fn write_file(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_jsonl())
    }

    pub fn read_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        GroundTruth::from_jsonl(&text).map_err(std::io::Error::other)
    }
}
