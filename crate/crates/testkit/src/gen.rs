//! Deterministic synthetic-corpus generator.
//!
//! Every document is drawn from its own ChaCha8 stream (`seed` fixed,
//! stream = doc index + 1; stream 0 holds corpus-level pools), so a corpus
//! is reproducible byte for byte from `(spec)` alone and any subset of
//! documents can be regenerated without generating the rest.
//!
//! Documents are composed from closed grammars the toolkit's extractors
//! recognize, and every planted fact is recorded in a [`GroundTruth`]
//! alongside. Noise knobs misspell judge names, swap designators for their
//! long forms and withhold dates; fault knobs plant dead links and
//! unconvertible sources for funnel testing.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use misl_core::extract::{ArticleRef, Jurisdiction, JurisdictionKind, PldCitation, ScmrCitation};
use misl_core::normalize::{CaseType, JudgeRoster};
use misl_core::store::{failure_reasons, CorpusStore, DocId, MetadataRecord, StoreError};

use crate::truth::{GroundTruth, MentionTally, TruthEntry};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("noise rate {name} = {value} outside 0..=1")]
    BadRate { name: &'static str, value: f64 },
    #[error("year range {min}..={max} is empty")]
    BadYears { min: i32, max: i32 },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Noise knobs, each a probability in `0..=1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseProfile {
    /// Per judge mention: misspell one letter of the name.
    pub judge_typo_rate: f64,
    /// Per title segment: write the long designator form instead of the
    /// abbreviation. Both forms resolve to the same case type.
    pub title_variant_rate: f64,
    /// Per document: omit the release date everywhere.
    pub date_missing_rate: f64,
}

impl NoiseProfile {
    pub fn none() -> Self {
        NoiseProfile::default()
    }

    pub fn validate(&self) -> Result<(), GenError> {
        for (name, value) in [
            ("judge_typo_rate", self.judge_typo_rate),
            ("title_variant_rate", self.title_variant_rate),
            ("date_missing_rate", self.date_missing_rate),
        ] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(GenError::BadRate { name, value });
            }
        }
        Ok(())
    }
}

/// Documents that are planted to drop out of the ingestion funnel. They get
/// index rows but no ground-truth entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FaultPlan {
    /// Index rows whose link resolves to nothing (fetch: dead link).
    pub dead_links: usize,
    /// Sources that convert to predominantly non-Latin text.
    pub non_latin: usize,
    /// Sources that convert to whitespace-only text.
    pub corrupt: usize,
}

impl FaultPlan {
    pub fn total(&self) -> usize {
        self.dead_links + self.non_latin + self.corrupt
    }
}

/// Full recipe for one synthetic corpus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusSpec {
    /// Documents that survive to converted text (ground-truth entries).
    pub docs: usize,
    pub seed: u64,
    pub noise: NoiseProfile,
    pub faults: FaultPlan,
    pub year_min: i32,
    pub year_max: i32,
}

impl CorpusSpec {
    pub fn new(docs: usize, seed: u64) -> Self {
        CorpusSpec {
            docs,
            seed,
            noise: NoiseProfile::none(),
            faults: FaultPlan::default(),
            year_min: 2007,
            year_max: 2014,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        self.noise.validate()?;
        if self.year_min > self.year_max {
            return Err(GenError::BadYears { min: self.year_min, max: self.year_max });
        }
        Ok(())
    }
}

struct Designator {
    short: &'static str,
    long: &'static str,
    case_type: CaseType,
}

// Unambiguous designators only: every form resolves to exactly one type, so
// planted types are exact. The ambiguous "C.P." form is exercised by unit
// tests, not generated corpora.
const DESIGNATORS: [Designator; 12] = [
    Designator { short: "Const.P.", long: "Constitution Petition", case_type: CaseType::Constitution },
    Designator { short: "C.M.A.", long: "Civil Miscellaneous Application", case_type: CaseType::CivilMiscApplication },
    Designator { short: "H.R.C.", long: "Human Rights Case", case_type: CaseType::HumanRights },
    Designator { short: "Civil Petition", long: "Civil Petition", case_type: CaseType::Civil },
    Designator { short: "C.A.", long: "Civil Appeal", case_type: CaseType::CivilAppeal },
    Designator { short: "C.R.P.", long: "Civil Review Petition", case_type: CaseType::CivilReview },
    Designator { short: "Crl.P.", long: "Criminal Petition", case_type: CaseType::Criminal },
    Designator { short: "Crl.A.", long: "Criminal Appeal", case_type: CaseType::CriminalAppeal },
    Designator { short: "Crl.M.A.", long: "Criminal Misc. Application", case_type: CaseType::CriminalMiscApplication },
    Designator { short: "Ref.", long: "Presidential Reference", case_type: CaseType::Reference },
    Designator { short: "J.P.", long: "Jail Petition", case_type: CaseType::JailPetition },
    Designator { short: "C.P.L.A.", long: "Civil Petition for Leave to Appeal", case_type: CaseType::LeaveToAppeal },
];

const SUO_DESIGNATOR: Designator =
    Designator { short: "S.M.C.", long: "Suo Moto Case", case_type: CaseType::SuoMoto };

const SUO_TOPICS: [&str; 4] = [
    "WATER SHORTAGE",
    "PRISON CONDITIONS",
    "EXAMINATION MALPRACTICE",
    "FLOOD RELIEF",
];

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
];

const DESCRIPTIONS: [&str; 4] = [
    "Against the order of the High Court",
    "Leave to appeal granted",
    "Direct petition",
    "On report of the Registrar",
];

// Digit-free filler sentences containing none of the citation keywords.
const FILLERS: [&str; 8] = [
    "The counsel for the petitioner was heard at length.",
    "Leave was granted to consider the contentions raised.",
    "The record reveals no infirmity in the impugned findings.",
    "Learned counsel relied upon the settled principles of law.",
    "The respondents filed their concise statements in time.",
    "After hearing both sides the matter was reserved.",
    "The office shall communicate this order to all concerned.",
    "Costs shall follow the event.",
];

const FAMOUS_ARTICLES: [ArticleRef; 8] = [
    ArticleRef { article: 184, suffix: None, clause: Some(3) },
    ArticleRef { article: 9, suffix: None, clause: None },
    ArticleRef { article: 14, suffix: None, clause: None },
    ArticleRef { article: 25, suffix: None, clause: None },
    ArticleRef { article: 199, suffix: None, clause: None },
    ArticleRef { article: 10, suffix: Some('A'), clause: None },
    ArticleRef { article: 2, suffix: Some('A'), clause: None },
    ArticleRef { article: 187, suffix: None, clause: Some(1) },
];

const COURT_CODES: [&str; 7] = ["SC", "FC", "Lah", "Kar", "Pesh", "Quetta", "AJK"];

// A couple of lines of predominantly Arabic-script text; converts fine but
// fails the Latin-script filter.
const NON_LATIN_BODY: &str = "\
\u{0639}\u{062f}\u{0627}\u{0644}\u{062a} \u{0645}\u{06cc}\u{06ba} \u{0633}\u{0645}\u{0627}\u{0639}\u{062a} \u{0645}\u{06a9}\u{0645}\u{0644} \u{06c1}\u{0648}\u{0626}\u{06cc}\n\
\u{0641}\u{06cc}\u{0635}\u{0644}\u{06c1} \u{0645}\u{062d}\u{0641}\u{0648}\u{0638} \u{06a9}\u{0631} \u{0644}\u{06cc}\u{0627} \u{06af}\u{06cc}\u{0627}\n";

const CORRUPT_BODY: &str = "  \n\t\n   \n";

enum Payload {
    Text { body: String, truth: TruthEntry },
    Missing,
    NonLatin,
    Corrupt,
}

struct GenDoc {
    link: String,
    title: String,
    date: Option<NaiveDate>,
    date_text: Option<String>,
    description: Option<String>,
    payload: Payload,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[u32]) -> usize {
    let total: u32 = weights.iter().sum();
    let mut roll = rng.random_range(0..total);
    for (i, w) in weights.iter().enumerate() {
        if roll < *w {
            return i;
        }
        roll -= w;
    }
    weights.len() - 1
}

/// First `k` positions of a partial Fisher-Yates shuffle of `0..n`.
fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let k = k.min(n);
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Misspell exactly one letter, preserving its case. The result is at
/// normalized edit distance 1, inside the canonicalizer's match threshold.
fn corrupt_name(rng: &mut ChaCha8Rng, name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let letter_positions: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_ascii_alphabetic())
        .map(|(i, _)| i)
        .collect();
    if letter_positions.is_empty() {
        return name.to_string();
    }
    let pos = letter_positions[rng.random_range(0..letter_positions.len())];
    let old = chars[pos];
    let replacement = loop {
        let c = (b'a' + rng.random_range(0..26u8)) as char;
        if c != old.to_ascii_lowercase() {
            break if old.is_ascii_uppercase() { c.to_ascii_uppercase() } else { c };
        }
    };
    let mut out = chars;
    out[pos] = replacement;
    out.into_iter().collect()
}

struct TitleDraw {
    title: String,
    types: BTreeSet<CaseType>,
    suo_moto: bool,
}

fn draw_title(rng: &mut ChaCha8Rng, spec: &CorpusSpec, year: i32) -> TitleDraw {
    let span = (spec.year_max - spec.year_min).max(1) as f64;
    let suo_rate = 0.05 + 0.15 * f64::from(year - spec.year_min) / span;
    let suo_moto = rng.random_bool(suo_rate);
    let number = rng.random_range(1..=1999u32);

    let segment = |rng: &mut ChaCha8Rng, d: &Designator, number: u32| {
        let form = if rng.random_bool(spec.noise.title_variant_rate) { d.long } else { d.short };
        if rng.random_bool(0.3) {
            format!("{form} No. {number} of {year}")
        } else {
            format!("{form} {number}/{year}")
        }
    };

    if suo_moto {
        if rng.random_bool(0.1) {
            // Designator-free variant: nothing in the title resolves to a
            // type, so the type set is {Unknown}; the suo-moto phrase alone
            // carries the flag.
            let topic = SUO_TOPICS[rng.random_range(0..SUO_TOPICS.len())];
            return TitleDraw {
                title: format!("SUO MOTO ACTION REGARDING {topic} No. {number} of {year}"),
                types: [CaseType::Unknown].into_iter().collect(),
                suo_moto: true,
            };
        }
        return TitleDraw {
            title: segment(rng, &SUO_DESIGNATOR, number),
            types: [CaseType::SuoMoto].into_iter().collect(),
            suo_moto: true,
        };
    }

    let picks = if rng.random_bool(0.2) { 2 } else { 1 };
    let chosen = sample_distinct(rng, DESIGNATORS.len(), picks);
    let mut parts = Vec::new();
    let mut types = BTreeSet::new();
    for (j, di) in chosen.iter().enumerate() {
        let d = &DESIGNATORS[*di];
        // Later segments reuse a nearby number so compound titles look real.
        let n = number.saturating_add(j as u32 * 7).min(1999);
        parts.push(segment(rng, d, n));
        types.insert(d.case_type);
    }
    TitleDraw { title: parts.join(" in "), types, suo_moto: false }
}

fn render_article(r: &ArticleRef) -> String {
    r.render()
}

fn article_sentences(rng: &mut ChaCha8Rng, occurrences: &[ArticleRef]) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut i = 0;
    while i < occurrences.len() {
        let remaining = occurrences.len() - i;
        let take = (1 + pick_weighted(rng, &[50, 30, 20])).min(remaining);
        let group: Vec<String> = occurrences[i..i + take].iter().map(render_article).collect();
        let sentence = match group.len() {
            1 => format!("The court examined Article {} of the Constitution.", group[0]),
            2 => format!("Articles {} and {} were pressed into service.", group[0], group[1]),
            _ => format!(
                "Articles {}, {} and {} govern the matter.",
                group[0], group[1], group[2]
            ),
        };
        sentences.push(sentence);
        i += take;
    }
    sentences
}

fn build_doc(spec: &CorpusSpec, roster: &JudgeRoster, pools: &Pools, index: usize) -> (GenDoc, MentionTally) {
    let rng = &mut rng_for(spec.seed, index as u64 + 1);
    let year = rng.random_range(spec.year_min..=spec.year_max);
    let drawn = draw_title(rng, spec, year);

    // Release date, withheld at the noise rate. Raw forms rotate through the
    // shapes normalization understands.
    let (date, date_text) = if rng.random_bool(spec.noise.date_missing_rate) {
        (None, None)
    } else {
        let month = rng.random_range(1..=12u32);
        let day = rng.random_range(1..=28u32);
        let d = NaiveDate::from_ymd_opt(year, month, day).expect("day <= 28 always valid");
        let raw = match rng.random_range(0..3u8) {
            0 => format!("{day:02}-{month:02}-{year}"),
            1 => format!("{day:02}/{month:02}/{year}"),
            _ => format!("{day} {} {year}", MONTHS[(month - 1) as usize]),
        };
        (Some(d), Some(raw))
    };

    let description = if rng.random_bool(0.6) {
        Some(DESCRIPTIONS[rng.random_range(0..DESCRIPTIONS.len())].to_string())
    } else {
        None
    };

    // Jurisdiction: none (unknown), one, or two kinds.
    let kind_pool = [
        JurisdictionKind::Original,
        JurisdictionKind::Appellate,
        JurisdictionKind::Review,
        JurisdictionKind::Advisory,
        JurisdictionKind::Contempt,
    ];
    let kind_weights = [30u32, 40, 15, 5, 10];
    let mut kinds = BTreeSet::new();
    match pick_weighted(rng, &[10, 65, 25]) {
        0 => {}
        n => {
            kinds.insert(kind_pool[pick_weighted(rng, &kind_weights)]);
            if n == 2 {
                loop {
                    let k = kind_pool[pick_weighted(rng, &kind_weights)];
                    if kinds.insert(k) {
                        break;
                    }
                }
            }
        }
    }
    let jurisdiction = Jurisdiction(kinds);

    // Bench: distinct roster judges, sizes weighted toward small benches.
    let sizes = [1usize, 2, 3, 4, 5, 6, 9, 10];
    let weights = [8u32, 28, 30, 15, 8, 5, 4, 2];
    let bench_size = sizes[pick_weighted(rng, &weights)].min(roster.len());
    let bench_idx = sample_distinct(rng, roster.len(), bench_size);
    let mut bench = Vec::new();
    let mut bench_lines = Vec::new();
    let mut tally = MentionTally::default();
    for (j, bi) in bench_idx.iter().enumerate() {
        let judge = &roster.judges()[*bi];
        bench.push(judge.id.clone());
        tally.judge_mentions += 1;
        let mut display = judge.canonical.clone();
        if rng.random_bool(spec.noise.judge_typo_rate) {
            display = corrupt_name(rng, &display);
            tally.corrupted_mentions += 1;
        }
        let mut line = match rng.random_range(0..3u8) {
            0 => format!("MR. JUSTICE {}", display.to_uppercase()),
            1 => format!("Mr. Justice {display}"),
            _ => format!("Justice {display}"),
        };
        if j == 0 && rng.random_bool(0.3) {
            line.push_str(", HCJ");
        }
        bench_lines.push(line);
    }

    // Article occurrences: famous picks repeat across the corpus, fresh ones
    // add tail diversity. Repeats within a document are deliberate.
    let n_articles = pick_weighted(rng, &[25, 30, 25, 12, 8]);
    let mut occurrences: Vec<ArticleRef> = Vec::new();
    for _ in 0..n_articles {
        let r = if rng.random_bool(0.7) {
            FAMOUS_ARTICLES[rng.random_range(0..FAMOUS_ARTICLES.len())]
        } else {
            ArticleRef {
                article: rng.random_range(1..=280u16),
                suffix: rng.random_bool(0.15).then(|| (b'A' + rng.random_range(0..5u8)) as char),
                clause: rng.random_bool(0.2).then(|| rng.random_range(1..=9u16)),
            }
        };
        occurrences.push(r);
        if rng.random_bool(0.25) {
            occurrences.push(r);
        }
    }

    let draw_pld = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.6) {
            pools.pld[rng.random_range(0..pools.pld.len())].clone()
        } else {
            PldCitation {
                year: rng.random_range(1947..=2015u16),
                court: COURT_CODES[pick_weighted(rng, &[40, 10, 20, 15, 8, 4, 3])].to_string(),
                number: rng.random_range(1..=1500u32),
            }
        }
    };
    let draw_scmr = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.6) {
            pools.scmr[rng.random_range(0..pools.scmr.len())]
        } else {
            ScmrCitation {
                year: rng.random_range(1971..=2015u16),
                number: rng.random_range(1..=2500u32),
            }
        }
    };
    let mut pld = BTreeSet::new();
    for _ in 0..pick_weighted(rng, &[35, 30, 20, 15]) {
        pld.insert(draw_pld(rng));
    }
    let mut scmr = BTreeSet::new();
    for _ in 0..pick_weighted(rng, &[35, 30, 20, 15]) {
        scmr.insert(draw_scmr(rng));
    }

    // Body sentences: citations and articles interleaved with fillers.
    let mut sentences = article_sentences(rng, &occurrences);
    for c in &pld {
        sentences.push(match rng.random_range(0..3u8) {
            0 => format!("Reliance is placed on {c}."),
            1 => format!("As held in {c}, the principle stands."),
            _ => format!("{c} was distinguished by learned counsel."),
        });
    }
    for c in &scmr {
        sentences.push(match rng.random_range(0..3u8) {
            0 => format!("Reliance is placed on {c}."),
            1 => format!("As held in {c}, the principle stands."),
            _ => format!("{c} was distinguished by learned counsel."),
        });
    }
    for _ in 0..rng.random_range(2..=4usize) {
        sentences.push(FILLERS[rng.random_range(0..FILLERS.len())].to_string());
    }
    // Fisher-Yates over the sentence order.
    for i in (1..sentences.len()).rev() {
        let j = rng.random_range(0..=i);
        sentences.swap(i, j);
    }

    let mut text = String::from("IN THE SUPREME COURT\n");
    if !jurisdiction.is_unknown() {
        let joined: Vec<&str> = jurisdiction.0.iter().map(|k| k.label()).collect();
        let _ = writeln!(text, "({} Jurisdiction)", joined.join("/"));
    }
    text.push('\n');
    text.push_str(if rng.random_bool(0.8) { "PRESENT:\n" } else { "PRESENT\n" });
    for line in &bench_lines {
        text.push_str(line);
        text.push('\n');
    }
    text.push('\n');
    let _ = writeln!(text, "{}\n", drawn.title);
    text.push_str(match pick_weighted(rng, &[80, 15, 5]) {
        0 => "JUDGMENT\n\n",
        1 => "ORDER\n\n",
        _ => "O R D E R\n\n",
    });
    for (i, s) in sentences.iter().enumerate() {
        text.push_str(s);
        if i + 1 < sentences.len() {
            text.push_str(if rng.random_bool(0.3) { "\n" } else { " " });
        }
    }
    text.push('\n');

    let link = format!("docs/case-{:04}.txt", index + 1);
    let truth = TruthEntry {
        id: DocId::new(misl_core::store::derive_doc_id(&link)),
        year: date.map(|_| year),
        types: drawn.types,
        suo_moto: drawn.suo_moto,
        jurisdiction,
        bench,
        articles: occurrences.iter().copied().collect(),
        pld,
        scmr,
    };
    (
        GenDoc {
            link,
            title: drawn.title,
            date,
            date_text,
            description,
            payload: Payload::Text { body: text, truth },
        },
        tally,
    )
}

fn build_fault_doc(spec: &CorpusSpec, index: usize, payload: Payload) -> GenDoc {
    let rng = &mut rng_for(spec.seed, index as u64 + 1);
    let year = rng.random_range(spec.year_min..=spec.year_max);
    let d = &DESIGNATORS[rng.random_range(0..DESIGNATORS.len())];
    let number = rng.random_range(1..=1999u32);
    let month = rng.random_range(1..=12u32);
    let day = rng.random_range(1..=28u32);
    GenDoc {
        link: format!("docs/case-{:04}.txt", index + 1),
        title: format!("{} {number}/{year}", d.short),
        date: NaiveDate::from_ymd_opt(year, month, day),
        date_text: Some(format!("{day:02}-{month:02}-{year}")),
        description: None,
        payload,
    }
}

struct Pools {
    pld: Vec<PldCitation>,
    scmr: Vec<ScmrCitation>,
}

fn build_pools(spec: &CorpusSpec) -> Pools {
    let rng = &mut rng_for(spec.seed, 0);
    let mut pld = Vec::new();
    while pld.len() < 6 {
        let c = PldCitation {
            year: rng.random_range(1947..=2015u16),
            court: COURT_CODES[pick_weighted(rng, &[40, 10, 20, 15, 8, 4, 3])].to_string(),
            number: rng.random_range(1..=1500u32),
        };
        if !pld.contains(&c) {
            pld.push(c);
        }
    }
    let mut scmr = Vec::new();
    while scmr.len() < 6 {
        let c = ScmrCitation {
            year: rng.random_range(1971..=2015u16),
            number: rng.random_range(1..=2500u32),
        };
        if !scmr.contains(&c) {
            scmr.push(c);
        }
    }
    Pools { pld, scmr }
}

fn build_documents(spec: &CorpusSpec) -> Result<(Vec<GenDoc>, GroundTruth), GenError> {
    spec.validate()?;
    let roster = JudgeRoster::builtin();
    let pools = build_pools(spec);
    let mut docs = Vec::with_capacity(spec.docs + spec.faults.total());
    let mut truth = GroundTruth::default();
    for i in 0..spec.docs {
        let (doc, tally) = build_doc(spec, roster, &pools, i);
        if let Payload::Text { truth: entry, .. } = &doc.payload {
            truth.entries.push(entry.clone());
        }
        truth.mentions.judge_mentions += tally.judge_mentions;
        truth.mentions.corrupted_mentions += tally.corrupted_mentions;
        docs.push(doc);
    }
    let mut next = spec.docs;
    for _ in 0..spec.faults.dead_links {
        docs.push(build_fault_doc(spec, next, Payload::Missing));
        next += 1;
    }
    for _ in 0..spec.faults.non_latin {
        docs.push(build_fault_doc(spec, next, Payload::NonLatin));
        next += 1;
    }
    for _ in 0..spec.faults.corrupt {
        docs.push(build_fault_doc(spec, next, Payload::Corrupt));
        next += 1;
    }
    Ok((docs, truth))
}

/// Generate a corpus directly into a fresh [`CorpusStore`] at `root`, as if
/// crawl, fetch and convert had already run. Returns the ground truth and
/// writes it to `<root>/truth.jsonl`.
pub fn generate_corpus(spec: &CorpusSpec, root: &Path) -> Result<GroundTruth, GenError> {
    let (docs, truth) = build_documents(spec)?;
    let store = CorpusStore::create(root)?;
    for doc in &docs {
        let id = store.add_record(MetadataRecord {
            link: doc.link.clone(),
            title: doc.title.clone(),
            release_date: doc.date,
            description: doc.description.clone(),
        })?;
        match &doc.payload {
            Payload::Text { body, .. } => {
                store.mark_fetched(&id)?;
                std::fs::write(store.raw_path(&id), body)?;
                store.attach_text(&id, body)?;
            }
            Payload::Missing => store.mark_dead_link(&id, "http 404")?,
            Payload::NonLatin => {
                store.mark_fetched(&id)?;
                std::fs::write(store.raw_path(&id), NON_LATIN_BODY)?;
                store.mark_conversion_failed(&id, failure_reasons::NON_LATIN_SCRIPT)?;
            }
            Payload::Corrupt => {
                store.mark_fetched(&id)?;
                std::fs::write(store.raw_path(&id), CORRUPT_BODY)?;
                store.mark_conversion_failed(&id, failure_reasons::CORRUPT_SOURCE)?;
            }
        }
    }
    truth.write_file(&root.join("truth.jsonl"))?;
    Ok(truth)
}

/// Generate a crawlable site under `dir`: an `index.html` table and the
/// document files, faults included (dead links get index rows but no file).
/// Returns the ground truth and writes it to `<dir>/truth.jsonl`.
pub fn generate_site(spec: &CorpusSpec, dir: &Path) -> Result<GroundTruth, GenError> {
    let (docs, truth) = build_documents(spec)?;
    std::fs::create_dir_all(dir.join("docs"))?;
    let mut html = String::from(
        "<html><body>\n<table id=\"judgments\">\n<tr><th>Case</th><th>Date</th><th>Description</th></tr>\n",
    );
    for doc in &docs {
        let _ = writeln!(
            html,
            "<tr><td><a href=\"{}\">{}</a></td><td>{}</td><td>{}</td></tr>",
            doc.link,
            doc.title,
            doc.date_text.as_deref().unwrap_or(""),
            doc.description.as_deref().unwrap_or(""),
        );
        let body = match &doc.payload {
            Payload::Text { body, .. } => body.as_str(),
            Payload::Missing => continue,
            Payload::NonLatin => NON_LATIN_BODY,
            Payload::Corrupt => CORRUPT_BODY,
        };
        std::fs::write(dir.join(&doc.link), body)?;
    }
    html.push_str("</table>\n</body></html>\n");
    std::fs::write(dir.join("index.html"), html)?;
    truth.write_file(&dir.join("truth.jsonl"))?;
    Ok(truth)
}
