//! Case-type resolution. Titles name one or more proceedings ("Civil Appeal
//! 7/2013 and Criminal Appeal 3/2013"); each designator is resolved through a
//! curated lookup table of long forms and abbreviations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NormalizeError;

/// Closed set of case types. `Unknown` is reserved for titles where nothing
/// resolves; the lookup table may not map to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseType {
    Constitution,
    CivilMiscApplication,
    SuoMoto,
    HumanRights,
    Civil,
    CivilAppeal,
    CivilReview,
    Criminal,
    CriminalAppeal,
    CriminalMiscApplication,
    Reference,
    JailPetition,
    LeaveToAppeal,
    Unknown,
}

impl CaseType {
    /// Every named type, excluding `Unknown`.
    pub const NAMED: [CaseType; 13] = [
        CaseType::Constitution,
        CaseType::CivilMiscApplication,
        CaseType::SuoMoto,
        CaseType::HumanRights,
        CaseType::Civil,
        CaseType::CivilAppeal,
        CaseType::CivilReview,
        CaseType::Criminal,
        CaseType::CriminalAppeal,
        CaseType::CriminalMiscApplication,
        CaseType::Reference,
        CaseType::JailPetition,
        CaseType::LeaveToAppeal,
    ];

    /// Rendered label, used in reports and serialized facts.
    pub fn label(self) -> &'static str {
        match self {
            CaseType::Constitution => "Constitution",
            CaseType::CivilMiscApplication => "Civil Miscellaneous Application",
            CaseType::SuoMoto => "Suo Moto Case",
            CaseType::HumanRights => "Human Rights Case",
            CaseType::Civil => "Civil",
            CaseType::CivilAppeal => "Civil Appeal",
            CaseType::CivilReview => "Civil Review",
            CaseType::Criminal => "Criminal",
            CaseType::CriminalAppeal => "Criminal Appeal",
            CaseType::CriminalMiscApplication => "Criminal Miscellaneous Application",
            CaseType::Reference => "Reference",
            CaseType::JailPetition => "Jail Petition",
            CaseType::LeaveToAppeal => "Civil Petition for Leave to Appeal",
            CaseType::Unknown => "Unknown",
        }
    }

    pub fn from_label(label: &str) -> Option<CaseType> {
        CaseType::NAMED
            .into_iter()
            .chain([CaseType::Unknown])
            .find(|t| t.label() == label)
    }
}

impl fmt::Display for CaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for CaseType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for CaseType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CaseType::from_label(&s).ok_or_else(|| D::Error::custom(format!("unknown case type {s:?}")))
    }
}

/// A designator that matched more than one case type. Surfaced to the caller,
/// never resolved by guesswork.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub segment: String,
    pub candidates: BTreeSet<CaseType>,
}

/// Designator lookup table, keyed by normalized form.
#[derive(Clone, Debug)]
pub struct LookupTable {
    entries: BTreeMap<String, BTreeSet<CaseType>>,
}

/// Normalized key form: lowercase, every non-alphanumeric stripped, so
/// "Const. Petition", "const petition" and "CONST.PETITION" all collide.
pub fn normalize_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

impl LookupTable {
    /// Parse the `abbreviation,candidates` CSV, candidates `|`-separated.
    /// Keys must normalize uniquely and map to at least one named type.
    pub fn parse_csv(text: &str) -> Result<Self, NormalizeError> {
        let bad = |msg: String| NormalizeError::BadLookup(msg);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["abbreviation", "candidates"] {
            return Err(bad(format!("expected header abbreviation,candidates, got {headers:?}")));
        }
        let mut entries: BTreeMap<String, BTreeSet<CaseType>> = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != 2 {
                return Err(bad(format!("row with {} fields: {record:?}", record.len())));
            }
            let key = normalize_key(&record[0]);
            if key.is_empty() {
                return Err(bad(format!("abbreviation {:?} normalizes to nothing", &record[0])));
            }
            let mut candidates = BTreeSet::new();
            for label in record[1].split('|').map(str::trim).filter(|s| !s.is_empty()) {
                let t = CaseType::from_label(label)
                    .ok_or_else(|| bad(format!("unknown case type {label:?}")))?;
                if t == CaseType::Unknown {
                    return Err(bad(format!("{:?} maps to Unknown", &record[0])));
                }
                candidates.insert(t);
            }
            if candidates.is_empty() {
                return Err(bad(format!("{:?} has no candidates", &record[0])));
            }
            if entries.insert(key.clone(), candidates).is_some() {
                return Err(bad(format!("duplicate normalized key {key:?}")));
            }
        }
        Ok(LookupTable { entries })
    }

    /// Table shipped with the crate, covering the long forms and common
    /// abbreviations observed on the source site.
    pub fn builtin() -> &'static LookupTable {
        static TABLE: OnceLock<LookupTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            LookupTable::parse_csv(include_str!("../../data/case_type_lookup.csv"))
                .expect("builtin lookup table is valid")
        })
    }

    pub fn get(&self, normalized_key: &str) -> Option<&BTreeSet<CaseType>> {
        self.entries.get(normalized_key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Resolve every designator in a title. Unique matches land in the type set,
/// multi-candidate matches are returned as ambiguities, unmatched segments
/// contribute nothing. A title yielding neither types nor ambiguities is
/// `{Unknown}`.
pub fn resolve_case_types(
    title: &str,
    table: &LookupTable,
) -> (BTreeSet<CaseType>, Vec<Ambiguity>) {
    static SEPARATORS: OnceLock<regex::Regex> = OnceLock::new();
    let separators = SEPARATORS
        .get_or_init(|| regex::Regex::new(r"(?i)\s+in\s+|\s+and\s+|[,&;]").unwrap());

    let mut types = BTreeSet::new();
    let mut ambiguities: Vec<Ambiguity> = Vec::new();
    for segment in separators.split(title) {
        // The designator is whatever precedes the case number.
        let end = segment
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(segment.len());
        let designator = segment[..end].trim();
        let mut words: Vec<&str> = designator
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .collect();
        // "Civil Appeal No. 7" carries a number marker, not part of the type.
        while words
            .last()
            .is_some_and(|w| w.eq_ignore_ascii_case("no") || w.eq_ignore_ascii_case("nos"))
        {
            words.pop();
        }
        let key = normalize_key(&words.join(""));
        if key.is_empty() {
            continue;
        }
        match table.get(&key) {
            Some(set) if set.len() == 1 => {
                types.insert(*set.iter().next().unwrap());
            }
            Some(set) => {
                let amb = Ambiguity {
                    segment: designator.to_string(),
                    candidates: set.clone(),
                };
                if !ambiguities.contains(&amb) {
                    ambiguities.push(amb);
                }
            }
            None => {}
        }
    }
    if types.is_empty() && ambiguities.is_empty() {
        types.insert(CaseType::Unknown);
    }
    (types, ambiguities)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_parses_and_covers_every_named_type() {
        let table = LookupTable::builtin();
        assert!(table.len() >= CaseType::NAMED.len());
        for t in CaseType::NAMED {
            let key = normalize_key(t.label());
            assert_eq!(
                table.get(&key).map(|s| (s.len(), *s.iter().next().unwrap())),
                Some((1, t)),
                "label {:?} must resolve to itself",
                t.label()
            );
        }
    }

    #[test]
    fn long_forms_and_abbreviations_resolve() {
        let table = LookupTable::builtin();
        let (types, ambs) = resolve_case_types("Const. Petition 12 of 2011", table);
        assert_eq!(types.into_iter().collect::<Vec<_>>(), [CaseType::Constitution]);
        assert!(ambs.is_empty());

        let (types, _) = resolve_case_types("Crl.A. 191/2009", table);
        assert_eq!(types.into_iter().collect::<Vec<_>>(), [CaseType::CriminalAppeal]);

        let (types, _) = resolve_case_types("Civil Appeal No. 7 of 2013", table);
        assert_eq!(types.into_iter().collect::<Vec<_>>(), [CaseType::CivilAppeal]);
    }

    #[test]
    fn multi_type_titles_collect_every_designator() {
        let table = LookupTable::builtin();
        let (types, ambs) =
            resolve_case_types("C.M.A. 120/2010 in Constitution Petition 12/2009", table);
        assert_eq!(
            types.into_iter().collect::<Vec<_>>(),
            [CaseType::Constitution, CaseType::CivilMiscApplication]
        );
        assert!(ambs.is_empty());
    }

    #[test]
    fn ambiguous_designator_is_surfaced_not_guessed() {
        let table = LookupTable::builtin();
        let (types, ambs) = resolve_case_types("c.p. 9/2008", table);
        assert!(types.is_empty(), "ambiguity must not contribute a type");
        assert_eq!(ambs.len(), 1);
        assert_eq!(ambs[0].segment, "c.p.");
        assert_eq!(
            ambs[0].candidates.iter().copied().collect::<Vec<_>>(),
            [CaseType::Civil, CaseType::Criminal, CaseType::Constitution]
                .into_iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn unresolvable_titles_are_unknown() {
        let table = LookupTable::builtin();
        for title in ["", "   ", "Federation of Pakistan versus Ali", "12/2011"] {
            let (types, ambs) = resolve_case_types(title, table);
            assert_eq!(types.into_iter().collect::<Vec<_>>(), [CaseType::Unknown], "{title:?}");
            assert!(ambs.is_empty());
        }
    }

    #[test]
    fn resolution_is_case_and_punctuation_insensitive() {
        let table = LookupTable::builtin();
        for title in [
            "CONSTITUTION PETITION 1/2010",
            "constitution petition 1/2010",
            "Const.Petition 1/2010",
        ] {
            let (types, _) = resolve_case_types(title, table);
            assert_eq!(types.into_iter().collect::<Vec<_>>(), [CaseType::Constitution], "{title:?}");
        }
    }

    #[test]
    fn lookup_rejects_unknown_and_empty_candidates() {
        assert!(LookupTable::parse_csv("abbreviation,candidates\nX.,Unknown\n").is_err());
        assert!(LookupTable::parse_csv("abbreviation,candidates\nX.,\n").is_err());
        assert!(LookupTable::parse_csv("abbreviation,candidates\nX.,Nonsense\n").is_err());
        assert!(
            LookupTable::parse_csv("abbreviation,candidates\nC.A.,Civil Appeal\nC. A.,Civil\n")
                .is_err(),
            "keys colliding after normalization must be rejected"
        );
    }

    #[test]
    fn case_type_serde_round_trips_labels() {
        for t in CaseType::NAMED.into_iter().chain([CaseType::Unknown]) {
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("{:?}", t.label()));
            assert_eq!(serde_json::from_str::<CaseType>(&json).unwrap(), t);
        }
    }
}
