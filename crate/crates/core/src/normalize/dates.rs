//! Release-date parsing for the formats the source site uses, plus curated
//! per-document date overrides. Dates are day-first; years outside 1947-2100
//! are treated as unparseable rather than silently accepted.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use chrono::{Datelike, NaiveDate};
use regex::Regex;

use super::NormalizeError;
use crate::store::{DocId, MetadataRecord};

const YEAR_MIN: i32 = 1947;
const YEAR_MAX: i32 = 2100;

fn month_from_token(token: &str) -> Option<u32> {
    const MONTHS: [&str; 12] = [
        "january", "february", "march", "april", "may", "june", "july", "august", "september",
        "october", "november", "december",
    ];
    let token = token.to_lowercase();
    if token.len() < 3 {
        return None;
    }
    MONTHS
        .iter()
        .position(|m| m.starts_with(&token))
        .map(|i| i as u32 + 1)
}

fn build(day: u32, month: u32, year: i32) -> Option<NaiveDate> {
    if !(YEAR_MIN..=YEAR_MAX).contains(&year) {
        return None;
    }
    NaiveDate::from_ymd_opt(year, month, day)
}

/// Parse a raw release date. Accepted formats, all day-first:
/// `14-08-2014`, `14/08/2014`, `14th August 2014` (ordinal optional, month
/// possibly abbreviated to three or more letters), `August 14, 2014`.
/// Anything else, including calendar-invalid or out-of-range dates, is `None`.
pub fn parse_release_date(raw: &str) -> Option<NaiveDate> {
    static NUMERIC: OnceLock<Regex> = OnceLock::new();
    static DAY_FIRST: OnceLock<Regex> = OnceLock::new();
    static MONTH_FIRST: OnceLock<Regex> = OnceLock::new();
    let numeric = NUMERIC.get_or_init(|| Regex::new(r"^(\d{1,2})[-/](\d{1,2})[-/](\d{4})$").unwrap());
    let day_first = DAY_FIRST.get_or_init(|| {
        Regex::new(r"^(?i)(\d{1,2})(?:st|nd|rd|th)?\s+([A-Za-z]+),?\s+(\d{4})$").unwrap()
    });
    let month_first = MONTH_FIRST.get_or_init(|| {
        Regex::new(r"^(?i)([A-Za-z]+)\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})$").unwrap()
    });

    let t = raw.trim();
    if let Some(c) = numeric.captures(t) {
        return build(c[1].parse().ok()?, c[2].parse().ok()?, c[3].parse().ok()?);
    }
    if let Some(c) = day_first.captures(t) {
        return build(c[1].parse().ok()?, month_from_token(&c[2])?, c[3].parse().ok()?);
    }
    if let Some(c) = month_first.captures(t) {
        return build(c[2].parse().ok()?, month_from_token(&c[1])?, c[3].parse().ok()?);
    }
    None
}

/// Load the `docid,date` override CSV. Dates are ISO-8601 and validated here,
/// so an override file can never inject an invalid date into a corpus.
pub fn load_overrides(text: &str) -> Result<BTreeMap<String, NaiveDate>, NormalizeError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| NormalizeError::InvalidOverride { line: 1, detail: e.to_string() })?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["docid", "date"] {
        return Err(NormalizeError::InvalidOverride {
            line: 1,
            detail: format!("expected header docid,date, got {headers:?}"),
        });
    }
    let mut overrides = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| NormalizeError::InvalidOverride {
            line: e.position().map_or(0, |p| p.line() as usize),
            detail: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |detail: String| NormalizeError::InvalidOverride { line, detail };
        if record.len() != 2 {
            return Err(err(format!("row with {} fields", record.len())));
        }
        let docid = record[0].trim().to_string();
        if docid.is_empty() {
            return Err(err("empty docid".to_string()));
        }
        let date = NaiveDate::parse_from_str(record[1].trim(), "%Y-%m-%d")
            .map_err(|e| err(format!("bad date {:?}: {e}", &record[1])))?;
        if !(YEAR_MIN..=YEAR_MAX).contains(&date.year()) {
            return Err(err(format!("date {date} outside {YEAR_MIN}..{YEAR_MAX}")));
        }
        if overrides.insert(docid.clone(), date).is_some() {
            return Err(err(format!("duplicate docid {docid:?}")));
        }
    }
    Ok(overrides)
}

/// Apply a date override to one record, if present. Total: records without an
/// override pass through unchanged.
pub fn apply_overrides(
    id: &DocId,
    mut record: MetadataRecord,
    overrides: &BTreeMap<String, NaiveDate>,
) -> MetadataRecord {
    if let Some(date) = overrides.get(id.as_str()) {
        record.release_date = Some(*date);
    }
    record
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn accepted_formats_parse_day_first() {
        let expected = Some(d(2014, 8, 14));
        assert_eq!(parse_release_date("14-08-2014"), expected);
        assert_eq!(parse_release_date("14/08/2014"), expected);
        assert_eq!(parse_release_date("14th August 2014"), expected);
        assert_eq!(parse_release_date("14 August 2014"), expected);
        assert_eq!(parse_release_date("14 Aug 2014"), expected);
        assert_eq!(parse_release_date("August 14, 2014"), expected);
        assert_eq!(parse_release_date("  14-08-2014  "), expected);
        assert_eq!(parse_release_date("1-4-2010"), Some(d(2010, 4, 1)));
    }

    #[test]
    fn garbage_and_invalid_dates_are_none() {
        assert_eq!(parse_release_date(""), None);
        assert_eq!(parse_release_date("n/a"), None);
        assert_eq!(parse_release_date("31-02-2010"), None);
        assert_eq!(parse_release_date("14-13-2010"), None);
        assert_eq!(parse_release_date("2014-08-14"), None);
        assert_eq!(parse_release_date("14 Janx 2014"), None);
        assert_eq!(parse_release_date("14 Ju 2014"), None);
    }

    #[test]
    fn years_outside_range_are_none() {
        assert_eq!(parse_release_date("01-01-1946"), None);
        assert_eq!(parse_release_date("01-01-2101"), None);
        assert_eq!(parse_release_date("01-01-1947"), Some(d(1947, 1, 1)));
    }

    #[test]
    fn overrides_load_and_apply() {
        let overrides = load_overrides("docid,date\nx,2010-05-10\ny,2011-01-02\n").unwrap();
        assert_eq!(overrides.len(), 2);
        let rec = MetadataRecord {
            link: "https://c.example/x.pdf".into(),
            title: "t".into(),
            release_date: None,
            description: None,
        };
        let out = apply_overrides(&DocId::from("x"), rec.clone(), &overrides);
        assert_eq!(out.release_date, Some(d(2010, 5, 10)));
        let untouched = apply_overrides(&DocId::from("z"), rec, &overrides);
        assert_eq!(untouched.release_date, None);
    }

    #[test]
    fn invalid_overrides_are_rejected_at_load() {
        for bad in [
            "docid,date\nx,1846-03-01\n",
            "docid,date\nx,2010-13-01\n",
            "docid,date\nx,10-05-2010\n",
            "docid,date\n,2010-05-10\n",
            "docid,date\nx,2010-05-10\nx,2011-05-10\n",
            "id,date\nx,2010-05-10\n",
        ] {
            assert!(
                matches!(load_overrides(bad), Err(NormalizeError::InvalidOverride { .. })),
                "{bad:?}"
            );
        }
    }
}
