//! Index-page parsing and the crawl CSV interchange format.

use std::io;
use std::path::Path;

use scraper::{ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};

use super::AcquireError;

/// One row scraped from the judgment index page. Dates are kept verbatim
/// here; interpretation happens in normalization so that a bad date never
/// loses the row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub link: String,
    pub title: String,
    pub date: Option<String>,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexWarning {
    /// The selector matched nothing (or nothing with a link). Non-fatal:
    /// an empty index is a legitimate, if suspicious, crawl result.
    EmptyIndex,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn cell_text(cell: ElementRef) -> Option<String> {
    let text = collapse_ws(&cell.text().collect::<String>());
    if text.is_empty() {
        None
    } else {
        Some(text)
    }
}

/// Parse an index page into records. `row_selector` picks the repeating row
/// element (e.g. `table#judgments tr`). Within a row the first `a[href]`
/// supplies link and title; the two cells after the cell containing that
/// anchor supply date and description. Rows without a link (header rows,
/// spacers) are skipped.
pub fn parse_index_page(
    html: &str,
    row_selector: &str,
) -> Result<(Vec<IndexRecord>, Vec<IndexWarning>), AcquireError> {
    let selector = Selector::parse(row_selector).map_err(|e| AcquireError::BadSelector {
        selector: row_selector.to_string(),
        detail: e.to_string(),
    })?;
    let anchor = Selector::parse("a[href]").expect("static selector");
    let cell = Selector::parse("td, th").expect("static selector");

    let document = Html::parse_document(html);
    let mut records = Vec::new();
    for row in document.select(&selector) {
        let Some(a) = row.select(&anchor).next() else {
            continue;
        };
        let link = a.value().attr("href").unwrap_or_default().trim().to_string();
        if link.is_empty() {
            continue;
        }
        let title = collapse_ws(&a.text().collect::<String>());

        let cells: Vec<ElementRef> = row.select(&cell).collect();
        let anchor_cell = cells
            .iter()
            .position(|c| c.select(&anchor).next().map(|f| f.id()) == Some(a.id()));
        let (date, description) = match anchor_cell {
            Some(i) => (
                cells.get(i + 1).copied().and_then(cell_text),
                cells.get(i + 2).copied().and_then(cell_text),
            ),
            // List-shaped indexes have no cells; metadata stays empty.
            None => (None, None),
        };

        records.push(IndexRecord {
            link,
            title,
            date,
            description,
        });
    }

    let warnings = if records.is_empty() {
        vec![IndexWarning::EmptyIndex]
    } else {
        Vec::new()
    };
    Ok((records, warnings))
}

/// Resolve a possibly-relative index link against the index page location.
/// Absolute URLs pass through; http(s) bases join per URL semantics;
/// anything else is treated as a filesystem path relative to the index
/// file's directory.
pub fn resolve_link(base: &str, href: &str) -> String {
    let has_scheme = href
        .split_once("://")
        .map_or(false, |(scheme, _)| {
            !scheme.is_empty()
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        });
    if has_scheme {
        return href.to_string();
    }
    if base.starts_with("http://") || base.starts_with("https://") || base.starts_with("file://") {
        if let Ok(joined) = url::Url::parse(base).and_then(|b| b.join(href)) {
            return joined.to_string();
        }
    }
    Path::new(base)
        .parent()
        .unwrap_or_else(|| Path::new(""))
        .join(href)
        .to_string_lossy()
        .into_owned()
}

const CSV_HEADER: [&str; 4] = ["link", "title", "date", "description"];

/// Write crawl records as CSV with the fixed header
/// `link,title,date,description`. Missing fields serialize as empty cells.
pub fn write_index_csv<W: io::Write>(records: &[IndexRecord], writer: W) -> Result<(), AcquireError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER).map_err(csv_io)?;
    for r in records {
        w.write_record([
            r.link.as_str(),
            r.title.as_str(),
            r.date.as_deref().unwrap_or(""),
            r.description.as_deref().unwrap_or(""),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Read crawl records back. The header must match exactly and every row must
/// have exactly four fields; empty date/description cells become `None`.
pub fn read_index_csv<R: io::Read>(reader: R) -> Result<Vec<IndexRecord>, AcquireError> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = r.headers().map_err(csv_io)?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(AcquireError::CsvShape {
            row: 1,
            detail: format!("expected header {:?}", CSV_HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    for (i, row) in r.records().enumerate() {
        // Row numbering is 1-based and counts the header line.
        let row_no = i + 2;
        let row = row.map_err(csv_io)?;
        if row.len() != CSV_HEADER.len() {
            return Err(AcquireError::CsvShape {
                row: row_no,
                detail: format!("expected {} fields, got {}", CSV_HEADER.len(), row.len()),
            });
        }
        let field = |j: usize| row.get(j).unwrap_or("").to_string();
        let opt = |j: usize| {
            let v = field(j);
            if v.is_empty() {
                None
            } else {
                Some(v)
            }
        };
        if field(0).is_empty() {
            return Err(AcquireError::CsvShape {
                row: row_no,
                detail: "empty link".to_string(),
            });
        }
        records.push(IndexRecord {
            link: field(0),
            title: field(1),
            date: opt(2),
            description: opt(3),
        });
    }
    Ok(records)
}

fn csv_io(e: csv::Error) -> AcquireError {
    AcquireError::Io(io::Error::other(e))
}
