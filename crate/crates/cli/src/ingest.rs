use std::io::{Read, Write};

use crate::{CliError, Result};

/// What to do with missing values (`NA`, `N/A`, `NaN`, `null`, or empty
/// fields) in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaPolicy {
    /// Skip the rows and re-index the remaining ones; callers should surface
    /// the dropped line numbers, since positions are the changepoint
    /// coordinate.
    Drop,
    /// Refuse the file.
    Fail,
}

/// Result of reading a CSV input: the series plus enough bookkeeping to warn
/// about anything that changed the row indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub values: Vec<f64>,
    /// 1-based file line numbers of rows dropped under [`NaPolicy::Drop`].
    pub dropped_lines: Vec<u64>,
    /// Zero-based index of the column that was read.
    pub column_index: usize,
    /// Header name of that column, when the file had a header row.
    pub column_name: Option<String>,
}

fn is_missing(field: &str) -> bool {
    let t = field.trim();
    t.is_empty()
        || t.eq_ignore_ascii_case("na")
        || t.eq_ignore_ascii_case("n/a")
        || t.eq_ignore_ascii_case("nan")
        || t.eq_ignore_ascii_case("null")
}

fn parse_value(field: &str) -> Option<f64> {
    let v: f64 = field.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn list_lines(lines: &[u64]) -> String {
    const SHOW: usize = 8;
    let shown: Vec<String> = lines.iter().take(SHOW).map(|l| l.to_string()).collect();
    if lines.len() > SHOW {
        format!("{} and {} more", shown.join(", "), lines.len() - SHOW)
    } else {
        shown.join(", ")
    }
}

/// Read one numeric column from CSV text.
///
/// The column is picked by `column`: a 0-based index, a header name, or
/// `None` for single-column files. A header row is detected by the first
/// row's selected field failing to parse as a number; selecting by name
/// requires one.
pub fn ingest_csv<R: Read>(reader: R, column: Option<&str>, na: NaPolicy) -> Result<Ingested> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut records: Vec<(u64, csv::StringRecord)> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| CliError::Csv(format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(CliError::Csv("input has no rows".into()));
    }

    // resolve the column and decide whether the first row is a header
    let first = &records[0].1;
    let (index, name, has_header) = match column {
        Some(spec) => {
            if let Ok(idx) = spec.parse::<usize>() {
                if idx >= first.len() {
                    return Err(CliError::Csv(format!(
                        "column index {idx} out of range; the first row has {} fields",
                        first.len()
                    )));
                }
                let header = first
                    .get(idx)
                    .is_some_and(|f| !is_missing(f) && parse_value(f).is_none());
                let name = header.then(|| first.get(idx).unwrap_or("").trim().to_string());
                (idx, name, header)
            } else {
                let idx = first
                    .iter()
                    .position(|f| f.trim() == spec)
                    .ok_or_else(|| {
                        CliError::Csv(format!(
                            "no column named {spec:?} in the header row {:?}",
                            first.iter().map(str::trim).collect::<Vec<_>>()
                        ))
                    })?;
                (idx, Some(spec.to_string()), true)
            }
        }
        None => {
            if first.len() != 1 {
                return Err(CliError::Csv(format!(
                    "input has {} columns; pass --column <name or index>",
                    first.len()
                )));
            }
            let f = first.get(0).unwrap_or("");
            let header = !is_missing(f) && parse_value(f).is_none();
            let name = header.then(|| f.trim().to_string());
            (0, name, header)
        }
    };

    let mut values = Vec::with_capacity(records.len());
    let mut dropped = Vec::new();
    let mut bad = Vec::new();
    for (line, rec) in records.iter().skip(usize::from(has_header)) {
        let Some(field) = rec.get(index) else {
            bad.push(*line);
            continue;
        };
        if is_missing(field) {
            match na {
                NaPolicy::Drop => dropped.push(*line),
                NaPolicy::Fail => {
                    return Err(CliError::Csv(format!(
                        "missing value at line {line}; rerun with --na drop to skip such rows"
                    )))
                }
            }
            continue;
        }
        match parse_value(field) {
            Some(v) => values.push(v),
            None => bad.push(*line),
        }
    }
    if !bad.is_empty() {
        return Err(CliError::Csv(format!(
            "unparseable numeric values at lines {}",
            list_lines(&bad)
        )));
    }
    if values.len() < 2 {
        return Err(CliError::Csv(format!(
            "need at least 2 usable rows, got {}",
            values.len()
        )));
    }
    Ok(Ingested { values, dropped_lines: dropped, column_index: index, column_name: name })
}

/// Write values as a single-column CSV with a `value` header, one row per
/// observation, formatted so that re-ingesting reproduces every bit.
pub fn write_values_csv<W: Write>(mut writer: W, values: &[f64]) -> Result<()> {
    let io = |e: std::io::Error| CliError::Io(format!("writing values: {e}"));
    writeln!(writer, "value").map_err(io)?;
    for v in values {
        writeln!(writer, "{v}").map_err(io)?;
    }
    Ok(())
}
