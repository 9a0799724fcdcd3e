//! CSV input with per-column type inference.

use crate::error::{Error, Result};
use crate::raw::{Cell, Column, RawDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Class column name or 0-based index; the last column when `None`.
    pub class_column: Option<String>,
    pub missing_token: String,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            class_column: None,
            missing_token: "?".into(),
            delimiter: b',',
        }
    }
}

/// Parses a rectangular CSV table. A column is numeric when every
/// non-missing cell parses as a number, otherwise nominal with values in
/// order of first appearance. Non-finite spellings such as `inf` or `NaN`
/// do not count as numbers. The class column is always nominal.
pub fn parse_csv(text: &str, options: &CsvOptions) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(options.delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = Vec::new();
    let mut header: Option<Vec<String>> = None;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(i + 1, |p| p.line() as usize);
            match e.kind() {
                csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                    Error::parse(line, format!("expected {expected_len} fields, found {len}"))
                }
                _ => Error::parse(line, e.to_string()),
            }
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if options.has_header && header.is_none() {
            header = Some(fields);
        } else {
            records.push((line, fields));
        }
    }
    let width = match (&header, records.first()) {
        (Some(h), _) => h.len(),
        (None, Some((_, r))) => r.len(),
        (None, None) => return Err(Error::parse(1, "empty CSV input")),
    };
    if records.is_empty() {
        return Err(Error::parse(1, "CSV input has no data rows"));
    }
    let names: Vec<String> = header.unwrap_or_else(|| (1..=width).map(|i| format!("col{i}")).collect());

    let class_index = match &options.class_column {
        None => width - 1,
        Some(spec) => names
            .iter()
            .position(|n| n == spec)
            .or_else(|| spec.parse::<usize>().ok().filter(|&i| i < width))
            .ok_or_else(|| Error::Ingest(format!("no class column `{spec}`")))?,
    };

    let missing = |s: &str| s == options.missing_token;
    let mut columns = Vec::with_capacity(width);
    let mut cells = vec![Vec::with_capacity(records.len()); width];
    for c in 0..width {
        let numeric = c != class_index
            && records
                .iter()
                .all(|(_, r)| missing(&r[c]) || r[c].parse::<f64>().is_ok_and(f64::is_finite));
        if numeric {
            columns.push(Column::numeric(names[c].clone()));
            for (_, r) in &records {
                cells[c].push(if missing(&r[c]) {
                    Cell::Missing
                } else {
                    Cell::Numeric(r[c].parse().unwrap_or(f64::NAN))
                });
            }
        } else {
            let mut domain: Vec<String> = Vec::new();
            for (_, r) in &records {
                let v = &r[c];
                if missing(v) {
                    cells[c].push(Cell::Missing);
                    continue;
                }
                let idx = match domain.iter().position(|d| d == v) {
                    Some(i) => i,
                    None => {
                        domain.push(v.clone());
                        domain.len() - 1
                    }
                };
                cells[c].push(Cell::Nominal(idx));
            }
            columns.push(Column::nominal(names[c].clone(), domain));
        }
    }
    let rows = (0..records.len()).map(|j| cells.iter().map(|col| col[j]).collect()).collect();
    let raw = RawDataset {
        relation: "csv".into(),
        columns,
        rows,
        class_index,
    };
    raw.check_class()?;
    Ok(raw)
}
