use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Column, ColumnData, Table};
use crate::error::{MqlError, Result};

/// `true` for the tokens read as a missing cell: empty, `-`, `NA`, `NaN`.
pub fn is_missing_token(token: &str) -> bool {
    let t = token.trim();
    t.is_empty() || t == "-" || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

fn parse_number(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads a headed CSV file. The table is named after the file stem.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| MqlError::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, &name)
}

/// Parses CSV from any reader. Column types are inferred all-or-nothing: a
/// column is numeric iff every non-missing token parses as a finite number.
pub fn read_csv<R: Read>(reader: R, name: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(MqlError::Format("missing header row".into()));
    }
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(MqlError::Format(format!("duplicate header `{h}`")));
        }
    }

    let mut raw: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(if is_missing_token(field) {
                None
            } else {
                Some(field.to_string())
            });
        }
    }

    let columns = headers
        .into_iter()
        .zip(raw)
        .map(|(h, cells)| infer_column(h, cells))
        .collect();
    Table::new(name, columns)
}

fn infer_column(name: String, cells: Vec<Option<String>>) -> Column {
    let parsed: Option<Vec<Option<f64>>> = cells
        .iter()
        .map(|c| match c {
            None => Some(None),
            Some(tok) => parse_number(tok).map(Some),
        })
        .collect();
    match parsed {
        Some(values) => Column {
            name,
            data: ColumnData::Numeric(values),
        },
        None => Column::categorical(name, cells),
    }
}

fn csv_error(e: csv::Error) -> MqlError {
    MqlError::Format(e.to_string())
}

/// Writes a header row plus one record per row; `\n` terminated, missing as empty.
pub fn write_csv<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(table.column_names()).map_err(csv_error)?;
    for row in 0..table.row_count() {
        w.write_record(table.row_tokens(row)).map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| MqlError::Format(format!("flush failed: {e}")))?;
    Ok(())
}

pub fn write_csv_file(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| MqlError::io(path, e))?;
    write_csv(table, std::io::BufWriter::new(file))
}
