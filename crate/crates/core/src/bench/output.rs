//! Deterministic CSV: header row, `{:.16e}` numbers (17 significant
//! digits), `\n` line endings, optional `# ...` trailer lines.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Comment lines written after the data, without the leading `# `.
    pub trailer: Vec<String>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_table<W: Write>(out: W, table: &Table) -> Result<()> {
    let width = table.header.len();
    if let Some(bad) = table.rows.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch(format!(
            "CSV row has {} fields, header has {width}",
            bad.len()
        )));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_value(x)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    let mut out = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    for line in &table.trailer {
        writeln!(out, "# {line}").map_err(csv::Error::from)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_csv(table: &Table, path: Option<&Path>) -> Result<()> {
    match path {
        None => write_table(io::stdout().lock(), table),
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.to_path_buf(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            write_table(BufWriter::new(file), table).map_err(|e| match e {
                Error::Csv(c) if c.is_io_error() => match c.into_kind() {
                    csv::ErrorKind::Io(source) => io_err(source),
                    _ => unreachable!(),
                },
                e => e,
            })
        }
    }
}

/// Reads a table written by [`write_table`]; trailer lines are returned
/// without their `# ` prefix.
pub fn read_table<R: io::Read>(input: R) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Validation(format!("non-numeric CSV field '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table {
        header,
        rows,
        trailer: Vec::new(),
    })
}
