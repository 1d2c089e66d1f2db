//! On-disk frequency tables.
//!
//! ```text
//! # optional metadata lines, each starting with '#'
//! order=2 total=17 label=incel
//! femoids are 5
//! are the 2
//! ```
//!
//! Fields are separated by single tabs.
//!
//! Rows are sorted by descending count and then lexicographically, so saving
//! the same table always produces the same bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rank::table::{ngram_order, FrequencyTable};

pub fn write_frequency_table<W: Write>(
    table: &FrequencyTable,
    mut out: W,
    metadata: &[String],
) -> Result<()> {
    if table.label().contains(['\t', '\n', '\r']) {
        return Err(Error::invalid(
            "table label may not contain tabs or newlines",
        ));
    }
    for m in metadata {
        writeln!(out, "# {m}")?;
    }
    writeln!(
        out,
        "order={}\ttotal={}\tlabel={}",
        table.order(),
        table.total(),
        table.label()
    )?;
    for (k, c) in table.sorted() {
        if k.contains(['\t', '\n', '\r']) {
            return Err(Error::invalid(format!(
                "n-gram {k:?} contains a tab or newline"
            )));
        }
        writeln!(out, "{k}\t{c}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn persist_frequency_table(
    table: &FrequencyTable,
    path: &Path,
    metadata: &[String],
) -> Result<()> {
    let f = File::create(path).map_err(Error::at_path(path))?;
    write_frequency_table(table, BufWriter::new(f), metadata)
}

fn header_field<'a>(field: Option<&'a str>, key: &str) -> Option<&'a str> {
    field?.strip_prefix(key)?.strip_prefix('=')
}

/// Reads a table; `origin` names the source in error messages.
pub fn read_frequency_table<R: BufRead>(reader: R, origin: &str) -> Result<FrequencyTable> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_owned(),
        line,
        message,
    };
    let mut table: Option<(FrequencyTable, u64)> = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let Some((table, _)) = table.as_mut() else {
            if line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let order = header_field(fields.next(), "order")
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&o| o >= 1);
            let total = header_field(fields.next(), "total").and_then(|v| v.parse::<u64>().ok());
            let label = header_field(fields.next(), "label");
            match (order, total, label, fields.next()) {
                (Some(o), Some(t), Some(l), None) => {
                    table = Some((FrequencyTable::new(o, l), t));
                }
                _ => {
                    return Err(err(
                        line_no,
                        "expected header `order=<n>\\ttotal=<count>\\tlabel=<label>`".into(),
                    ))
                }
            }
            continue;
        };
        if line.is_empty() {
            continue;
        }
        let Some((gram, count)) = line.rsplit_once('\t') else {
            return Err(err(line_no, "expected `ngram<TAB>count`".into()));
        };
        let count: u64 = count
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| err(line_no, format!("invalid count {count:?}")))?;
        if ngram_order(gram) != Some(table.order()) {
            return Err(err(
                line_no,
                format!("{gram:?} does not match header order {}", table.order()),
            ));
        }
        if table.contains(gram) {
            return Err(err(line_no, format!("duplicate n-gram {gram:?}")));
        }
        table.add(gram, count);
    }
    let (table, declared) = table.ok_or_else(|| err(0, "missing header line".into()))?;
    if table.total() != declared {
        return Err(err(
            0,
            format!("header total {declared} != sum of counts {}", table.total()),
        ));
    }
    Ok(table)
}

pub fn load_frequency_table(path: &Path) -> Result<FrequencyTable> {
    let f = File::open(path).map_err(Error::at_path(path))?;
    read_frequency_table(BufReader::new(f), &path.display().to_string())
}
