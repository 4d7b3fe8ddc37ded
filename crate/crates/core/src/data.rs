//! Bundled data tables and the small CSV reader shared by the loaders.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const ISO226_2003_CSV: &str = include_str!("../data/iso226_2003.csv");
pub const ISO226_2003_SHA256: &str =
    "70adaf437c302ab1c047570da3bede171d608cb1a93b22928ea3b19cb6318cd7";

pub const DRIVEN_PROFILE_CSV: &str = include_str!("../data/driven_profile.csv");

pub const SYNTHETIC_MONITORS_CSV: &str = include_str!("../data/near_field_synthetic36.csv");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub(crate) fn verify_checksum(name: &'static str, text: &str, expected: &str) -> Result<()> {
    if sha256_hex(text.as_bytes()) == expected {
        Ok(())
    } else {
        Err(Error::Checksum { name })
    }
}

/// One data row with the 1-based line number it came from.
pub(crate) struct Row {
    pub line: usize,
    pub fields: Vec<String>,
}

/// Reads comma-separated text with `#` comments and a header row. The
/// header must match `columns` exactly (after trimming).
pub(crate) fn read_rows(
    source_name: &str,
    reader: impl std::io::Read,
    columns: &[&str],
) -> Result<Vec<Row>> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_err(e.position().map_or(1, |p| p.line() as usize), e.to_string()))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(parse_err(1, "empty input".into()));
    }
    let found: Vec<&str> = header.iter().collect();
    if found != columns {
        return Err(parse_err(
            header.position().map_or(1, |p| p.line() as usize),
            format!("expected header '{}', found '{}'", columns.join(","), found.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != columns.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", columns.len(), record.len()),
            ));
        }
        rows.push(Row {
            line,
            fields: record.iter().map(str::to_string).collect(),
        });
    }
    Ok(rows)
}

pub(crate) fn parse_f64(source_name: &str, row: &Row, col: usize, what: &str) -> Result<f64> {
    let text = &row.fields[col];
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            source_name: source_name.to_string(),
            line: row.line,
            reason: format!("{what} '{text}' is not a finite number"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elc_table_checksum_is_pinned() {
        verify_checksum("iso226", ISO226_2003_CSV, ISO226_2003_SHA256).unwrap();
        assert!(verify_checksum("iso226", "tampered", ISO226_2003_SHA256).is_err());
    }

    #[test]
    fn reports_line_numbers() {
        let text = "a,b\n1,2\n3\n";
        let err = read_rows("t", text.as_bytes(), &["a", "b"]).err().unwrap();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let err = read_rows("t", "x,y\n".as_bytes(), &["a", "b"]).err().unwrap();
        assert!(err.to_string().contains("expected header"));
        assert!(read_rows("t", "".as_bytes(), &["a", "b"]).is_err());
    }
}
