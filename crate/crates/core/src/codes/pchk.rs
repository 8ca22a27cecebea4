//! The `.pchk` text format: a `PCHK n=<n> rows=<r>` header followed by one
//! parity-check row per line, each exactly `n` characters from `{0,1}`.

use std::io::{BufRead, Write};

use super::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};

/// Writes the parity-check rows in construction order.
pub fn write_pchk<W: Write>(code: &LinearCode, mut out: W) -> Result<()> {
    let h = code.parity_check();
    writeln!(out, "PCHK n={} rows={}", code.n(), h.rows())?;
    for row in h.row_iter() {
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn read_pchk<R: BufRead>(input: R) -> Result<LinearCode> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))??;
    let (n, rows) = parse_header(&header)?;
    let mut h = BitMatrix::empty(n);
    for r in 0..rows {
        let line_no = r + 2;
        let line = lines.next().ok_or_else(|| parse_err(line_no, "missing row"))??;
        if line.len() != n {
            return Err(parse_err(line_no, &format!("expected {n} symbols, found {}", line.len())));
        }
        let row: BitWord = line.parse().map_err(|_| parse_err(line_no, "row must contain only 0 and 1"))?;
        h.push_row(row)?;
    }
    if let Some(extra) = lines.next() {
        let extra = extra?;
        return Err(parse_err(rows + 2, &format!("unexpected trailing content {extra:?}")));
    }
    LinearCode::from_parity_check(h)
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || parse_err(1, &format!("expected `PCHK n=<n> rows=<r>`, found {line:?}"));
    let mut parts = line.split(' ');
    if parts.next() != Some("PCHK") {
        return Err(bad());
    }
    let n = parts.next().and_then(|p| p.strip_prefix("n=")).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
    let rows = parts.next().and_then(|p| p.strip_prefix("rows=")).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() || n == 0 {
        return Err(bad());
    }
    Ok((n, rows))
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}
