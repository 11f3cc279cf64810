//! CSV reports: header row, comma separator, floats as `{:.16e}` (17 significant digits, so
//! every `f64` round-trips).

use std::fmt::Write as _;

use crate::error::{MhdError, Result};

/// Columns of `energy.csv`, matching [`crate::solver::energy::History::csv_rows`].
pub const ENERGY_COLUMNS: [&str; 9] = [
    "t",
    "plasma_h1tan",
    "vacuum_h1",
    "trace_h12",
    "front_h1",
    "boundary_form",
    "div_h",
    "div_frakh",
    "div_frake",
];

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows; every row must have as many cells as the header.
pub fn to_csv<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len(), "row width must match the header");
        let cells: Vec<&str> = row.iter().map(AsRef::as_ref).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// All-float table.
pub fn float_table<const N: usize>(header: &[&str; N], rows: &[[f64; N]]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Header and rows of a CSV produced by this module. Cells are not quoted.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| MhdError::Io("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(MhdError::Io(format!("CSV row {} has {} cells, header has {}", i + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Values of one named column parsed as floats.
pub fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Result<Vec<f64>> {
    let idx = header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| MhdError::Io(format!("CSV has no column {name}")))?;
    rows.iter()
        .map(|r| r[idx].parse().map_err(|_| MhdError::Io(format!("column {name}: cannot parse {:?}", r[idx]))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let vals = [0.1_f64, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0];
        let text = float_table(&["a", "b", "c", "d", "e"], &[vals]);
        let (h, rows) = parse_csv(&text).unwrap();
        for (i, name) in h.iter().enumerate() {
            assert_eq!(column(&h, &rows, name).unwrap()[0].to_bits(), vals[i].to_bits());
        }
        assert_eq!(float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(parse_csv("a,b\n1,2\n3\n").is_err());
    }
}
