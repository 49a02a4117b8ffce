//! Deterministic CSV emission.
//!
//! Every command writes through this one path so the on-disk format cannot
//! drift between subcommands: `#`-prefixed comment lines echoing the fully
//! resolved configuration (sorted by key), one header row, then data rows.
//! Floats are printed with [`format_f64`] at 17 significant digits, which
//! round-trips every finite `f64` exactly — rerunning a command must
//! reproduce the file byte for byte.

use crate::CliError;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// One table cell. Numbers are formatted the same way everywhere; `Text` is
/// for row labels such as `extrapolated`.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// 17 significant digits in scientific notation: enough to round-trip any
/// finite double, few enough to stay stable across platforms.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

#[derive(Debug)]
pub struct Table {
    comments: BTreeMap<String, String>,
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            comments: BTreeMap::new(),
            header: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Echo one resolved configuration entry. Entries are emitted sorted by
    /// key regardless of insertion order.
    pub fn echo(&mut self, key: &str, value: impl std::fmt::Display) {
        self.comments.insert(key.to_string(), value.to_string());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.comments {
            let _ = writeln!(out, "# {key} = {value}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let rendered: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", rendered.join(","));
        }
        out
    }

    /// Write the table to `path`. An empty table is a bug in the caller's
    /// experiment logic, not an IO condition, and is refused.
    pub fn write(&self, path: &str) -> Result<(), CliError> {
        if self.rows.is_empty() {
            return Err(CliError::Validation(
                "experiment produced no rows to write".to_string(),
            ));
        }
        std::fs::write(path, self.render()).map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_sorted_comments_then_header_then_rows() {
        let mut table = Table::new(&["level", "value", "label"]);
        table.echo("t", 1.5);
        table.echo("command", "demo");
        table.push(vec![
            Cell::Int(0),
            Cell::Num(0.5),
            Cell::Text("first".to_string()),
        ]);
        table.push(vec![Cell::Int(1), Cell::Num(-2.0), Cell::Empty]);
        let text = table.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command = demo");
        assert_eq!(lines[1], "# t = 1.5");
        assert_eq!(lines[2], "level,value,label");
        assert_eq!(lines[3], "0,5.0000000000000000e-1,first");
        assert_eq!(lines[4], "1,-2.0000000000000000e0,");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn float_format_round_trips_exactly() {
        for &value in &[
            0.1,
            -3.5e-12,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02214076e23,
            f64::MIN_POSITIVE,
        ] {
            let text = format_f64(value);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), value.to_bits(), "{text}");
        }
    }

    #[test]
    fn refuses_to_write_an_empty_table() {
        let table = Table::new(&["a"]);
        let err = table.write("/tmp/unused.csv").unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
    }
}
