//! CSV tables, gnuplot scripts and input digests.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::Result;

/// A numeric table written with fixed formatting so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                match c {
                    Cell::Num(v) => write!(s, "{v:.16e}").unwrap(),
                    Cell::Int(v) => write!(s, "{v}").unwrap(),
                    Cell::Text(v) => s.push_str(v),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses a table written by [`Table::to_csv`]; numeric-looking fields become numbers.
    pub fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let columns = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(',')
                    .map(|f| {
                        if let Ok(i) = f.parse::<i64>() {
                            Cell::Int(i)
                        } else if let Ok(v) = f.parse::<f64>() {
                            Cell::Num(v)
                        } else {
                            Cell::Text(f.to_string())
                        }
                    })
                    .collect()
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(v) => *v,
                    Cell::Int(v) => *v as f64,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

/// Log-log plot of `y` against `x` for each listed CSV.
pub fn gnuplot_loglog(title: &str, plots: &[(&str, usize, usize, &str)]) -> String {
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key left top").unwrap();
    writeln!(s, "set logscale xy").unwrap();
    writeln!(s, "set title '{title}'").unwrap();
    let parts: Vec<String> = plots
        .iter()
        .map(|(file, x, y, label)| format!("'{file}' every ::1 using {x}:{y} with linespoints title '{label}'"))
        .collect();
    writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
    s
}

/// Linear-axis variant of [`gnuplot_loglog`]; `logy` switches the y axis to log scale.
pub fn gnuplot_lines(title: &str, logy: bool, plots: &[(&str, usize, usize, &str)]) -> String {
    let s = gnuplot_loglog(title, plots);
    let axis = if logy { "set logscale y" } else { "unset logscale" };
    s.replace("set logscale xy", axis)
}

/// Hex SHA-256 of the given bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(&["t", "norm", "label"]);
        t.push(vec![0.125.into(), 3i64.into(), "a".into()]);
        t.push(vec![1e-300.into(), (-2i64).into(), "b".into()]);
        let back = Table::parse(&t.to_csv());
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.column("t").unwrap(), vec![0.125, 1e-300]);
        assert_eq!(back.column("norm").unwrap(), vec![3.0, -2.0]);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
