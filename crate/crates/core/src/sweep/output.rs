//! CSV tables, plot scripts and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::SqueezingDiscrepancy;
use crate::sweep::config::RunConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Num(x) if x.is_nan() => out.push_str("NaN"),
            Cell::Num(x) => {
                let x = if *x == 0.0 { 0.0 } else { *x };
                let _ = write!(out, "{x:.16e}");
            }
            Cell::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Cell::Text(s) => out.push_str(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// One grid point: values in the column order of its table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord(pub Vec<Cell>);

#[macro_export]
#[doc(hidden)]
macro_rules! record {
    ($($v:expr),* $(,)?) => {
        $crate::sweep::SweepRecord(vec![$($crate::sweep::Cell::from($v)),*])
    };
}

/// How the plot script draws a panel.
#[derive(Clone, Debug, PartialEq)]
pub enum PlotKind {
    /// `ys` against `x`.
    Lines { x: &'static str, ys: Vec<&'static str> },
    /// `y` against `x`, one curve per distinct value of `group`.
    Grouped { x: &'static str, y: &'static str, group: &'static str },
    /// `z` over the `(x, y)` plane.
    Surface { x: &'static str, y: &'static str, z: &'static str },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<SweepRecord>,
    pub plot: PlotKind,
}

fn is_probability(col: &str) -> bool {
    col.starts_with("p_") || col == "probability" || col.starts_with("min_p")
}

fn is_fidelity(col: &str) -> bool {
    col.contains("fidelity") || col.starts_with("F_") || col == "visibility"
}

const RANGE_SLACK: f64 = 1e-9;

impl Table {
    pub fn new(name: impl Into<String>, title: impl Into<String>, columns: Vec<&'static str>, plot: PlotKind) -> Self {
        Self { name: name.into(), title: title.into(), columns, rows: Vec::new(), plot }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Values of one numeric column.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let Some(j) = self.column(name) else { return Vec::new() };
        self.rows.iter().filter_map(|r| r.0[j].as_f64()).collect()
    }

    /// Row widths match the header; probabilities and fidelities lie in [0, 1].
    pub fn check(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.0.len() != self.columns.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{}: row {i} has {} cells for {} columns",
                    self.name,
                    row.0.len(),
                    self.columns.len()
                )));
            }
            for (col, cell) in self.columns.iter().zip(&row.0) {
                if !(is_probability(col) || is_fidelity(col)) {
                    continue;
                }
                if let Some(x) = cell.as_f64() {
                    if !x.is_nan() && !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&x) {
                        return Err(Error::OutOfRange { what: format!("{}.{col}", self.name), value: x });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, cell) in row.0.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                cell.render(&mut s);
            }
            s.push('\n');
        }
        s
    }

    fn plot_commands(&self, out: &mut String) {
        let file = format!("{}.csv", self.name);
        let col = |c: &str| self.column(c).map_or(0, |j| j + 1);
        let _ = writeln!(out, "set title '{}'", self.title);
        match &self.plot {
            PlotKind::Lines { x, ys } => {
                let _ = writeln!(out, "set xlabel '{x}'");
                let parts: Vec<String> = ys
                    .iter()
                    .map(|y| format!("'{file}' using {}:{} with lines title '{y}'", col(x), col(y)))
                    .collect();
                let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
            }
            PlotKind::Grouped { x, y, group } => {
                let _ = writeln!(out, "set xlabel '{x}'\nset ylabel '{y}'");
                let j = self.column(group).unwrap_or(0);
                let mut groups: Vec<String> = Vec::new();
                for r in &self.rows {
                    let mut g = String::new();
                    r.0[j].render(&mut g);
                    if !groups.contains(&g) {
                        groups.push(g);
                    }
                }
                let parts: Vec<String> = groups
                    .iter()
                    .map(|g| {
                        format!(
                            "'{file}' using (strcol({}) eq '{g}' ? ${} : NaN):{} with lines title '{group}={}'",
                            col(group),
                            col(x),
                            col(y),
                            g.parse::<f64>().map(|v| format!("{v}")).unwrap_or_else(|_| g.clone())
                        )
                    })
                    .collect();
                let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
            }
            PlotKind::Surface { x, y, z } => {
                let _ = writeln!(out, "set xlabel '{x}'\nset ylabel '{y}'\nset zlabel '{z}'");
                let _ = writeln!(out, "set dgrid3d\nset pm3d\nsplot '{file}' using {}:{}:{} with pm3d title '{z}'", col(x), col(y), col(z));
            }
        }
    }
}

/// Gnuplot script drawing every panel, paused between panels.
pub fn plot_script(tables: &[Table]) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    for (k, t) in tables.iter().enumerate() {
        if k > 0 {
            s.push_str("pause -1\nreset\nset datafile separator ','\n");
        }
        t.plot_commands(&mut s);
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub version: &'static str,
    pub config: RunConfig,
    pub workers: usize,
    pub files: Vec<String>,
    /// Cutoff used for each simulated panel or parameter set.
    pub cutoffs: BTreeMap<String, usize>,
    pub wall_time_s: f64,
    pub discrepancy_flags: Vec<String>,
    /// Printed versus numerically optimal squeezing.
    pub squeezing_report: Vec<SqueezingDiscrepancy>,
}

/// Writes `<name>.csv` per table, `<experiment>.plot` and `manifest.json`.
pub fn write_outputs(dir: &Path, experiment: &str, tables: &[Table], manifest: &mut Manifest) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for t in tables {
        t.check()?;
        let p = dir.join(format!("{}.csv", t.name));
        std::fs::write(&p, t.to_csv())?;
        files.push(p);
    }
    let plot = dir.join(format!("{experiment}.plot"));
    std::fs::write(&plot, plot_script(tables))?;
    files.push(plot);
    manifest.files = files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .chain(std::iter::once("manifest.json".to_string()))
        .collect();
    let m = dir.join("manifest.json");
    std::fs::write(&m, serde_json::to_string_pretty(manifest)? + "\n")?;
    files.push(m);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let mut t = Table::new("t", "t", vec!["x", "p_a", "label"], PlotKind::Lines { x: "x", ys: vec!["p_a"] });
        let x = 0.1 + 0.2;
        t.rows.push(crate::record![x, f64::NAN, "zero_odd"]);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "x,p_a,label");
        let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(cells[0].parse::<f64>().unwrap(), x);
        assert_eq!(cells[1], "NaN");
        t.check().unwrap();
    }

    #[test]
    fn out_of_range_probability_is_rejected() {
        let mut t = Table::new("t", "t", vec!["x", "p_a"], PlotKind::Lines { x: "x", ys: vec!["p_a"] });
        t.rows.push(crate::record![0.0, 1.5]);
        assert!(t.check().is_err());
        let mut t = Table::new("t", "t", vec!["x", "p_a"], PlotKind::Lines { x: "x", ys: vec!["p_a"] });
        t.rows.push(crate::record![0.0]);
        assert!(t.check().is_err());
    }
}
