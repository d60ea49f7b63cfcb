//! Plain tables and their CSV / JSON-lines writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::dynamics::Trajectory;
use crate::eigen::EigenDecomposition;
use crate::error::{QstError, Result};
use crate::experiments::{SpectrumRow, SweepRow, TstarRow};
use crate::metrics::TransferReport;
use crate::chain::ChainConfig;

/// Comment line stating the unit convention of every emitted table.
pub const UNITS_NOTE: &str =
    "# energies in units of J, times in units of hbar/J; single-excitation H has hopping 2*J_n and on-site 2*B_n";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = QstError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(QstError::invalid("format", format!("unknown format `{other}` (csv, jsonl)"))),
        }
    }
}

/// Shortest decimal that parses back to the same f64.
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) if x.is_finite() => format_float(*x),
        Cell::Float(_) | Cell::Missing => "null".to_string(),
        Cell::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
    }
}

/// Writes `table`; CSV gets the optional `preamble` comment line, then the
/// header, then one line per row.
pub fn write_table<W: Write>(table: &Table, format: Format, preamble: Option<&str>, out: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => {
            if let Some(p) = preamble {
                writeln!(out, "{p}")?;
            }
            writeln!(out, "{}", table.columns.join(","))?;
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Format::Jsonl => {
            for row in &table.rows {
                let fields: Vec<String> = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).unwrap(), json_cell(v)))
                    .collect();
                writeln!(out, "{{{}}}", fields.join(","))?;
            }
        }
    }
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn write_table_to(table: &Table, format: Format, preamble: Option<&str>, path: Option<&Path>) -> Result<()> {
    let io_err = |p: &str, e: io::Error| QstError::Io {
        path: p.to_string(),
        message: e.to_string(),
    };
    match path {
        Some(p) => {
            let name = p.display().to_string();
            let file = File::create(p).map_err(|e| io_err(&name, e))?;
            let mut w = BufWriter::new(file);
            write_table(table, format, preamble, &mut w).map_err(|e| io_err(&name, e))?;
            w.flush().map_err(|e| io_err(&name, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_table(table, format, preamble, &mut w).map_err(|e| io_err("<stdout>", e))?;
            w.flush().map_err(|e| io_err("<stdout>", e))
        }
    }
}

pub const REPORT_COLUMNS: [&str; 14] = [
    "N", "a", "p", "j_edge", "j_bulk", "F", "E_plus", "E_minus", "ov_plus", "ov_minus", "t_est", "t_thr",
    "t_sm", "p_max",
];

fn report_cells(params: &ChainConfig, report: Option<&TransferReport>) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![
        params.n_sites.into(),
        params.a.into(),
        params.p.into(),
        params.j_edge.into(),
        params.j_bulk.into(),
    ];
    match report {
        Some(r) => row.extend([
            r.drop.into(),
            r.e_plus.into(),
            r.e_minus.into(),
            r.overlap_plus.into(),
            r.overlap_minus.into(),
            r.t_est.into(),
            r.t_threshold.into(),
            r.t_smoothed.into(),
            r.p_max.into(),
        ]),
        None => row.extend(std::iter::repeat_n(Cell::Missing, 9)),
    }
    row
}

/// One 14-column row per report.
pub fn report_table(rows: &[(ChainConfig, TransferReport)]) -> Table {
    let mut t = Table::new(REPORT_COLUMNS);
    for (params, report) in rows {
        t.push(report_cells(params, Some(report)));
    }
    t
}

/// Report columns plus a `status` column ("ok", warning flags, or the error).
pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(REPORT_COLUMNS.iter().copied().chain(["status"]));
    for row in rows {
        let mut cells = report_cells(&row.params, row.outcome.as_ref().ok());
        cells.push(match &row.outcome {
            Ok(r) => r.status.to_string().into(),
            Err(e) => format!("error: {e}").into(),
        });
        t.push(cells);
    }
    t
}

/// `index,value,parity,v_1..v_N`, one row per eigenpair (index 0-based).
pub fn eigen_table(ed: &EigenDecomposition) -> Table {
    let n = ed.dim();
    let mut t = Table::new(
        ["index", "value", "parity"]
            .into_iter()
            .map(String::from)
            .chain((1..=n).map(|k| format!("v_{k}"))),
    );
    for (i, (value, v)) in ed.values().iter().zip(ed.vectors()).enumerate() {
        let parity = ed.parity().map_or("none", |p| p[i].as_str());
        let mut row = vec![i.into(), (*value).into(), parity.into()];
        row.extend(v.iter().map(|x| Cell::Float(*x)));
        t.push(row);
    }
    t
}

/// `t,P_1..P_N`, optionally followed by `re_k,im_k` pairs.
pub fn trajectory_table(traj: &Trajectory, with_amplitudes: bool) -> Table {
    let n = traj.n_sites();
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|k| format!("P_{k}")));
    if with_amplitudes {
        for k in 1..=n {
            columns.push(format!("re_{k}"));
            columns.push(format!("im_{k}"));
        }
    }
    let mut t = Table::new(columns);
    for ((time, pops), amps) in traj.times().iter().zip(traj.populations()).zip(traj.amplitudes()) {
        let mut row = vec![Cell::Float(*time)];
        row.extend(pops.iter().map(|p| Cell::Float(*p)));
        if with_amplitudes {
            for c in amps {
                row.push(c.re.into());
                row.push(c.im.into());
            }
        }
        t.push(row);
    }
    t
}

/// `p,lambda_1..lambda_N,index_plus,index_minus` (indices 1-based into the spectrum).
pub fn spectrum_table(rows: &[SpectrumRow]) -> Table {
    let n = rows.first().map_or(0, |r| r.values.len());
    let mut columns = vec!["p".to_string()];
    columns.extend((1..=n).map(|k| format!("lambda_{k}")));
    columns.push("index_plus".into());
    columns.push("index_minus".into());
    let mut t = Table::new(columns);
    for r in rows {
        let mut row = vec![Cell::Float(r.p)];
        row.extend(r.values.iter().map(|x| Cell::Float(*x)));
        row.push((r.index_plus + 1).into());
        row.push((r.index_minus + 1).into());
        t.push(row);
    }
    t
}

pub fn tstar_table(rows: &[TstarRow]) -> Table {
    let mut t = Table::new(["a", "t_threshold", "t_est"]);
    for r in rows {
        t.push(vec![r.a.into(), r.t_threshold.into(), r.t_est.into()]);
    }
    t
}
