use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write to a sibling temporary file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(name);
    let mut f = std::fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            // Shortest representation that round-trips.
            Cell::Real(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
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

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn reals(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|c| match c {
                Cell::Real(x) => Some(*x),
                Cell::Int(n) => Some(*n as f64),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }
}

/// Read back a CSV written by `CsvTable::write` as header plus raw string rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let header = r
        .headers()
        .map_err(|e| io_err(path, std::io::Error::other(e.to_string())))?
        .iter()
        .map(String::from)
        .collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(String::from).collect())
                .map_err(|e| io_err(path, std::io::Error::other(e.to_string())))
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

/// Figures reproducible from the emitted CSV files.
const PLOTS: &[(&str, &str, &str, &str, &str)] = &[
    ("spectrum", "spectrum_*.csv", "index", "sigma_rel", "log-y; one curve per (map, subdomain, epsilon, delta)"),
    ("offline-spectra", "offline_spectra.csv", "index", "sigma_rel", "log-y; one curve per subdomain"),
    ("rank-sweep", "rank_sweep.csv", "rank", "rel_error", "log-y; also rel_error_converged and rel_error_vs_vanilla"),
    ("error-history", "run_*_history.csv", "iteration", "rel_error", "log-y; one curve per backend"),
    ("trace-history", "run_*_history.csv", "iteration", "trace_error", "log-y"),
    ("reference-history", "reference_history.csv", "iteration", "trace_error", "log-y"),
    ("reference-flux", "reference_flux.csv", "x", "flux", "linear"),
    ("velocity-average", "run_*_ubar.csv", "x", "ubar", "linear; compare with reference_ubar.csv"),
    ("homogenization", "homog_check.csv", "delta", "rel_error", "log-log"),
    ("timing", "table1.csv", "method", "online_seconds", "bar chart"),
];

/// Plain-text list of plots: name, file glob, x column, y column, notes.
pub fn write_plot_manifest(dir: &Path) -> Result<PathBuf> {
    let mut text = String::from("# plot\tfile\tx\ty\tnotes\n");
    for (name, file, x, y, notes) in PLOTS {
        text.push_str(&format!("{name}\t{file}\t{x}\t{y}\t{notes}\n"));
    }
    let path = dir.join("plots.txt");
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
