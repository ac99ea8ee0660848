//! CSV and JSON artifacts.
//!
//! CSV files have a mandatory header row, `.` decimals, shortest round-trip
//! float formatting and LF line endings, so identical inputs give
//! byte-identical files on every platform.

use crate::couplings::{effective_coupling_matched, BondParity};
use crate::dynamics::Trajectory;
use crate::fluxcircuit::FluxSweepPoint;
use crate::spectra::{Spectrum, SpectrumTrace};
use crate::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // Drop the sign of negative zero so reruns on other targets match.
        return "0.0".into();
    }
    format!("{x:?}")
}

/// An in-memory CSV table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Schema(format!(
                "row has {} fields, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_floats(&mut self, row: &[f64]) -> Result<()> {
        self.push_row(row.iter().map(|&x| format_float(x)).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let fields: Vec<String> = line.iter().map(|f| quote(f)).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_bytes(path, self.to_csv_string().as_bytes())
    }

    /// Parses a table written by [`CsvTable::to_csv_string`] (unquoted fields only).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Schema("empty CSV".into()))?
            .split(',')
            .map(str::to_owned)
            .collect::<Vec<_>>();
        let mut table = Self { header, rows: Vec::new() };
        for line in lines {
            table.push_row(line.split(',').map(str::to_owned).collect())?;
        }
        Ok(table)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn float(&self, row: usize, col: usize) -> Option<f64> {
        self.rows.get(row)?.get(col)?.parse().ok()
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Schema(format!("{}: {e}", path.display()));
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.flush().map_err(io)
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |j| format!("{prefix}_{j}"))
}

/// Columns `t, E_1…E_n, edge_flag_1…edge_flag_n`.
pub fn spectrum_trace_table(trace: &SpectrumTrace) -> Result<CsvTable> {
    let n = trace.n_levels();
    let header = std::iter::once("t".to_owned())
        .chain(numbered("E", n))
        .chain(numbered("edge_flag", n));
    let mut table = CsvTable::new(header);
    for ((t, spec), flags) in trace.times.iter().zip(&trace.spectra).zip(&trace.edge_flags) {
        let row = std::iter::once(format_float(*t))
            .chain(spec.eigenvalues.iter().map(|&e| format_float(e)))
            .chain(flags.iter().map(|&f| if f { "1" } else { "0" }.to_owned()))
            .collect();
        table.push_row(row)?;
    }
    Ok(table)
}

/// Columns `<param>, E_1…E_n` for a parameter sweep.
pub fn spectrum_sweep_table(param: &str, values: &[f64], spectra: &[Spectrum]) -> Result<CsvTable> {
    let n = spectra.first().map_or(0, Spectrum::len);
    let mut table = CsvTable::new(std::iter::once(param.to_owned()).chain(numbered("E", n)));
    for (&p, s) in values.iter().zip(spectra) {
        let row: Vec<f64> = std::iter::once(p).chain(s.eigenvalues.iter().copied()).collect();
        table.push_floats(&row)?;
    }
    Ok(table)
}

/// Columns `t, sz_1…sz_n`, followed by `re_1, im_1, …` when `amplitudes` is set.
pub fn trajectory_table(traj: &Trajectory, amplitudes: bool) -> Result<CsvTable> {
    let n = traj.states.first().map_or(0, |s| s.n_sites());
    let mut header: Vec<String> = std::iter::once("t".to_owned()).chain(numbered("sz", n)).collect();
    if amplitudes {
        for j in 1..=n {
            header.push(format!("re_{j}"));
            header.push(format!("im_{j}"));
        }
    }
    let mut table = CsvTable::new(header);
    for ((t, sz), state) in traj.times.iter().zip(&traj.sz).zip(&traj.states) {
        let mut row: Vec<f64> = std::iter::once(*t).chain(sz.iter().copied()).collect();
        if amplitudes {
            row.extend(state.amplitudes().iter().flat_map(|z| [z.re, z.im]));
        }
        table.push_floats(&row)?;
    }
    Ok(table)
}

/// Columns `alpha_1, alpha_2, P_re, P_im, Q_re, Q_im` for matched modulation.
pub fn coupling_table(bare: f64, points: &[(f64, f64)]) -> Result<CsvTable> {
    let mut table = CsvTable::new(["alpha_1", "alpha_2", "P_re", "P_im", "Q_re", "Q_im"]);
    for &(a1, a2) in points {
        let p = effective_coupling_matched(bare, a1, a2, BondParity::P)?.value;
        let q = effective_coupling_matched(bare, a1, a2, BondParity::Q)?.value;
        table.push_floats(&[a1, a2, p.re, p.im, q.re, q.im])?;
    }
    Ok(table)
}

/// Columns `f_eps, E_0…E_k, g_perp, g_par`.
pub fn flux_sweep_table(points: &[FluxSweepPoint]) -> Result<CsvTable> {
    let n = points.first().map_or(0, |p| p.levels.len());
    let header = std::iter::once("f_eps".to_owned())
        .chain((0..n).map(|j| format!("E_{j}")))
        .chain(["g_perp".to_owned(), "g_par".to_owned()]);
    let mut table = CsvTable::new(header);
    for p in points {
        let row: Vec<f64> = std::iter::once(p.f_eps)
            .chain(p.levels.iter().copied())
            .chain([p.g_perp, p.g_par])
            .collect();
        table.push_floats(&row)?;
    }
    Ok(table)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, to_json(value)?.as_bytes())
}
