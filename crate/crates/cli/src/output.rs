//! File formats: diagnostics CSV and two-column plot series.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use trials_core::lyapunov::DiagnosticsRow;

use crate::HarnessError;

pub const CSV_HEADER: &str =
    "t,energy,v_norm,lagrangian_gap,feasibility,objective_error,velocity_norm,distance_to_saddle,predicted";

/// Plot series written by [`emit_plotdata`], in file order.
pub const PLOT_SERIES: [&str; 6] = [
    "energy",
    "lagrangian_gap",
    "feasibility",
    "objective_error",
    "velocity_norm",
    "distance_to_saddle",
];

/// The predicted-rate overlay series.
pub const PLOT_OVERLAY: &str = "predicted";

fn columns(r: &DiagnosticsRow) -> [f64; 9] {
    [
        r.t,
        r.energy,
        r.v_norm,
        r.lagrangian_gap,
        r.feasibility,
        r.objective_error,
        r.velocity_norm,
        r.distance_to_saddle,
        r.predicted,
    ]
}

fn series(r: &DiagnosticsRow, name: &str) -> f64 {
    match name {
        "energy" => r.energy,
        "v_norm" => r.v_norm,
        "lagrangian_gap" => r.lagrangian_gap,
        "feasibility" => r.feasibility,
        "objective_error" => r.objective_error,
        "velocity_norm" => r.velocity_norm,
        "distance_to_saddle" => r.distance_to_saddle,
        "predicted" => r.predicted,
        _ => unreachable!("unknown series {name}"),
    }
}

pub fn format_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::with_capacity(200 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cols = columns(row);
        for (i, v) in cols.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[DiagnosticsRow], path: &Path) -> Result<(), HarnessError> {
    write_file(path, &format_csv(rows))
}

/// Parses a diagnostics CSV. The primal distance is not part of the schema
/// and comes back as NaN.
pub fn read_csv(path: &Path) -> Result<Vec<DiagnosticsRow>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let malformed = |message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(malformed("missing or unexpected header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| malformed(format!("line {}: {e}", i + 2)))?;
            if vals.len() != 9 {
                return Err(malformed(format!(
                    "line {}: expected 9 fields, got {}",
                    i + 2,
                    vals.len()
                )));
            }
            Ok(DiagnosticsRow {
                t: vals[0],
                energy: vals[1],
                v_norm: vals[2],
                lagrangian_gap: vals[3],
                feasibility: vals[4],
                objective_error: vals[5],
                velocity_norm: vals[6],
                distance_to_saddle: vals[7],
                primal_distance: f64::NAN,
                predicted: vals[8],
            })
        })
        .collect()
}

/// Writes one `<series>.dat` file per entry of [`PLOT_SERIES`] plus
/// `predicted.dat`, each with one `t value` line per row. Returns the paths
/// in that order.
pub fn emit_plotdata(rows: &[DiagnosticsRow], dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if rows.is_empty() {
        return Err(HarnessError::Config("no rows to emit".into()));
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    PLOT_SERIES
        .iter()
        .chain(std::iter::once(&PLOT_OVERLAY))
        .map(|name| {
            let mut text = String::new();
            for r in rows {
                writeln!(text, "{:.16e} {:.16e}", r.t, series(r, name)).unwrap();
            }
            let path = dir.join(format!("{name}.dat"));
            write_file(&path, &text)?;
            Ok(path)
        })
        .collect()
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}
