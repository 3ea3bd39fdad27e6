//! The plot bundle: `figure1.csv` plus a matplotlib script next to it.

use std::path::{Path, PathBuf};

use ehbal_core::obstruction::ObstructionReport;

use crate::atomic::write_atomic;
use crate::error::Result;
use crate::formats::figure_csv;

pub const CSV_NAME: &str = "figure1.csv";
pub const SCRIPT_NAME: &str = "figure1.py";

pub fn plot_script(x_min: f64, x_max: f64) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Plot y = f(x) from {CSV_NAME}."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
xs, fs = [], []
with open(os.path.join(here, "{CSV_NAME}"), newline="") as fh:
    for row in csv.DictReader(fh):
        xs.append(float(row["x"]))
        fs.append(float(row["f"]))

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(xs, fs, color="black", linewidth=1.0)
ax.axhline(0.0, color="gray", linewidth=0.5)
ax.set_xlim({x_min:?}, {x_max:?})
ax.set_xlabel("x")
ax.set_ylabel("f(x)")
fig.tight_layout()
fig.savefig(os.path.join(here, "figure1.pdf"))
"#
    )
}

/// Write the CSV and the script into `dir`; returns both paths.
pub fn emit_figure1(report: &ObstructionReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let csv = figure_csv(report)?;
    let csv_path = dir.join(CSV_NAME);
    let script_path = dir.join(SCRIPT_NAME);
    write_atomic(&csv_path, csv.as_bytes())?;
    write_atomic(&script_path, plot_script(report.x_min, report.x_max).as_bytes())?;
    Ok((csv_path, script_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ehbal_core::obstruction::scan_f;

    #[test]
    fn bundle_for_three_samples() {
        let r = scan_f(0.0, 1.0, 0.5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (csv, script) = emit_figure1(&r, dir.path()).unwrap();
        let text = std::fs::read_to_string(csv).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), "x,f");
        let py = std::fs::read_to_string(script).unwrap();
        assert!(py.contains("\"figure1.csv\""));
        assert!(!py.contains(dir.path().to_str().unwrap()));
    }

    #[test]
    fn empty_report_is_rejected() {
        let mut r = scan_f(0.0, 1.0, 0.5).unwrap();
        r.samples.clear();
        let dir = tempfile::tempdir().unwrap();
        let e = emit_figure1(&r, dir.path()).unwrap_err();
        assert!(e.to_string().starts_with("obstruction::emit_figure1"));
    }
}
