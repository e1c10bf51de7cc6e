//! CSV and manifest serialization.
//!
//! All CSV numbers use one fixed format — scientific notation with 12
//! significant digits and a `.` decimal separator — produced by Rust's
//! locale-independent formatter, so files are identical across machines and
//! parse back to the serialized precision. Counts and qubit numbers are
//! plain integers.

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::Path;

use dicke_core::qsl::{self, CollapsePoint};
use dicke_core::sweep::{CollapseStatistics, EnvelopeBin, LinearFit};
use dicke_core::Trajectory64;

use crate::commands::Table1Row;
use crate::CliError;

/// Render a float with 12 significant digits (`-1.23456789012e-3`).
///
/// The exponent form keeps exactly one nonzero leading digit for every
/// magnitude, so all values carry the same precision.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write a file, mapping failures onto the offending path.
pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One charging trajectory with its two analytic reference curves.
pub fn trajectory_csv(traj: &Trajectory64) -> String {
    let p = &traj.params;
    let mut out = String::from("t,eps,global_bound,classical_field_eps\n");
    for (i, &t) in traj.grid.times().iter().enumerate() {
        let bound = qsl::global_bound(t, p.lambda, p.n_bar, p.n_qubits);
        let classical = qsl::classical_field_eps(t, p.lambda, p.n_bar, p.n_qubits);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(t),
            fmt_sig(traj.eps[i]),
            fmt_sig(bound),
            fmt_sig(classical)
        );
    }
    out
}

/// The short-time amplification table.
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("N,lambda,n_bar,A_num,A_th,err_percent\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n_qubits,
            fmt_sig(r.lambda),
            fmt_sig(r.n_bar),
            fmt_sig(r.a_num),
            fmt_sig(r.a_th),
            fmt_sig(r.err_percent)
        );
    }
    out
}

/// Every valid collapse point of a sweep.
pub fn points_csv(points: &[CollapsePoint<f64>]) -> String {
    let mut out =
        String::from("N,lambda,n_bar,eps,tau_star_interp,tau_star_grid,tau_qsl,gamma_n,x,ratio\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.n_qubits,
            fmt_sig(p.lambda),
            fmt_sig(p.n_bar),
            fmt_sig(p.eps_target),
            fmt_sig(p.tau_star_interp),
            fmt_sig(p.tau_star),
            fmt_sig(p.tau_qsl),
            fmt_sig(p.gamma_n),
            fmt_sig(p.x),
            fmt_sig(p.ratio)
        );
    }
    out
}

/// Per-battery-size ratio statistics.
pub fn summary_csv(stats: &CollapseStatistics<f64>) -> String {
    let mut out = String::from("N,min_ratio,median_ratio,violations,valid_count\n");
    for s in &stats.per_n {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.n_qubits,
            fmt_sig(s.min_ratio),
            fmt_sig(s.median_ratio),
            s.violation_count,
            s.valid_count
        );
    }
    out
}

/// The lower envelope X_min(ε), with the ratio to √ε it is judged by.
pub fn envelope_csv(bins: &[EnvelopeBin<f64>]) -> String {
    let mut out = String::from("eps,x_min,ratio,count\n");
    for b in bins {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(b.eps),
            fmt_sig(b.x_min),
            fmt_sig(b.x_min / b.eps.sqrt()),
            b.count
        );
    }
    out
}

/// Per-target least-squares lines τ*(ε) vs 1/Γ_N.
pub fn fit_csv(fits: &[(f64, LinearFit<f64>)]) -> String {
    let mut out = String::from("eps_target,slope,intercept,n_points\n");
    for (eps, fit) in fits {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(*eps),
            fmt_sig(fit.slope),
            fmt_sig(fit.intercept),
            fit.n_points
        );
    }
    out
}

/// Ordered `key = value` provenance lines describing one run.
///
/// Output files appear under `output.*` keys, exactly one entry per file.
/// Config keys are written bare (no dot) so the manifest doubles as a config
/// file; floats there use shortest round-trip formatting (see
/// [`crate::config`]).
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    /// Start a manifest with the run provenance header.
    pub fn new(command: &str) -> Self {
        let mut manifest = Self {
            entries: Vec::new(),
        };
        manifest.push("run.command", command);
        manifest.push("run.version", env!("CARGO_PKG_VERSION"));
        manifest.push("run.timestamp", timestamp());
        manifest
    }

    /// Append one entry.
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// The manifest text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}

/// Wall-clock run time (RFC 3339, UTC); provenance only, never parsed back.
fn timestamp() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "unknown".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_format_round_trips_and_is_uniform() {
        for &x in &[
            0.0,
            1.0,
            45.0,
            -0.25,
            0.02 + 0.94 * 37.0 / 49.0,
            1.5e-300,
            -9.87654321e12,
            180.0 / 1999.0,
        ] {
            let cell = fmt_sig(x);
            let parsed: f64 = cell.parse().unwrap();
            // Stable at the serialized precision: re-rendering the parsed
            // value reproduces the cell exactly.
            assert_eq!(fmt_sig(parsed), cell, "unstable render of {x}");
            assert!(
                (parsed - x).abs() <= x.abs() * 1e-11,
                "lost precision on {x}: {cell}"
            );
            // Mantissa of the form d.ddddddddddd: 12 significant digits.
            let mantissa = cell
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .replace('.', "");
            assert_eq!(mantissa.len(), 12, "wrong digit count in {cell}");
        }
    }

    #[test]
    fn manifest_renders_ordered_key_value_lines() {
        let mut m = Manifest::new("sweep");
        m.push("output.points", "sweep_points.csv");
        m.push("n_fock", 40);
        let text = m.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "run.command = sweep");
        assert!(lines[1].starts_with("run.version = "));
        assert!(lines[2].starts_with("run.timestamp = "));
        assert_eq!(lines[3], "output.points = sweep_points.csv");
        assert_eq!(lines[4], "n_fock = 40");
    }
}
