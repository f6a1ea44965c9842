//! Artifact directories and human/machine renderings of results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::verify::{BoundReport, ScalingReport};
use crate::{Error, Result};

/// Marker left in an artifact directory whose command failed.
pub const FAILED_MARKER: &str = "FAILED";

/// A run-private staging directory that is atomically renamed into place.
#[derive(Debug)]
pub struct ArtifactDir {
    staging: PathBuf,
    target: PathBuf,
}

impl ArtifactDir {
    /// Stages `parent/name` in a hidden sibling directory.
    pub fn begin(parent: &Path, name: &str) -> Result<Self> {
        fs::create_dir_all(parent)?;
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0);
        let staging = parent.join(format!(".{name}.tmp-{}-{nanos}", std::process::id()));
        fs::create_dir_all(&staging)?;
        Ok(Self {
            staging,
            target: parent.join(name),
        })
    }

    /// Where files are written until the directory is published.
    pub fn path(&self) -> &Path {
        &self.staging
    }

    /// The final location.
    pub fn target(&self) -> &Path {
        &self.target
    }

    /// Moves the staging directory into place, replacing an earlier artifact
    /// directory (one holding a manifest) of the same name.
    pub fn publish(self) -> Result<PathBuf> {
        if self.target.exists() {
            if !self.target.join("manifest.json").exists() {
                return Err(Error::InvalidParameter(format!(
                    "{} exists and is not an artifact directory; refusing to replace it",
                    self.target.display()
                )));
            }
            fs::remove_dir_all(&self.target)?;
        }
        fs::rename(&self.staging, &self.target)?;
        Ok(self.target)
    }

    /// Publishes the partial output with a [`FAILED_MARKER`] holding `reason`.
    pub fn publish_failed(self, reason: &str) -> Result<PathBuf> {
        fs::write(self.staging.join(FAILED_MARKER), format!("{reason}\n"))?;
        self.publish()
    }
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    code_version: &'a str,
    command: &'a str,
    config: &'a C,
}

/// `manifest.json`: enough to re-run the command.
pub fn write_manifest<C: Serialize>(dir: &Path, command: &str, config: &C) -> Result<()> {
    let m = Manifest {
        code_version: crate::CODE_VERSION,
        command,
        config,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Left-aligned columns separated by two spaces.
pub fn aligned_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

/// One line per report plus its parameters.
pub fn bound_reports_text(reports: &[BoundReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let params = r
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            vec![
                r.description.clone(),
                format!("{:?}", r.extremum).to_lowercase(),
                r.samples.to_string(),
                sci(r.worst_ratio),
                format!("{:?}", r.worst_witness),
                params,
            ]
        })
        .collect();
    aligned_table(&["check", "extremum", "samples", "worst_ratio", "witness", "parameters"], &rows)
}

/// RFC-4180 table `N, decrement, log2_N, log2_decrement, log2_fit`.
pub fn scaling_csv(report: &ScalingReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "decrement", "log2_N", "log2_decrement", "log2_fit"])?;
    for row in report.rows() {
        w.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

pub fn scaling_text(report: &ScalingReport) -> String {
    let rows: Vec<Vec<String>> = report
        .ns
        .iter()
        .zip(&report.decrements)
        .map(|(n, d)| vec![n.to_string(), sci(*d)])
        .collect();
    let mut out = aligned_table(&["N", "decrement"], &rows);
    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    let _ = writeln!(out, "variant {:?}, alpha {}, s {}", report.variant, report.alpha, report.s);
    let _ = writeln!(
        out,
        "fitted slope {}  (rms residual {}), theory exponent {:.4}, candidates ({:.4}, {:.4})",
        opt(report.fitted_slope),
        opt(report.residual),
        report.theory_exponent,
        report.candidate_exponents.0,
        report.candidate_exponents.1
    );
    let _ = writeln!(
        out,
        "monotone {} (noise floor {:.1e}), snapshot interval {}, initial mass {:.6}",
        report.monotone, report.noise_floor, report.snapshot_interval, report.initial_mass
    );
    out
}

/// Gnuplot script plotting `sweep.csv` with its fit on log-log axes.
pub fn scaling_gnuplot(csv_name: &str, report: &ScalingReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set logscale xy 2");
    let _ = writeln!(s, "set xlabel 'N'");
    let _ = writeln!(s, "set ylabel 'sup_t |M4(t) - M4(0)|'");
    let _ = writeln!(s, "set key left bottom");
    match (report.fitted_slope, report.intercept) {
        (Some(a), Some(b)) => {
            let _ = writeln!(
                s,
                "plot '{csv_name}' using 1:2 skip 1 with linespoints title 'measured', \\\n     2**({b:?}) * x**({a:?}) title 'fit, slope {a:.3}'"
            );
        }
        _ => {
            let _ = writeln!(s, "plot '{csv_name}' using 1:2 skip 1 with linespoints title 'measured'");
        }
    }
    s
}

/// Gnuplot script plotting every diagnostics column against time.
pub fn diagnostics_gnuplot(csv_name: &str, columns: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 't'");
    let plots: Vec<String> = columns
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| format!("'{csv_name}' using 1:{} skip 1 with lines title '{c}'", j + 1))
        .collect();
    if !plots.is_empty() {
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    s
}

/// Aligned rendering of a CSV file.
pub fn csv_text(path: &Path) -> Result<String> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(aligned_table(&h, &rows))
}
