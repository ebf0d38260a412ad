//! Run manifests and CSV output.
//!
//! Every run writes one or more CSV files (header row, fixed column order,
//! '.' decimals, ',' separators, LF endings) plus one JSON manifest sidecar
//! carrying the full parameter set, grid sizes, tolerances, code version,
//! wall clock, and the run's derived constants.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub grids: serde_json::Value,
    pub tolerances: serde_json::Value,
    pub code_version: String,
    pub wall_clock_seconds: f64,
    pub derived: serde_json::Value,
    pub outputs: Vec<String>,
}

pub struct Reporter {
    started: Instant,
    csv_path: PathBuf,
    outputs: Vec<String>,
}

impl Reporter {
    pub fn new(out: Option<PathBuf>, default_stem: &str) -> Self {
        let csv_path = out.unwrap_or_else(|| PathBuf::from(format!("{default_stem}.csv")));
        Reporter {
            started: Instant::now(),
            csv_path,
            outputs: Vec::new(),
        }
    }

    /// Primary CSV path for this run.
    pub fn csv_path(&self) -> &Path {
        &self.csv_path
    }

    /// Sibling path `<stem><suffix>.csv` next to the primary CSV.
    pub fn sibling(&self, suffix: &str) -> PathBuf {
        let stem = self
            .csv_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        self.csv_path.with_file_name(format!("{stem}{suffix}.csv"))
    }

    pub fn open_csv(&mut self, path: &Path, header: &str) -> std::io::Result<BufWriter<File>> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{header}")?;
        self.outputs.push(path.display().to_string());
        Ok(w)
    }

    /// Writes the manifest sidecar `<stem>.manifest.json` and returns its path.
    pub fn finish(
        mut self,
        command: &str,
        parameters: serde_json::Value,
        grids: serde_json::Value,
        tolerances: serde_json::Value,
        derived: serde_json::Value,
    ) -> std::io::Result<PathBuf> {
        let manifest_path = {
            let stem = self
                .csv_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out".into());
            self.csv_path.with_file_name(format!("{stem}.manifest.json"))
        };
        self.outputs.push(manifest_path.display().to_string());
        let manifest = RunManifest {
            command: command.to_string(),
            parameters,
            grids,
            tolerances,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            derived,
            outputs: self.outputs,
        };
        let mut w = BufWriter::new(File::create(&manifest_path)?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        Ok(manifest_path)
    }
}

/// Shortest round-trip decimal for a float; `nan` for missing values.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}
