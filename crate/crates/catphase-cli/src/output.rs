//! Output helpers: atomic file writes, round-trip float formatting, and the
//! run manifest every command emits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Formats a float with 17 significant digits so the decimal text round-trips
/// to the exact bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a file through a temporary sibling and an atomic rename.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Collects resolved parameters and output files for one command invocation
/// and renders them as a key = value manifest.
pub struct RunManifest {
    command: String,
    entries: Vec<(String, String)>,
    outputs: Vec<String>,
    started: Instant,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            entries: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn param_f64(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), fmt_f64(value)));
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes the manifest itself (also listed among the outputs) and
    /// returns its path.
    pub fn write(mut self, outdir: &Path, stem: &str) -> io::Result<PathBuf> {
        let path = outdir.join(format!("{stem}.manifest.txt"));
        self.outputs.push(path.display().to_string());
        let mut text = String::new();
        writeln!(text, "command = {}", self.command).unwrap();
        writeln!(text, "artifact_version = {}", env!("CARGO_PKG_VERSION")).unwrap();
        for (k, v) in &self.entries {
            writeln!(text, "{k} = {v}").unwrap();
        }
        for out in &self.outputs {
            writeln!(text, "output = {out}").unwrap();
        }
        writeln!(
            text,
            "duration_seconds = {:.3}",
            self.started.elapsed().as_secs_f64()
        )
        .unwrap();
        write_atomic(&path, &text)?;
        Ok(path)
    }
}
