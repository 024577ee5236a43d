//! Run directories and machine-readable output files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Full round-trip precision for floating CSV cells (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A directory that receives the artifacts of exactly one run.
#[derive(Debug)]
pub struct RunDir {
    root: PathBuf,
    files: Vec<String>,
}

impl RunDir {
    /// Creates `root` or adopts it when empty; refuses to touch earlier output.
    pub fn create(root: &Path) -> Result<RunDir> {
        if root.exists() {
            if !root.is_dir() {
                return Err(io::Error::new(io::ErrorKind::AlreadyExists, format!("{} exists and is not a directory", root.display())).into());
            }
            if fs::read_dir(root)?.next().is_some() {
                return Err(io::Error::new(io::ErrorKind::AlreadyExists, format!("{} is not empty; outputs are never appended", root.display())).into());
            }
        }
        fs::create_dir_all(root)?;
        Ok(RunDir { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Relative paths written so far, in order.
    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn target(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.root.join(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        self.files.push(rel.to_string());
        Ok(p)
    }

    /// Header row plus pre-formatted cells; LF line endings.
    pub fn write_csv(&mut self, rel: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let p = self.target(rel)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(p).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Pretty JSON with keys in lexicographic order.
    pub fn write_json(&mut self, rel: &str, value: &impl Serialize) -> Result<()> {
        let canonical = serde_json::to_value(value)?;
        let mut text = serde_json::to_string_pretty(&canonical)?;
        text.push('\n');
        self.write_text(rel, &text)
    }

    pub fn write_text(&mut self, rel: &str, text: &str) -> Result<()> {
        let p = self.target(rel)?;
        let mut f = fs::File::create(p)?;
        f.write_all(text.as_bytes())?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e.into(),
        other => io::Error::other(format!("{other:?}")).into(),
    }
}
