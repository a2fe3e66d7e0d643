use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Formats, Section};
use crate::CliError;

/// Writes artifacts under the output root and remembers what it wrote,
/// as `/`-separated paths relative to the root.
pub struct Sink {
    root: PathBuf,
    formats: Formats,
    written: Vec<String>,
}

impl Sink {
    pub fn new(root: &Path, formats: Formats) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Sink {
            root: root.to_path_buf(),
            formats,
            written: Vec::new(),
        })
    }

    /// Artifacts written since the last call.
    pub fn take_written(&mut self) -> Vec<String> {
        std::mem::take(&mut self.written)
    }

    fn create(&mut self, section: Option<Section>, name: &str) -> Result<BufWriter<fs::File>, CliError> {
        let rel = match section {
            Some(s) => format!("{}/{name}", s.name()),
            None => name.to_string(),
        };
        let path = self.root.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.written.push(rel);
        Ok(BufWriter::new(fs::File::create(path)?))
    }

    pub fn json<T: Serialize>(&mut self, section: Section, name: &str, value: &T) -> Result<(), CliError> {
        if self.formats.json {
            self.raw_json(Some(section), name, value)?;
        }
        Ok(())
    }

    pub fn raw_json<T: Serialize>(&mut self, section: Option<Section>, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.create(section, name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    /// Table in CSV form; skipped when only JSON is requested.
    pub fn csv<F>(&mut self, section: Section, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
    {
        if self.formats.csv {
            self.plot(section, name, body)?;
        }
        Ok(())
    }

    /// Plot-data CSV, written whatever the format selection.
    pub fn plot<F>(&mut self, section: Section, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
    {
        let mut w = self.create(Some(section), name)?;
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

/// CSV cell for an optional number; empty when missing.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Minimal CSV quoting for free-text cells.
pub fn text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
