use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{LoadedConfig, Section};
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SectionStatus {
    pub section: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub artifacts: Vec<String>,
}

impl SectionStatus {
    fn new(section: Section, status: &'static str, detail: Option<String>) -> Self {
        SectionStatus {
            section: section.name(),
            status,
            detail,
            artifacts: Vec::new(),
        }
    }

    pub fn ok(section: Section) -> Self {
        Self::new(section, "ok", None)
    }

    pub fn inconsistent(section: Section, detail: String) -> Self {
        Self::new(section, "inconsistent", Some(detail))
    }

    pub fn failed(section: Section, detail: String) -> Self {
        Self::new(section, "failed", Some(detail))
    }
}

#[derive(Serialize)]
struct InputFile {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    generated_at: String,
    config: InputFile,
    inputs: Vec<InputFile>,
    inputs_hash: String,
    parameters: serde_json::Value,
    sections: Vec<SectionStatus>,
}

fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn write(loaded: &LoadedConfig, sink: &mut Sink, mut sections: Vec<SectionStatus>) -> Result<(), CliError> {
    // Artifacts were written in section order; attribute each by its prefix.
    let written = sink.take_written();
    for s in &mut sections {
        let prefix = format!("{}/", s.section);
        s.artifacts = written.iter().filter(|p| p.starts_with(&prefix)).cloned().collect();
    }

    let mut files: BTreeMap<String, String> = BTreeMap::new();
    for p in loaded.input_files() {
        let hash = sha256_file(&loaded.resolve(&p))?;
        files.insert(p.to_string_lossy().replace('\\', "/"), hash);
    }
    let mut all = Sha256::new();
    for (p, h) in &files {
        all.update(p.as_bytes());
        all.update(b"\0");
        all.update(h.as_bytes());
        all.update(b"\n");
    }
    let config_name = loaded
        .path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let manifest = Manifest {
        tool: "ecoindex",
        version: env!("CARGO_PKG_VERSION"),
        core_version: ecoindex_core::VERSION,
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config: InputFile {
            path: config_name,
            sha256: sha256_file(&loaded.path)?,
        },
        inputs: files
            .into_iter()
            .map(|(path, sha256)| InputFile { path, sha256 })
            .collect(),
        inputs_hash: hex::encode(all.finalize()),
        parameters: serde_json::to_value(&loaded.config)?,
        sections,
    };
    sink.raw_json(None, "manifest.json", &manifest)
}
