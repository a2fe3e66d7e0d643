mod carbon;
mod forecast;
mod index;
mod pipeline;
mod plan;
mod sensitivity;
mod weights;

use crate::config::{LoadedConfig, Section};
use crate::output::Sink;
use crate::CliError;

pub enum Outcome {
    Ok,
    /// Ran to completion, but some judgment matrix failed CR < 0.1.
    Inconsistent(String),
}

pub fn run(section: Section, cfg: &LoadedConfig, sink: &mut Sink) -> Result<Outcome, CliError> {
    match section {
        Section::Weights => return weights::run(cfg, sink),
        Section::Pipeline => pipeline::run(cfg, sink)?,
        Section::Index => index::run(cfg, sink)?,
        Section::Carbon => carbon::run(cfg, sink)?,
        Section::Plan => plan::run(cfg, sink)?,
        Section::Sensitivity => sensitivity::run(cfg, sink)?,
        Section::Forecast => forecast::run(cfg, sink)?,
    }
    Ok(Outcome::Ok)
}

/// Reads a config-relative input file to a string.
pub(crate) fn read_input(cfg: &LoadedConfig, path: &std::path::Path) -> Result<String, CliError> {
    let full = cfg.resolve(path);
    std::fs::read_to_string(&full).map_err(|e| CliError::Input(format!("{}: {e}", full.display())))
}
