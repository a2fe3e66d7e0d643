use ecoindex_core::planning::{run_scenario, Scenario, ScenarioResult};

use super::read_input;
use crate::config::{LoadedConfig, Section};
use crate::output::{cell, text, Sink};
use crate::CliError;

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<(), CliError> {
    let p = cfg.config.plan.as_ref().expect("plan section");
    let full = cfg.resolve(&p.scenarios);
    let scenarios: Vec<Scenario> = serde_json::from_str(&read_input(cfg, &p.scenarios)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", full.display())))?;
    if scenarios.is_empty() {
        return Err(CliError::Input(format!("{}: no scenarios", full.display())));
    }
    let mut results: Vec<ScenarioResult> = Vec::new();
    for s in &scenarios {
        let r = run_scenario(s).map_err(|e| CliError::Input(format!("scenario {}: {e}", s.name)))?;
        if r.is_empty() {
            return Err(CliError::Input(format!("scenario {} has neither theta nor sizing", s.name)));
        }
        results.extend(r);
    }

    sink.json(Section::Plan, "scenarios.json", &results)?;
    sink.csv(Section::Plan, "scenarios.csv", |out| {
        writeln!(out, "name,kind,form,value,unit,printed,note")?;
        for r in &results {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                text(&r.name),
                r.kind,
                r.form.unwrap_or(""),
                r.value,
                r.unit.map(|u| u.to_string()).unwrap_or_default(),
                cell(r.printed),
                text(r.note.as_deref().unwrap_or(""))
            )?;
        }
        Ok(())
    })?;
    Ok(())
}
