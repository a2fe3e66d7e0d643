use ecoindex_core::indices::{ExpandedInputs, IndexKind};
use ecoindex_core::sensitivity::{perturb_h, HTerm, SensitivityReport};
use serde::Serialize;

use crate::config::{LoadedConfig, Section};
use crate::output::Sink;
use crate::CliError;

#[derive(Serialize)]
struct ReportArtifact<'a> {
    formula: &'static str,
    base: ExpandedInputs,
    base_h: f64,
    relative_delta: f64,
    reports: &'a [SensitivityReport],
}

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<(), CliError> {
    let s = cfg.config.sensitivity.as_ref().expect("sensitivity section");
    let base = s
        .base
        .complete()
        .map_err(|e| CliError::Config(format!("sensitivity.base: {e}")))?;
    let vars: Vec<HTerm> = if s.variables.is_empty() {
        HTerm::all().collect()
    } else {
        s.variables.iter().map(|v| v.parse()).collect::<Result<_, _>>()?
    };
    let reports: Vec<SensitivityReport> = vars
        .iter()
        .map(|v| perturb_h(&base, *v, s.relative_delta))
        .collect::<Result<_, _>>()?;

    sink.json(
        Section::Sensitivity,
        "report.json",
        &ReportArtifact {
            formula: IndexKind::HExpanded.formula(),
            base,
            base_h: base.evaluate(),
            relative_delta: s.relative_delta,
            reports: &reports,
        },
    )?;
    sink.csv(Section::Sensitivity, "report.csv", |out| {
        writeln!(
            out,
            "variable,base_value,relative_delta,analytic_slope,fd_slope,delta_h,first_order_approx,delta_h_at_10pct,dominant_term"
        )?;
        for r in &reports {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.variable,
                r.base_value,
                r.relative_delta,
                r.analytic_slope,
                r.fd_slope,
                r.delta_h,
                r.first_order_approx,
                r.delta_h_at_10pct,
                r.dominant_term
            )?;
        }
        Ok(())
    })?;
    Ok(())
}
