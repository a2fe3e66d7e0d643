use std::collections::BTreeMap;
use std::io::Write;

use ecoindex_core::ahp::{
    derive_weights_with, embed_weights, exact_max_eigenvalue, parse_matrix, EmbeddedWeights,
    MatrixKind, RandomIndex, WeightReport,
};
use serde::Serialize;

use super::{read_input, Outcome};
use crate::config::{LoadedConfig, Section};
use crate::output::{text, Sink};
use crate::CliError;

#[derive(Serialize)]
struct MatrixArtifact<'a> {
    source: String,
    kind: &'static str,
    method: &'static str,
    report: &'a WeightReport,
    /// Perron root of the comparison matrix, for reference.
    exact_lambda_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding: Option<EmbeddedWeights>,
}

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<Outcome, CliError> {
    let w = cfg.config.weights.as_ref().expect("weights section");
    if w.matrices.is_empty() {
        return Err(CliError::Config("no matrices configured".into()));
    }
    let ri = RandomIndex::with_extension(&w.ri_extension)?;

    let mut rows = Vec::new();
    for path in &w.matrices {
        let full = cfg.resolve(path);
        let text = read_input(cfg, path)?;
        let matrix = parse_matrix(&text).map_err(|e| CliError::from(e).in_file(&full))?;
        let report = derive_weights_with(&matrix, &ri).map_err(|e| CliError::from(e).in_file(&full))?;
        let exact = exact_max_eigenvalue(&matrix)?;
        let embedding = match &w.embed {
            Some(e) => {
                let mapping: BTreeMap<String, usize> = report
                    .labels
                    .iter()
                    .filter_map(|l| e.positions.get(l).map(|p| (l.clone(), *p)))
                    .collect();
                Some(embed_weights(&report, &mapping, e.dimension).map_err(|e| CliError::from(e).in_file(&full))?)
            }
            None => None,
        };
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "matrix".into());
        sink.json(
            Section::Weights,
            &format!("{stem}.json"),
            &MatrixArtifact {
                source: path.to_string_lossy().into_owned(),
                kind: matrix.kind().as_str(),
                method: WeightReport::kind_note(matrix.kind()),
                report: &report,
                exact_lambda_max: exact,
                embedding,
            },
        )?;
        rows.push((stem, matrix.kind(), report));
    }

    sink.csv(Section::Weights, "summary.csv", |out| write_summary(out, &rows))?;
    sink.csv(Section::Weights, "weights.csv", |out| {
        writeln!(out, "matrix,label,weight")?;
        for (stem, _, r) in &rows {
            for (l, v) in r.labels.iter().zip(&r.weights) {
                writeln!(out, "{},{},{v}", text(stem), text(l))?;
            }
        }
        Ok(())
    })?;

    let failing: Vec<String> = rows
        .iter()
        .filter(|(_, _, r)| !r.consistent)
        .map(|(s, _, r)| format!("{s} (CR = {:.4})", r.cr))
        .collect();
    if failing.is_empty() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Inconsistent(format!("inconsistent matrices: {}", failing.join(", "))))
    }
}

fn write_summary(out: &mut dyn Write, rows: &[(String, MatrixKind, WeightReport)]) -> Result<(), CliError> {
    writeln!(out, "matrix,kind,order,lambda_max,ci,ri,cr,consistent")?;
    for (stem, kind, r) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            text(stem),
            kind.as_str(),
            r.weights.len(),
            r.lambda_max,
            r.ci,
            r.ri,
            r.cr,
            r.consistent
        )?;
    }
    Ok(())
}
