use std::io::Write;

use ecoindex_core::pipeline::{
    aggregate, derive_features, parse_weather_csv, DerivedFeatures, FeatureParams, Period,
    RejectedRow,
};
use serde::Serialize;

use super::read_input;
use crate::config::{LoadedConfig, PipelineConfig, Section};
use crate::output::{text, Sink};
use crate::CliError;

/// One data file after ingestion and feature derivation.
pub struct Station {
    pub name: String,
    pub records: usize,
    pub rejected: Vec<RejectedRow>,
    pub malformed_cells: usize,
    pub features: Vec<DerivedFeatures>,
}

/// Feature columns in [`DerivedFeatures::COLUMNS`] order, date excluded.
pub fn feature_columns(f: &DerivedFeatures) -> [(&'static str, Option<f64>); 10] {
    [
        ("u", f.u),
        ("u_cubed", f.u_cubed),
        ("tr", f.tr),
        ("p", f.p),
        ("dv", f.dv),
        ("t", f.t),
        ("delta_t24", f.delta_t24),
        ("cooling", f.cooling),
        ("delta_dewp", f.delta_dewp),
        ("delta_slp", f.delta_slp),
    ]
}

pub fn load(cfg: &LoadedConfig, p: &PipelineConfig) -> Result<Vec<Station>, CliError> {
    let schema = p.schema.to_schema();
    let mut out = Vec::new();
    for path in &p.data {
        let full = cfg.resolve(path);
        let body = read_input(cfg, path)?;
        let mut parsed = parse_weather_csv(body.as_bytes(), &schema).map_err(|e| CliError::from(e).in_file(&full))?;
        parsed.records.sort_by_key(|r| r.date);
        let features = derive_features(&parsed.records, &p.params).map_err(|e| CliError::from(e).in_file(&full))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "data".into());
        if out.iter().any(|s: &Station| s.name == name) {
            return Err(CliError::Config(format!("two pipeline files share the name `{name}`")));
        }
        out.push(Station {
            name,
            records: parsed.records.len(),
            rejected: parsed.rejected,
            malformed_cells: parsed.malformed_cells,
            features,
        });
    }
    Ok(out)
}

/// Period label of each day: the ISO date when no aggregation is set,
/// otherwise the period key. Days outside a month filter map to `None`.
pub fn period_labels(features: &[DerivedFeatures], period: &Option<Period>) -> Vec<Option<String>> {
    match period {
        None => features.iter().map(|f| Some(f.date.format("%Y-%m-%d").to_string())).collect(),
        Some(p) => features
            .iter()
            .map(|f| {
                let one = aggregate(&[(f.date, Some(0.0))], p.clone());
                one.values.keys().next().map(|k| k.to_string())
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct SourceSummary<'a> {
    source: &'a str,
    records: usize,
    rejected: &'a [RejectedRow],
    malformed_cells: usize,
    /// Days with at least one derived feature.
    days_with_features: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    params: &'a FeatureParams,
    period: Option<&'a Period>,
    units: Option<&'a str>,
    sources: Vec<SourceSummary<'a>>,
}

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<(), CliError> {
    let p = cfg.config.pipeline.as_ref().expect("pipeline section");
    let period = p.period.to_period()?;
    let stations = load(cfg, p)?;

    for s in &stations {
        sink.csv(Section::Pipeline, &format!("features_{}.csv", s.name), |out| {
            ecoindex_core::pipeline::write_features_csv(out, &s.features)?;
            Ok(())
        })?;
        sink.json(Section::Pipeline, &format!("features_{}.json", s.name), &s.features)?;
    }

    sink.json(
        Section::Pipeline,
        "summary.json",
        &Summary {
            params: &p.params,
            period: period.as_ref(),
            units: p.units.as_deref(),
            sources: stations
                .iter()
                .map(|s| SourceSummary {
                    source: &s.name,
                    records: s.records,
                    rejected: &s.rejected,
                    malformed_cells: s.malformed_cells,
                    days_with_features: s.features.iter().filter(|f| f.present_count() > 0).count(),
                })
                .collect(),
        },
    )?;

    // period vs feature mean, long form
    sink.plot(Section::Pipeline, "series.csv", |out| {
        writeln!(out, "source,period,feature,value,count")?;
        for s in &stations {
            write_series(out, s, &period)?;
        }
        Ok(())
    })?;
    Ok(())
}

fn write_series(out: &mut dyn Write, s: &Station, period: &Option<Period>) -> Result<(), CliError> {
    for k in 0..10 {
        let name = DerivedFeatures::COLUMNS[k + 1];
        match period {
            None => {
                for f in &s.features {
                    if let Some(v) = feature_columns(f)[k].1 {
                        writeln!(out, "{},{},{name},{v},1", text(&s.name), f.date.format("%Y-%m-%d"))?;
                    }
                }
            }
            Some(p) => {
                let series: Vec<_> = s.features.iter().map(|f| (f.date, feature_columns(f)[k].1)).collect();
                let agg = aggregate(&series, p.clone());
                for (key, v) in &agg.values {
                    writeln!(out, "{},{key},{name},{v},{}", text(&s.name), agg.counts[key])?;
                }
            }
        }
    }
    Ok(())
}
