use std::collections::BTreeMap;

use ecoindex_core::indices::{classify, evaluate_symbols, Direction, IndexKind, IndexResult};
use ecoindex_core::pipeline::{threshold_normalize, DerivedFeatures, FeatureParams};
use serde::{Deserialize, Serialize};

use super::pipeline::{load, period_labels};
use super::read_input;
use crate::config::{IndexConfig, LoadedConfig, Section};
use crate::output::{text, Sink};
use crate::CliError;

/// `{"periods": [{"period": "...", "values": {...}}]}`, or a single flat
/// symbol map scored as period `input`.
#[derive(Deserialize)]
#[serde(untagged)]
enum InputsDoc {
    Periods { periods: Vec<PeriodInputs> },
    Flat(BTreeMap<String, f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodInputs {
    period: String,
    values: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Provenance<'a> {
    index: &'static str,
    formula: &'static str,
    threshold: f64,
    direction: Direction,
    weights_used: BTreeMap<String, f64>,
    constants: &'a BTreeMap<String, f64>,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pipeline_params: Option<&'a FeatureParams>,
    normalized: bool,
}

#[derive(Serialize)]
struct ScoresArtifact<'a> {
    provenance: Provenance<'a>,
    results: &'a [IndexResult],
}

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<(), CliError> {
    let ic = cfg.config.index.as_ref().expect("index section");
    let kind = ic.which;
    let (threshold, direction) = ic.classification();
    let weights = ic.h_weights();
    let weights_used = if kind == IndexKind::H {
        weights.as_map()
    } else {
        BTreeMap::new()
    };

    let (periods, source, params) = match &ic.inputs {
        Some(path) => {
            let full = cfg.resolve(path);
            let doc: InputsDoc = serde_json::from_str(&read_input(cfg, path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", full.display())))?;
            let periods = match doc {
                InputsDoc::Periods { periods } => periods.into_iter().map(|p| (p.period, p.values)).collect(),
                InputsDoc::Flat(values) => vec![("input".to_string(), values)],
            };
            (scored_documents(ic, periods)?, path.to_string_lossy().into_owned(), None)
        }
        None => {
            let p = cfg.config.pipeline.as_ref().expect("validated: pipeline present");
            (from_pipeline(cfg, ic)?, "pipeline".to_string(), Some(&p.params))
        }
    };

    let results: Vec<IndexResult> = periods
        .into_iter()
        .map(|(period, score, echo)| {
            let c = classify(score, threshold, direction);
            IndexResult {
                index_name: kind.name().to_string(),
                period,
                score,
                band: c.band,
                threshold,
                formula: kind.formula().to_string(),
                inputs_echo: echo,
                weights_used: weights_used.clone(),
            }
        })
        .collect();

    sink.json(
        Section::Index,
        "scores.json",
        &ScoresArtifact {
            provenance: Provenance {
                index: kind.name(),
                formula: kind.formula(),
                threshold,
                direction,
                weights_used: weights_used.clone(),
                constants: &ic.constants,
                source,
                pipeline_params: params,
                normalized: ic.inputs.is_none() && ic.normalize,
            },
            results: &results,
        },
    )?;
    sink.csv(Section::Index, "scores.csv", |out| {
        writeln!(out, "index,period,score,band,threshold,formula")?;
        for r in &results {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.index_name,
                text(&r.period),
                r.score,
                r.band.as_str(),
                r.threshold,
                text(&r.formula)
            )?;
        }
        Ok(())
    })?;
    sink.plot(Section::Index, &format!("plot_{}.csv", kind.name().to_ascii_lowercase()), |out| {
        writeln!(out, "period,{}", kind.name())?;
        for r in &results {
            writeln!(out, "{},{}", text(&r.period), r.score)?;
        }
        Ok(())
    })?;
    Ok(())
}

type Scored = Vec<(String, f64, BTreeMap<String, f64>)>;

fn with_constants(ic: &IndexConfig, mut values: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    for (k, v) in &ic.constants {
        values.entry(k.clone()).or_insert(*v);
    }
    values
}

fn scored_documents(ic: &IndexConfig, periods: Vec<(String, BTreeMap<String, f64>)>) -> Result<Scored, CliError> {
    if periods.is_empty() {
        return Err(CliError::Input("index inputs list no periods".into()));
    }
    periods
        .into_iter()
        .map(|(period, values)| {
            let (score, echo) = evaluate_symbols(ic.which, &with_constants(ic, values), ic.h_weights())
                .map_err(|e| CliError::Input(format!("period {period}: {e}")))?;
            Ok((period, score, echo))
        })
        .collect()
}

/// Day symbols the weather features can supply for `kind`.
fn day_symbols(kind: IndexKind, f: &DerivedFeatures, params: &FeatureParams) -> BTreeMap<String, f64> {
    let x = &params.offsets;
    let add = |v: Option<f64>, off: f64| v.map(|v| v + off);
    let pairs: Vec<(&str, Option<f64>)> = match kind {
        IndexKind::Ei => Vec::new(),
        IndexKind::H => vec![
            ("DV", add(f.dv, x.x1)),
            ("U", add(f.u, x.x2)),
            ("dT", f.cooling),
            ("TR", add(f.tr, x.x4)),
            ("P", f.p),
        ],
        IndexKind::HExpanded | IndexKind::Eh => vec![
            ("u", f.u),
            ("p", f.p),
            ("delta_p3", f.delta_slp),
            ("t", f.t),
            ("delta_t", f.cooling),
            ("dv", f.dv),
            ("delta_t24", f.delta_t24),
            ("tr", f.tr),
            ("u_cubed", f.u_cubed),
        ],
    };
    pairs
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
}

fn normalize_features(features: &mut [DerivedFeatures]) -> Result<(), CliError> {
    type Field = fn(&mut DerivedFeatures) -> &mut Option<f64>;
    let fields: [Field; 10] = [
        |f| &mut f.u,
        |f| &mut f.u_cubed,
        |f| &mut f.tr,
        |f| &mut f.p,
        |f| &mut f.dv,
        |f| &mut f.t,
        |f| &mut f.delta_t24,
        |f| &mut f.cooling,
        |f| &mut f.delta_dewp,
        |f| &mut f.delta_slp,
    ];
    for field in fields {
        let column: Vec<Option<f64>> = features.iter_mut().map(|f| *field(f)).collect();
        if column.iter().all(Option::is_none) {
            continue;
        }
        for (f, v) in features.iter_mut().zip(threshold_normalize(&column)?) {
            *field(f) = v;
        }
    }
    Ok(())
}

/// Scores each day from the pipeline features, skipping days with a
/// missing input, then averages scores and inputs per period.
fn from_pipeline(cfg: &LoadedConfig, ic: &IndexConfig) -> Result<Scored, CliError> {
    let p = cfg.config.pipeline.as_ref().expect("pipeline section");
    let period = p.period.to_period()?;
    let mut stations = load(cfg, p)?;
    let multi = stations.len() > 1;

    let mut acc: BTreeMap<String, (f64, usize, BTreeMap<String, f64>)> = BTreeMap::new();
    let mut first_error = None;
    for s in &mut stations {
        if ic.normalize {
            normalize_features(&mut s.features)?;
        }
        let labels = period_labels(&s.features, &period);
        for (f, label) in s.features.iter().zip(labels) {
            let Some(label) = label else { continue };
            let values = with_constants(ic, day_symbols(ic.which, f, &p.params));
            match evaluate_symbols(ic.which, &values, ic.h_weights()) {
                Ok((score, echo)) => {
                    let key = if multi { format!("{} {label}", s.name) } else { label };
                    let e = acc.entry(key).or_default();
                    e.0 += score;
                    e.1 += 1;
                    for (k, v) in echo {
                        *e.2.entry(k).or_default() += v;
                    }
                }
                Err(e) => {
                    log::debug!("{} {}: skipped, {e}", s.name, f.date);
                    first_error.get_or_insert(e);
                }
            }
        }
    }
    if acc.is_empty() {
        return Err(match first_error {
            Some(e) => CliError::Input(format!("no day could be scored: {e}")),
            None => CliError::Input("pipeline data hold no days to score".into()),
        });
    }
    Ok(acc
        .into_iter()
        .map(|(label, (sum, n, echo))| {
            let n = n as f64;
            (label, sum / n, echo.into_iter().map(|(k, v)| (k, v / n)).collect())
        })
        .collect())
}
