//! Run configuration: one TOML file, one optional table per section.
//!
//! Relative paths resolve against the directory holding the config file.
//! Unknown keys are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ecoindex_core::carbon::CarbonParams;
use ecoindex_core::indices::{Direction, FeatureBundle, HWeights, IndexKind};
use ecoindex_core::pipeline::{ColumnSchema, FeatureParams, Period, WeatherField};
use ecoindex_core::sensitivity::HTerm;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Which table formats to write. Plot-data CSVs are written regardless.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Formats {
    pub const BOTH: Formats = Formats {
        csv: true,
        json: true,
    };

    pub fn only(f: Format) -> Self {
        Formats {
            csv: f == Format::Csv,
            json: f == Format::Json,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedConfig {
    pub dimension: usize,
    /// Indicator label → slot.
    pub positions: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    #[serde(default)]
    pub matrices: Vec<PathBuf>,
    /// RI values for orders 11, 12, ...
    #[serde(default)]
    pub ri_extension: Vec<f64>,
    pub embed: Option<EmbedConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PeriodConfig {
    Named(String),
    Months { months: BTreeSet<u32> },
}

impl Default for PeriodConfig {
    fn default() -> Self {
        PeriodConfig::Named("daily".into())
    }
}

impl PeriodConfig {
    /// `None` means no aggregation (one row per day).
    pub fn to_period(&self) -> Result<Option<Period>, CliError> {
        match self {
            PeriodConfig::Named(n) => match n.as_str() {
                "daily" => Ok(None),
                "monthly" => Ok(Some(Period::Monthly)),
                "annual" => Ok(Some(Period::Annual)),
                other => Err(CliError::Config(format!(
                    "unknown period `{other}` (expected daily, monthly, annual or {{ months = [...] }})"
                ))),
            },
            PeriodConfig::Months { months } => {
                if months.is_empty() || months.iter().any(|m| !(1..=12).contains(m)) {
                    return Err(CliError::Config("period months must be non-empty and within 1-12".into()));
                }
                Ok(Some(Period::AnnualMonthsFiltered(months.clone())))
            }
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaConfig {
    pub date: Option<String>,
    /// Field → header name; unlisted fields keep their default header.
    #[serde(default)]
    pub columns: BTreeMap<WeatherField, String>,
}

impl SchemaConfig {
    pub fn to_schema(&self) -> ColumnSchema {
        let mut s = ColumnSchema::gsod();
        if let Some(d) = &self.date {
            s.date = d.clone();
        }
        for (f, name) in &self.columns {
            s.columns.insert(*f, name.clone());
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub data: Vec<PathBuf>,
    #[serde(default)]
    pub schema: SchemaConfig,
    #[serde(default)]
    pub params: FeatureParams,
    #[serde(default)]
    pub period: PeriodConfig,
    /// Units of the source columns, recorded with the outputs only.
    pub units: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    pub which: IndexKind,
    pub threshold: Option<f64>,
    pub direction: Option<Direction>,
    /// JSON inputs document. Without it the index is scored from [pipeline].
    pub inputs: Option<PathBuf>,
    /// H weights in the order DV, U, dT, TR, P.
    pub weights: Option<[f64; 5]>,
    /// Values for symbols the weather data cannot supply (e.g. pm25, NA).
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    /// Threshold-normalize each weather-derived input column before scoring.
    #[serde(default)]
    pub normalize: bool,
}

impl IndexConfig {
    pub fn h_weights(&self) -> HWeights {
        self.weights.map(HWeights).unwrap_or_default()
    }

    pub fn classification(&self) -> (f64, Direction) {
        let (t, d) = self.which.default_classification();
        (self.threshold.unwrap_or(t), self.direction.unwrap_or(d))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonConfig {
    pub inventory: PathBuf,
    #[serde(default)]
    pub params: CarbonParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub scenarios: PathBuf,
}

fn default_delta() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    pub base: FeatureBundle,
    /// Defaults to every perturbable term.
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default = "default_delta")]
    pub relative_delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastConfig {
    pub series: PathBuf,
    pub horizon: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub output: OutputConfig,
    pub weights: Option<WeightsConfig>,
    pub pipeline: Option<PipelineConfig>,
    pub index: Option<IndexConfig>,
    pub carbon: Option<CarbonConfig>,
    pub plan: Option<PlanConfig>,
    pub sensitivity: Option<SensitivityConfig>,
    pub forecast: Option<ForecastConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    Weights,
    Pipeline,
    Index,
    Carbon,
    Plan,
    Sensitivity,
    Forecast,
}

impl Section {
    pub const ALL: [Section; 7] = [
        Section::Weights,
        Section::Pipeline,
        Section::Index,
        Section::Carbon,
        Section::Plan,
        Section::Sensitivity,
        Section::Forecast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Weights => "weights",
            Section::Pipeline => "pipeline",
            Section::Index => "index",
            Section::Carbon => "carbon",
            Section::Plan => "plan",
            Section::Sensitivity => "sensitivity",
            Section::Forecast => "forecast",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed config plus the directory its relative paths hang off.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub base_dir: PathBuf,
    pub config: RunConfig,
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        toml::from_str(s).map_err(|e| CliError::Config(format!("config: {e}")))
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be finite")))
    }
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = text.parse()?;
        let base_dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        let loaded = LoadedConfig {
            path: path.to_path_buf(),
            base_dir,
            config,
        };
        loaded.validate()?;
        Ok(loaded)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn has(&self, s: Section) -> bool {
        let c = &self.config;
        match s {
            Section::Weights => c.weights.is_some(),
            Section::Pipeline => c.pipeline.is_some(),
            Section::Index => c.index.is_some(),
            Section::Carbon => c.carbon.is_some(),
            Section::Plan => c.plan.is_some(),
            Section::Sensitivity => c.sensitivity.is_some(),
            Section::Forecast => c.forecast.is_some(),
        }
    }

    /// Every input file the config references, as written.
    pub fn input_files(&self) -> Vec<PathBuf> {
        let c = &self.config;
        let mut out = Vec::new();
        if let Some(w) = &c.weights {
            out.extend(w.matrices.iter().cloned());
        }
        if let Some(p) = &c.pipeline {
            out.extend(p.data.iter().cloned());
        }
        if let Some(i) = &c.index {
            out.extend(i.inputs.iter().cloned());
        }
        if let Some(x) = &c.carbon {
            out.push(x.inventory.clone());
        }
        if let Some(x) = &c.plan {
            out.push(x.scenarios.clone());
        }
        if let Some(x) = &c.forecast {
            out.push(x.series.clone());
        }
        out
    }

    fn validate(&self) -> Result<(), CliError> {
        for p in self.input_files() {
            let full = self.resolve(&p);
            if !full.is_file() {
                return Err(CliError::Config(format!("missing input file: {}", full.display())));
            }
        }
        let c = &self.config;
        if let Some(w) = &c.weights {
            if w.ri_extension.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(CliError::Config("weights.ri_extension entries must be positive".into()));
            }
            if let Some(e) = &w.embed {
                if let Some((label, pos)) = e.positions.iter().find(|(_, p)| **p >= e.dimension) {
                    return Err(CliError::Config(format!(
                        "weights.embed: position {pos} for `{label}` is outside dimension {}",
                        e.dimension
                    )));
                }
            }
        }
        if let Some(p) = &c.pipeline {
            if p.data.is_empty() {
                return Err(CliError::Config("pipeline.data lists no files".into()));
            }
            p.params.validate()?;
            p.period.to_period()?;
        }
        if let Some(i) = &c.index {
            if let Some(t) = i.threshold {
                finite("index.threshold", t)?;
            }
            i.h_weights().validate()?;
            for (k, v) in &i.constants {
                finite(&format!("index.constants.{k}"), *v)?;
            }
            if i.inputs.is_none() {
                if c.pipeline.is_none() {
                    return Err(CliError::Config(
                        "index needs an `inputs` document or a [pipeline] section".into(),
                    ));
                }
                if i.which == IndexKind::Ei {
                    return Err(CliError::Config(
                        "EI is not derived from weather data; give index.inputs".into(),
                    ));
                }
            }
        }
        if let Some(x) = &c.carbon {
            x.params.validate()?;
        }
        if let Some(s) = &c.sensitivity {
            if !(s.relative_delta.is_finite() && s.relative_delta >= 0.0) {
                return Err(CliError::Config("sensitivity.relative_delta must be non-negative".into()));
            }
            for v in &s.variables {
                v.parse::<HTerm>()?;
            }
        }
        if let Some(f) = &c.forecast {
            if f.horizon == 0 {
                return Err(CliError::Config("forecast.horizon must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = "[carbon]\ninventory = \"x.csv\"\nprice = 3\n".parse::<RunConfig>().unwrap_err();
        assert!(err.to_string().contains("price"));
        assert!("[bogus]\n".parse::<RunConfig>().is_err());
    }

    #[test]
    fn period_forms() {
        let c: RunConfig = "[pipeline]\ndata = [\"a.csv\"]\nperiod = { months = [3, 4, 5] }\n"
            .parse()
            .unwrap();
        let p = c.pipeline.unwrap().period.to_period().unwrap();
        assert!(matches!(p, Some(Period::AnnualMonthsFiltered(_))));
        assert_eq!(PeriodConfig::Named("annual".into()).to_period().unwrap(), Some(Period::Annual));
        assert!(PeriodConfig::Named("weekly".into()).to_period().is_err());
    }

    #[test]
    fn schema_overrides_merge_over_defaults() {
        let s = SchemaConfig {
            date: Some("day".into()),
            columns: BTreeMap::from([(WeatherField::Wdsp, "wind".to_string())]),
        }
        .to_schema();
        assert_eq!(s.date, "day");
        assert_eq!(s.columns[&WeatherField::Wdsp], "wind");
        assert_eq!(s.columns[&WeatherField::Visib], "VISIB");
    }

    #[test]
    fn index_defaults_follow_kind() {
        let c: RunConfig = "[index]\nwhich = \"eh\"\ninputs = \"x.json\"\n".parse().unwrap();
        let i = c.index.unwrap();
        assert_eq!(i.classification(), (20.0, Direction::HigherIsWorse));
        assert_eq!(i.h_weights(), HWeights::default());
    }
}
