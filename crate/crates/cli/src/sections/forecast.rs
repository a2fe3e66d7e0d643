use ecoindex_core::stats::{read_series_csv, trend_forecast, write_forecast_csv, Forecast};
use serde::Serialize;

use super::read_input;
use crate::config::{LoadedConfig, Section};
use crate::output::Sink;
use crate::CliError;

#[derive(Serialize)]
struct ForecastArtifact<'a> {
    model: &'static str,
    source: String,
    horizon: usize,
    forecast: &'a Forecast,
}

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<(), CliError> {
    let f = cfg.config.forecast.as_ref().expect("forecast section");
    let full = cfg.resolve(&f.series);
    let series = read_series_csv(read_input(cfg, &f.series)?.as_bytes()).map_err(|e| CliError::from(e).in_file(&full))?;
    let forecast = trend_forecast(&series, f.horizon).map_err(|e| CliError::from(e).in_file(&full))?;

    sink.json(
        Section::Forecast,
        "forecast.json",
        &ForecastArtifact {
            model: "least-squares line on the observation index",
            source: f.series.to_string_lossy().into_owned(),
            horizon: f.horizon,
            forecast: &forecast,
        },
    )?;
    // history and extrapolation in one table: time vs value
    sink.plot(Section::Forecast, "forecast.csv", |out| {
        write_forecast_csv(&forecast, out)?;
        Ok(())
    })?;
    Ok(())
}
