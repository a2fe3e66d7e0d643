//! Station weather ingestion and the meteorological features the indices
//! consume.

mod aggregate;
mod features;
mod normalize;
mod record;
mod visibility;

pub use aggregate::{aggregate, AggregatedSeries, Period, PeriodKey, PeriodSums};
pub use features::{
    derive_features, read_features_csv, write_features_csv, DerivedFeatures, FeatureParams,
    Offsets, Signedness,
};
pub use normalize::{threshold_normalize, threshold_normalize_dense};
pub use record::{
    parse_date, parse_weather_csv, ColumnSchema, ParsedWeather, RejectedRow, WeatherField,
    WeatherFlags, WeatherRecord,
};
pub use visibility::{
    extinction_coefficient, visibility_subindex, VisibilityMode, DEFAULT_CONTRAST_THRESHOLD,
};
