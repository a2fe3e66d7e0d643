use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use super::record::{parse_date, WeatherRecord};
use super::visibility::{visibility_subindex, VisibilityMode, DEFAULT_CONTRAST_THRESHOLD};
use crate::error::{invalid, Error, Result};

/// Uncertainty offsets added to the sub-indicators (DV, U, ΔT, P/TR).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Offsets {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signedness {
    /// `t[i] - t[i-1]`.
    #[default]
    Signed,
    /// `|t[i] - t[i-1]|`.
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureParams {
    /// Sand-initiation wind speed, in the source's speed unit.
    pub u_s: f64,
    /// Dew-point difference window. Daily data resolve whole days only.
    pub dewp_window_days: u32,
    /// Underlying-surface factor `A` in `P = A u³ + x4`.
    pub bedding_factor: f64,
    pub epsilon: f64,
    pub visibility_mode: VisibilityMode,
    pub delta_t24: Signedness,
    pub offsets: Offsets,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self {
            u_s: 5.0,
            dewp_window_days: 1,
            bedding_factor: 1.0,
            epsilon: DEFAULT_CONTRAST_THRESHOLD,
            visibility_mode: VisibilityMode::LogExtinction,
            delta_t24: Signedness::Signed,
            offsets: Offsets::default(),
        }
    }
}

impl FeatureParams {
    pub fn validate(&self) -> Result<()> {
        if !self.u_s.is_finite() {
            return Err(invalid("u_s", "must be finite"));
        }
        if self.dewp_window_days == 0 {
            return Err(invalid("dewp_window_days", "must be at least 1"));
        }
        if !self.bedding_factor.is_finite() {
            return Err(invalid("bedding_factor", "must be finite"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::ContrastThreshold(self.epsilon));
        }
        let o = &self.offsets;
        if ![o.x1, o.x2, o.x3, o.x4].iter().all(|v| v.is_finite()) {
            return Err(invalid("offsets", "must be finite"));
        }
        Ok(())
    }
}

/// Per-day features derived from a station series. `None` = missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedFeatures {
    pub date: NaiveDate,
    /// Mean wind speed.
    pub u: Option<f64>,
    pub u_cubed: Option<f64>,
    /// Trend value `u - u_s`.
    pub tr: Option<f64>,
    /// Sand transport `A u³ + x4`.
    pub p: Option<f64>,
    /// Visibility sub-index.
    pub dv: Option<f64>,
    /// Mean temperature.
    pub t: Option<f64>,
    /// Temperature change over the previous 24 h.
    pub delta_t24: Option<f64>,
    /// Cooling index `Δt24 - min(Δt24) + x3`, minimum over the run.
    pub cooling: Option<f64>,
    /// Dew-point change over `dewp_window_days`.
    pub delta_dewp: Option<f64>,
    /// Sea-level pressure change over the previous 24 h.
    pub delta_slp: Option<f64>,
}

impl DerivedFeatures {
    pub const COLUMNS: [&'static str; 11] = [
        "date",
        "u",
        "u_cubed",
        "tr",
        "p",
        "dv",
        "t",
        "delta_t24",
        "cooling",
        "delta_dewp",
        "delta_slp",
    ];

    fn values(&self) -> [Option<f64>; 10] {
        [
            self.u,
            self.u_cubed,
            self.tr,
            self.p,
            self.dv,
            self.t,
            self.delta_t24,
            self.cooling,
            self.delta_dewp,
            self.delta_slp,
        ]
    }

    /// Number of present (non-missing) feature values.
    pub fn present_count(&self) -> usize {
        self.values().iter().filter(|v| v.is_some()).count()
    }
}

fn diff(cur: Option<f64>, prev: Option<f64>) -> Option<f64> {
    Some(cur? - prev?)
}

/// Derives the daily features; `records` must be strictly ascending by date.
///
/// Differences need the record exactly one window earlier; across a gap
/// they are missing, as is anything built on a missing observation.
pub fn derive_features(
    records: &[WeatherRecord],
    params: &FeatureParams,
) -> Result<Vec<DerivedFeatures>> {
    params.validate()?;
    for (i, pair) in records.windows(2).enumerate() {
        if pair[1].date <= pair[0].date {
            return Err(Error::TimeOrder {
                index: i + 1,
                date: pair[1].date,
            });
        }
    }
    let by_date: HashMap<NaiveDate, &WeatherRecord> =
        records.iter().map(|r| (r.date, r)).collect();
    let back = |date: NaiveDate, days: u32| {
        date.checked_sub_days(Days::new(days.into()))
            .and_then(|d| by_date.get(&d).copied())
    };

    let mut out: Vec<DerivedFeatures> = records
        .iter()
        .map(|r| {
            let u = r.wdsp;
            let u_cubed = u.map(|u| u * u * u);
            let prev_day = back(r.date, 1);
            let mut dt = diff(r.temp, prev_day.and_then(|p| p.temp));
            if params.delta_t24 == Signedness::Magnitude {
                dt = dt.map(f64::abs);
            }
            DerivedFeatures {
                date: r.date,
                u,
                u_cubed,
                tr: u.map(|u| u - params.u_s),
                p: u_cubed.map(|c| params.bedding_factor * c + params.offsets.x4),
                dv: r.visib.and_then(|v| {
                    visibility_subindex(v, params.epsilon, params.visibility_mode).ok()
                }),
                t: r.temp,
                delta_t24: dt,
                cooling: None,
                delta_dewp: diff(
                    r.dewp,
                    back(r.date, params.dewp_window_days).and_then(|p| p.dewp),
                ),
                delta_slp: diff(r.slp, prev_day.and_then(|p| p.slp)),
            }
        })
        .collect();

    let min_dt = out
        .iter()
        .filter_map(|f| f.delta_t24)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    if let Some(min_dt) = min_dt {
        for f in &mut out {
            f.cooling = f.delta_t24.map(|d| d - min_dt + params.offsets.x3);
        }
    }
    Ok(out)
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the canonical feature CSV: ISO dates, empty cell = missing.
pub fn write_features_csv<W: Write>(sink: W, features: &[DerivedFeatures]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(DerivedFeatures::COLUMNS)?;
    for f in features {
        let mut row = vec![f.date.format("%Y-%m-%d").to_string()];
        row.extend(f.values().iter().map(|v| cell(*v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(source: R) -> Result<Vec<DerivedFeatures>> {
    let mut r = csv::Reader::from_reader(source);
    let headers = r.headers()?.clone();
    if headers.iter().ne(DerivedFeatures::COLUMNS) {
        return Err(invalid("features csv", "unexpected header"));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let date = parse_date(&row[0])
            .ok_or_else(|| invalid("features csv", format!("line {line}: bad date")))?;
        let mut vals = [None; 10];
        for (slot, text) in vals.iter_mut().zip(row.iter().skip(1)) {
            if !text.is_empty() {
                *slot = Some(text.parse::<f64>().map_err(|_| {
                    invalid("features csv", format!("line {line}: bad number `{text}`"))
                })?);
            }
        }
        let [u, u_cubed, tr, p, dv, t, delta_t24, cooling, delta_dewp, delta_slp] = vals;
        out.push(DerivedFeatures {
            date,
            u,
            u_cubed,
            tr,
            p,
            dv,
            t,
            delta_t24,
            cooling,
            delta_dewp,
            delta_slp,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 6, d).unwrap()
    }

    fn rec(d: u32, wdsp: Option<f64>, temp: Option<f64>) -> WeatherRecord {
        let mut r = WeatherRecord::empty(day(d));
        r.wdsp = wdsp;
        r.temp = temp;
        r
    }

    #[test]
    fn trend_is_zero_at_threshold() {
        let f = derive_features(&[rec(1, Some(5.0), None)], &FeatureParams::default()).unwrap();
        assert_eq!(f[0].tr, Some(0.0));
    }

    #[test]
    fn trend_can_be_negative() {
        let params = FeatureParams {
            u_s: 16.1,
            ..Default::default()
        };
        let f = derive_features(&[rec(21, Some(16.0), None)], &params).unwrap();
        assert!((f[0].tr.unwrap() + 0.1).abs() < 1e-12);
    }

    #[test]
    fn day_over_day_temperature_change() {
        let f = derive_features(
            &[rec(1, None, Some(10.0)), rec(2, None, Some(13.5))],
            &FeatureParams::default(),
        )
        .unwrap();
        assert_eq!(f[0].delta_t24, None);
        assert_eq!(f[1].delta_t24, Some(3.5));
    }

    #[test]
    fn magnitude_mode_drops_sign() {
        let params = FeatureParams {
            delta_t24: Signedness::Magnitude,
            ..Default::default()
        };
        let f = derive_features(&[rec(1, None, Some(13.5)), rec(2, None, Some(10.0))], &params)
            .unwrap();
        assert_eq!(f[1].delta_t24, Some(3.5));
    }

    #[test]
    fn gap_makes_difference_missing() {
        let f = derive_features(
            &[rec(1, None, Some(10.0)), rec(3, None, Some(12.0))],
            &FeatureParams::default(),
        )
        .unwrap();
        assert_eq!(f[1].delta_t24, None);
    }

    #[test]
    fn cubes_and_sand_transport() {
        let params = FeatureParams {
            bedding_factor: 2.0,
            offsets: Offsets {
                x4: 0.5,
                ..Default::default()
            },
            ..Default::default()
        };
        let f = derive_features(&[rec(1, Some(3.0), None)], &params).unwrap();
        assert_eq!(f[0].u_cubed, Some(27.0));
        assert_eq!(f[0].p, Some(54.5));
    }

    #[test]
    fn cooling_is_shifted_by_run_minimum() {
        let recs = [
            rec(1, None, Some(10.0)),
            rec(2, None, Some(8.0)),
            rec(3, None, Some(11.0)),
        ];
        let f = derive_features(&recs, &FeatureParams::default()).unwrap();
        assert_eq!(f[1].cooling, Some(0.0));
        assert_eq!(f[2].cooling, Some(5.0));
        assert_eq!(f[0].cooling, None);
    }

    #[test]
    fn dew_point_window_is_configurable() {
        let mut recs: Vec<_> = (1..=3).map(|d| rec(d, None, None)).collect();
        for (r, dp) in recs.iter_mut().zip([40.0, 42.0, 47.0]) {
            r.dewp = Some(dp);
        }
        let params = FeatureParams {
            dewp_window_days: 2,
            ..Default::default()
        };
        let f = derive_features(&recs, &params).unwrap();
        assert_eq!(f[1].delta_dewp, None);
        assert_eq!(f[2].delta_dewp, Some(7.0));
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let err = derive_features(
            &[rec(2, None, None), rec(1, None, None)],
            &FeatureParams::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("time order"));
        let dup = derive_features(&[rec(2, None, None), rec(2, None, None)], &FeatureParams::default());
        assert!(matches!(dup, Err(Error::TimeOrder { index: 1, .. })));
    }

    #[test]
    fn missing_wind_leaves_wind_features_missing() {
        let f = derive_features(&[rec(1, None, Some(3.0))], &FeatureParams::default()).unwrap();
        assert_eq!((f[0].u, f[0].u_cubed, f[0].tr, f[0].p), (None, None, None, None));
    }

    #[test]
    fn csv_round_trip_keeps_missing_cells() {
        let recs = [rec(1, Some(2.5), Some(10.0)), rec(2, None, Some(13.5))];
        let f = derive_features(&recs, &FeatureParams::default()).unwrap();
        let mut buf = Vec::new();
        write_features_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("date,u,u_cubed"));
        assert!(text.contains("2020-06-02,,,,,,13.5,3.5,0,,"));
        assert_eq!(read_features_csv(buf.as_slice()).unwrap(), f);
    }
}
