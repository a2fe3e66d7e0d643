use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use chrono::NaiveDate;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observed fields of a daily station summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeatherField {
    Dewp,
    Visib,
    Wdsp,
    Mxspd,
    Gust,
    Slp,
    Stp,
    Prcp,
    Sndp,
    Temp,
    Frshtt,
}

impl WeatherField {
    pub const ALL: [WeatherField; 11] = [
        WeatherField::Dewp,
        WeatherField::Visib,
        WeatherField::Wdsp,
        WeatherField::Mxspd,
        WeatherField::Gust,
        WeatherField::Slp,
        WeatherField::Stp,
        WeatherField::Prcp,
        WeatherField::Sndp,
        WeatherField::Temp,
        WeatherField::Frshtt,
    ];

    /// Column name in daily-summary (GSOD) exports.
    pub fn default_header(self) -> &'static str {
        match self {
            WeatherField::Dewp => "DEWP",
            WeatherField::Visib => "VISIB",
            WeatherField::Wdsp => "WDSP",
            WeatherField::Mxspd => "MXSPD",
            WeatherField::Gust => "GUST",
            WeatherField::Slp => "SLP",
            WeatherField::Stp => "STP",
            WeatherField::Prcp => "PRCP",
            WeatherField::Sndp => "SNDP",
            WeatherField::Temp => "TEMP",
            WeatherField::Frshtt => "FRSHTT",
        }
    }

    /// Missing-value code used by daily-summary exports.
    pub fn sentinel(self) -> Option<f64> {
        match self {
            WeatherField::Visib
            | WeatherField::Wdsp
            | WeatherField::Mxspd
            | WeatherField::Gust
            | WeatherField::Sndp => Some(999.9),
            WeatherField::Slp | WeatherField::Stp | WeatherField::Temp | WeatherField::Dewp => {
                Some(9999.9)
            }
            WeatherField::Prcp => Some(99.99),
            WeatherField::Frshtt => None,
        }
    }
}

impl fmt::Display for WeatherField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.default_header())
    }
}

/// Fog, rain, snow, hail, thunder, tornado occurrence flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WeatherFlags {
    pub fog: bool,
    pub rain: bool,
    pub snow: bool,
    pub hail: bool,
    pub thunder: bool,
    pub tornado: bool,
}

impl WeatherFlags {
    /// Parses the six-digit indicator; exports often drop leading zeros.
    pub fn parse(cell: &str) -> Option<Self> {
        let cell = cell.trim();
        if cell.is_empty() || cell.len() > 6 || !cell.bytes().all(|b| b == b'0' || b == b'1') {
            return None;
        }
        let padded = format!("{cell:0>6}");
        let bits: Vec<bool> = padded.bytes().map(|b| b == b'1').collect();
        Some(Self {
            fog: bits[0],
            rain: bits[1],
            snow: bits[2],
            hail: bits[3],
            thunder: bits[4],
            tornado: bits[5],
        })
    }
}

/// One station-day. `None` means the observation is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord {
    pub date: NaiveDate,
    pub dewp: Option<f64>,
    pub visib: Option<f64>,
    pub wdsp: Option<f64>,
    pub mxspd: Option<f64>,
    pub gust: Option<f64>,
    pub slp: Option<f64>,
    pub stp: Option<f64>,
    pub prcp: Option<f64>,
    pub sndp: Option<f64>,
    pub temp: Option<f64>,
    pub frshtt: Option<WeatherFlags>,
}

impl WeatherRecord {
    pub fn empty(date: NaiveDate) -> Self {
        Self {
            date,
            dewp: None,
            visib: None,
            wdsp: None,
            mxspd: None,
            gust: None,
            slp: None,
            stp: None,
            prcp: None,
            sndp: None,
            temp: None,
            frshtt: None,
        }
    }

    pub fn get(&self, field: WeatherField) -> Option<f64> {
        match field {
            WeatherField::Dewp => self.dewp,
            WeatherField::Visib => self.visib,
            WeatherField::Wdsp => self.wdsp,
            WeatherField::Mxspd => self.mxspd,
            WeatherField::Gust => self.gust,
            WeatherField::Slp => self.slp,
            WeatherField::Stp => self.stp,
            WeatherField::Prcp => self.prcp,
            WeatherField::Sndp => self.sndp,
            WeatherField::Temp => self.temp,
            WeatherField::Frshtt => None,
        }
    }

    fn set(&mut self, field: WeatherField, value: Option<f64>) {
        let slot = match field {
            WeatherField::Dewp => &mut self.dewp,
            WeatherField::Visib => &mut self.visib,
            WeatherField::Wdsp => &mut self.wdsp,
            WeatherField::Mxspd => &mut self.mxspd,
            WeatherField::Gust => &mut self.gust,
            WeatherField::Slp => &mut self.slp,
            WeatherField::Stp => &mut self.stp,
            WeatherField::Prcp => &mut self.prcp,
            WeatherField::Sndp => &mut self.sndp,
            WeatherField::Temp => &mut self.temp,
            WeatherField::Frshtt => return,
        };
        *slot = value;
    }
}

/// Maps record fields to CSV header names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub date: String,
    pub columns: BTreeMap<WeatherField, String>,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self::gsod()
    }
}

impl ColumnSchema {
    pub fn gsod() -> Self {
        Self {
            date: "DATE".to_string(),
            columns: WeatherField::ALL
                .iter()
                .map(|f| (*f, f.default_header().to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRow {
    /// 1-based line in the source, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ParsedWeather {
    pub records: Vec<WeatherRecord>,
    pub rejected: Vec<RejectedRow>,
    /// Cells that failed to parse and were stored as missing.
    pub malformed_cells: usize,
}

pub fn parse_date(cell: &str) -> Option<NaiveDate> {
    let cell = cell.trim();
    ["%Y-%m-%d", "%Y/%m/%d", "%Y%m%d"]
        .iter()
        .find_map(|fmt| NaiveDate::parse_from_str(cell, fmt).ok())
}

enum Cell {
    Missing,
    Value(f64),
    Malformed,
}

fn parse_numeric(cell: &str, field: WeatherField) -> Cell {
    let cell = cell.trim();
    if cell.is_empty() {
        return Cell::Missing;
    }
    let parsed = cell.parse::<f64>().ok().or_else(|| {
        // Daily exports append a one-character quality flag to some values.
        let last = cell.chars().last()?;
        if last.is_ascii_alphabetic() || last == '*' {
            cell[..cell.len() - 1].trim().parse::<f64>().ok()
        } else {
            None
        }
    });
    match parsed {
        Some(v) if !v.is_finite() => Cell::Malformed,
        Some(v) => match field.sentinel() {
            Some(s) if (v - s).abs() < 1e-9 => Cell::Missing,
            _ => Cell::Value(v),
        },
        None => Cell::Malformed,
    }
}

/// Reads station-day rows; sentinel and empty cells become `None`.
///
/// Malformed numeric cells are logged and stored as missing. Rows whose
/// date cannot be parsed are skipped and listed in `rejected`.
pub fn parse_weather_csv<R: Read>(source: R, schema: &ColumnSchema) -> Result<ParsedWeather> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name.trim()));

    let date_idx = find(&schema.date).ok_or(Error::UndatedData)?;
    let columns: Vec<(WeatherField, usize)> = schema
        .columns
        .iter()
        .filter_map(|(field, name)| find(name).map(|i| (*field, i)))
        .collect();

    let mut out = ParsedWeather::default();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let date_cell = row.get(date_idx).unwrap_or("");
        let Some(date) = parse_date(date_cell) else {
            out.rejected.push(RejectedRow {
                line,
                reason: format!("unparseable date `{date_cell}`"),
            });
            continue;
        };
        let mut rec = WeatherRecord::empty(date);
        for &(field, idx) in &columns {
            let cell = row.get(idx).unwrap_or("");
            if field == WeatherField::Frshtt {
                rec.frshtt = WeatherFlags::parse(cell);
                if rec.frshtt.is_none() && !cell.trim().is_empty() {
                    warn!("line {line}: malformed {field} cell `{cell}` treated as missing");
                    out.malformed_cells += 1;
                }
                continue;
            }
            match parse_numeric(cell, field) {
                Cell::Missing => {}
                Cell::Value(v) => rec.set(field, Some(v)),
                Cell::Malformed => {
                    warn!("line {line}: malformed {field} cell `{cell}` treated as missing");
                    out.malformed_cells += 1;
                }
            }
        }
        out.records.push(rec);
    }
    Ok(out)
}
