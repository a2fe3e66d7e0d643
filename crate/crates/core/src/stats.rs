//! Correlation helpers and a least-squares trend forecaster.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{invalid, Error, Result};

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::UndefinedCorrelation(format!(
            "length mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("need at least 2 points".into()));
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite value".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; ties share the average of their positions.
pub fn rank(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in &idx[i..=j] {
            out[*k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman correlation: Pearson of the rank vectors.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&rank(x), &rank(y))
}

/// Index pairs `(i, j)`, `i < j`, of columns whose Pearson correlation is
/// negative. Used to tag judgment-matrix entries.
pub fn negative_correlation_pairs(columns: &[Vec<f64>]) -> Result<BTreeSet<(usize, usize)>> {
    let mut out = BTreeSet::new();
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            if pearson(&columns[i], &columns[j])? < 0.0 {
                out.insert((i, j));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, (t, v)) in points.iter().enumerate() {
            if !(t.is_finite() && v.is_finite()) {
                return Err(invalid("series", format!("point {i} is not finite")));
            }
            if i > 0 && *t <= points[i - 1].0 {
                return Err(invalid("series", format!("time at point {i} does not increase")));
            }
        }
        Ok(Self { points })
    }

    /// Values at times 0, 1, 2, ...
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Forecast {
    /// Fitted value at index 0.
    pub intercept: f64,
    /// Change per index step.
    pub slope: f64,
    /// `sqrt(SSR / (n − 2))`.
    pub residual_sd: f64,
    pub history: Vec<(f64, f64)>,
    pub predictions: Vec<(f64, f64)>,
}

/// Fits `value = a + b·k` on the index `k = 0..n` by least squares and
/// extrapolates `horizon` steps. Forecast times continue at the mean
/// spacing of the input times.
pub fn trend_forecast(series: &Series, horizon: usize) -> Result<Forecast> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InsufficientHistory(n));
    }
    if horizon == 0 {
        return Err(invalid("horizon", "must be at least 1"));
    }
    let ys: Vec<f64> = series.points.iter().map(|p| p.1).collect();
    let ks: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let (mk, my) = (mean(&ks), mean(&ys));
    let sxy: f64 = ks.iter().zip(&ys).map(|(k, y)| (k - mk) * (y - my)).sum();
    let sxx: f64 = ks.iter().map(|k| (k - mk).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mk;
    let ssr: f64 = ks
        .iter()
        .zip(&ys)
        .map(|(k, y)| (y - intercept - slope * k).powi(2))
        .sum();
    let first = series.points[0].0;
    let last = series.points[n - 1].0;
    let spacing = (last - first) / (n - 1) as f64;
    let predictions = (1..=horizon)
        .map(|h| {
            let k = (n - 1 + h) as f64;
            (last + h as f64 * spacing, intercept + slope * k)
        })
        .collect();
    Ok(Forecast {
        intercept,
        slope,
        residual_sd: (ssr / (n - 2) as f64).sqrt(),
        history: series.points.clone(),
        predictions,
    })
}

/// Two-column CSV with a header: time, value.
pub fn read_series_csv<R: Read>(source: R) -> Result<Series> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(invalid("series", format!("row {} has fewer than 2 columns", i + 1)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| invalid("series", format!("row {}: `{s}` is not a number", i + 1)))
        };
        points.push((parse(&rec[0])?, parse(&rec[1])?));
    }
    Series::new(points)
}

/// History and forecast rows: `time, value, predicted`.
pub fn write_forecast_csv<W: Write>(forecast: &Forecast, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["time", "value", "predicted"])?;
    for (rows, flag) in [(&forecast.history, "false"), (&forecast.predictions, "true")] {
        for (t, v) in rows {
            w.write_record([t.to_string(), v.to_string(), flag.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
