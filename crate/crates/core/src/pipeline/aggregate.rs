use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

/// Averaging period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Period {
    Monthly,
    Annual,
    /// Annual means over the listed months (1-12) only.
    AnnualMonthsFiltered(BTreeSet<u32>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PeriodKey {
    pub year: i32,
    pub month: Option<u32>,
}

impl fmt::Display for PeriodKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.month {
            Some(m) => write!(f, "{}-{m:02}", self.year),
            None => write!(f, "{}", self.year),
        }
    }
}

impl Period {
    fn key(&self, date: NaiveDate) -> Option<PeriodKey> {
        match self {
            Period::Monthly => Some(PeriodKey {
                year: date.year(),
                month: Some(date.month()),
            }),
            Period::Annual => Some(PeriodKey {
                year: date.year(),
                month: None,
            }),
            Period::AnnualMonthsFiltered(months) => {
                months.contains(&date.month()).then_some(PeriodKey {
                    year: date.year(),
                    month: None,
                })
            }
        }
    }
}

/// Running sums per period. Partial accumulators from separate files can
/// be merged in any order before [`PeriodSums::finish`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSums {
    period: Period,
    sums: BTreeMap<PeriodKey, (f64, usize)>,
}

impl PeriodSums {
    pub fn new(period: Period) -> Self {
        Self {
            period,
            sums: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, date: NaiveDate, value: Option<f64>) {
        let (Some(v), Some(key)) = (value, self.period.key(date)) else {
            return;
        };
        let e = self.sums.entry(key).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }

    /// Folds `other` into `self`. Both must use the same period.
    pub fn merge(&mut self, other: PeriodSums) {
        assert_eq!(self.period, other.period, "merging different periods");
        for (k, (s, c)) in other.sums {
            let e = self.sums.entry(k).or_insert((0.0, 0));
            e.0 += s;
            e.1 += c;
        }
    }

    pub fn finish(self) -> AggregatedSeries {
        let mut values = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for (k, (s, c)) in self.sums {
            values.insert(k, s / c as f64);
            counts.insert(k, c);
        }
        AggregatedSeries {
            period: self.period,
            values,
            counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedSeries {
    pub period: Period,
    pub values: BTreeMap<PeriodKey, f64>,
    pub counts: BTreeMap<PeriodKey, usize>,
}

/// Arithmetic mean of the present values in each period.
pub fn aggregate(series: &[(NaiveDate, Option<f64>)], period: Period) -> AggregatedSeries {
    let mut sums = PeriodSums::new(period);
    for (d, v) in series {
        sums.add(*d, *v);
    }
    sums.finish()
}
