use chrono::NaiveDate;
use ecoindex_core::pipeline::{
    aggregate, derive_features, parse_weather_csv, threshold_normalize_dense, ColumnSchema,
    FeatureParams, Period, PeriodSums, WeatherRecord,
};
use proptest::prelude::*;

// three-decimal values keep distinct inputs distinct after the affine map
fn column() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100_000i32..1_000_000, 1..40)
        .prop_map(|v| v.into_iter().map(|x| x as f64 / 1000.0).collect::<Vec<_>>())
        .prop_filter("positive maximum", |v| v.iter().cloned().fold(f64::MIN, f64::max) > 0.0)
}

fn day(i: u64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(i)
}

proptest! {
    #[test]
    fn normalization_reverses_order(col in column()) {
        let out = threshold_normalize_dense(&col).unwrap();
        for i in 0..col.len() {
            for j in 0..col.len() {
                if col[i] < col[j] {
                    prop_assert!(out[i] > out[j]);
                }
            }
        }
    }

    #[test]
    fn normalization_range(col in column()) {
        let out = threshold_normalize_dense(&col).unwrap();
        let max = col.iter().cloned().fold(f64::MIN, f64::max);
        let min = col.iter().cloned().fold(f64::MAX, f64::min);
        let (lo, hi) = (min / max, (max + min - min) / max);
        for v in out {
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{v} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn constant_columns_map_to_ones(c in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6], n in 1usize..20) {
        prop_assert!(threshold_normalize_dense(&vec![c; n]).unwrap().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn temperature_deltas_are_translation_covariant(
        temps in prop::collection::vec(-40i32..40, 2..30),
        shift in -50i32..50,
    ) {
        let build = |offset: f64| -> Vec<WeatherRecord> {
            temps
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let mut r = WeatherRecord::empty(day(i as u64));
                    r.temp = Some(*t as f64 / 10.0 + offset);
                    r
                })
                .collect()
        };
        let p = FeatureParams::default();
        let a = derive_features(&build(0.0), &p).unwrap();
        let b = derive_features(&build(shift as f64), &p).unwrap();
        prop_assert!(a[0].delta_t24.is_none());
        for (x, y) in a.iter().zip(&b).skip(1) {
            prop_assert!((x.delta_t24.unwrap() - y.delta_t24.unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn u_cubed_and_trend_follow_speed(speeds in prop::collection::vec(0i32..400, 1..20), u_s in 0.0f64..20.0) {
        let records: Vec<WeatherRecord> = speeds
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut r = WeatherRecord::empty(day(i as u64));
                r.wdsp = Some(*s as f64 / 10.0);
                r
            })
            .collect();
        let p = FeatureParams { u_s, ..Default::default() };
        for f in derive_features(&records, &p).unwrap() {
            let u = f.u.unwrap();
            prop_assert_eq!(f.u_cubed.unwrap(), u * u * u);
            prop_assert_eq!(f.tr.unwrap(), u - u_s);
        }
    }

    #[test]
    fn split_aggregation_matches_single_pass(
        values in prop::collection::vec(prop::option::of(-50i32..50), 1..120),
        split in 0usize..120,
    ) {
        let series: Vec<(NaiveDate, Option<f64>)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (day(i as u64 * 3), v.map(f64::from)))
            .collect();
        let whole = aggregate(&series, Period::Monthly);
        let split = split.min(series.len());
        let (mut a, mut b) = (PeriodSums::new(Period::Monthly), PeriodSums::new(Period::Monthly));
        series[..split].iter().for_each(|(d, v)| a.add(*d, *v));
        series[split..].iter().for_each(|(d, v)| b.add(*d, *v));
        a.merge(b);
        let merged = a.finish();
        prop_assert_eq!(&merged.counts, &whole.counts);
        prop_assert!(merged.counts.values().all(|c| *c > 0));
        for (k, v) in &whole.values {
            prop_assert!((merged.values[k] - v).abs() <= 1e-9);
        }
    }
}

#[test]
fn all_sentinel_wind_yields_no_wind_features() {
    let csv = "DATE,WDSP,GUST,VISIB,TEMP\n\
               2020-03-01,999.9,999.9,999.9,9999.9\n\
               2020-03-02,999.9,999.9,999.9,9999.9\n\
               2020-03-03,999.9,999.9,999.9,9999.9\n";
    let parsed = parse_weather_csv(csv.as_bytes(), &ColumnSchema::gsod()).unwrap();
    assert_eq!(parsed.records.len(), 3);
    let features = derive_features(&parsed.records, &FeatureParams::default()).unwrap();
    assert!(features.iter().all(|f| f.tr.is_none() && f.u_cubed.is_none()));
    assert!(features.iter().all(|f| f.present_count() == 0));
    let series: Vec<_> = features.iter().map(|f| (f.date, f.tr)).collect();
    assert!(aggregate(&series, Period::Annual).values.is_empty());
}
