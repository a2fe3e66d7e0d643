use crate::error::{invalid, Error, Result};

/// Threshold nondimensionalization: `a -> (max + min - a) / max`.
///
/// Larger raw values map to smaller outputs. Missing values are ignored
/// for the extremes and stay missing.
pub fn threshold_normalize(column: &[Option<f64>]) -> Result<Vec<Option<f64>>> {
    let present = column.iter().flatten().copied();
    let (min, max) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !max.is_finite() {
        return Err(invalid("column", "no present values"));
    }
    if max == 0.0 {
        return Err(Error::ZeroThresholdDenominator);
    }
    Ok(column
        .iter()
        .map(|v| v.map(|a| (max + min - a) / max))
        .collect())
}

/// [`threshold_normalize`] for a column without gaps.
pub fn threshold_normalize_dense(column: &[f64]) -> Result<Vec<f64>> {
    let wrapped: Vec<Option<f64>> = column.iter().map(|v| Some(*v)).collect();
    Ok(threshold_normalize(&wrapped)?
        .into_iter()
        .map(|v| v.expect("dense input"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_evaluated_column() {
        let out = threshold_normalize_dense(&[2.0, 4.0, 6.0]).unwrap();
        let expected = [1.0, 4.0 / 6.0, 2.0 / 6.0];
        for (o, e) in out.iter().zip(expected) {
            assert_abs_diff_eq!(*o, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_column_maps_to_ones() {
        assert_eq!(threshold_normalize_dense(&[3.5; 4]).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn maximum_maps_to_min_over_max() {
        let out = threshold_normalize_dense(&[1.0, 5.0, 8.0]).unwrap();
        assert_abs_diff_eq!(out[2], 1.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_maximum_is_an_error() {
        let err = threshold_normalize_dense(&[-1.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("zero threshold denominator"));
    }

    #[test]
    fn missing_values_pass_through() {
        let out = threshold_normalize(&[Some(2.0), None, Some(6.0)]).unwrap();
        assert_eq!(out[1], None);
        assert_abs_diff_eq!(out[0].unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[2].unwrap(), 2.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_or_all_missing_is_an_error() {
        assert!(threshold_normalize(&[]).is_err());
        assert!(threshold_normalize(&[None, None]).is_err());
    }
}
