use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the reciprocal and unit-diagonal checks on raw matrices.
pub const RECIPROCAL_RTOL: f64 = 1e-9;
/// Absolute tolerance on column sums of a column-normalized matrix.
pub const COLUMN_SUM_ATOL: f64 = 1e-3;

/// How the entries of a [`JudgmentMatrix`] should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// Pairwise judgments on the 1-9 scale: unit diagonal, `a[j][i] = 1 / a[i][j]`.
    RawSaaty,
    /// A judgment matrix already divided by its column sums.
    ColumnNormalized,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::RawSaaty => "raw_saaty",
            MatrixKind::ColumnNormalized => "column_normalized",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "raw" | "raw_saaty" | "rawsaaty" | "saaty" => Ok(MatrixKind::RawSaaty),
            "normalized" | "column_normalized" | "columnnormalized" => {
                Ok(MatrixKind::ColumnNormalized)
            }
            other => Err(format!("unknown matrix kind `{other}`")),
        }
    }
}

/// A square pairwise-comparison matrix with row/column labels.
///
/// Construction only checks the shape. Numeric invariants are checked by
/// [`validate_matrix`], which reports rather than aborts.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentMatrix {
    entries: DMatrix<f64>,
    kind: MatrixKind,
    labels: Vec<String>,
    negatively_correlated: BTreeSet<(usize, usize)>,
}

impl JudgmentMatrix {
    pub fn new(entries: DMatrix<f64>, kind: MatrixKind, labels: Vec<String>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Shape(format!(
                "{}x{} is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if labels.len() != entries.nrows() {
            return Err(Error::Shape(format!(
                "{} labels for order {}",
                labels.len(),
                entries.nrows()
            )));
        }
        Ok(Self {
            entries,
            kind,
            labels,
            negatively_correlated: BTreeSet::new(),
        })
    }

    /// Builds from row slices, labelling positions `1..=n`.
    pub fn from_rows(rows: &[Vec<f64>], kind: MatrixKind) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| i.to_string()).collect();
        Self::from_labeled_rows(rows, kind, labels)
    }

    pub fn from_labeled_rows(
        rows: &[Vec<f64>],
        kind: MatrixKind,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                r.len()
            )));
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(entries, kind, labels)
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Records that indicators `i` and `j` are negatively correlated.
    ///
    /// The sign is kept as metadata only; entries stay positive.
    pub fn mark_negative_correlation(&mut self, i: usize, j: usize) {
        let pair = if i <= j { (i, j) } else { (j, i) };
        self.negatively_correlated.insert(pair);
    }

    pub fn negatively_correlated(&self) -> &BTreeSet<(usize, usize)> {
        &self.negatively_correlated
    }

    /// The comparison matrix the eigenvalue method runs on.
    ///
    /// Raw matrices are returned as-is. A column-normalized matrix `B` is
    /// mapped back to the unit-diagonal source `A[i][j] = B[i][j] / B[j][j]`,
    /// the only column rescaling that restores `a_jj = 1`.
    pub fn comparison_matrix(&self) -> DMatrix<f64> {
        match self.kind {
            MatrixKind::RawSaaty => self.entries.clone(),
            MatrixKind::ColumnNormalized => {
                let mut a = self.entries.clone();
                for j in 0..a.ncols() {
                    let d = self.entries[(j, j)];
                    a.column_mut(j).unscale_mut(d);
                }
                a
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    OrderTooSmall { order: usize },
    NonFiniteEntry { row: usize, col: usize },
    NonPositiveEntry { row: usize, col: usize, value: f64 },
    DiagonalNotOne { index: usize, value: f64 },
    NotReciprocal { row: usize, col: usize, product: f64 },
    ColumnSum { col: usize, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderTooSmall { order } => write!(f, "order {order} is below 2"),
            Violation::NonFiniteEntry { row, col } => {
                write!(f, "non-finite entry at ({row}, {col})")
            }
            Violation::NonPositiveEntry { row, col, value } => {
                write!(f, "non-positive entry {value} at ({row}, {col})")
            }
            Violation::DiagonalNotOne { index, value } => {
                write!(f, "diagonal entry {index} is {value}, expected 1")
            }
            Violation::NotReciprocal { row, col, product } => {
                write!(f, "a[{row}][{col}] * a[{col}][{row}] = {product}, expected 1")
            }
            Violation::ColumnSum { col, sum } => write!(f, "column {col} sums to {sum}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Checks every invariant of `m` and lists the ones that fail.
pub fn validate_matrix(m: &JudgmentMatrix) -> ValidationReport {
    let n = m.order();
    let a = m.entries();
    let mut violations = Vec::new();
    if n < 2 {
        violations.push(Violation::OrderTooSmall { order: n });
    }

    let mut entries_ok = true;
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            if !v.is_finite() {
                violations.push(Violation::NonFiniteEntry { row: i, col: j });
                entries_ok = false;
            } else if v <= 0.0 {
                violations.push(Violation::NonPositiveEntry {
                    row: i,
                    col: j,
                    value: v,
                });
                entries_ok = false;
            }
        }
    }
    if !entries_ok {
        return ValidationReport { violations };
    }

    match m.kind() {
        MatrixKind::RawSaaty => {
            for i in 0..n {
                if !rel_close(a[(i, i)], 1.0, RECIPROCAL_RTOL) {
                    violations.push(Violation::DiagonalNotOne {
                        index: i,
                        value: a[(i, i)],
                    });
                }
                for j in (i + 1)..n {
                    let product = a[(i, j)] * a[(j, i)];
                    if !rel_close(product, 1.0, RECIPROCAL_RTOL) {
                        violations.push(Violation::NotReciprocal {
                            row: i,
                            col: j,
                            product,
                        });
                    }
                }
            }
        }
        MatrixKind::ColumnNormalized => {
            for j in 0..n {
                let sum = a.column(j).sum();
                // inclusive: three-decimal entries can sum to exactly 0.999 or 1.001
                if (sum - 1.0).abs() > COLUMN_SUM_ATOL + 1e-12 {
                    violations.push(Violation::ColumnSum { col: j, sum });
                }
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::fixtures;

    #[test]
    fn printed_b2_is_valid_as_column_normalized() {
        let report = validate_matrix(&fixtures::b2());
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn minimal_reciprocal_matrix_is_valid() {
        let m = JudgmentMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, 1.0]], MatrixKind::RawSaaty)
            .unwrap();
        assert!(validate_matrix(&m).is_valid());
    }

    #[test]
    fn zero_entry_is_reported() {
        let m = JudgmentMatrix::from_rows(
            &[
                vec![1.0, 2.0, 0.0],
                vec![0.5, 1.0, 3.0],
                vec![4.0, 1.0 / 3.0, 1.0],
            ],
            MatrixKind::RawSaaty,
        )
        .unwrap();
        let report = validate_matrix(&m);
        assert!(!report.is_valid());
        assert!(matches!(
            report.violations[0],
            Violation::NonPositiveEntry { row: 0, col: 2, .. }
        ));
        assert!(report.to_string().contains("non-positive entry"));
    }

    #[test]
    fn negative_saaty_entry_is_rejected() {
        let m = JudgmentMatrix::from_rows(&[vec![1.0, -3.0], vec![-1.0 / 3.0, 1.0]], MatrixKind::RawSaaty)
            .unwrap();
        assert!(!validate_matrix(&m).is_valid());
    }

    #[test]
    fn non_reciprocal_and_bad_diagonal_are_both_listed() {
        let m = JudgmentMatrix::from_rows(
            &[vec![1.0, 2.0, 3.0], vec![0.5, 2.0, 1.0], vec![0.3, 1.0, 1.0]],
            MatrixKind::RawSaaty,
        )
        .unwrap();
        let report = validate_matrix(&m);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DiagonalNotOne { index: 1, .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotReciprocal { row: 0, col: 2, .. })));
    }

    #[test]
    fn column_sum_is_checked_for_normalized_kind() {
        let m = JudgmentMatrix::from_rows(
            &[vec![0.5, 0.5], vec![0.6, 0.5]],
            MatrixKind::ColumnNormalized,
        )
        .unwrap();
        let report = validate_matrix(&m);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::ColumnSum { col: 0, .. }));
    }

    #[test]
    fn order_one_is_too_small() {
        let m = JudgmentMatrix::from_rows(&[vec![1.0]], MatrixKind::RawSaaty).unwrap();
        assert_eq!(
            validate_matrix(&m).violations,
            vec![Violation::OrderTooSmall { order: 1 }]
        );
    }

    #[test]
    fn ragged_rows_fail_construction() {
        let err = JudgmentMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5]], MatrixKind::RawSaaty)
            .unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn comparison_matrix_restores_unit_diagonal() {
        let a = fixtures::b3().comparison_matrix();
        for i in 0..a.nrows() {
            assert!((a[(i, i)] - 1.0).abs() < 1e-12);
        }
    }
}
