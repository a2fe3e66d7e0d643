use std::collections::BTreeMap;

use serde::Serialize;

use super::matrix::{validate_matrix, JudgmentMatrix, MatrixKind};
use crate::error::{Error, Result};

/// Consistency ratios below this pass the test.
pub const CR_THRESHOLD: f64 = 0.1;

/// Random consistency index by matrix order, orders 1 through 10.
pub const RANDOM_INDEX: [f64; 10] = [0.0, 0.0, 0.58, 0.9, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49];

/// Random-index lookup, optionally extended past order 10.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomIndex {
    values: Vec<f64>,
}

impl Default for RandomIndex {
    fn default() -> Self {
        Self {
            values: RANDOM_INDEX.to_vec(),
        }
    }
}

impl RandomIndex {
    /// Appends RI values for orders 11, 12, ... in that order.
    pub fn with_extension(extra: &[f64]) -> Result<Self> {
        if let Some(v) = extra.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(crate::error::invalid(
                "ri_extension",
                format!("RI values must be positive, got {v}"),
            ));
        }
        let mut values = RANDOM_INDEX.to_vec();
        values.extend_from_slice(extra);
        Ok(Self { values })
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, order: usize) -> Result<f64> {
        if order == 0 || order > self.values.len() {
            return Err(Error::RiUndefined {
                order,
                max: self.values.len(),
            });
        }
        Ok(self.values[order - 1])
    }

    /// `ci / RI(n)`, defined as 0 for `n <= 2` where RI vanishes.
    pub fn consistency_ratio(&self, ci: f64, order: usize) -> Result<f64> {
        let ri = self.get(order)?;
        if order <= 2 {
            return Ok(0.0);
        }
        Ok(ci / ri)
    }
}

/// Consistency ratio against the standard RI table (orders 1-10).
pub fn consistency_ratio(ci: f64, order: usize) -> Result<f64> {
    RandomIndex::default().consistency_ratio(ci, order)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub consistent: bool,
}

/// Weights and consistency statistics by the column-sum approximation.
///
/// 1. Column-normalize the comparison matrix `A` into `B`.
/// 2. Row-sum `B` into `C`.
/// 3. Normalize `C` into the weight vector `W`.
/// 4. `lambda_max = (1/n) * sum_i (A W)_i / W_i`.
///
/// For a column-normalized input, `A` is the unit-diagonal source recovered
/// by [`JudgmentMatrix::comparison_matrix`]; step 1 then reproduces the input.
pub fn derive_weights(m: &JudgmentMatrix) -> Result<WeightReport> {
    derive_weights_with(m, &RandomIndex::default())
}

pub fn derive_weights_with(m: &JudgmentMatrix, ri_table: &RandomIndex) -> Result<WeightReport> {
    let report = validate_matrix(m);
    if !report.is_valid() {
        return Err(Error::InvalidMatrix(report));
    }
    let n = m.order();
    let a = m.comparison_matrix();

    let mut b = a.clone();
    for mut col in b.column_iter_mut() {
        let s = col.sum();
        col /= s;
    }
    let c: Vec<f64> = b.row_iter().map(|r| r.sum()).collect();
    let total: f64 = c.iter().sum();
    let weights: Vec<f64> = c.iter().map(|v| v / total).collect();
    if let Some(index) = weights.iter().position(|w| *w <= 0.0 || !w.is_finite()) {
        return Err(Error::DegenerateWeight { index });
    }

    let lambda_max = (0..n)
        .map(|i| {
            let aw: f64 = (0..n).map(|j| a[(i, j)] * weights[j]).sum();
            aw / weights[i]
        })
        .sum::<f64>()
        / n as f64;

    let ci = (lambda_max - n as f64) / (n as f64 - 1.0);
    let ri = ri_table.get(n)?;
    let cr = ri_table.consistency_ratio(ci, n)?;
    let consistent = n <= 2 || cr < CR_THRESHOLD;

    Ok(WeightReport {
        labels: m.labels().to_vec(),
        weights,
        lambda_max,
        ci,
        ri,
        cr,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddedWeights {
    pub dimension: usize,
    pub values: Vec<f64>,
    pub mapping: BTreeMap<String, usize>,
}

/// Places `weights` into a `dimension`-slot vector, zero elsewhere.
///
/// `mapping` sends each label of the report to its slot.
pub fn embed_weights(
    w: &WeightReport,
    mapping: &BTreeMap<String, usize>,
    dimension: usize,
) -> Result<EmbeddedWeights> {
    if mapping.len() != w.weights.len() {
        return Err(Error::InvalidMapping(format!(
            "{} mapped labels for {} weights",
            mapping.len(),
            w.weights.len()
        )));
    }
    let mut values = vec![0.0; dimension];
    let mut taken = vec![false; dimension];
    for (label, weight) in w.labels.iter().zip(&w.weights) {
        let &pos = mapping
            .get(label)
            .ok_or_else(|| Error::InvalidMapping(format!("label `{label}` is not mapped")))?;
        if pos >= dimension {
            return Err(Error::InvalidMapping(format!(
                "position {pos} for `{label}` is outside dimension {dimension}"
            )));
        }
        if taken[pos] {
            return Err(Error::MappingCollision { position: pos });
        }
        taken[pos] = true;
        values[pos] = *weight;
    }
    Ok(EmbeddedWeights {
        dimension,
        values,
        mapping: mapping.clone(),
    })
}

impl WeightReport {
    pub fn kind_note(kind: MatrixKind) -> &'static str {
        match kind {
            MatrixKind::RawSaaty => "eigenvalue method on the raw comparison matrix",
            MatrixKind::ColumnNormalized => {
                "eigenvalue method on the unit-diagonal source of a column-normalized matrix"
            }
        }
    }
}
