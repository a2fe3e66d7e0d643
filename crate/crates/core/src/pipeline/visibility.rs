use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CONTRAST_THRESHOLD: f64 = 0.02;

/// Which reading of the visibility sub-index to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityMode {
    /// `ln a`, the log of the extinction coefficient.
    #[default]
    LogExtinction,
    /// Meteorological optical range, `ln(1/eps) / a`.
    Mor,
}

/// Extinction coefficient `a = ln(1/eps) / V`.
pub fn extinction_coefficient(visibility: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::ContrastThreshold(epsilon));
    }
    if !(visibility > 0.0 && visibility.is_finite()) {
        return Err(Error::NonPositiveVisibility(visibility));
    }
    Ok((1.0 / epsilon).ln() / visibility)
}

pub fn visibility_subindex(visibility: f64, epsilon: f64, mode: VisibilityMode) -> Result<f64> {
    let a = extinction_coefficient(visibility, epsilon)?;
    Ok(match mode {
        VisibilityMode::LogExtinction => a.ln(),
        VisibilityMode::Mor => (1.0 / epsilon).ln() / a,
    })
}
