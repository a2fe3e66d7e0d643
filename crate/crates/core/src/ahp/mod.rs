//! Indicator weights from pairwise-comparison matrices, with the
//! consistency-ratio test.

mod eigen;
pub mod fixtures;
mod io;
mod matrix;
mod weights;

pub use eigen::{exact_max_eigenvalue, POWER_MAX_ITERATIONS, POWER_TOLERANCE};
pub use io::{format_matrix, parse_matrix, read_matrix_file};
pub use matrix::{
    validate_matrix, JudgmentMatrix, MatrixKind, ValidationReport, Violation, COLUMN_SUM_ATOL,
    RECIPROCAL_RTOL,
};
pub use weights::{
    consistency_ratio, derive_weights, derive_weights_with, embed_weights, EmbeddedWeights,
    RandomIndex, WeightReport, CR_THRESHOLD, RANDOM_INDEX,
};
