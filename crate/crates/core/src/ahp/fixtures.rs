//! Column-normalized judgment matrices for the five sandstorm-risk
//! sub-indicators, scored against the meteorological factors C1..C9.
//!
//! The same matrices ship as text files under `fixtures/matrices/`.

use super::matrix::{JudgmentMatrix, MatrixKind};

fn build(labels: &[&str], rows: &[&[f64]]) -> JudgmentMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let labels = labels.iter().map(|s| s.to_string()).collect();
    JudgmentMatrix::from_labeled_rows(&rows, MatrixKind::ColumnNormalized, labels)
        .expect("fixture matrices are square")
}

/// Visibility indicator (DV).
pub fn b1() -> JudgmentMatrix {
    build(
        &["C6", "C1", "C2", "C3", "C4"],
        &[
            &[0.236, 0.279, 0.234, 0.187, 0.223],
            &[0.170, 0.201, 0.214, 0.270, 0.236],
            &[0.192, 0.179, 0.190, 0.240, 0.210],
            &[0.196, 0.175, 0.186, 0.155, 0.136],
            &[0.206, 0.166, 0.177, 0.147, 0.195],
        ],
    )
}

/// Wind index (U).
pub fn b2() -> JudgmentMatrix {
    build(
        &["C1", "C2", "C5", "C6"],
        &[
            &[0.296, 0.336, 0.279, 0.275],
            &[0.214, 0.242, 0.263, 0.265],
            &[0.244, 0.212, 0.230, 0.231],
            &[0.246, 0.210, 0.228, 0.229],
        ],
    )
}

/// Cooling index (ΔT).
pub fn b3() -> JudgmentMatrix {
    build(
        &["C7", "C1", "C2", "C3", "C4", "C6"],
        &[
            &[0.211, 0.216, 0.178, 0.173, 0.158, 0.365],
            &[0.152, 0.156, 0.163, 0.165, 0.167, 0.126],
            &[0.172, 0.138, 0.145, 0.146, 0.149, 0.112],
            &[0.175, 0.136, 0.142, 0.143, 0.146, 0.110],
            &[0.185, 0.129, 0.135, 0.136, 0.138, 0.104],
            &[0.105, 0.225, 0.236, 0.238, 0.242, 0.182],
        ],
    )
}

/// Sand transport index (P).
pub fn b4() -> JudgmentMatrix {
    build(
        &["C8", "C1", "C2", "C5", "C6"],
        &[
            &[0.258, 0.408, 0.202, 0.199, 0.249],
            &[0.129, 0.204, 0.275, 0.276, 0.259],
            &[0.213, 0.124, 0.167, 0.167, 0.157],
            &[0.215, 0.122, 0.165, 0.166, 0.156],
            &[0.186, 0.141, 0.191, 0.191, 0.180],
        ],
    )
}

/// Development trend indicator (TR).
pub fn b5() -> JudgmentMatrix {
    build(
        &["C9", "C1", "C2", "C4", "C5", "C6"],
        &[
            &[0.211, 0.356, 0.178, 0.161, 0.169, 0.225],
            &[0.108, 0.181, 0.232, 0.236, 0.234, 0.219],
            &[0.172, 0.113, 0.145, 0.148, 0.147, 0.137],
            &[0.183, 0.107, 0.137, 0.140, 0.138, 0.129],
            &[0.178, 0.110, 0.141, 0.143, 0.142, 0.133],
            &[0.149, 0.132, 0.168, 0.171, 0.170, 0.158],
        ],
    )
}

pub fn all() -> [(&'static str, JudgmentMatrix); 5] {
    [
        ("B1", b1()),
        ("B2", b2()),
        ("B3", b3()),
        ("B4", b4()),
        ("B5", b5()),
    ]
}
