//! Plain-text judgment matrix files.
//!
//! ```text
//! # C6 C1 C2 C3 C4
//! 5 column_normalized
//! 0.236 0.279 0.234 0.187 0.223
//! ...
//! ```
//!
//! The first non-comment line is `n kind`; the next `n` non-comment lines are
//! the rows. A `#` line whose token count equals `n` supplies the labels.
//! Raw entries may be written as fractions (`1/3`).

use std::path::Path;

use super::matrix::{JudgmentMatrix, MatrixKind};
use crate::error::{Error, Result};

fn file_err(line: usize, message: impl Into<String>) -> Error {
    Error::MatrixFile {
        line,
        message: message.into(),
    }
}

fn parse_entry(token: &str, line: usize) -> Result<f64> {
    let value = match token.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| file_err(line, format!("bad numerator in `{token}`")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| file_err(line, format!("bad denominator in `{token}`")))?;
            num / den
        }
        None => token
            .parse()
            .map_err(|_| file_err(line, format!("bad number `{token}`")))?,
    };
    Ok(value)
}

pub fn parse_matrix(text: &str) -> Result<JudgmentMatrix> {
    let mut comments: Vec<Vec<String>> = Vec::new();
    let mut header: Option<(usize, MatrixKind)> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            comments.push(rest.split_whitespace().map(str::to_string).collect());
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match header {
            None => {
                if tokens.len() != 2 {
                    return Err(file_err(line, "expected header `n kind`"));
                }
                let n: usize = tokens[0]
                    .parse()
                    .map_err(|_| file_err(line, format!("bad order `{}`", tokens[0])))?;
                if n == 0 {
                    return Err(file_err(line, "order must be positive"));
                }
                let kind: MatrixKind = tokens[1].parse().map_err(|e: String| file_err(line, e))?;
                header = Some((n, kind));
            }
            Some((n, _)) => {
                if rows.len() == n {
                    return Err(file_err(line, format!("more than {n} rows")));
                }
                if tokens.len() != n {
                    return Err(file_err(
                        line,
                        format!("expected {n} entries, found {}", tokens.len()),
                    ));
                }
                let row = tokens
                    .iter()
                    .map(|t| parse_entry(t, line))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
        }
    }

    let (n, kind) = header.ok_or_else(|| file_err(last_line.max(1), "missing header `n kind`"))?;
    if rows.len() != n {
        return Err(file_err(
            last_line.max(1),
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let labels = comments
        .into_iter()
        .find(|c| c.len() == n)
        .unwrap_or_else(|| (1..=n).map(|i| i.to_string()).collect());
    JudgmentMatrix::from_labeled_rows(&rows, kind, labels)
}

pub fn read_matrix_file(path: &Path) -> Result<JudgmentMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text)
}

/// Renders a matrix in the file format read by [`parse_matrix`].
pub fn format_matrix(m: &JudgmentMatrix) -> String {
    let mut out = format!("# {}\n{} {}\n", m.labels().join(" "), m.order(), m.kind());
    for row in m.entries().row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
