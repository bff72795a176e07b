//! The plain-text matrix format shared by every file the tools read or write.
//!
//! ```text
//! 3 4
//! 1100
//! 0101
//! 0011
//! #blocks 1 1 1
//! ```
//!
//! The header holds `ROWS COLS`, followed by exactly `ROWS` lines of `COLS`
//! characters from `{0,1}`. Lines starting with `#` after the matrix body are
//! annotations; the only one interpreted here is `#blocks`, whose values may
//! be separated by commas or spaces.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// A parsed matrix file: the matrix plus any `#` annotation lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub matrix: BitMatrix,
    pub comments: Vec<String>,
}

impl MatrixFile {
    /// Values of the first `#blocks` annotation, if present.
    pub fn blocks(&self) -> Result<Option<Vec<usize>>> {
        for c in &self.comments {
            if let Some(rest) = c.strip_prefix("#blocks") {
                return parse_list(rest).map(Some);
            }
        }
        Ok(None)
    }
}

/// Parses a comma- or whitespace-separated list of decimals.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("expected a non-negative integer, found {t:?}"),
            })
        })
        .collect()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let dims: Vec<&str> = header.split(' ').collect();
    if dims.len() != 2 {
        return Err(parse_err(hline, "header must be `ROWS COLS`"));
    }
    let parse_dim = |s: &str| -> Result<usize> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(hline, format!("bad dimension {s:?}")));
        }
        s.parse()
            .map_err(|_| parse_err(hline, format!("bad dimension {s:?}")))
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(hline, "dimensions must be positive"));
    }
    let mut m = BitMatrix::zeros(rows, cols);
    for i in 0..rows {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline + i + 1, format!("expected {rows} rows, found {i}")))?;
        if line.len() != cols {
            return Err(parse_err(
                ln,
                format!("expected {cols} characters, found {}", line.len()),
            ));
        }
        for (j, b) in line.bytes().enumerate() {
            match b {
                b'0' => {}
                b'1' => m.set(i, j, true),
                _ => {
                    return Err(parse_err(
                        ln,
                        format!("unexpected character {:?}", b as char),
                    ))
                }
            }
        }
    }
    let mut comments = Vec::new();
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            comments.push(line.to_string());
        } else {
            return Err(parse_err(ln, "trailing data after matrix body"));
        }
    }
    Ok(MatrixFile {
        matrix: m,
        comments,
    })
}

pub fn parse_matrix(text: &str) -> Result<BitMatrix> {
    parse_matrix_file(text).map(|f| f.matrix)
}

/// Serializes `m`, newline-terminated.
pub fn format_matrix(m: &BitMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        out.push_str(&m.row(i).to_string());
        out.push('\n');
    }
    out
}

/// Serializes `m` followed by a `#blocks` line with comma-separated values.
pub fn format_matrix_with_blocks(m: &BitMatrix, blocks: &[usize]) -> String {
    let mut out = format_matrix(m);
    out.push_str("#blocks ");
    out.push_str(
        &blocks
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    out
}

/// A single vector stored as a one-row matrix.
pub fn parse_vector(text: &str) -> Result<BitVector> {
    let m = parse_matrix(text)?;
    if m.rows() != 1 {
        return Err(parse_err(
            1,
            format!("expected a single row, found {}", m.rows()),
        ));
    }
    Ok(m.row(0))
}

pub fn format_vector(v: &BitVector) -> String {
    format!("1 {}\n{}\n", v.len(), v)
}
