//! Matrix text format: a header line `m n`, then `m` lines of `0`/`1`.
//! Also accepts the JSON wrapper `{"rows":m,"cols":n,"data":["0110",..]}`.

use serde::{Deserialize, Serialize};

use super::matrix::BitMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct JsonMatrix {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

impl BitMatrix {
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows(), self.cols());
        for r in self.row_strings() {
            s.push_str(&r);
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(JsonMatrix {
            rows: self.rows(),
            cols: self.cols(),
            data: self.row_strings(),
        })
        .expect("plain data serializes")
    }

    /// Parses either the text format or the JSON wrapper.
    pub fn parse(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            Self::parse_json(input)
        } else {
            Self::parse_text(input)
        }
    }

    pub fn parse_json(input: &str) -> Result<Self> {
        let j: JsonMatrix =
            serde_json::from_str(input).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        if j.data.len() != j.rows {
            return Err(Error::DimensionMismatch(format!(
                "header says {} rows, data has {}",
                j.rows,
                j.data.len()
            )));
        }
        let m = BitMatrix::from_row_strings(&j.data)?;
        if j.rows > 0 && m.cols() != j.cols {
            return Err(Error::DimensionMismatch(format!(
                "header says {} columns, rows have {}",
                j.cols,
                m.cols()
            )));
        }
        Ok(if j.rows == 0 { BitMatrix::zeros(0, j.cols) } else { m })
    }

    pub fn parse_text(input: &str) -> Result<Self> {
        let mut lines = input.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines.next().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::parse(1, 1, "header must be \"<rows> <cols>\""));
        }
        let parse_dim = |s: &str, col: usize| {
            s.parse::<usize>()
                .map_err(|e| Error::parse(1, col, format!("bad dimension {s:?}: {e}")))
        };
        let rows = parse_dim(dims[0], 1)?;
        let cols = parse_dim(dims[1], dims[0].len() + 2)?;
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(i + 2, 1, format!("expected {rows} rows, found {i}")))?;
            if line.chars().count() != cols {
                return Err(Error::parse(
                    i + 2,
                    line.chars().count().min(cols) + 1,
                    format!("row has {} entries, expected {cols}", line.chars().count()),
                ));
            }
            for (j, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(i, j, true),
                    other => return Err(Error::parse(i + 2, j + 1, format!("unexpected {other:?}"))),
                }
            }
        }
        for (extra, line) in lines.enumerate() {
            if !line.trim().is_empty() {
                return Err(Error::parse(rows + 2 + extra, 1, "trailing data after matrix"));
            }
        }
        Ok(m)
    }
}
