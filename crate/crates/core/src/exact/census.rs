//! Optimal sizes of every `n × n` matrix for tiny `n`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{optimal_size, Model, SearchOptions};
use crate::error::{Error, Result};
use crate::matrices::BitMatrix;

pub const MAX_CENSUS_N: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct CensusEntry {
    pub rows: Vec<String>,
    pub xor: usize,
    pub cf: usize,
    pub or: usize,
}

/// Number of matrices per optimal size.
pub type ModelHistogram = BTreeMap<usize, usize>;

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub n: usize,
    pub matrices: usize,
    pub histograms: BTreeMap<Model, ModelHistogram>,
    /// Largest `C_CF / C_XOR` over matrices with `C_XOR > 0`.
    pub max_cf_xor_ratio: f64,
    /// First matrix (in enumeration order) attaining the maximum ratio.
    pub max_ratio_matrix: Option<CensusEntry>,
    /// Matrices where some model disagrees with the others.
    pub separations: Vec<CensusEntry>,
    pub nodes_expanded: u64,
}

/// Optimal sizes in all three models for all `2^(n²)` matrices. Matrix `k`
/// in enumeration order has entry `(i, j)` equal to bit `i·n + j` of `k`.
pub fn census(n: usize) -> Result<Census> {
    if n > MAX_CENSUS_N {
        return Err(Error::InvalidInput(format!(
            "census enumerates 2^(n²) matrices; n must be at most {MAX_CENSUS_N}, got {n}"
        )));
    }
    let count = 1usize << (n * n);
    let mut histograms: BTreeMap<Model, ModelHistogram> = BTreeMap::new();
    let mut max_ratio = 1.0f64;
    let mut max_ratio_matrix = None;
    let mut separations = Vec::new();
    let mut nodes = 0u64;
    for k in 0..count {
        let a = BitMatrix::from_fn(n, n, |i, j| k >> (i * n + j) & 1 == 1);
        let mut sizes = [0usize; 3];
        for (slot, m) in Model::ALL.into_iter().enumerate() {
            let o = optimal_size(&a, m, SearchOptions::default())?;
            nodes += o.nodes_expanded;
            let s = o.optimal_size.expect("3×3 optima are far below the limit");
            sizes[slot] = s;
            *histograms.entry(m).or_default().entry(s).or_default() += 1;
        }
        let entry = || CensusEntry {
            rows: a.row_strings(),
            xor: sizes[0],
            cf: sizes[1],
            or: sizes[2],
        };
        if sizes[0] > 0 {
            let r = sizes[1] as f64 / sizes[0] as f64;
            if r > max_ratio {
                max_ratio = r;
                max_ratio_matrix = Some(entry());
            }
        }
        if sizes[0] != sizes[1] || sizes[1] != sizes[2] {
            separations.push(entry());
        }
    }
    Ok(Census {
        n,
        matrices: count,
        histograms,
        max_cf_xor_ratio: max_ratio,
        max_ratio_matrix,
        separations,
        nodes_expanded: nodes,
    })
}
