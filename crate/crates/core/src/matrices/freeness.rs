//! All-ones submatrices (bicliques): exact k-freeness and a randomized finder.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bitvec::BitVec;
use super::matrix::BitMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Largest number of elementary steps the exact check will attempt.
pub const EXACT_STEP_BUDGET: u128 = 1_000_000_000;

/// Row and column indices (0-based, ascending) of an all-ones submatrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Biclique {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Biclique {
    pub fn is_all_ones_in(&self, a: &BitMatrix) -> bool {
        self.rows
            .iter()
            .all(|&i| self.cols.iter().all(|&j| i < a.rows() && j < a.cols() && a.get(i, j)))
    }

    fn transposed(self) -> Self {
        Biclique {
            rows: self.cols,
            cols: self.rows,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u128::MAX / 1024 {
            return u128::MAX / 1024;
        }
    }
    acc
}

/// Decides whether `a` has no `(k+1)×(k+1)` all-ones submatrix.
///
/// Returns `Ok(None)` when `a` is k-free, and the lexicographically first
/// witness over row subsets otherwise. Enumeration runs over subsets of the
/// shorter side; it is refused when `C(min(m,n), k+1) · max(m,n)` exceeds
/// [`EXACT_STEP_BUDGET`].
pub fn is_k_free_exact(a: &BitMatrix, k: usize) -> Result<Option<Biclique>> {
    if k == 0 {
        return Err(Error::InvalidInput("k-freeness needs k >= 1".into()));
    }
    let (short, long) = (a.rows().min(a.cols()), a.rows().max(a.cols()));
    let size = k + 1;
    if size > short {
        return Ok(None);
    }
    let steps = binomial(short, size).saturating_mul(long as u128);
    if steps > EXACT_STEP_BUDGET {
        return Err(Error::EnumerationBudget {
            steps,
            budget: EXACT_STEP_BUDGET,
        });
    }
    if a.rows() <= a.cols() {
        Ok(search_row_subsets(a, size))
    } else {
        Ok(search_row_subsets(&a.transpose(), size).map(Biclique::transposed))
    }
}

fn search_row_subsets(a: &BitMatrix, size: usize) -> Option<Biclique> {
    fn rec(
        a: &BitMatrix,
        size: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        common: &BitVec,
    ) -> Option<Biclique> {
        if chosen.len() == size {
            return Some(Biclique {
                rows: chosen.clone(),
                cols: common.iter_ones().take(size).collect(),
            });
        }
        let need = size - chosen.len();
        for r in start..=a.rows() - need {
            let mut next = common.clone();
            for (x, y) in next.words_mut().iter_mut().zip(a.row_words(r)) {
                *x &= y;
            }
            if next.count_ones() < size {
                continue;
            }
            chosen.push(r);
            if let Some(w) = rec(a, size, r + 1, chosen, &next) {
                return Some(w);
            }
            chosen.pop();
        }
        None
    }
    let all = BitMatrix::ones(1, a.cols()).row(0);
    rec(a, size, 0, &mut Vec::with_capacity(size), &all)
}

/// Randomized greedy search for a `(k+1)×(k+1)` all-ones submatrix.
///
/// Each restart picks a random start row and repeatedly adds the row that
/// keeps the most common columns, with random tie-breaking among near-best
/// candidates. One step is one row intersection. Returns a verified witness,
/// or `None` when the budget runs out (evidence, not proof, of freeness).
pub fn find_allones_submatrix(a: &BitMatrix, k: usize, budget: u64, seed: u64) -> Option<Biclique> {
    let size = k + 1;
    if size > a.rows() || size > a.cols() {
        return None;
    }
    let candidates: Vec<usize> = (0..a.rows()).filter(|&i| a.row_weight(i) >= size).collect();
    if candidates.len() < size {
        return None;
    }
    let mut rng = rng::stream(seed);
    let mut steps: u64 = 0;
    let m = a.rows();
    while steps < budget {
        let start = candidates[rng.gen_range(0..candidates.len())];
        let mut chosen = vec![start];
        let mut common = a.row(start);
        let mut used = vec![false; m];
        used[start] = true;
        let slack = rng.gen_range(0..=2usize);
        while chosen.len() < size {
            let mut scores: Vec<(usize, usize)> = Vec::new();
            let mut best = 0;
            for &r in &candidates {
                if used[r] {
                    continue;
                }
                steps += 1;
                let s: usize = common
                    .words()
                    .iter()
                    .zip(a.row_words(r))
                    .map(|(x, y)| (x & y).count_ones() as usize)
                    .sum();
                if s >= size {
                    best = best.max(s);
                    scores.push((r, s));
                }
            }
            scores.retain(|&(_, s)| s + slack >= best);
            if scores.is_empty() {
                break;
            }
            let (r, _) = scores[rng.gen_range(0..scores.len())];
            used[r] = true;
            chosen.push(r);
            for (x, y) in common.words_mut().iter_mut().zip(a.row_words(r)) {
                *x &= y;
            }
            if steps >= budget && chosen.len() < size {
                break;
            }
        }
        if chosen.len() == size && common.count_ones() >= size {
            chosen.sort_unstable();
            let w = Biclique {
                rows: chosen,
                cols: common.iter_ones().take(size).collect(),
            };
            debug_assert!(w.is_all_ones_in(a));
            if w.is_all_ones_in(a) {
                return Some(w);
            }
        }
    }
    None
}

/// Kővári-Sós-Turán cap on the number of ones in an `(a-1)`-free `n×n`
/// matrix: `(a-1)^(1/a) n^(2-1/a) + (a-1) n`.
pub fn kst_bound(n: usize, a: usize) -> f64 {
    let (n, a) = (n as f64, a as f64);
    (a - 1.0).powf(1.0 / a) * n.powf(2.0 - 1.0 / a) + (a - 1.0) * n
}
