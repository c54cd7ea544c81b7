//! Rank statistics of random submatrices, Sylvester's rank inequality, and
//! Ramsey checks.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::{find_allones_submatrix, gen_random, Biclique, BitMatrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankStats {
    pub k: usize,
    pub samples: usize,
    pub min: usize,
    pub mean: f64,
    /// Number of samples per rank.
    pub histogram: BTreeMap<usize, usize>,
}

fn sorted_sample(rng: &mut impl Rng, len: usize, k: usize) -> Vec<usize> {
    let mut v = sample(rng, len, k).into_vec();
    v.sort_unstable();
    v
}

/// GF(2) ranks of `samples` uniformly random `k×k` submatrices of `a`.
pub fn submatrix_rank_stats(a: &BitMatrix, k: usize, samples: usize, seed: u64) -> Result<RankStats> {
    if k > a.rows() || k > a.cols() {
        return Err(Error::InvalidInput(format!(
            "k = {k} exceeds the dimensions {}×{}",
            a.rows(),
            a.cols()
        )));
    }
    let mut rng = rng::stream(seed);
    let mut histogram = BTreeMap::new();
    let mut total = 0usize;
    for _ in 0..samples {
        let rows = sorted_sample(&mut rng, a.rows(), k);
        let cols = sorted_sample(&mut rng, a.cols(), k);
        let r = a.submatrix(&rows, &cols).rank_gf2();
        total += r;
        *histogram.entry(r).or_default() += 1;
    }
    Ok(RankStats {
        k,
        samples,
        min: histogram.keys().next().copied().unwrap_or(0),
        mean: if samples == 0 { 0.0 } else { total as f64 / samples as f64 },
        histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SylvesterReport {
    pub pairs: usize,
    pub violations: usize,
    /// Number of pairs where the inequality holds with equality.
    pub tight: usize,
}

/// `rank(BC) ≥ rank(B) + rank(C) − k` for `B` of shape `m×k`, `C` of shape
/// `k×n`, on `pairs` random pairs with every dimension in `1..=max_dim`.
pub fn sylvester_check(pairs: usize, max_dim: usize, seed: u64) -> SylvesterReport {
    let mut rng = rng::stream(seed);
    let mut violations = 0;
    let mut tight = 0;
    for _ in 0..pairs {
        let (m, k, n) = (
            rng.gen_range(1..=max_dim),
            rng.gen_range(1..=max_dim),
            rng.gen_range(1..=max_dim),
        );
        // Low-rank factors make the inequality tight more often.
        let b = if rng.gen_bool(0.5) {
            gen_random(m, k, rng.gen())
        } else {
            let r = rng.gen_range(1..=k);
            gen_random(m, r, rng.gen()).mul_gf2(&gen_random(r, k, rng.gen())).expect("shapes agree")
        };
        let c = gen_random(k, n, rng.gen());
        let lhs = b.mul_gf2(&c).expect("shapes agree").rank_gf2() as isize;
        let rhs = b.rank_gf2() as isize + c.rank_gf2() as isize - k as isize;
        if lhs < rhs {
            violations += 1;
        } else if lhs == rhs {
            tight += 1;
        }
    }
    SylvesterReport {
        pairs,
        violations,
        tight,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RamseyStatus {
    /// Neither an all-ones nor an all-zeros `t×t` submatrix was found.
    EvidenceRamsey { budget: u64, seed: u64 },
    Refuted {
        #[serde(skip_serializing_if = "Option::is_none")]
        ones: Option<Biclique>,
        #[serde(skip_serializing_if = "Option::is_none")]
        zeros: Option<Biclique>,
    },
}

/// Searches `a` and its complement for a `t×t` all-ones submatrix.
pub fn ramsey_check(a: &BitMatrix, t: usize, budget: u64, seed: u64) -> Result<RamseyStatus> {
    if t < 1 {
        return Err(Error::InvalidInput("t must be at least 1".into()));
    }
    let ones = find_allones_submatrix(a, t - 1, budget, rng::derive_seed(seed, 0));
    let zeros = find_allones_submatrix(&a.complement(), t - 1, budget, rng::derive_seed(seed, 1));
    Ok(if ones.is_none() && zeros.is_none() {
        RamseyStatus::EvidenceRamsey { budget, seed }
    } else {
        RamseyStatus::Refuted { ones, zeros }
    })
}
