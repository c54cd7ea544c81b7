//! Conditional distribution of one entry of `M = BC`, with `B` of shape
//! `m × 7m` and `C` of shape `7m × m` uniform, given all other entries.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

pub const MAX_BIAS_M: usize = 4;

/// Inner dimension multiplier.
pub const INNER_FACTOR: usize = 7;

/// An `m×m` pattern with exactly one undefined entry. Text form: rows of
/// `0`, `1` and one `?`, separated by `/` (e.g. `00/0?`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskPattern {
    m: usize,
    /// Bit `i·m + j` is entry `(i, j)`; the undefined entry holds 0.
    bits: u64,
    undefined: (usize, usize),
}

impl MaskPattern {
    pub fn new(m: usize, entries: &[Option<bool>]) -> Result<Self> {
        if m == 0 || m > MAX_BIAS_M {
            return Err(Error::InvalidInput(format!("m must be in 1..={MAX_BIAS_M}, got {m}")));
        }
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch(format!("{m}×{m} pattern needs {} entries", m * m)));
        }
        let holes: Vec<usize> = (0..m * m).filter(|&k| entries[k].is_none()).collect();
        if holes.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "pattern needs exactly one undefined entry, found {}",
                holes.len()
            )));
        }
        let bits = (0..m * m).fold(0u64, |b, k| b | (u64::from(entries[k] == Some(true)) << k));
        Ok(Self {
            m,
            bits,
            undefined: (holes[0] / m, holes[0] % m),
        })
    }

    /// Uniform defined entries and a uniform undefined position.
    pub fn random(m: usize, seed: u64) -> Result<Self> {
        let mut r = rng::stream(seed);
        let hole = r.gen_range(0..m.max(1) * m.max(1));
        let entries: Vec<Option<bool>> = (0..m * m).map(|k| (k != hole).then(|| r.gen())).collect();
        Self::new(m, &entries)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn undefined(&self) -> (usize, usize) {
        self.undefined
    }

    fn hole_bit(&self) -> u64 {
        1 << (self.undefined.0 * self.m + self.undefined.1)
    }

    /// The full matrix with the undefined entry set to `v`, as bits.
    fn completed(&self, v: bool) -> u64 {
        if v {
            self.bits | self.hole_bit()
        } else {
            self.bits
        }
    }
}

impl FromStr for MaskPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.trim().split('/').collect();
        let m = rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != m {
                return Err(Error::parse(1, 1, format!("row {} of {s:?} has length {}, expected {m}", i + 1, row.len())));
            }
            for ch in row.chars() {
                entries.push(match ch {
                    '0' => Some(false),
                    '1' => Some(true),
                    '?' => None,
                    other => return Err(Error::parse(1, 1, format!("unexpected {other:?} in pattern"))),
                });
            }
        }
        Self::new(m, &entries)
    }
}

impl fmt::Display for MaskPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.m {
            if i > 0 {
                f.write_str("/")?;
            }
            for j in 0..self.m {
                let c = if (i, j) == self.undefined {
                    '?'
                } else if self.bits >> (i * self.m + j) & 1 == 1 {
                    '1'
                } else {
                    '0'
                };
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Subspaces of `F_2^m`, each as the bitmask of its member vectors.
fn subspaces(m: usize) -> Vec<u32> {
    let mut all = vec![1u32];
    let mut k = 0;
    while k < all.len() {
        let v = all[k];
        for x in 0..1u32 << m {
            if v >> x & 1 == 0 {
                let mut w = v;
                for y in 0..1u32 << m {
                    if v >> y & 1 == 1 {
                        w |= 1 << (x ^ y);
                    }
                }
                if !all.contains(&w) {
                    all.push(w);
                }
            }
        }
        k += 1;
    }
    all.sort_by_key(|v| (v.count_ones(), *v));
    all
}

/// `P(BC = X)` for every completion `X`: given `B`, the columns of `BC` are
/// independent and uniform on the column space of `B`, so only that space
/// matters. The number of `B` with a given column space comes from
/// inclusion-exclusion over its subspaces.
fn completion_probability(m: usize, inner: usize, x: u64) -> f64 {
    let spaces = subspaces(m);
    let mut exact: Vec<u128> = Vec::with_capacity(spaces.len());
    for (i, &v) in spaces.iter().enumerate() {
        let size = v.count_ones() as u128;
        let mut f = size.pow(inner as u32);
        for (j, &w) in spaces[..i].iter().enumerate() {
            if w & !v == 0 {
                f -= exact[j];
            }
        }
        exact.push(f);
    }
    let total = 2f64.powi((m * inner) as i32);
    let column = |j: usize| (0..m).fold(0u32, |c, i| c | ((x >> (i * m + j) & 1) as u32) << i);
    spaces
        .iter()
        .zip(&exact)
        .filter(|(&v, _)| (0..m).all(|j| v >> column(j) & 1 == 1))
        .map(|(&v, &f)| f as f64 / total / (v.count_ones() as f64).powi(m as i32))
        .sum()
}

/// Exact `P(M_pq = 1 | all other entries)` for inner dimension `inner`.
pub fn exact_conditional_probability(mask: &MaskPattern, inner: usize) -> f64 {
    let p1 = completion_probability(mask.m, inner, mask.completed(true));
    let p0 = completion_probability(mask.m, inner, mask.completed(false));
    p1 / (p0 + p1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BiasOptions {
    /// Stop once this many draws matched the pattern.
    pub accepted_target: u64,
    /// Stop after this many draws regardless.
    pub max_draws: u64,
    /// Fewer accepted draws than this gives `InsufficientSamples`.
    pub min_accepted: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasStatus {
    Ok,
    InsufficientSamples,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasEstimate {
    pub m: usize,
    pub inner: usize,
    pub mask: String,
    pub options: BiasOptions,
    pub status: BiasStatus,
    pub draws: u64,
    pub accepted: u64,
    pub ones: u64,
    pub estimate: Option<f64>,
    /// 95% Wilson score interval.
    pub wilson_low: Option<f64>,
    pub wilson_high: Option<f64>,
    /// `(1/2 − 1/m, 1/2 + 1/m)`.
    pub lemma_interval: (f64, f64),
    pub inside_lemma_interval: Option<bool>,
}

const Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    let (s, n) = (successes as f64, n as f64);
    let p = s / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (center - half, center + half)
}

/// Draws per parallel work unit; each unit has its own derived stream.
const CHUNK_DRAWS: u64 = 1 << 16;
const CHUNKS_PER_ROUND: u64 = 64;

fn run_chunk(mask: &MaskPattern, inner: usize, seed: u64, draws: u64) -> (u64, u64) {
    let m = mask.m;
    let lane = (1u64 << inner) - 1;
    let hole = mask.hole_bit();
    let mut r = rng::stream(seed);
    let (mut accepted, mut ones) = (0, 0);
    let mut b = [0u64; MAX_BIAS_M];
    let mut c = [0u64; MAX_BIAS_M];
    for _ in 0..draws {
        for v in b[..m].iter_mut().chain(c[..m].iter_mut()) {
            *v = r.next_u64() & lane;
        }
        let mut x = 0u64;
        for i in 0..m {
            for j in 0..m {
                x |= u64::from((b[i] & c[j]).count_ones() & 1) << (i * m + j);
            }
        }
        if x & !hole == mask.bits {
            accepted += 1;
            ones += u64::from(x & hole != 0);
        }
    }
    (accepted, ones)
}

/// Monte Carlo estimate of `P(M_pq = 1 | other entries)` by rejection
/// sampling. Work is split into fixed chunks with derived seeds and summed
/// in chunk order, so the result does not depend on the thread count.
pub fn estimate_conditional_bias(mask: &MaskPattern, opts: BiasOptions) -> BiasEstimate {
    let m = mask.m;
    let inner = INNER_FACTOR * m;
    let (mut draws, mut accepted, mut ones) = (0u64, 0u64, 0u64);
    let mut next_chunk = 0u64;
    while accepted < opts.accepted_target && draws < opts.max_draws {
        let remaining = opts.max_draws - draws;
        let chunks: Vec<(u64, u64)> = (0..CHUNKS_PER_ROUND)
            .map(|k| {
                let start = k * CHUNK_DRAWS;
                (next_chunk + k, CHUNK_DRAWS.min(remaining.saturating_sub(start)))
            })
            .filter(|&(_, d)| d > 0)
            .collect();
        let results: Vec<(u64, u64)> = chunks
            .par_iter()
            .map(|&(idx, d)| run_chunk(mask, inner, rng::derive_seed(opts.seed, idx), d))
            .collect();
        for (&(_, d), (a, o)) in chunks.iter().zip(results) {
            draws += d;
            accepted += a;
            ones += o;
        }
        next_chunk += chunks.len() as u64;
    }
    let lemma_interval = (0.5 - 1.0 / m as f64, 0.5 + 1.0 / m as f64);
    let ok = accepted >= opts.min_accepted.max(1);
    let estimate = ok.then(|| ones as f64 / accepted as f64);
    let wilson = ok.then(|| wilson_interval(ones, accepted));
    BiasEstimate {
        m,
        inner,
        mask: mask.to_string(),
        options: opts,
        status: if ok { BiasStatus::Ok } else { BiasStatus::InsufficientSamples },
        draws,
        accepted,
        ones,
        estimate,
        wilson_low: wilson.map(|w| w.0),
        wilson_high: wilson.map(|w| w.1),
        lemma_interval,
        inside_lemma_interval: estimate.map(|p| lemma_interval.0 < p && p < lemma_interval.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts over every pair `(B, C)` at a small inner dimension.
    fn brute_force(mask: &MaskPattern, inner: usize) -> f64 {
        let m = mask.m;
        let lane = (1u64 << inner) - 1;
        let (mut hits, mut ones) = (0u64, 0u64);
        let bits = m * inner;
        for bw in 0..1u64 << bits {
            for cw in 0..1u64 << bits {
                let mut x = 0u64;
                for i in 0..m {
                    for j in 0..m {
                        let bi = bw >> (i * inner) & lane;
                        let cj = cw >> (j * inner) & lane;
                        x |= u64::from((bi & cj).count_ones() & 1) << (i * m + j);
                    }
                }
                if x & !mask.hole_bit() == mask.bits {
                    hits += 1;
                    ones += u64::from(x & mask.hole_bit() != 0);
                }
            }
        }
        ones as f64 / hits as f64
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(subspaces(1).len(), 2);
        assert_eq!(subspaces(2).len(), 5);
        assert_eq!(subspaces(3).len(), 16);
        assert_eq!(subspaces(4).len(), 67);
    }

    #[test]
    fn exact_matches_brute_force() {
        for s in ["00/0?", "?0/00", "11/1?", "01/1?", "10/?1"] {
            let mask: MaskPattern = s.parse().unwrap();
            for inner in 1..=4 {
                let e = exact_conditional_probability(&mask, inner);
                let b = brute_force(&mask, inner);
                // NaN on both sides: the pattern is unreachable at this inner dimension.
                assert!((e - b).abs() < 1e-12 || (e.is_nan() && b.is_nan()), "{s} inner={inner}: {e} vs {b}");
            }
        }
        let mask = MaskPattern::random(3, 5).unwrap();
        let e = exact_conditional_probability(&mask, 2);
        assert!((e - brute_force(&mask, 2)).abs() < 1e-12);
    }

    #[test]
    fn mask_text() {
        let m: MaskPattern = "01/1?".parse().unwrap();
        assert_eq!(m.to_string(), "01/1?");
        assert_eq!(m.undefined(), (1, 1));
        assert!("01/11".parse::<MaskPattern>().is_err());
        assert!("0?/1?".parse::<MaskPattern>().is_err());
        assert!("01/1".parse::<MaskPattern>().is_err());
        assert!(MaskPattern::new(5, &[None; 25]).is_err());
    }

    #[test]
    fn wilson_reference() {
        // 50 of 100: p ± 0.0962, shrunk toward 1/2.
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831).abs() < 1e-6 && (hi - 0.596_169).abs() < 1e-6);
    }

    #[test]
    fn estimate_near_exact_at_m2() {
        let mask: MaskPattern = "00/0?".parse().unwrap();
        let exact = exact_conditional_probability(&mask, 14);
        let est = estimate_conditional_bias(
            &mask,
            BiasOptions {
                accepted_target: 20_000,
                max_draws: 10_000_000,
                min_accepted: 100,
                seed: 3,
            },
        );
        assert_eq!(est.status, BiasStatus::Ok);
        let p = est.estimate.unwrap();
        assert!((p - exact).abs() < 0.05, "{p} vs {exact}");
    }

    #[test]
    fn zero_draws_are_insufficient() {
        let mask: MaskPattern = "00/0?".parse().unwrap();
        let est = estimate_conditional_bias(
            &mask,
            BiasOptions {
                accepted_target: 10,
                max_draws: 0,
                min_accepted: 1,
                seed: 0,
            },
        );
        assert_eq!(est.status, BiasStatus::InsufficientSamples);
        assert!(est.estimate.is_none());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let mask = MaskPattern::random(3, 11).unwrap();
        let opts = BiasOptions {
            accepted_target: 2_000,
            max_draws: 5_000_000,
            min_accepted: 1,
            seed: 8,
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_conditional_bias(&mask, opts));
        let b = four.install(|| estimate_conditional_bias(&mask, opts));
        assert_eq!(a, b);
    }
}
