//! Lower-bound certificates and a per-matrix report.
//!
//! Only the exact quantities are gate counts: the Sierpinski closed form,
//! the number of distinct rows of weight at least 2, and `log2 |det|`. The
//! k-freeness quantity `|A| / k²` bounds OR circuits only up to an unknown
//! constant and is reported raw.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrices::{
    check_power_of_two, find_allones_submatrix, gen_sierpinski, is_k_free_exact, kst_bound, log2_abs,
    Biclique, BitMatrix, BitVec,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Morgenstern {
    /// `det = 0`; the bound degenerates to 0.
    Singular,
    Nonsingular { log2_abs_det: f64, abs_det: String },
}

impl Morgenstern {
    /// The bound in gates: `log2 |det|`, or 0 for singular matrices.
    pub fn value(&self) -> f64 {
        match self {
            Morgenstern::Singular => 0.0,
            Morgenstern::Nonsingular { log2_abs_det, .. } => *log2_abs_det,
        }
    }
}

/// `log2 |det(A)|` with `A` read as an integer matrix.
pub fn morgenstern(a: &BitMatrix) -> Result<Morgenstern> {
    let det = a.det_int()?;
    if det == num_bigint::BigInt::from(0) {
        return Ok(Morgenstern::Singular);
    }
    let abs = num_traits::Signed::abs(&det);
    Ok(Morgenstern::Nonsingular {
        log2_abs_det: log2_abs(&det),
        abs_det: abs.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KFreeStatus {
    ExactFree,
    ExactNotFree { witness: Biclique },
    /// The exact check was too large and the randomized finder found nothing.
    EvidenceFree { budget: u64, seed: u64 },
    /// The exact check was too large and no search was requested.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KFreeEntry {
    pub k: usize,
    #[serde(flatten)]
    pub status: KFreeStatus,
    /// `|A| / k²`; meaningful as a bound only when the matrix is k-free.
    pub quantity: f64,
}

/// Decides k-freeness exactly when the enumeration is affordable, otherwise
/// searches for a `(k+1)×(k+1)` all-ones submatrix with `evidence_budget`
/// steps (0 skips the search).
pub fn kfree_quantity(a: &BitMatrix, k: usize, evidence_budget: u64, seed: u64) -> Result<KFreeEntry> {
    let status = match is_k_free_exact(a, k) {
        Ok(None) => KFreeStatus::ExactFree,
        Ok(Some(witness)) => KFreeStatus::ExactNotFree { witness },
        Err(Error::EnumerationBudget { .. }) => {
            if evidence_budget == 0 {
                KFreeStatus::Unknown
            } else {
                match find_allones_submatrix(a, k, evidence_budget, seed) {
                    Some(witness) => KFreeStatus::ExactNotFree { witness },
                    None => KFreeStatus::EvidenceFree {
                        budget: evidence_budget,
                        seed,
                    },
                }
            }
        }
        Err(e) => return Err(e),
    };
    Ok(KFreeEntry {
        k,
        status,
        quantity: a.popcount() as f64 / (k * k) as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KstCheck {
    pub a: usize,
    pub cap: f64,
    pub popcount: usize,
    pub within_cap: bool,
}

/// The Kővári-Sós-Turán cap for `(a-1)`-free `n×n` matrices against the
/// number of ones of `A`. A matrix over the cap cannot be `(a-1)`-free.
pub fn kst_cap(a: &BitMatrix, t: usize) -> Result<KstCheck> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if t < 2 {
        return Err(Error::InvalidInput("the KST cap needs a >= 2".into()));
    }
    let cap = kst_bound(a.rows(), t);
    let popcount = a.popcount();
    Ok(KstCheck {
        a: t,
        cap,
        popcount,
        within_cap: popcount as f64 <= cap,
    })
}

/// GF(2) rank and the number of distinct rows of weight at least 2. Each
/// such row needs a gate of its own, so the latter bounds every model.
pub fn trivial_bounds(a: &BitMatrix) -> (usize, usize) {
    let mut heavy: Vec<BitVec> = a.rows_iter().filter(|r| r.count_ones() >= 2).collect();
    heavy.sort();
    heavy.dedup();
    (a.rank_gf2(), heavy.len())
}

/// `n/2 · log2 n`, the cancellation-free and OR size of `S_n`.
pub fn sierpinski_lb(n: usize) -> Result<usize> {
    let log = check_power_of_two(n)? as usize;
    Ok(n / 2 * log)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixId {
    pub rows: usize,
    pub cols: usize,
    /// SHA-256 of the plain-text serialization.
    pub sha256: String,
}

impl MatrixId {
    pub fn of(a: &BitMatrix) -> Self {
        let digest = Sha256::digest(a.to_text().as_bytes());
        Self {
            rows: a.rows(),
            cols: a.cols(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundOptions {
    pub kfree: Vec<usize>,
    pub kst: Vec<usize>,
    pub evidence_budget: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub matrix: MatrixId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morgenstern: Option<Morgenstern>,
    pub kfree: Vec<KFreeEntry>,
    pub kst: Vec<KstCheck>,
    pub rank_gf2: usize,
    pub distinct_heavy_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sierpinski_closed_form: Option<usize>,
    pub notes: Vec<String>,
}

pub fn bound_report(a: &BitMatrix, opts: &BoundOptions) -> Result<BoundReport> {
    let mut notes = Vec::new();
    let morgenstern = if a.is_square() {
        notes.push("morgenstern: log2|det| of the 0/1 integer matrix, a cancellation-free gate bound".into());
        Some(morgenstern(a)?)
    } else {
        notes.push("morgenstern: skipped, matrix is not square".into());
        None
    };
    let (rank_gf2, distinct_heavy_rows) = trivial_bounds(a);
    notes.push("distinct_heavy_rows: distinct rows of weight >= 2, a gate bound in every model".into());
    let sierpinski_closed_form = if a.is_square() && a.rows().is_power_of_two() && *a == gen_sierpinski(a.rows())? {
        notes.push("sierpinski_closed_form: matrix is S_n; n/2 log2 n is its exact cancellation-free and OR size".into());
        Some(sierpinski_lb(a.rows())?)
    } else {
        None
    };
    let kfree = opts
        .kfree
        .iter()
        .map(|&k| kfree_quantity(a, k, opts.evidence_budget, opts.seed))
        .collect::<Result<Vec<_>>>()?;
    if !kfree.is_empty() {
        notes.push("kfree: |A|/k^2 is an OR-size bound only up to an unspecified constant; evidence_free is not a proof".into());
    }
    let kst = opts.kst.iter().map(|&t| kst_cap(a, t)).collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        matrix: MatrixId::of(a),
        morgenstern,
        kfree,
        kst,
        rank_gf2,
        distinct_heavy_rows,
        sierpinski_closed_form,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{optimal_size, Model, SearchOptions};
    use crate::matrices::{example_a, example_b, gen_hadamard, gen_random};
    use crate::synthesis::sierpinski_circuit;

    /// `|det H_n| = 2^(1-n) n^(n/2)`: `H_n = (J + Had_n)/2` with `Had_n` the
    /// ±1 Hadamard matrix, whose eigenvalues give the closed form.
    fn hadamard_log2_det(n: usize) -> f64 {
        let l = (n as f64).log2();
        1.0 - n as f64 + n as f64 / 2.0 * l
    }

    #[test]
    fn morgenstern_values() {
        for n in [1usize, 2, 4, 8, 16, 32] {
            assert_eq!(morgenstern(&gen_sierpinski(n).unwrap()).unwrap().value(), 0.0);
        }
        assert_eq!(morgenstern(&gen_hadamard(2).unwrap()).unwrap().value(), 0.0);
        let mut prev = 0.0;
        for n in [4usize, 8, 16, 32, 64] {
            let m = morgenstern(&gen_hadamard(n).unwrap()).unwrap().value();
            assert!((m - hadamard_log2_det(n)).abs() < 1e-9, "n={n}: {m}");
            assert!(m > prev);
            prev = m;
        }
        assert_eq!(morgenstern(&BitMatrix::ones(3, 3)).unwrap(), Morgenstern::Singular);
        assert!(morgenstern(&BitMatrix::ones(2, 3)).is_err());
    }

    #[test]
    fn kfree_statuses() {
        let e = kfree_quantity(&BitMatrix::identity(6), 1, 0, 0).unwrap();
        assert_eq!((e.status.clone(), e.quantity), (KFreeStatus::ExactFree, 6.0));
        let e = kfree_quantity(&gen_sierpinski(4).unwrap(), 1, 0, 0).unwrap();
        match e.status {
            KFreeStatus::ExactNotFree { witness } => {
                assert!(witness.is_all_ones_in(&gen_sierpinski(4).unwrap()))
            }
            other => panic!("{other:?}"),
        }
        let big = gen_random(256, 256, 5);
        let e = kfree_quantity(&big, 12, 0, 0).unwrap();
        assert_eq!(e.status, KFreeStatus::Unknown);
        let e = kfree_quantity(&big, 12, 20_000, 7).unwrap();
        assert_eq!(e.status, KFreeStatus::EvidenceFree { budget: 20_000, seed: 7 });
    }

    #[test]
    fn kst_examples() {
        let j = kst_cap(&BitMatrix::ones(4, 4), 2).unwrap();
        assert_eq!((j.cap, j.within_cap), (12.0, false));
        assert!(kst_cap(&BitMatrix::identity(4), 2).unwrap().within_cap);
        assert!(kst_cap(&BitMatrix::identity(4), 1).is_err());
        for seed in 0..20 {
            let a = gen_random(10, 10, seed);
            for k in 1..=3 {
                if is_k_free_exact(&a, k).unwrap().is_none() {
                    assert!(kst_cap(&a, k + 1).unwrap().within_cap);
                }
            }
        }
    }

    #[test]
    fn trivial_and_sierpinski() {
        assert_eq!(trivial_bounds(&BitMatrix::identity(5)), (5, 0));
        assert_eq!(trivial_bounds(&example_a()), (4, 4));
        assert_eq!(trivial_bounds(&gen_sierpinski(8).unwrap()), (8, 7));
        assert_eq!(sierpinski_lb(2).unwrap(), 1);
        assert_eq!(sierpinski_lb(8).unwrap(), 12);
        assert_eq!(sierpinski_lb(1024).unwrap(), 5120);
        assert!(sierpinski_lb(12).is_err());
        for n in [2usize, 4, 8, 16, 1024] {
            assert_eq!(sierpinski_lb(n).unwrap(), sierpinski_circuit(n).unwrap().cost);
        }
        for n in [2usize, 4] {
            let o = optimal_size(&gen_sierpinski(n).unwrap(), Model::Or, SearchOptions::default()).unwrap();
            assert_eq!(o.optimal_size, Some(sierpinski_lb(n).unwrap()));
        }
    }

    #[test]
    fn reports() {
        let r = bound_report(&gen_sierpinski(8).unwrap(), &BoundOptions::default()).unwrap();
        assert_eq!(r.morgenstern.as_ref().unwrap().value(), 0.0);
        assert_eq!(r.sierpinski_closed_form, Some(12));
        assert_eq!((r.rank_gf2, r.distinct_heavy_rows), (8, 7));
        let r = bound_report(&BitMatrix::identity(4), &BoundOptions::default()).unwrap();
        assert_eq!((r.rank_gf2, r.distinct_heavy_rows, r.sierpinski_closed_form), (4, 0, None));
        let r = bound_report(&gen_hadamard(16).unwrap(), &BoundOptions::default()).unwrap();
        assert_eq!(r.morgenstern.unwrap().value(), hadamard_log2_det(16));
        assert_eq!(MatrixId::of(&example_a()), MatrixId::of(&example_a()));
        assert_ne!(MatrixId::of(&example_a()).sha256, MatrixId::of(&example_b()).sha256);
    }

    /// Sound bounds stay below the exact optima on random small matrices.
    #[test]
    fn bounds_below_optima() {
        for seed in 0..60 {
            let a = gen_random(4, 4, seed);
            let cf = optimal_size(&a, Model::Cf, SearchOptions::default()).unwrap().optimal_size.unwrap();
            let xor = optimal_size(&a, Model::Xor, SearchOptions::default()).unwrap().optimal_size.unwrap();
            let (_, heavy) = trivial_bounds(&a);
            assert!(heavy <= xor);
            assert!(morgenstern(&a).unwrap().value() <= cf as f64, "seed {seed}");
        }
    }
}
