//! Exact elimination: GF(2) rank and rank factorization, integer determinant.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::BitMatrix;
use crate::error::{Error, Result};

/// `A = left · right` over GF(2) with `left` of shape `m×r` and `right` of
/// shape `r×n`, where `r` is the GF(2) rank of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFactorization {
    pub left: BitMatrix,
    pub right: BitMatrix,
    pub rank: usize,
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
fn rref(a: &BitMatrix) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut rows: Vec<Vec<u64>> = (0..a.rows()).map(|i| a.row_words(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..a.cols() {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (next..rows.len()).find(|&r| rows[r][w] & b != 0) else {
            continue;
        };
        rows.swap(next, p);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row[w] & b != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    (rows, pivots)
}

impl BitMatrix {
    /// Rank of the row space over GF(2).
    pub fn rank_gf2(&self) -> usize {
        rref(self).1.len()
    }

    /// Factors `A` through its row space: `right` is the reduced echelon basis
    /// and `left(i, j)` is the entry of row `i` at the `j`-th pivot column.
    pub fn rank_factorize_gf2(&self) -> RankFactorization {
        let (basis, pivots) = rref(self);
        let rank = pivots.len();
        let mut right = BitMatrix::zeros(rank, self.cols());
        for (j, words) in basis.iter().enumerate() {
            right.row_words_mut(j).copy_from_slice(words);
        }
        let left = BitMatrix::from_fn(self.rows(), rank, |i, j| self.get(i, pivots[j]));
        RankFactorization { left, right, rank }
    }

    /// Exact determinant of the matrix read as a 0/1 integer matrix.
    ///
    /// Fraction-free (Bareiss) elimination: every intermediate value is itself
    /// a minor of the input, so all divisions are exact.
    pub fn det_int(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let n = self.rows();
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(self.get(i, j) as u8)).collect())
            .collect();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        negate = !negate;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det = if n == 0 { BigInt::one() } else { m[n - 1][n - 1].clone() };
        Ok(if negate { -det } else { det })
    }
}

/// `log2 |x|` for a nonzero big integer, accurate for values of any size.
pub fn log2_abs(x: &BigInt) -> f64 {
    let a = x.abs();
    let bits = a.bits();
    if bits <= 1000 {
        use num_traits::ToPrimitive;
        return a.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    use num_traits::ToPrimitive;
    let top = (&a >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}
