use std::fmt;

use super::bitvec::{words_for, BitVec, WORD};
use crate::error::{Error, Result};

/// Dense Boolean matrix with bit-packed rows.
///
/// Dimensions are fixed at construction. Zero-sized dimensions are allowed so
/// that empty products and empty rank factors have a representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// The all-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::zeros(rows, cols).complement()
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows written as strings of `0`/`1`.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has length {}, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
            for (j, ch) in r.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(i, j, true),
                    other => {
                        return Err(Error::parse(i + 1, j + 1, format!("unexpected {other:?}")))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[BitVec], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_words(self.row_words(i).to_vec(), self.cols)
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Row `i` as a single word; only valid when `cols <= 64`.
    pub(crate) fn row_u64(&self, i: usize) -> u64 {
        debug_assert!(self.cols <= WORD);
        if self.stride == 0 {
            0
        } else {
            self.data[i * self.stride]
        }
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.rows).map(|i| self.row(i))
    }

    /// Number of ones, written `|A|`.
    pub fn popcount(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.popcount() as f64 / (self.rows * self.cols) as f64
    }

    /// Entrywise NOT.
    pub fn complement(&self) -> Self {
        let mut m = self.clone();
        for w in &mut m.data {
            *w = !*w;
        }
        m.mask_tails();
        m
    }

    fn mask_tails(&mut self) {
        let r = self.cols % WORD;
        if r == 0 || self.stride == 0 {
            return;
        }
        let mask = (1u64 << r) - 1;
        for i in 0..self.rows {
            self.data[i * self.stride + self.stride - 1] &= mask;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in BitVec::from_words(self.row_words(i).to_vec(), self.cols).iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    fn check_product(&self, other: &BitMatrix) -> Result<()> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn product_with(&self, other: &BitMatrix, combine: impl Fn(&mut u64, u64)) -> Result<Self> {
        self.check_product(other)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let picks: Vec<usize> =
                BitVec::from_words(self.row_words(i).to_vec(), self.cols).iter_ones().collect();
            let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
            for k in picks {
                for (d, &s) in dst.iter_mut().zip(other.row_words(k)) {
                    combine(d, s);
                }
            }
        }
        Ok(out)
    }

    /// Product over GF(2): entry `(i,j)` is the parity of `A(i,k)·B(k,j)`.
    pub fn mul_gf2(&self, other: &BitMatrix) -> Result<Self> {
        self.product_with(other, |d, s| *d ^= s)
    }

    /// Product over the Boolean semiring: entry `(i,j)` is `OR_k A(i,k) ∧ B(k,j)`.
    pub fn mul_bool(&self, other: &BitMatrix) -> Result<Self> {
        self.product_with(other, |d, s| *d |= s)
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec_gf2(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(BitVec::from_bools(
            &(0..self.rows).map(|i| self.row(i).dot(x)).collect::<Vec<_>>(),
        ))
    }

    /// Matrix-vector product over the Boolean semiring.
    pub fn mul_vec_bool(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(BitVec::from_bools(
            &(0..self.rows).map(|i| self.row(i).intersects(x)).collect::<Vec<_>>(),
        ))
    }

    /// The submatrix picking the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Copy of the matrix with the listed columns set to zero.
    pub fn zero_columns(&self, cols: &[usize]) -> Self {
        let mut m = self.clone();
        for i in 0..m.rows {
            for &j in cols {
                m.set(i, j, false);
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// Rows as `0`/`1` strings.
    pub fn row_strings(&self) -> Vec<String> {
        (0..self.rows).map(|i| self.row(i).to_string()).collect()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.row_strings().iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            f.write_str(r)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{self}")
    }
}
