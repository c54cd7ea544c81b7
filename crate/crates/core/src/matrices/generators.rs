//! Matrix families and the fixed example matrices.
//!
//! Row and column `i` (0-based) of `S_n`, `K_n` and `H_n` are identified with
//! the subset of `{0, .., log2 n - 1}` given by the binary expansion of `i`.
//! Under that indexing `S_n(i,j) = [j ⊆ i]`, `K_n(i,j) = [i ∩ j ≠ ∅]` and
//! `H_n(i,j) = 1 ⊕ |i ∩ j| mod 2`.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use super::matrix::BitMatrix;
use crate::error::{Error, Result};
use crate::rng;

pub(crate) fn check_power_of_two(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros())
}

/// The Sierpinski (set disjointness) matrix, `S_1 = (1)`,
/// `S_2n = (S_n 0; S_n S_n)`.
pub fn gen_sierpinski(n: usize) -> Result<BitMatrix> {
    check_power_of_two(n)?;
    Ok(BitMatrix::from_fn(n, n, |i, j| j & !i == 0))
}

/// The set-intersection matrix, `K_1 = (0)`, `K_2n = (K_n K_n; K_n J)`.
pub fn gen_setintersection(n: usize) -> Result<BitMatrix> {
    check_power_of_two(n)?;
    Ok(BitMatrix::from_fn(n, n, |i, j| i & j != 0))
}

/// The Boolean Sylvester-Hadamard matrix, `H_1 = (1)`,
/// `H_2n = (H_n H_n; H_n complement(H_n))`.
pub fn gen_hadamard(n: usize) -> Result<BitMatrix> {
    check_power_of_two(n)?;
    Ok(BitMatrix::from_fn(n, n, |i, j| (i & j).count_ones() % 2 == 0))
}

/// `n × log2 n` matrix whose row `i` is the binary expansion of `i`
/// (column `b` holds bit `b`). Over the Boolean semiring `K_n = B·Bᵀ`.
pub fn binary_expansion_matrix(n: usize) -> Result<BitMatrix> {
    let bits = check_power_of_two(n)? as usize;
    Ok(BitMatrix::from_fn(n, bits, |i, b| (i >> b) & 1 == 1))
}

/// Uniform i.i.d. bits from the seeded stream of [`rng::stream`].
///
/// Rows are filled in order; each row consumes `ceil(n / 64)` words and
/// bit `b` of word `w` becomes column `64w + b`. Surplus bits of the last word
/// are discarded.
pub fn gen_random(rows: usize, cols: usize, seed: u64) -> BitMatrix {
    let mut rng = rng::stream(seed);
    gen_random_from(rows, cols, &mut rng)
}

pub(crate) fn gen_random_from(rows: usize, cols: usize, rng: &mut impl RngCore) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    let tail = cols % 64;
    for i in 0..rows {
        let words = m.row_words_mut(i);
        let last = words.len().saturating_sub(1);
        for (k, w) in words.iter_mut().enumerate() {
            *w = rng.next_u64();
            if k == last && tail != 0 {
                *w &= (1u64 << tail) - 1;
            }
        }
    }
    m
}

/// The 4×4 example separating cancellation-free from general XOR circuits.
pub fn example_a() -> BitMatrix {
    BitMatrix::from_row_strings(&["1100", "1110", "1111", "0111"]).expect("static matrix")
}

/// The 6×6 example separating OR circuits from cancellation-free circuits.
pub fn example_b() -> BitMatrix {
    BitMatrix::from_row_strings(&["001100", "011100", "111100", "001110", "001111", "111111"])
        .expect("static matrix")
}

/// Permutations relating `complement(K_n)` to `S_n`.
///
/// `complement(K_n)[row_perm[i]][col_perm[j]] == S_n[i][j]` for all `i, j`.
/// With the binary-expansion indexing the columns already line up
/// (`col_perm` is the identity) and row `i` of `S_n` is row `n-1-i` of the
/// complement, since `j ⊆ i` iff `j ∩ ¬i = ∅`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetIntersectionAlignment {
    pub col_perm: Vec<usize>,
    pub row_perm: Vec<usize>,
}

pub fn setintersection_alignment(n: usize) -> Result<SetIntersectionAlignment> {
    check_power_of_two(n)?;
    Ok(SetIntersectionAlignment {
        col_perm: (0..n).collect(),
        row_perm: (0..n).map(|i| n - 1 - i).collect(),
    })
}

/// A matrix named on the command line: `sierpinski:8`, `setint:8`,
/// `hadamard:16`, `random:m:n:seed`, `exampleA`, `exampleB`,
/// `identity:n`, `ones:m:n`, `zero:m:n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSpec {
    Sierpinski(usize),
    SetIntersection(usize),
    Hadamard(usize),
    Random { rows: usize, cols: usize, seed: u64 },
    ExampleA,
    ExampleB,
    Identity(usize),
    Ones(usize, usize),
    Zero(usize, usize),
}

impl MatrixSpec {
    pub fn build(&self) -> Result<BitMatrix> {
        match *self {
            MatrixSpec::Sierpinski(n) => gen_sierpinski(n),
            MatrixSpec::SetIntersection(n) => gen_setintersection(n),
            MatrixSpec::Hadamard(n) => gen_hadamard(n),
            MatrixSpec::Random { rows, cols, seed } => Ok(gen_random(rows, cols, seed)),
            MatrixSpec::ExampleA => Ok(example_a()),
            MatrixSpec::ExampleB => Ok(example_b()),
            MatrixSpec::Identity(n) => Ok(BitMatrix::identity(n)),
            MatrixSpec::Ones(m, n) => Ok(BitMatrix::ones(m, n)),
            MatrixSpec::Zero(m, n) => Ok(BitMatrix::zeros(m, n)),
        }
    }
}

impl FromStr for MatrixSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<u64> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidInput(format!("{s}: missing parameter {i}")))?
                .parse::<u64>()
                .map_err(|e| Error::InvalidInput(format!("{s}: {e}")))
        };
        let arity = |k: usize| -> Result<()> {
            if parts.len() != k + 1 {
                return Err(Error::InvalidInput(format!(
                    "{s}: expected {k} parameter(s), got {}",
                    parts.len() - 1
                )));
            }
            Ok(())
        };
        let spec = match parts[0] {
            "sierpinski" => {
                arity(1)?;
                MatrixSpec::Sierpinski(num(1)? as usize)
            }
            "setint" => {
                arity(1)?;
                MatrixSpec::SetIntersection(num(1)? as usize)
            }
            "hadamard" => {
                arity(1)?;
                MatrixSpec::Hadamard(num(1)? as usize)
            }
            "random" => {
                arity(3)?;
                MatrixSpec::Random {
                    rows: num(1)? as usize,
                    cols: num(2)? as usize,
                    seed: num(3)?,
                }
            }
            "exampleA" => {
                arity(0)?;
                MatrixSpec::ExampleA
            }
            "exampleB" => {
                arity(0)?;
                MatrixSpec::ExampleB
            }
            "identity" => {
                arity(1)?;
                MatrixSpec::Identity(num(1)? as usize)
            }
            "ones" => {
                arity(2)?;
                MatrixSpec::Ones(num(1)? as usize, num(2)? as usize)
            }
            "zero" => {
                arity(2)?;
                MatrixSpec::Zero(num(1)? as usize, num(2)? as usize)
            }
            other => return Err(Error::InvalidInput(format!("unknown generator {other:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for MatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSpec::Sierpinski(n) => write!(f, "sierpinski:{n}"),
            MatrixSpec::SetIntersection(n) => write!(f, "setint:{n}"),
            MatrixSpec::Hadamard(n) => write!(f, "hadamard:{n}"),
            MatrixSpec::Random { rows, cols, seed } => write!(f, "random:{rows}:{cols}:{seed}"),
            MatrixSpec::ExampleA => f.write_str("exampleA"),
            MatrixSpec::ExampleB => f.write_str("exampleB"),
            MatrixSpec::Identity(n) => write!(f, "identity:{n}"),
            MatrixSpec::Ones(m, n) => write!(f, "ones:{m}:{n}"),
            MatrixSpec::Zero(m, n) => write!(f, "zero:{m}:{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_row_strings(rows).unwrap()
    }

    /// Quadrant `(qi, qj)` of a `2h × 2h` matrix.
    fn quadrant(a: &BitMatrix, qi: usize, qj: usize) -> BitMatrix {
        let h = a.rows() / 2;
        let rows: Vec<usize> = (qi * h..(qi + 1) * h).collect();
        let cols: Vec<usize> = (qj * h..(qj + 1) * h).collect();
        a.submatrix(&rows, &cols)
    }

    #[test]
    fn base_cases() {
        assert_eq!(gen_sierpinski(1).unwrap(), m(&["1"]));
        assert_eq!(gen_setintersection(1).unwrap(), m(&["0"]));
        assert_eq!(gen_hadamard(1).unwrap(), m(&["1"]));
        assert_eq!(gen_sierpinski(2).unwrap(), m(&["10", "11"]));
        assert_eq!(gen_setintersection(2).unwrap(), m(&["00", "01"]));
        assert_eq!(gen_hadamard(2).unwrap(), m(&["11", "10"]));
    }

    #[test]
    fn block_recursions_hold() {
        for k in 0..6 {
            let h = 1usize << k;
            let (s, s2) = (gen_sierpinski(h).unwrap(), gen_sierpinski(2 * h).unwrap());
            assert_eq!(quadrant(&s2, 0, 0), s);
            assert_eq!(quadrant(&s2, 0, 1), BitMatrix::zeros(h, h));
            assert_eq!(quadrant(&s2, 1, 0), s);
            assert_eq!(quadrant(&s2, 1, 1), s);

            let (kk, k2) = (gen_setintersection(h).unwrap(), gen_setintersection(2 * h).unwrap());
            assert_eq!(quadrant(&k2, 0, 0), kk);
            assert_eq!(quadrant(&k2, 0, 1), kk);
            assert_eq!(quadrant(&k2, 1, 0), kk);
            assert_eq!(quadrant(&k2, 1, 1), BitMatrix::ones(h, h));

            let (hh, h2) = (gen_hadamard(h).unwrap(), gen_hadamard(2 * h).unwrap());
            assert_eq!(quadrant(&h2, 0, 0), hh);
            assert_eq!(quadrant(&h2, 0, 1), hh);
            assert_eq!(quadrant(&h2, 1, 0), hh);
            assert_eq!(quadrant(&h2, 1, 1), hh.complement());
        }
    }

    #[test]
    fn rejects_non_powers_of_two() {
        assert_eq!(gen_sierpinski(6), Err(Error::NotPowerOfTwo(6)));
        assert_eq!(gen_hadamard(0), Err(Error::NotPowerOfTwo(0)));
        assert!(gen_setintersection(12).is_err());
    }

    #[test]
    fn example_matrices_match_printed_rows() {
        let a = example_a();
        assert_eq!(a.row(0).to_string(), "1100");
        let b = example_b();
        assert_eq!(b.row(2).to_string(), "111100");
        assert!(!b.is_symmetric());
        assert_eq!(b.popcount(), 22);
    }

    #[test]
    fn setintersection_is_boolean_square_of_binary_expansions() {
        for n in [1, 2, 4, 8, 32] {
            let b = binary_expansion_matrix(n).unwrap();
            assert_eq!(b.mul_bool(&b.transpose()).unwrap(), gen_setintersection(n).unwrap());
        }
    }

    #[test]
    fn complement_of_setintersection_aligns_with_sierpinski() {
        for n in [1, 2, 4, 8, 16, 64] {
            let s = gen_sierpinski(n).unwrap();
            let kc = gen_setintersection(n).unwrap().complement();
            let al = setintersection_alignment(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(kc.get(al.row_perm[i], al.col_perm[j]), s.get(i, j));
                }
            }
            let mut a: Vec<String> = kc.row_strings();
            let mut b: Vec<String> = s.row_strings();
            a.sort();
            b.sort();
            assert_eq!(a, b, "row multisets differ at n={n}");
        }
    }

    #[test]
    fn random_is_deterministic_and_masked() {
        assert_eq!(gen_random(5, 70, 3), gen_random(5, 70, 3));
        assert_ne!(gen_random(5, 70, 3), gen_random(5, 70, 4));
        let one = gen_random(1, 1, 99);
        assert!(one.popcount() <= 1);
        let wide = gen_random(4, 65, 1);
        assert_eq!(wide.complement().complement(), wide);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["sierpinski:8", "setint:4", "hadamard:16", "random:3:5:42", "exampleA", "exampleB"] {
            let spec: MatrixSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            spec.build().unwrap();
        }
        assert!("sierpinski".parse::<MatrixSpec>().is_err());
        assert!("random:3:5".parse::<MatrixSpec>().is_err());
        assert!("nope:3".parse::<MatrixSpec>().is_err());
    }
}
