//! Boolean matrices: GF(2) and Boolean-semiring algebra, exact rank and
//! determinant, the matrix families under study, and matrix I/O.

mod bitvec;
mod freeness;
mod generators;
mod io;
mod linalg;
mod matrix;

pub use bitvec::BitVec;
pub use freeness::{find_allones_submatrix, is_k_free_exact, kst_bound, Biclique, EXACT_STEP_BUDGET};
pub use generators::{
    binary_expansion_matrix, example_a, example_b, gen_hadamard, gen_random, gen_setintersection,
    gen_sierpinski, setintersection_alignment, MatrixSpec, SetIntersectionAlignment,
};
pub(crate) use generators::check_power_of_two;
#[allow(unused_imports)]
pub(crate) use generators::gen_random_from;
pub use linalg::{log2_abs, RankFactorization};
pub use matrix::BitMatrix;
