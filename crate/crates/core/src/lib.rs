//! Linear Boolean circuits: straight-line programs over XOR or OR, exact
//! verification through value vectors, cancellation-freeness, synthesis
//! heuristics and block constructions, exact minimum-size search for small
//! matrices, lower-bound certificates, and seeded experiments on random
//! product matrices.

pub mod bounds;
pub mod circuits;
pub mod error;
pub mod exact;
pub mod lab;
pub mod matrices;
pub mod rng;
pub mod synthesis;

pub use error::{Error, Result};
pub use matrices::{BitMatrix, BitVec};
