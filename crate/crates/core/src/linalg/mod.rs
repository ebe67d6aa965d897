//! Exact linear algebra: bit-packed matrices over F2 and integer matrices
//! with Smith normal form.

mod f2;
mod intmat;
mod snf;
mod sparse;

use thiserror::Error;

pub use f2::{homology_rank, rank_f2, MatF2};
pub use intmat::IntMatrix;
pub use snf::{smith_normal_form, SmithDecomposition};
pub use sparse::{SparseF2, SPARSE_MAX_DENSITY, SPARSE_MIN_DIM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("composite of consecutive differentials is nonzero")]
    NotAComplex,
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}
