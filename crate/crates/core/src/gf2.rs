//! Dense linear algebra over GF(2).

mod invertible;
mod matrix;
mod vector;

pub use invertible::{enumerate_invertible, gl_count, InvertibleMatrices, MAX_INVERTIBLE_DIM};
pub use matrix::{BitMatrix, Echelon};
pub use vector::BitVector;

pub(crate) use invertible::InvertibleRows;
pub(crate) use vector::for_each_one;
