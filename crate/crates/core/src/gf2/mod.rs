//! Linear algebra over GF(2): packed words, dense matrices, affine solving and
//! exact rank counting.

mod count;
mod matrix;
mod word;

pub use count::{
    brute_force_rank_count, count_rank_matrices, full_rank_count, BRUTE_FORCE_MAX_ENTRIES,
};
pub use matrix::{enumerate_solutions, rank, solve_affine, BitMatrix, Echelon, SolutionSet};
pub use word::BitWord;
