//! Exact counts of binary matrices by rank.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest `rows * cols` accepted by [`brute_force_rank_count`].
pub const BRUTE_FORCE_MAX_ENTRIES: usize = 25;

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

/// Number of `rows × cols` binary matrices of full row rank `rows`:
/// `∏_{p<rows} (2^cols − 2^p)`. Zero when `rows > cols`.
pub fn full_rank_count(rows: usize, cols: usize) -> BigUint {
    if rows > cols {
        return BigUint::zero();
    }
    let top = pow2(cols);
    (0..rows).map(|p| &top - pow2(p)).product()
}

/// Number of `l1 × m1` binary matrices of rank exactly `k1`.
///
/// Builds the table row by row. Appending a row to a matrix of rank `k`
/// either stays inside its row space (`2^k` choices) or leaves it
/// (`2^cols − 2^k` choices), which gives
/// `M(i, c, k) = M(i−1, c, k)·2^k + M(i−1, c, k−1)·(2^c − 2^{k−1})`;
/// the diagonal `M(i, c, i)` is the full-rank product. Symmetric in
/// `(l1, m1)`, so the shorter side is used as the row count.
pub fn count_rank_matrices(l1: usize, m1: usize, k1: usize) -> BigUint {
    let (rows, cols) = if l1 <= m1 { (l1, m1) } else { (m1, l1) };
    if k1 > rows {
        return BigUint::zero();
    }
    let top = pow2(cols);
    // table[k] holds M(i, cols, k) for the current i.
    let mut table = vec![BigUint::zero(); k1 + 1];
    // Rank 0 only for the all-zero matrix.
    table[0] = BigUint::one();
    for i in 1..=rows {
        let kmax = i.min(k1);
        for k in (1..=kmax).rev() {
            table[k] = if k == i {
                full_rank_count(i, cols)
            } else {
                &table[k] * pow2(k) + &table[k - 1] * (&top - pow2(k - 1))
            };
        }
    }
    std::mem::take(&mut table[k1])
}

/// Counts `l1 × m1` matrices of rank `k1` by enumerating all `2^(l1·m1)` of
/// them. Refuses more than [`BRUTE_FORCE_MAX_ENTRIES`] entries.
pub fn brute_force_rank_count(l1: usize, m1: usize, k1: usize) -> Result<BigUint> {
    if l1 * m1 > BRUTE_FORCE_MAX_ENTRIES {
        return Err(Error::invalid(format!(
            "brute-force enumeration limited to {BRUTE_FORCE_MAX_ENTRIES} entries, got {l1}x{m1}"
        )));
    }
    Ok(BigUint::from(rank_histogram(l1, m1).get(k1).copied().unwrap_or(0)))
}

/// Counts of `rows × cols` matrices of each rank, by enumeration.
fn rank_histogram(rows: usize, cols: usize) -> Vec<u64> {
    let mut hist = vec![0u64; rows.min(cols) + 1];
    let entries = rows * cols;
    let row_mask = (1u32 << cols) - 1;
    let mut scratch = vec![0u32; rows];
    for bits in 0u64..(1u64 << entries) {
        for (r, slot) in scratch.iter_mut().enumerate() {
            *slot = (bits >> (r * cols)) as u32 & row_mask;
        }
        hist[small_rank(&mut scratch)] += 1;
    }
    hist
}

/// Rank of a small matrix given as row masks; clobbers the rows.
fn small_rank(rows: &mut [u32]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for row in &mut rows[i + 1..] {
            if *row & low != 0 {
                *row ^= pivot;
            }
        }
    }
    rank
}
