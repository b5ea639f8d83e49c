use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use super::word::BitWord;
use crate::error::{Error, Result};

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitWord>,
}

/// Reduced row echelon form together with the pivot columns it produced.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    /// Pivot column of row `r` for `r < rank`.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns without a pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.reduced.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.reduced.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Canonical null-space basis: one vector per free column `f`, equal to 1
    /// at `f`, 0 at every other free column, and forced at the pivots.
    pub fn nullspace_basis(&self) -> Vec<BitWord> {
        let cols = self.reduced.cols;
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = BitWord::zeros(cols);
                v.set(f, true);
                for (r, &p) in self.pivots.iter().enumerate() {
                    if self.reduced.data[r].get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitWord::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equal-length rows. A zero-row matrix needs the
    /// column count passed explicitly.
    pub fn from_rows(cols: usize, rows: Vec<BitWord>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dim(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Parses rows of `0`/`1` strings. Convenient in tests.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.parse::<BitWord>())
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, BitWord::len);
        BitMatrix::from_rows(cols, parsed)
    }

    /// Every entry an independent fair coin.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMatrix {
            rows,
            cols,
            data: (0..rows).map(|_| BitWord::random(cols, rng)).collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitWord {
        &self.data[r]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitWord> {
        self.data.iter()
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &BitWord) -> Result<BitWord> {
        if x.len() != self.cols {
            return Err(Error::dim(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(BitWord::from_bits(self.data.iter().map(|row| row.dot(x))))
    }

    /// `u · self` for a row vector `u` (the sum of the rows selected by `u`).
    pub fn vec_mul(&self, u: &BitWord) -> Result<BitWord> {
        if u.len() != self.rows {
            return Err(Error::dim(format!(
                "vector of length {} against {} rows",
                u.len(),
                self.rows
            )));
        }
        let mut out = BitWord::zeros(self.cols);
        for r in u.ones_iter() {
            out.xor_in(&self.data[r]);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones_iter() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// The submatrix made of the listed columns. The index set must be
    /// strictly increasing and in range.
    pub fn select_columns(&self, indices: &[usize]) -> Result<BitMatrix> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "column index set must be sorted and free of duplicates",
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= self.cols {
                return Err(Error::dim(format!(
                    "column {last} out of range for {} columns",
                    self.cols
                )));
            }
        }
        Ok(BitMatrix {
            rows: self.rows,
            cols: indices.len(),
            data: self.data.iter().map(|row| row.select(indices)).collect(),
        })
    }

    /// Reduced row echelon form. The pivot for each column is the
    /// lowest-index row at or below the current row with a 1 there.
    pub fn echelon(&self) -> Echelon {
        let mut reduced = self.clone();
        let pivots = reduced.reduce_with(|_, _| {});
        Echelon { reduced, pivots }
    }

    /// In-place RREF; `on_op(src, dst)` observes every row operation
    /// (`dst ^= src`, or a swap encoded as `src == dst` never happens) so that
    /// callers can mirror them on an augmented column.
    fn reduce_with<F: FnMut(RowOp, usize)>(&mut self, mut on_op: F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.data[i].get(c)) else {
                continue;
            };
            if p != r {
                self.data.swap(p, r);
                on_op(RowOp::Swap(p), r);
            }
            let from = c / 64;
            let (head, tail) = self.data.split_at_mut(r);
            let (pivot_row, below) = tail.split_first_mut().expect("row r exists");
            for (i, row) in head.iter_mut().enumerate() {
                if row.get(c) {
                    row.xor_in_from(pivot_row, from);
                    on_op(RowOp::AddFrom(r), i);
                }
            }
            for (k, row) in below.iter_mut().enumerate() {
                if row.get(c) {
                    row.xor_in_from(pivot_row, from);
                    on_op(RowOp::AddFrom(r), r + 1 + k);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        // Forward elimination only; no need for the reduced form.
        let mut m = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&i| m[i].get(c)) else {
                continue;
            };
            m.swap(p, rank);
            let (top, below) = m.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            for row in below.iter_mut().filter(|row| row.get(c)) {
                row.xor_in_from(pivot_row, c / 64);
            }
            rank += 1;
        }
        rank
    }

    /// Basis of `{x : self · x = 0}` in the canonical free-column form.
    pub fn nullspace(&self) -> Vec<BitWord> {
        self.echelon().nullspace_basis()
    }

    /// All solutions of `self · x = s`.
    pub fn solve_affine(&self, s: &BitWord) -> Result<SolutionSet> {
        if s.len() != self.rows {
            return Err(Error::dim(format!(
                "right-hand side of length {} for {} rows",
                s.len(),
                self.rows
            )));
        }
        let mut reduced = self.clone();
        let mut rhs = s.clone();
        let pivots = reduced.reduce_with(|op, dst| match op {
            RowOp::Swap(src) => {
                let (a, b) = (rhs.get(src), rhs.get(dst));
                rhs.set(src, b);
                rhs.set(dst, a);
            }
            RowOp::AddFrom(src) => {
                if rhs.get(src) {
                    rhs.flip(dst);
                }
            }
        });
        if (pivots.len()..self.rows).any(|r| rhs.get(r)) {
            return Ok(SolutionSet::Empty);
        }
        let mut particular = BitWord::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            particular.set(p, rhs.get(r));
        }
        let echelon = Echelon { reduced, pivots };
        Ok(SolutionSet::Affine {
            particular,
            nullspace_basis: echelon.nullspace_basis(),
        })
    }
}

#[derive(Clone, Copy)]
enum RowOp {
    /// Row `dst` was swapped with the given row.
    Swap(usize),
    /// The given row was added into `dst`.
    AddFrom(usize),
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

/// The solution set of an affine system `A·x = s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSet {
    /// The system is inconsistent.
    Empty,
    Affine {
        particular: BitWord,
        nullspace_basis: Vec<BitWord>,
    },
}

impl SolutionSet {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SolutionSet::Affine { .. })
    }

    /// Dimension of the solution space, `None` when inconsistent.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            SolutionSet::Empty => None,
            SolutionSet::Affine {
                nullspace_basis, ..
            } => Some(nullspace_basis.len()),
        }
    }

    /// `2^dimension`, or zero for an inconsistent system.
    pub fn solution_count(&self) -> BigUint {
        match self.dimension() {
            None => BigUint::ZERO,
            Some(d) => BigUint::one() << d,
        }
    }

    /// Up to `limit` distinct solutions in Gray-code order: the particular
    /// solution first, then each step flips one basis vector (the one indexed
    /// by the trailing zeros of the step counter).
    pub fn enumerate(&self, limit: usize) -> Vec<BitWord> {
        let SolutionSet::Affine {
            particular,
            nullspace_basis,
        } = self
        else {
            return Vec::new();
        };
        let total = if nullspace_basis.len() >= usize::BITS as usize - 1 {
            usize::MAX
        } else {
            1usize << nullspace_basis.len()
        };
        let count = limit.min(total);
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        let mut current = particular.clone();
        out.push(current.clone());
        for step in 1..count {
            current.xor_in(&nullspace_basis[step.trailing_zeros() as usize]);
            out.push(current.clone());
        }
        out
    }

    /// A solution drawn uniformly from the whole set.
    pub fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<BitWord> {
        let SolutionSet::Affine {
            particular,
            nullspace_basis,
        } = self
        else {
            return None;
        };
        let mut x = particular.clone();
        for b in nullspace_basis {
            if rng.random::<bool>() {
                x.xor_in(b);
            }
        }
        Some(x)
    }
}

/// Rank of a matrix over GF(2).
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Solves `a · x = s`; see [`BitMatrix::solve_affine`].
pub fn solve_affine(a: &BitMatrix, s: &BitWord) -> Result<SolutionSet> {
    a.solve_affine(s)
}

/// See [`SolutionSet::enumerate`].
pub fn enumerate_solutions(ss: &SolutionSet, limit: usize) -> Vec<BitWord> {
    ss.enumerate(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    // Rank oracle: size of the column span, found by summing every subset of
    // columns. rank = log2(|span|).
    fn brute_rank(m: &BitMatrix) -> usize {
        let cols: Vec<BitWord> = (0..m.cols())
            .map(|c| BitWord::from_bits((0..m.rows()).map(|r| m.get(r, c))))
            .collect();
        let mut span = BTreeSet::new();
        for mask in 0u32..(1 << cols.len()) {
            let mut acc = BitWord::zeros(m.rows());
            for (i, col) in cols.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc.xor_in(col);
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    fn all_words(len: usize) -> impl Iterator<Item = BitWord> {
        (0u64..1 << len).map(move |v| BitWord::from_u64(len, v))
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(BitMatrix::identity(2).rank(), 2);
        assert_eq!(BitMatrix::parse_rows(&["11", "11"]).unwrap().rank(), 1);
        assert_eq!(BitMatrix::zeros(0, 0).rank(), 0);
        assert_eq!(BitMatrix::zeros(3, 0).rank(), 0);
    }

    #[test]
    fn rank_matches_span_oracle_on_3x5() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = BitMatrix::random(3, 5, &mut rng);
            assert_eq!(m.rank(), brute_rank(&m), "{m:?}");
            assert_eq!(m.echelon().rank(), m.rank());
        }
    }

    #[test]
    fn rank_does_not_modify_input() {
        let m = BitMatrix::parse_rows(&["110", "011", "101"]).unwrap();
        let copy = m.clone();
        assert_eq!(m.rank(), 2);
        assert_eq!(m, copy);
    }

    #[test]
    fn solve_single_row() {
        let a = BitMatrix::parse_rows(&["11"]).unwrap();
        let ss = a.solve_affine(&"0".parse().unwrap()).unwrap();
        assert_eq!(ss.solution_count(), BigUint::from(2u32));
        let sols: BTreeSet<String> = ss.enumerate(10).iter().map(|w| w.to_string()).collect();
        assert_eq!(sols, BTreeSet::from(["00".into(), "11".into()]));
    }

    #[test]
    fn solve_identity() {
        let ss = BitMatrix::identity(3)
            .solve_affine(&"101".parse().unwrap())
            .unwrap();
        assert_eq!(ss.enumerate(1), vec!["101".parse::<BitWord>().unwrap()]);
        assert_eq!(ss.solution_count(), BigUint::one());
    }

    #[test]
    fn solve_reports_inconsistency_and_dimension_errors() {
        let a = BitMatrix::parse_rows(&["11", "11"]).unwrap();
        let ss = a.solve_affine(&"10".parse().unwrap()).unwrap();
        assert_eq!(ss, SolutionSet::Empty);
        assert!(ss.enumerate(5).is_empty());
        assert_eq!(ss.solution_count(), BigUint::ZERO);
        assert!(a.solve_affine(&"1".parse().unwrap()).is_err());
    }

    #[test]
    fn solve_matches_exhaustive_filter_on_4x6() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = BitMatrix::random(4, 6, &mut rng);
            let s = BitWord::random(4, &mut rng);
            let expected: BTreeSet<BitWord> =
                all_words(6).filter(|x| a.mul_vec(x).unwrap() == s).collect();
            let ss = a.solve_affine(&s).unwrap();
            let got: BTreeSet<BitWord> = ss.enumerate(usize::MAX).into_iter().collect();
            assert_eq!(got, expected);
            if !expected.is_empty() {
                assert_eq!(ss.solution_count(), BigUint::from(expected.len()));
                assert_eq!(ss.dimension(), Some(6 - a.rank()));
            }
        }
    }

    #[test]
    fn enumerate_respects_limit_on_two_dim_nullspace() {
        let a = BitMatrix::parse_rows(&["1100", "0011"]).unwrap();
        let s: BitWord = "10".parse().unwrap();
        let ss = a.solve_affine(&s).unwrap();
        assert_eq!(ss.dimension(), Some(2));
        let three = enumerate_solutions(&ss, 3);
        assert_eq!(three.len(), 3);
        assert_eq!(three.iter().collect::<BTreeSet<_>>().len(), 3);
        for v in &three {
            assert_eq!(a.mul_vec(v).unwrap(), s);
        }
    }

    #[test]
    fn select_columns_rejects_duplicates_and_unsorted() {
        let m = BitMatrix::identity(4);
        assert!(m.select_columns(&[0, 0]).is_err());
        assert!(m.select_columns(&[2, 1]).is_err());
        assert!(m.select_columns(&[4]).is_err());
        let sub = m.select_columns(&[1, 3]).unwrap();
        assert_eq!(sub.rows(), 4);
        assert_eq!(sub.cols(), 2);
        assert!(sub.get(1, 0) && sub.get(3, 1));
    }

    #[test]
    fn transpose_and_products_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = BitMatrix::random(5, 9, &mut rng);
        let u = BitWord::random(5, &mut rng);
        assert_eq!(m.vec_mul(&u).unwrap(), m.transpose().mul_vec(&u).unwrap());
    }

    proptest! {
        #[test]
        fn solutions_round_trip(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = BitMatrix::random(rows, cols, &mut rng);
            // Right-hand side from a known solution, so the system is consistent.
            let x0 = BitWord::random(cols, &mut rng);
            let s = a.mul_vec(&x0).unwrap();
            let ss = a.solve_affine(&s).unwrap();
            prop_assert_eq!(ss.dimension(), Some(cols - a.rank()));
            let sols = ss.enumerate(usize::MAX);
            prop_assert_eq!(BigUint::from(sols.len()), ss.solution_count());
            prop_assert!(sols.contains(&x0));
            for v in &sols {
                prop_assert_eq!(&a.mul_vec(v).unwrap(), &s);
            }
        }

        #[test]
        fn rank_bounded_by_shape(seed in any::<u64>(), rows in 0usize..12, cols in 0usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = BitMatrix::random(rows, cols, &mut rng);
            prop_assert!(a.rank() <= rows.min(cols));
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }
    }
}
