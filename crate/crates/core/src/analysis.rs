//! Closed-form quantities: entropies, Gilbert–Varshamov distance, the
//! averaging-attack channel, distance spectra and rank-deficiency
//! probabilities.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::ensembles::{Codebook, EnsembleKind};
use crate::error::{Error, Result};
use crate::gf2::{count_rank_matrices, full_rank_count};

/// Shannon entropy in bits, `0·log 0 = 0`.
pub fn entropy(pmf: &[f64]) -> Result<f64> {
    if pmf.iter().any(|&p| !(0.0..=1.0 + 1e-12).contains(&p) || p.is_nan()) {
        return Err(Error::invalid("probabilities must lie in [0, 1]"));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
    }
    Ok(pmf.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

/// `H(p)` for a Bernoulli(p) variable.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Root `δ < 1/2` of `H(δ) = 1 − R`; `0` for `R ≥ 1`, `1/2` for `R ≤ 0`.
pub fn gv_distance(rate: f64) -> f64 {
    if rate >= 1.0 {
        return 0.0;
    }
    if rate <= 0.0 {
        return 0.5;
    }
    let target = 1.0 - rate;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P(Y | X)` of the `t`-pirate averaging channel seen by one pirate: the
/// other `t − 1` symbols are fair antipodal coins. Columns are indexed by the
/// pirate-one count `j = 0..=t`, i.e. `y = (2j − t)/t` in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    t: usize,
    /// `rows[0]` is `x = −1` (bit 0), `rows[1]` is `x = +1` (bit 1).
    rows: [Vec<f64>; 2],
}

impl TransitionMatrix {
    pub fn t(&self) -> usize {
        self.t
    }

    /// `P(count = j | bit)`.
    pub fn prob(&self, bit: bool, j: usize) -> f64 {
        self.rows[bit as usize][j]
    }

    pub fn row(&self, bit: bool) -> &[f64] {
        &self.rows[bit as usize]
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn avg_transition_matrix(t: usize) -> Result<TransitionMatrix> {
    if t < 2 {
        return Err(Error::invalid("the averaging channel needs t ≥ 2"));
    }
    let scale = 0.5f64.powi(t as i32 - 1);
    let zero = (0..=t).map(|j| binomial(t - 1, j) * scale).collect();
    let one = (0..=t)
        .map(|j| if j == 0 { 0.0 } else { binomial(t - 1, j - 1) * scale })
        .collect();
    Ok(TransitionMatrix { t, rows: [zero, one] })
}

/// `I(X; Y)` for uniform `X` through [`avg_transition_matrix`].
pub fn mutual_info_avg(t: usize) -> Result<f64> {
    let tm = avg_transition_matrix(t)?;
    let py: Vec<f64> = (0..=t).map(|j| 0.5 * (tm.prob(false, j) + tm.prob(true, j))).collect();
    let hy = entropy(&py)?;
    let hyx = 0.5 * (entropy(tm.row(false))? + entropy(tm.row(true))?);
    Ok(hy - hyx)
}

/// Rate `1/2^{t−1}` at which erasure-MD decoding of the averaging attack
/// succeeds.
pub fn md_achievable_rate_avg(t: usize) -> Result<f64> {
    if t < 2 {
        return Err(Error::invalid("a coalition has at least two members"));
    }
    Ok(0.5f64.powi(t as i32 - 1))
}

/// Exact distance spectrum of one codebook.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub kind: EnsembleKind,
    pub n: usize,
    pub rate: f64,
    /// `S_c(d)`: unordered codeword pairs at distance `d`, `d = 0..=n`.
    pub pairs: Vec<u64>,
    /// `N_c(d)`: codewords at distance `d` from a fixed codeword, for codes
    /// with linear structure.
    pub per_codeword: Option<Vec<u64>>,
}

impl SpectrumEstimate {
    pub fn total_pairs(&self) -> u128 {
        self.pairs.iter().map(|&c| c as u128).sum()
    }
}

/// Computes `S_c(d)` for every `d`. I.i.d. codebooks compare all pairs;
/// every other ensemble is affine, so `S_c(d) = (M/2)·N_c(d)` with `N_c`
/// read off the weights of `c(u) − c(0)`.
pub fn empirical_distance_spectrum(codebook: &Codebook, cap: u64) -> Result<SpectrumEstimate> {
    let table = codebook.materialize(cap)?;
    let n = codebook.n();
    let m = table.len();
    let mut pairs = vec![0u64; n + 1];
    let per_codeword = if codebook.kind() == EnsembleKind::Iid {
        for i in 0..m {
            let a = table.row(i);
            for j in 0..i {
                let d: u32 = a.iter().zip(table.row(j)).map(|(x, y)| (x ^ y).count_ones()).sum();
                pairs[d as usize] += 1;
            }
        }
        None
    } else {
        let base = table.row(0);
        let mut counts = vec![0u64; n + 1];
        for j in 1..m {
            let d: u32 = base.iter().zip(table.row(j)).map(|(x, y)| (x ^ y).count_ones()).sum();
            counts[d as usize] += 1;
        }
        for (p, &c) in pairs.iter_mut().zip(&counts) {
            *p = c * m as u64 / 2;
        }
        Some(counts)
    };
    Ok(SpectrumEstimate {
        kind: codebook.kind(),
        n,
        rate: codebook.rate(),
        pairs,
        per_codeword,
    })
}

/// Bound `n·2^{n(2R−1+H(1/2+ε))} / 2^{2nR}` on the probability that two
/// i.i.d. codewords are further than `n(1/2 + ε)` apart, clamped to 1.
pub fn close_pair_prob_bound(n: usize, rate: f64, eps: f64) -> f64 {
    let n = n as f64;
    let log2 = n.log2() + n * (2.0 * rate - 1.0 + binary_entropy(0.5 + eps)) - 2.0 * n * rate;
    2f64.powf(log2).min(1.0)
}

/// `a / b` for big integers with `a ≤ b`, keeping ~64 significant bits.
fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let shift = 64 + b.bits() as i64 - a.bits() as i64;
    let q = if shift >= 0 {
        (a << shift as u64) / b
    } else {
        a / (b << (-shift) as u64)
    };
    q.to_f64().expect("finite quotient") * 2f64.powi(-shift as i32)
}

/// `P(rank < e − 1 | rank < e)` for a uniformly random `l × e` binary
/// matrix: `1 − M_b(l,e,e−1) / (2^{le} − M_b(l,e,e))`, evaluated exactly.
pub fn rank_deficiency_probability(l: usize, e: usize) -> Result<f64> {
    let all = BigUint::one() << (l * e);
    let full = count_rank_matrices(l, e, e);
    let deficient = &all - &full;
    if deficient.is_zero() {
        return Err(Error::invalid(format!(
            "every {l}x{e} matrix has full rank; the conditional probability is undefined"
        )));
    }
    let one_short = count_rank_matrices(l, e, e.saturating_sub(1));
    Ok(ratio(&(&deficient - one_short), &deficient))
}

/// `P(rank < e − 1)` for an `l × e` matrix whose columns are uniform subject
/// to summing to zero: `1 − ∏_{p=0}^{e−2}(1 − 2^{p−l})`, evaluated exactly.
///
/// This is the law of the erased-column submatrix in syndrome decoding of
/// two averaged codewords of a random linear code, since their difference
/// is a codeword supported exactly on the erasures.
pub fn rank_deficiency_given_kernel_vector(l: usize, e: usize) -> Result<f64> {
    if e == 0 {
        return Err(Error::invalid("need at least one erased column"));
    }
    let all = BigUint::one() << (l * (e - 1));
    let full = full_rank_count(e - 1, l);
    Ok(ratio(&(&all - full), &all))
}
