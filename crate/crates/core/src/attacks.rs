//! Coalition strategies and the marking-assumption check.
//!
//! Positions are 0-based throughout. Binary fingerprints map to antipodal
//! symbols as bit 1 ↔ +1, bit 0 ↔ −1.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Codebook, UserIndex};
use crate::error::{Error, Result};
use crate::gf2::BitWord;

/// A set of `t ≥ 2` distinct users and their binary fingerprints.
#[derive(Clone, Debug)]
pub struct Coalition {
    users: Vec<UserIndex>,
    words: Vec<BitWord>,
}

impl Coalition {
    pub fn new(users: Vec<UserIndex>, words: Vec<BitWord>) -> Result<Self> {
        if users.len() != words.len() {
            return Err(Error::dim("one fingerprint per coalition member required"));
        }
        if users.len() < 2 {
            return Err(Error::invalid("a coalition has at least two members"));
        }
        let n = words[0].len();
        if words.iter().any(|w| w.len() != n) {
            return Err(Error::dim("coalition fingerprints differ in length"));
        }
        let mut sorted: Vec<&UserIndex> = users.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::invalid("coalition members must be distinct"));
        }
        Ok(Coalition { users, words })
    }

    /// Coalition of users `0..t` holding the given words.
    pub fn from_words(words: Vec<BitWord>) -> Result<Self> {
        let users = (0..words.len()).map(BigUint::from).collect();
        Coalition::new(users, words)
    }

    pub fn from_codebook(codebook: &Codebook, users: Vec<UserIndex>) -> Result<Self> {
        let words = users
            .iter()
            .map(|u| codebook.codeword(u))
            .collect::<Result<Vec<_>>>()?;
        Coalition::new(users, words)
    }

    /// `t` users drawn uniformly without replacement.
    pub fn sample<R: Rng + ?Sized>(codebook: &Codebook, t: usize, rng: &mut R) -> Result<Self> {
        let users = sample_users(&codebook.user_count(), t, rng)?;
        Coalition::from_codebook(codebook, users)
    }

    pub fn t(&self) -> usize {
        self.users.len()
    }

    pub fn n(&self) -> usize {
        self.words[0].len()
    }

    pub fn users(&self) -> &[UserIndex] {
        &self.users
    }

    pub fn words(&self) -> &[BitWord] {
        &self.words
    }

    pub fn contains(&self, user: &UserIndex) -> bool {
        self.users.contains(user)
    }
}

/// Uniform integer in `0..m`.
pub(crate) fn random_below<R: Rng + ?Sized>(m: &BigUint, rng: &mut R) -> BigUint {
    if let Some(m) = m.to_u64() {
        return BigUint::from(rng.random_range(0..m));
    }
    let bits = (m - 1u8).bits();
    loop {
        let digits: Vec<u64> = (0..bits.div_ceil(64)).map(|_| rng.random()).collect();
        let mut v = BigUint::zero();
        for (i, d) in digits.iter().enumerate() {
            v |= BigUint::from(*d) << (64 * i);
        }
        v &= (BigUint::one() << bits) - 1u8;
        if &v < m {
            return v;
        }
    }
}

/// `t` distinct users out of `m`, uniformly, in draw order.
pub fn sample_users<R: Rng + ?Sized>(m: &BigUint, t: usize, rng: &mut R) -> Result<Vec<UserIndex>> {
    if *m < BigUint::from(t) {
        return Err(Error::invalid(format!("cannot pick {t} distinct users out of {m}")));
    }
    if let Some(small) = m.to_usize() {
        if small <= 1 << 24 {
            return Ok(index::sample(rng, small, t).into_iter().map(BigUint::from).collect());
        }
    }
    let mut users: Vec<UserIndex> = Vec::with_capacity(t);
    while users.len() < t {
        let u = random_below(m, rng);
        if !users.contains(&u) {
            users.push(u);
        }
    }
    Ok(users)
}

/// What the pirates hand over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForgedCopy {
    /// Averaging attack output. `counts[i]` is the number of pirates whose
    /// symbol at `i` is +1, so `y_i = (2·counts[i] − t)/t`.
    Averaged { t: usize, counts: Vec<u32> },
    /// A binary forgery under the marking assumption.
    Binary(BitWord),
}

impl ForgedCopy {
    pub fn len(&self) -> usize {
        match self {
            ForgedCopy::Averaged { counts, .. } => counts.len(),
            ForgedCopy::Binary(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Real-valued symbol at `i`: `(2c − t)/t`, or ±1 for binary copies.
    pub fn value(&self, i: usize) -> f64 {
        match self {
            ForgedCopy::Averaged { t, counts } => (2.0 * counts[i] as f64 - *t as f64) / *t as f64,
            ForgedCopy::Binary(w) => {
                if w.get(i) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn as_binary(&self) -> Option<&BitWord> {
        match self {
            ForgedCopy::Binary(w) => Some(w),
            ForgedCopy::Averaged { .. } => None,
        }
    }

    pub fn as_averaged(&self) -> Option<(usize, &[u32])> {
        match self {
            ForgedCopy::Averaged { t, counts } => Some((*t, counts)),
            ForgedCopy::Binary(_) => None,
        }
    }
}

/// Positions of an averaged copy split into erased (`|y_i| < 1`) and
/// unerased ones, with the bit value read off each unerased position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasurePattern {
    n: usize,
    erased: Vec<usize>,
    unerased: Vec<usize>,
    /// Bit at each unerased position (1 for `y_i = +1`); zero on erasures.
    known: BitWord,
    mask: BitWord,
}

impl ErasurePattern {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Erased positions, increasing.
    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn unerased(&self) -> &[usize] {
        &self.unerased
    }

    /// Bit values on the unerased positions; erased positions read 0.
    pub fn known_bits(&self) -> &BitWord {
        &self.known
    }

    /// Indicator word of the erased positions.
    pub fn erased_mask(&self) -> &BitWord {
        &self.mask
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.mask.get(i)
    }
}

/// `c_i` = number of pirates with bit 1 (antipodal +1) at `i`.
pub fn averaging_attack(coalition: &Coalition) -> ForgedCopy {
    let mut counts = vec![0u32; coalition.n()];
    for w in coalition.words() {
        for i in w.ones_iter() {
            counts[i] += 1;
        }
    }
    ForgedCopy::Averaged {
        t: coalition.t(),
        counts,
    }
}

pub fn erasures_from_average(y: &ForgedCopy) -> Result<ErasurePattern> {
    let (t, counts) = y
        .as_averaged()
        .ok_or_else(|| Error::invalid("erasures are defined for averaged copies only"))?;
    let n = counts.len();
    let mut pattern = ErasurePattern {
        n,
        erased: Vec::new(),
        unerased: Vec::new(),
        known: BitWord::zeros(n),
        mask: BitWord::zeros(n),
    };
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 || c as usize == t {
            pattern.unerased.push(i);
            if c > 0 {
                pattern.known.set(i, true);
            }
        } else {
            pattern.erased.push(i);
            pattern.mask.set(i, true);
        }
    }
    Ok(pattern)
}

/// Indicator of the positions where the coalition's bits are not all equal.
pub fn detectable_mask(coalition: &Coalition) -> BitWord {
    let first = &coalition.words()[0];
    let mut mask = BitWord::zeros(first.len());
    for w in &coalition.words()[1..] {
        let diff = first ^ w;
        let merged: Vec<u64> = mask.words().iter().zip(diff.words()).map(|(a, b)| a | b).collect();
        mask = BitWord::from_words(first.len(), merged);
    }
    mask
}

/// Detectable positions, increasing.
pub fn detectable_positions(coalition: &Coalition) -> Vec<usize> {
    detectable_mask(coalition).ones_iter().collect()
}

/// Two pirates keep their common bits and put an independent fair coin on
/// every detectable position.
pub fn memoryless_marking_attack<R: Rng + ?Sized>(coalition: &Coalition, rng: &mut R) -> Result<ForgedCopy> {
    if coalition.t() != 2 {
        return Err(Error::invalid(format!(
            "the memoryless marking attack is defined for two pirates, got {}",
            coalition.t()
        )));
    }
    let x1 = &coalition.words()[0];
    let mask = detectable_mask(coalition);
    let coins = BitWord::random(x1.len(), rng);
    let words = x1
        .words()
        .iter()
        .zip(mask.words())
        .zip(coins.words())
        .map(|((x, d), r)| (x & !d) | (r & d))
        .collect();
    Ok(ForgedCopy::Binary(BitWord::from_words(x1.len(), words)))
}

/// `y = x1 + x2 + x3` over GF(2).
pub fn xor3_attack(x1: &BitWord, x2: &BitWord, x3: &BitWord) -> Result<ForgedCopy> {
    if x1.len() != x2.len() || x1.len() != x3.len() {
        return Err(Error::dim("xor attack needs words of equal length"));
    }
    let mut y = x1 ^ x2;
    y.xor_in(x3);
    Ok(ForgedCopy::Binary(y))
}

/// A coalition of `t ≥ 3` picks three members uniformly and applies
/// [`xor3_attack`] to them, ignoring the rest.
pub fn xor3_coalition_attack<R: Rng + ?Sized>(coalition: &Coalition, rng: &mut R) -> Result<ForgedCopy> {
    if coalition.t() < 3 {
        return Err(Error::invalid("the xor attack needs at least three pirates"));
    }
    let pick = index::sample(rng, coalition.t(), 3);
    let w = coalition.words();
    xor3_attack(&w[pick.index(0)], &w[pick.index(1)], &w[pick.index(2)])
}

/// Whether `y` leaves every undetectable position of the coalition intact.
/// An averaged copy passes when its count is `0` or `t` on those positions
/// in agreement with the pirates.
pub fn validate_marking(y: &ForgedCopy, coalition: &Coalition) -> bool {
    if y.len() != coalition.n() {
        return false;
    }
    let x1 = &coalition.words()[0];
    let mask = detectable_mask(coalition);
    match y {
        ForgedCopy::Binary(w) => w
            .words()
            .iter()
            .zip(x1.words())
            .zip(mask.words())
            .all(|((a, b), d)| (a ^ b) & !d == 0),
        ForgedCopy::Averaged { t, counts } => {
            *t == coalition.t()
                && (0..y.len())
                    .filter(|&i| !mask.get(i))
                    .all(|i| counts[i] as usize == if x1.get(i) { *t } else { 0 })
        }
    }
}

/// Named attacks the harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    /// Averaging of antipodal symbols, any `t`.
    Average,
    /// Memoryless marking attack, `t = 2`.
    Marking,
    /// Modulo-2 sum of three pirates' words.
    Xor3,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Average => "average",
            AttackKind::Marking => "marking",
            AttackKind::Xor3 => "xor3",
        }
    }

    pub fn produces_binary(self) -> bool {
        !matches!(self, AttackKind::Average)
    }

    pub fn apply<R: Rng + ?Sized>(self, coalition: &Coalition, rng: &mut R) -> Result<ForgedCopy> {
        match self {
            AttackKind::Average => Ok(averaging_attack(coalition)),
            AttackKind::Marking => memoryless_marking_attack(coalition, rng),
            AttackKind::Xor3 => xor3_coalition_attack(coalition, rng),
        }
    }
}
