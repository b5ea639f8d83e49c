//! Fingerprinting codebook ensembles.
//!
//! A [`Codebook`] maps user indices `0..M` to length-`n` binary fingerprints.
//! Codewords are produced lazily from `(seed, user index)`, so codebooks with
//! astronomically many users are cheap to hold; decoders that scan every
//! codeword call [`Codebook::materialize`] which refuses to go past a cap.

mod linear;
mod protograph;
mod ra;
mod tanner;

pub use linear::{coset_with_key, gen_coset_code, gen_linear_code};
pub use protograph::{build_protograph_code, ProtographSpec};
pub use ra::{encode_ra, gen_ra_code, ra_graph, random_interleaver};
pub use tanner::{NodeRole, TannerGraph};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::seeding::stream_rng;

/// Zero-based user index. Structured codes address users by their
/// information word, which can be hundreds of bits long.
pub type UserIndex = BigUint;

/// Default cap on the number of codewords a decoder may materialize.
pub const DEFAULT_CODEBOOK_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Iid,
    Linear,
    Coset,
    Ra,
    Protograph,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Iid => "iid",
            EnsembleKind::Linear => "linear",
            EnsembleKind::Coset => "coset",
            EnsembleKind::Ra => "ra",
            EnsembleKind::Protograph => "protograph",
        }
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            EnsembleKind::Iid,
            EnsembleKind::Linear,
            EnsembleKind::Coset,
            EnsembleKind::Ra,
            EnsembleKind::Protograph,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown ensemble {s:?}")))
    }
}

/// Random linear code given by its parity-check matrix.
#[derive(Clone, Debug)]
pub(crate) struct LinearCode {
    pub(crate) parity: BitMatrix,
    /// Null-space basis; user bit `j` selects `basis[j]`.
    pub(crate) basis: Vec<BitWord>,
    pub(crate) free_cols: Vec<usize>,
}

/// `u·G + k`. `parity` spans the dual of the row space of `G`.
#[derive(Clone, Debug)]
pub(crate) struct CosetCode {
    pub(crate) generator: BitMatrix,
    pub(crate) key: BitWord,
    pub(crate) parity: BitMatrix,
}

#[derive(Clone, Debug)]
pub(crate) struct RaCode {
    pub(crate) q: usize,
    pub(crate) interleaver: Vec<usize>,
    pub(crate) graph: TannerGraph,
}

#[derive(Clone, Debug)]
pub(crate) struct ProtographCode {
    pub(crate) spec: ProtographSpec,
    pub(crate) lift: usize,
    pub(crate) graph: TannerGraph,
    /// Basis of the code over all variables (punctured included).
    pub(crate) basis: Vec<BitWord>,
    pub(crate) free_cols: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) enum Family {
    Iid { users: u64 },
    Linear(LinearCode),
    Coset(CosetCode),
    Ra(RaCode),
    Protograph(ProtographCode),
}

/// One instance drawn from a codebook ensemble.
#[derive(Clone, Debug)]
pub struct Codebook {
    n: usize,
    seed: u64,
    family: Family,
}

/// Every codeword of a codebook, packed with a fixed word stride.
#[derive(Clone, Debug)]
pub struct CodewordTable {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl CodewordTable {
    /// Table holding `words` in order; user `u` owns `words[u]`.
    pub fn from_words(words: &[BitWord]) -> Result<Self> {
        let n = words.first().map_or(0, BitWord::len);
        if words.iter().any(|w| w.len() != n) {
            return Err(Error::dim("codewords differ in length"));
        }
        let mut table = CodewordTable {
            n,
            stride: n.div_ceil(64),
            words: Vec::with_capacity(words.len() * n.div_ceil(64)),
        };
        for w in words {
            table.push(w);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.words.len().checked_div(self.stride).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn code_length(&self) -> usize {
        self.n
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn row(&self, user: usize) -> &[u64] {
        &self.words[user * self.stride..(user + 1) * self.stride]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.words.chunks_exact(self.stride.max(1))
    }

    pub fn word(&self, user: usize) -> BitWord {
        BitWord::from_words(self.n, self.row(user).to_vec())
    }

    fn push(&mut self, w: &BitWord) {
        self.words.extend_from_slice(w.words());
    }
}

/// `u` as a little-endian bit vector of length `bits`.
pub(crate) fn index_bits(u: &UserIndex, bits: usize) -> BitWord {
    BitWord::from_bits((0..bits).map(|j| u.bit(j as u64)))
}

pub(crate) fn index_from_bits(bits: impl IntoIterator<Item = bool>) -> UserIndex {
    let mut u = BigUint::zero();
    for (j, b) in bits.into_iter().enumerate() {
        if b {
            u.set_bit(j as u64, true);
        }
    }
    u
}

/// Draws an i.i.d. codebook: every bit of every fingerprint is a fair coin
/// determined by `(seed, user, position)`.
pub fn gen_iid_codebook(n: usize, users: u64, seed: u64) -> Result<Codebook> {
    if users < 2 {
        return Err(Error::invalid("a codebook needs at least two users"));
    }
    if n == 0 {
        return Err(Error::invalid("code length must be positive"));
    }
    Ok(Codebook {
        n,
        seed,
        family: Family::Iid { users },
    })
}

fn iid_word(n: usize, seed: u64, user: u64) -> BitWord {
    BitWord::random(n, &mut stream_rng(seed, user))
}

impl Codebook {
    pub(crate) fn from_family(n: usize, seed: u64, family: Family) -> Self {
        Codebook { n, seed, family }
    }

    pub fn kind(&self) -> EnsembleKind {
        match self.family {
            Family::Iid { .. } => EnsembleKind::Iid,
            Family::Linear(_) => EnsembleKind::Linear,
            Family::Coset(_) => EnsembleKind::Coset,
            Family::Ra(_) => EnsembleKind::Ra,
            Family::Protograph(_) => EnsembleKind::Protograph,
        }
    }

    /// Code (fingerprint) length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of information bits for codes addressed by information word.
    pub fn info_bits(&self) -> Option<usize> {
        match &self.family {
            Family::Iid { .. } => None,
            Family::Linear(c) => Some(c.basis.len()),
            Family::Coset(c) => Some(c.generator.rows()),
            Family::Ra(c) => Some(c.interleaver.len() / c.q),
            Family::Protograph(c) => Some(c.basis.len()),
        }
    }

    /// `M`, the number of users.
    pub fn user_count(&self) -> BigUint {
        match &self.family {
            Family::Iid { users } => BigUint::from(*users),
            _ => BigUint::from(1u8) << self.info_bits().unwrap_or(0),
        }
    }

    /// `log2(M) / n`.
    pub fn rate(&self) -> f64 {
        match &self.family {
            Family::Iid { users } => (*users as f64).log2() / self.n as f64,
            _ => self.info_bits().unwrap_or(0) as f64 / self.n as f64,
        }
    }

    /// Parity-check matrix of the underlying linear code (LINEAR and COSET).
    pub fn parity_check(&self) -> Option<&BitMatrix> {
        match &self.family {
            Family::Linear(c) => Some(&c.parity),
            Family::Coset(c) => Some(&c.parity),
            _ => None,
        }
    }

    /// Generator of a COSET codebook.
    pub fn generator(&self) -> Option<&BitMatrix> {
        match &self.family {
            Family::Coset(c) => Some(&c.generator),
            _ => None,
        }
    }

    /// Secret key word of a COSET codebook.
    pub fn key(&self) -> Option<&BitWord> {
        match &self.family {
            Family::Coset(c) => Some(&c.key),
            _ => None,
        }
    }

    pub fn tanner_graph(&self) -> Option<&TannerGraph> {
        match &self.family {
            Family::Ra(c) => Some(&c.graph),
            Family::Protograph(c) => Some(&c.graph),
            _ => None,
        }
    }

    /// RA repetition factor.
    pub fn repeat_factor(&self) -> Option<usize> {
        match &self.family {
            Family::Ra(c) => Some(c.q),
            _ => None,
        }
    }

    pub fn interleaver(&self) -> Option<&[usize]> {
        match &self.family {
            Family::Ra(c) => Some(&c.interleaver),
            _ => None,
        }
    }

    pub fn protograph(&self) -> Option<(&ProtographSpec, usize)> {
        match &self.family {
            Family::Protograph(c) => Some((&c.spec, c.lift)),
            _ => None,
        }
    }

    fn check_user(&self, user: &UserIndex) -> Result<()> {
        if *user >= self.user_count() {
            return Err(Error::invalid(format!(
                "user index {user} out of range for {} users",
                self.user_count()
            )));
        }
        Ok(())
    }

    /// Fingerprint of `user` in binary form.
    pub fn codeword(&self, user: &UserIndex) -> Result<BitWord> {
        self.check_user(user)?;
        Ok(match &self.family {
            Family::Iid { .. } => {
                let u = user.to_u64().expect("checked against a u64 user count");
                iid_word(self.n, self.seed, u)
            }
            Family::Linear(c) => combine(self.n, &c.basis, user, None),
            Family::Coset(c) => {
                let mut w = c
                    .generator
                    .vec_mul(&index_bits(user, c.generator.rows()))
                    .expect("index width equals generator rows");
                w.xor_in(&c.key);
                w
            }
            Family::Ra(c) => {
                let info = index_bits(user, c.interleaver.len() / c.q);
                ra::accumulate(&info, c.q, &c.interleaver)
            }
            Family::Protograph(c) => {
                let vars = combine(c.graph.num_vars(), &c.basis, user, None);
                c.graph.transmitted_word(&vars)
            }
        })
    }

    /// Values of every Tanner-graph variable (hidden ones included) for
    /// `user`. Only for graph codes.
    pub fn variables(&self, user: &UserIndex) -> Result<BitWord> {
        self.check_user(user)?;
        match &self.family {
            Family::Ra(c) => {
                let k = c.interleaver.len() / c.q;
                let info = index_bits(user, k);
                let acc = ra::accumulate(&info, c.q, &c.interleaver);
                Ok(BitWord::from_bits(info.iter().chain(acc.iter())))
            }
            Family::Protograph(c) => Ok(combine(c.graph.num_vars(), &c.basis, user, None)),
            _ => Err(Error::invalid("variable assignment needs a graph code")),
        }
    }

    /// The user whose graph variables are `vars`, if `vars` is a codeword.
    pub fn user_of_variables(&self, vars: &BitWord) -> Option<UserIndex> {
        let graph = self.tanner_graph()?;
        if !graph.satisfies_checks(vars) {
            return None;
        }
        match &self.family {
            Family::Ra(c) => {
                let k = c.interleaver.len() / c.q;
                Some(index_from_bits((0..k).map(|j| vars.get(j))))
            }
            Family::Protograph(c) => Some(index_from_bits(c.free_cols.iter().map(|&f| vars.get(f)))),
            _ => None,
        }
    }

    /// The user owning fingerprint `word`, when that can be read off the code
    /// structure (LINEAR, COSET, RA). `None` if `word` is not a codeword.
    pub fn user_of_codeword(&self, word: &BitWord) -> Option<UserIndex> {
        if word.len() != self.n {
            return None;
        }
        match &self.family {
            Family::Iid { .. } => None,
            Family::Linear(c) => {
                if !c.parity.mul_vec(word).ok()?.is_zero() {
                    return None;
                }
                Some(index_from_bits(c.free_cols.iter().map(|&f| word.get(f))))
            }
            Family::Coset(c) => {
                let plain = word ^ &c.key;
                let sol = c.generator.transpose().solve_affine(&plain).ok()?;
                sol.enumerate(1).pop().map(|u| index_from_bits(u.iter()))
            }
            Family::Ra(c) => ra::user_of_codeword(word, c.q, &c.interleaver),
            Family::Protograph(c) => {
                if c.graph.code_length() != c.graph.num_vars() {
                    return None;
                }
                let mut vars = BitWord::zeros(c.graph.num_vars());
                vars.scatter(c.graph.transmitted(), word);
                self.user_of_variables(&vars)
            }
        }
    }

    /// Writes out every codeword, in user order. Fails when `M > cap`.
    pub fn materialize(&self, cap: u64) -> Result<CodewordTable> {
        let m = self.user_count();
        if m > BigUint::from(cap) {
            return Err(Error::CapExceeded {
                users: m.to_string(),
                cap,
            });
        }
        let m = m.to_u64().expect("bounded by cap") as usize;
        let stride = self.n.div_ceil(64);
        let mut table = CodewordTable {
            n: self.n,
            stride,
            words: Vec::with_capacity(m * stride),
        };
        match &self.family {
            Family::Iid { .. } => {
                for u in 0..m as u64 {
                    table.push(&iid_word(self.n, self.seed, u));
                }
            }
            _ => {
                // Linear structure: c(u) = c(u with its lowest bit cleared) + row(lowest bit).
                let (offset, rows) = self.generator_rows()?;
                table.push(&offset);
                for u in 1..m {
                    let prev = u & (u - 1);
                    let row = &rows[u.trailing_zeros() as usize];
                    let start = table.words.len();
                    table.words.extend_from_within(prev * stride..(prev + 1) * stride);
                    for (a, b) in table.words[start..].iter_mut().zip(row.words()) {
                        *a ^= b;
                    }
                }
            }
        }
        Ok(table)
    }

    /// Affine description `c(u) = offset + Σ_j u_j rows[j]` of every code
    /// except IID.
    fn generator_rows(&self) -> Result<(BitWord, Vec<BitWord>)> {
        let zero = BitWord::zeros(self.n);
        Ok(match &self.family {
            Family::Iid { .. } => return Err(Error::invalid("i.i.d. codebooks are not linear")),
            Family::Linear(c) => (zero, c.basis.clone()),
            Family::Coset(c) => (c.key.clone(), c.generator.row_iter().cloned().collect()),
            Family::Ra(c) => {
                let k = c.interleaver.len() / c.q;
                let rows = (0..k)
                    .map(|j| {
                        let mut e = BitWord::zeros(k);
                        e.set(j, true);
                        ra::accumulate(&e, c.q, &c.interleaver)
                    })
                    .collect();
                (zero, rows)
            }
            Family::Protograph(c) => (
                zero,
                c.basis.iter().map(|b| c.graph.transmitted_word(b)).collect(),
            ),
        })
    }
}

fn combine(len: usize, basis: &[BitWord], user: &UserIndex, offset: Option<&BitWord>) -> BitWord {
    let mut w = offset.cloned().unwrap_or_else(|| BitWord::zeros(len));
    for (j, b) in basis.iter().enumerate() {
        if user.bit(j as u64) {
            w.xor_in(b);
        }
    }
    w
}
