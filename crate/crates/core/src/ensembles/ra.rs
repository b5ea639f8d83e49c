//! Regular nonsystematic repeat-accumulate codes.
//!
//! Each information bit is repeated `q` times, the repeated stream is
//! permuted and then run through an accumulator (a running modulo-2 prefix
//! sum). Only the accumulator outputs are transmitted, so the rate is `1/q`.
//!
//! Graph layout for `k` information bits and `n = q·k`: variables `0..k` are
//! the information (repeat) nodes, variables `k..k+n` are the accumulator
//! outputs in chain order. Check `j` ties accumulator output `j`, output
//! `j − 1` (absent for `j = 0`) and the information bit feeding position `j`
//! of the interleaved stream.

use rand::seq::SliceRandom;

use super::{index_from_bits, Codebook, Family, NodeRole, RaCode, TannerGraph, UserIndex};
use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::seeding::stream_rng;

fn check_interleaver(len: usize, interleaver: &[usize]) -> Result<()> {
    if interleaver.len() != len {
        return Err(Error::dim(format!(
            "interleaver of length {} for a repeated stream of length {len}",
            interleaver.len()
        )));
    }
    let mut seen = vec![false; len];
    for &p in interleaver {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid("interleaver is not a permutation"));
        }
    }
    Ok(())
}

/// Interleaved stream position `j` carries repeated bit `interleaver[j]`,
/// i.e. information bit `interleaver[j] / q`.
pub(crate) fn accumulate(info: &BitWord, q: usize, interleaver: &[usize]) -> BitWord {
    let mut out = BitWord::zeros(interleaver.len());
    let mut acc = false;
    for (j, &p) in interleaver.iter().enumerate() {
        acc ^= info.get(p / q);
        if acc {
            out.set(j, true);
        }
    }
    out
}

/// Tanner graph of the RA code with `k` information bits.
pub fn ra_graph(k: usize, q: usize, interleaver: &[usize]) -> Result<TannerGraph> {
    if q == 0 || k == 0 {
        return Err(Error::invalid("RA code needs q ≥ 1 and at least one information bit"));
    }
    let n = q * k;
    check_interleaver(n, interleaver)?;
    let checks = interleaver
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let mut vars = Vec::with_capacity(3);
            if j > 0 {
                vars.push(k + j - 1);
            }
            vars.push(k + j);
            vars.push(p / q);
            vars
        })
        .collect();
    let roles = (0..k + n)
        .map(|v| if v < k { NodeRole::Repeat } else { NodeRole::Accumulator })
        .collect();
    let chain: Vec<usize> = (k..k + n).collect();
    TannerGraph::new(k + n, checks, roles, chain.clone(), chain)
}

/// Encodes `info` with repetition factor `q` and the given interleaver.
/// Returns the codeword (accumulator outputs) and the code's Tanner graph.
pub fn encode_ra(info: &BitWord, q: usize, interleaver: &[usize]) -> Result<(BitWord, TannerGraph)> {
    let graph = ra_graph(info.len(), q, interleaver)?;
    Ok((accumulate(info, q, interleaver), graph))
}

/// Uniform random permutation of `0..len`.
pub fn random_interleaver(len: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(&mut stream_rng(seed, 2));
    perm
}

/// Rate-`1/q` RA codebook with `info_bits` information bits (so
/// `n = q·info_bits` and `M = 2^info_bits`) and a seeded random interleaver.
pub fn gen_ra_code(info_bits: usize, q: usize, seed: u64) -> Result<Codebook> {
    let interleaver = random_interleaver(q * info_bits, seed);
    let graph = ra_graph(info_bits, q, &interleaver)?;
    Ok(Codebook::from_family(
        q * info_bits,
        seed,
        Family::Ra(RaCode {
            q,
            interleaver,
            graph,
        }),
    ))
}

/// Recovers the information word from an RA codeword: consecutive
/// differences of the accumulator outputs give the interleaved stream, whose
/// `q` copies of each bit must agree.
pub(crate) fn user_of_codeword(word: &BitWord, q: usize, interleaver: &[usize]) -> Option<UserIndex> {
    let k = interleaver.len() / q;
    let mut info: Vec<Option<bool>> = vec![None; k];
    let mut prev = false;
    for (j, &p) in interleaver.iter().enumerate() {
        let cur = word.get(j);
        let bit = cur ^ prev;
        prev = cur;
        match info[p / q] {
            Some(b) if b != bit => return None,
            _ => info[p / q] = Some(bit),
        }
    }
    Some(index_from_bits(info.into_iter().map(|b| b.unwrap_or(false))))
}
