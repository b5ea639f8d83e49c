//! Sum-product decoding over a binary symmetric channel, flooding schedule,
//! messages as log-likelihood ratios `log P(0)/P(1)`.

use num_bigint::BigUint;

use super::{DecodeOutcome, DecodeStatus, Diagnostics};
use crate::attacks::ForgedCopy;
use crate::ensembles::{Codebook, TannerGraph};
use crate::error::{Error, Result};
use crate::gf2::BitWord;

/// Magnitude cap on every log-likelihood ratio, channel prior included.
pub const LLR_CLAMP: f64 = 30.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BscDecodeResult {
    /// Hard decision on every graph variable.
    pub vars: BitWord,
    /// Whether the hard decision satisfies every check.
    pub converged: bool,
    pub iterations: usize,
}

/// Runs at most `max_iters` flooding iterations and stops as soon as the
/// hard decision satisfies every check. Hidden variables start from a zero
/// prior.
pub fn bp_bsc(graph: &TannerGraph, y: &BitWord, crossover: f64, max_iters: usize) -> Result<BscDecodeResult> {
    if !(crossover > 0.0 && crossover < 0.5) {
        return Err(Error::invalid(format!("crossover must lie in (0, 1/2), got {crossover}")));
    }
    if y.len() != graph.code_length() {
        return Err(Error::dim("received word length differs from the code length"));
    }
    let prior = ((1.0 - crossover) / crossover).ln().min(LLR_CLAMP);
    let mut channel = vec![0.0f64; graph.num_vars()];
    for (i, &v) in graph.transmitted().iter().enumerate() {
        channel[v] = if y.get(i) { -prior } else { prior };
    }

    // Edges laid out check by check.
    let m = graph.num_checks();
    let mut offsets = Vec::with_capacity(m + 1);
    let mut edge_var = Vec::with_capacity(graph.num_edges());
    offsets.push(0);
    for c in 0..m {
        edge_var.extend_from_slice(graph.check_neighbors(c));
        offsets.push(edge_var.len());
    }
    let mut var_edges = vec![Vec::new(); graph.num_vars()];
    for (e, &v) in edge_var.iter().enumerate() {
        var_edges[v].push(e);
    }

    let mut v2c: Vec<f64> = edge_var.iter().map(|&v| channel[v]).collect();
    let mut c2v = vec![0.0f64; edge_var.len()];
    let mut tanhs = Vec::new();
    let mut suffix = Vec::new();
    let mut hard: Vec<bool> = channel.iter().map(|&l| l < 0.0).collect();

    let satisfied = |hard: &[bool]| {
        (0..m).all(|c| edge_var[offsets[c]..offsets[c + 1]].iter().filter(|&&v| hard[v]).count() % 2 == 0)
    };
    let has_hidden = graph.code_length() < graph.num_vars();
    if !has_hidden && satisfied(&hard) {
        return Ok(BscDecodeResult {
            vars: BitWord::from_bits(hard),
            converged: true,
            iterations: 0,
        });
    }

    for iter in 1..=max_iters {
        for c in 0..m {
            let (lo, hi) = (offsets[c], offsets[c + 1]);
            tanhs.clear();
            tanhs.extend(v2c[lo..hi].iter().map(|&l| (0.5 * l).tanh()));
            suffix.clear();
            suffix.resize(tanhs.len() + 1, 1.0);
            for k in (0..tanhs.len()).rev() {
                suffix[k] = suffix[k + 1] * tanhs[k];
            }
            let mut prefix = 1.0;
            for k in 0..tanhs.len() {
                let p = (prefix * suffix[k + 1]).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                c2v[lo + k] = (2.0 * p.atanh()).clamp(-LLR_CLAMP, LLR_CLAMP);
                prefix *= tanhs[k];
            }
        }
        for (v, edges) in var_edges.iter().enumerate() {
            let total = channel[v] + edges.iter().map(|&e| c2v[e]).sum::<f64>();
            hard[v] = total < 0.0;
            for &e in edges {
                v2c[e] = (total - c2v[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
        if satisfied(&hard) {
            return Ok(BscDecodeResult {
                vars: BitWord::from_bits(hard),
                converged: true,
                iterations: iter,
            });
        }
    }
    Ok(BscDecodeResult {
        vars: BitWord::from_bits(hard),
        converged: false,
        iterations: max_iters,
    })
}

/// BSC decoding of a binary forged copy; a converged decision accuses the
/// user whose information bits it carries.
pub fn bp_bsc_decode(codebook: &Codebook, y: &ForgedCopy, crossover: f64, max_iters: usize) -> Result<DecodeOutcome> {
    let graph = codebook
        .tanner_graph()
        .ok_or_else(|| Error::invalid("BP decoding needs a graph code"))?;
    let word = y
        .as_binary()
        .ok_or_else(|| Error::invalid("BSC decoding needs a binary forged copy"))?;
    let result = bp_bsc(graph, word, crossover, max_iters)?;
    let diagnostics = Diagnostics {
        iterations: result.iterations,
        ..Diagnostics::default()
    };
    if !result.converged {
        return Ok(DecodeOutcome::failed(diagnostics));
    }
    let user = codebook
        .user_of_variables(&result.vars)
        .ok_or_else(|| Error::Runtime("converged word violates the code".into()))?;
    Ok(DecodeOutcome {
        status: DecodeStatus::Identified,
        accused: Some(user),
        candidates: BigUint::from(1u8),
        codeword: Some(graph.transmitted_word(&result.vars)),
        diagnostics,
    })
}
