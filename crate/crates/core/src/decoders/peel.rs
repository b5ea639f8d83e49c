//! Peeling decoder for erasures on a Tanner graph, and the guessing variant
//! that breaks the stopping set left by two averaged pirates.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{DecodeOutcome, DecodeStatus, Diagnostics};
use crate::attacks::{erasures_from_average, Coalition, ForgedCopy};
use crate::ensembles::{Codebook, TannerGraph};
use crate::error::{Error, Result};
use crate::gf2::BitWord;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Guess {
    node: usize,
    value: bool,
    snapshot: Vec<Option<bool>>,
}

/// Variable values (`None` = erased) plus a stack of guesses, each holding
/// the state it replaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpState {
    values: Vec<Option<bool>>,
    stack: Vec<Guess>,
    n_max: usize,
}

impl BpState {
    /// Every variable erased; at most `n_max` nested guesses.
    pub fn new(num_vars: usize, n_max: usize) -> Self {
        BpState {
            values: vec![None; num_vars],
            stack: Vec::new(),
            n_max,
        }
    }

    /// Transmitted variables take the unerased symbols of an averaged copy;
    /// erased positions and hidden variables start erased.
    pub fn from_forged(graph: &TannerGraph, y: &ForgedCopy, n_max: usize) -> Result<Self> {
        if y.len() != graph.code_length() {
            return Err(Error::dim("forged copy length differs from the code length"));
        }
        let e = erasures_from_average(y)?;
        let mut state = BpState::new(graph.num_vars(), n_max);
        for &i in e.unerased() {
            state.values[graph.transmitted()[i]] = Some(e.known_bits().get(i));
        }
        Ok(state)
    }

    pub fn value(&self, var: usize) -> Option<bool> {
        self.values[var]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var] = Some(value);
    }

    pub fn is_erased(&self, var: usize) -> bool {
        self.values[var].is_none()
    }

    pub fn erased(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&v| self.is_erased(v)).collect()
    }

    pub fn erased_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn guess_depth(&self) -> usize {
        self.stack.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Fixes `node` to `value`, remembering the current state.
    pub fn push_guess(&mut self, node: usize, value: bool) -> Result<()> {
        if self.stack.len() >= self.n_max {
            return Err(Error::invalid(format!("guess depth limited to {}", self.n_max)));
        }
        self.stack.push(Guess {
            node,
            value,
            snapshot: self.values.clone(),
        });
        self.values[node] = Some(value);
        Ok(())
    }

    /// Undoes the latest guess, restoring the state from before it.
    pub fn pop_guess(&mut self) -> Option<(usize, bool)> {
        let g = self.stack.pop()?;
        self.values = g.snapshot;
        Some((g.node, g.value))
    }

    /// The full assignment, if nothing is erased.
    pub fn to_word(&self) -> Option<BitWord> {
        self.values.iter().copied().collect::<Option<Vec<bool>>>().map(BitWord::from_bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelStatus {
    /// Every variable is known and every check holds.
    Complete,
    /// No check has a single erased neighbor left.
    Stalled,
    /// A check with no erased neighbor is violated.
    Contradiction { check: usize },
}

/// Resolves checks with exactly one erased neighbor until none remain.
pub fn bp_peel(graph: &TannerGraph, state: &mut BpState) -> PeelStatus {
    let m = graph.num_checks();
    let mut erased = vec![0u32; m];
    let mut parity = vec![false; m];
    let mut queue = Vec::new();
    for c in 0..m {
        for &v in graph.check_neighbors(c) {
            match state.values[v] {
                None => erased[c] += 1,
                Some(b) => parity[c] ^= b,
            }
        }
        match erased[c] {
            0 if parity[c] => return PeelStatus::Contradiction { check: c },
            1 => queue.push(c),
            _ => {}
        }
    }
    while let Some(c) = queue.pop() {
        if erased[c] != 1 {
            continue;
        }
        let v = *graph
            .check_neighbors(c)
            .iter()
            .find(|&&v| state.values[v].is_none())
            .expect("one erased neighbor");
        let value = parity[c];
        state.values[v] = Some(value);
        for &c2 in graph.var_neighbors(v) {
            erased[c2] -= 1;
            parity[c2] ^= value;
            match erased[c2] {
                0 if parity[c2] => return PeelStatus::Contradiction { check: c2 },
                1 => queue.push(c2),
                _ => {}
            }
        }
    }
    if state.is_complete() {
        PeelStatus::Complete
    } else {
        PeelStatus::Stalled
    }
}

/// Whether every check touching `subset` touches it at least twice.
pub fn is_stopping_set(graph: &TannerGraph, subset: &[usize]) -> bool {
    let mut hits = vec![0u32; graph.num_checks()];
    for &v in subset {
        for &c in graph.var_neighbors(v) {
            hits[c] += 1;
        }
    }
    hits.iter().all(|&h| h != 1)
}

/// How the modified decoder picks the node to guess.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuessRule {
    /// An erased chain node whose chain neighbors are both known (a missing
    /// neighbor at either end of the chain counts as known); otherwise an
    /// erased chain node on a check with exactly two erased neighbors.
    Isolated,
    /// The first erased chain node, no selection.
    FirstErased,
}

/// Next node to guess, left to right along the accumulator chain (or the
/// transmitted variables for graphs without a chain), skipping `tried`.
/// `None` when no eligible node is left.
pub fn select_guess_node(graph: &TannerGraph, state: &BpState, tried: &[usize], rule: GuessRule) -> Option<usize> {
    let line = if graph.chain().is_empty() {
        graph.transmitted()
    } else {
        graph.chain()
    };
    let open = |v: &&usize| state.is_erased(**v) && !tried.contains(*v);
    match rule {
        GuessRule::FirstErased => line.iter().find(open).copied(),
        GuessRule::Isolated => {
            let known = |v: Option<usize>| v.is_none_or(|u| !state.is_erased(u));
            let isolated = line.iter().filter(open).find(|&&v| match graph.chain_neighbors(v) {
                Some((prev, next)) => known(prev) && known(next),
                None => false,
            });
            isolated.copied().or_else(|| {
                line.iter()
                    .filter(open)
                    .find(|&&v| {
                        graph.var_neighbors(v).iter().any(|&c| {
                            graph.check_neighbors(c).iter().filter(|&&u| state.is_erased(u)).count() == 2
                        })
                    })
                    .copied()
            })
        }
    }
}

/// Peeling decoder with up to `n_max` single guesses. After the first
/// stall, a selected node is set to 1 and peeling resumes; if that does not
/// complete the word, the guess is undone and the next node is tried.
pub fn modified_bp_decode(codebook: &Codebook, y: &ForgedCopy, n_max: usize, rule: GuessRule) -> Result<DecodeOutcome> {
    let graph = codebook
        .tanner_graph()
        .ok_or_else(|| Error::invalid("modified BP needs a graph code"))?;
    y.as_averaged()
        .ok_or_else(|| Error::invalid("modified BP needs an averaged copy"))?;
    let mut state = BpState::from_forged(graph, y, n_max.max(1))?;
    let mut diagnostics = Diagnostics {
        erased: erasures_from_average(y)?.erased().len(),
        ..Diagnostics::default()
    };
    let finish = |state: &BpState, diagnostics: Diagnostics| -> Result<DecodeOutcome> {
        let vars = state.to_word().expect("complete");
        let user = codebook
            .user_of_variables(&vars)
            .ok_or_else(|| Error::Runtime("peeled word violates the code".into()))?;
        Ok(DecodeOutcome {
            status: DecodeStatus::Identified,
            accused: Some(user),
            candidates: BigUint::from(1u8),
            codeword: Some(graph.transmitted_word(&vars)),
            diagnostics,
        })
    };
    diagnostics.iterations += 1;
    match bp_peel(graph, &mut state) {
        PeelStatus::Complete => return finish(&state, diagnostics),
        PeelStatus::Contradiction { .. } => return Ok(DecodeOutcome::failed(diagnostics)),
        PeelStatus::Stalled => {}
    }
    let mut tried = Vec::new();
    while tried.len() < n_max {
        let Some(node) = select_guess_node(graph, &state, &tried, rule) else {
            break;
        };
        tried.push(node);
        diagnostics.guesses += 1;
        diagnostics.iterations += 1;
        state.push_guess(node, true)?;
        if bp_peel(graph, &mut state) == PeelStatus::Complete {
            return finish(&state, diagnostics);
        }
        state.pop_guess();
    }
    Ok(DecodeOutcome::failed(diagnostics))
}

/// Graph variables on which the first two coalition members' full variable
/// assignments differ.
pub fn differing_variables(codebook: &Codebook, coalition: &Coalition) -> Result<Vec<usize>> {
    let [a, b] = [&coalition.users()[0], &coalition.users()[1]];
    let diff = &codebook.variables(a)? ^ &codebook.variables(b)?;
    Ok(diff.ones_iter().collect())
}
