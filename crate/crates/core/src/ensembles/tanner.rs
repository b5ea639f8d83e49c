use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};

/// What a variable node stands for in the code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRole {
    /// Information-side node of an RA code (one per information bit, degree `q`).
    Repeat,
    /// Output of the accumulator; these form the degree-2 chain.
    Accumulator,
    /// Any other transmitted variable.
    Plain,
    /// Present in the graph but never transmitted.
    Punctured,
}

/// Bipartite variable/check graph of a binary linear code.
///
/// Variable nodes are numbered `0..num_vars()`. The fingerprint of a user is
/// the restriction of the variable values to [`TannerGraph::transmitted`]
/// (in that order); the remaining variables are hidden.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    check_vars: Vec<Vec<usize>>,
    var_checks: Vec<Vec<usize>>,
    roles: Vec<NodeRole>,
    transmitted: Vec<usize>,
    chain: Vec<usize>,
    chain_pos: Vec<Option<usize>>,
}

impl TannerGraph {
    /// Builds a graph from per-check neighbor lists.
    ///
    /// `transmitted` lists the visible variables in codeword order; `chain`
    /// lists accumulator nodes in chain order (may be empty). Parallel edges
    /// are rejected since they cancel over GF(2).
    pub fn new(
        num_vars: usize,
        check_vars: Vec<Vec<usize>>,
        roles: Vec<NodeRole>,
        transmitted: Vec<usize>,
        chain: Vec<usize>,
    ) -> Result<Self> {
        if roles.len() != num_vars {
            return Err(Error::dim("one role per variable node required"));
        }
        let mut var_checks = vec![Vec::new(); num_vars];
        for (c, vars) in check_vars.iter().enumerate() {
            for (k, &v) in vars.iter().enumerate() {
                if v >= num_vars {
                    return Err(Error::dim(format!("check {c} references variable {v}")));
                }
                if vars[..k].contains(&v) {
                    return Err(Error::invalid(format!("parallel edge between check {c} and variable {v}")));
                }
                var_checks[v].push(c);
            }
        }
        if transmitted.iter().any(|&v| v >= num_vars) {
            return Err(Error::dim("transmitted variable out of range"));
        }
        let mut chain_pos = vec![None; num_vars];
        for (i, &v) in chain.iter().enumerate() {
            if v >= num_vars || chain_pos[v].is_some() {
                return Err(Error::invalid("chain must list distinct variables"));
            }
            chain_pos[v] = Some(i);
        }
        Ok(TannerGraph {
            check_vars,
            var_checks,
            roles,
            transmitted,
            chain,
            chain_pos,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.var_checks.len()
    }

    pub fn num_checks(&self) -> usize {
        self.check_vars.len()
    }

    pub fn num_edges(&self) -> usize {
        self.check_vars.iter().map(Vec::len).sum()
    }

    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.check_vars[check]
    }

    pub fn var_neighbors(&self, var: usize) -> &[usize] {
        &self.var_checks[var]
    }

    pub fn var_degree(&self, var: usize) -> usize {
        self.var_checks[var].len()
    }

    pub fn check_degree(&self, check: usize) -> usize {
        self.check_vars[check].len()
    }

    pub fn role(&self, var: usize) -> NodeRole {
        self.roles[var]
    }

    pub fn transmitted(&self) -> &[usize] {
        &self.transmitted
    }

    /// Codeword length (number of transmitted variables).
    pub fn code_length(&self) -> usize {
        self.transmitted.len()
    }

    /// Accumulator chain in order; empty for graphs without one.
    pub fn chain(&self) -> &[usize] {
        &self.chain
    }

    pub fn chain_position(&self, var: usize) -> Option<usize> {
        self.chain_pos[var]
    }

    /// Chain predecessor and successor of a chain node. `None` at either end.
    pub fn chain_neighbors(&self, var: usize) -> Option<(Option<usize>, Option<usize>)> {
        let i = self.chain_pos[var]?;
        let prev = i.checked_sub(1).map(|j| self.chain[j]);
        let next = self.chain.get(i + 1).copied();
        Some((prev, next))
    }

    /// Sorted variable degrees paired with their multiplicities.
    pub fn var_degree_profile(&self) -> Vec<(usize, usize)> {
        degree_profile(self.var_checks.iter().map(Vec::len))
    }

    pub fn check_degree_profile(&self) -> Vec<(usize, usize)> {
        degree_profile(self.check_vars.iter().map(Vec::len))
    }

    /// Whether every check is satisfied by a full variable assignment.
    pub fn satisfies_checks(&self, vars: &BitWord) -> bool {
        vars.len() == self.num_vars()
            && self
                .check_vars
                .iter()
                .all(|vs| vs.iter().filter(|&&v| vars.get(v)).count() % 2 == 0)
    }

    /// Restriction of a variable assignment to the transmitted nodes.
    pub fn transmitted_word(&self, vars: &BitWord) -> BitWord {
        vars.select(&self.transmitted)
    }

    /// Dense parity-check matrix (checks × variables).
    pub fn parity_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.num_checks(), self.num_vars());
        for (c, vars) in self.check_vars.iter().enumerate() {
            for &v in vars {
                h.set(c, v, true);
            }
        }
        h
    }
}

fn degree_profile(degrees: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for d in degrees {
        *counts.entry(d).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}
