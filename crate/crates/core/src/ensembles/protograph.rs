//! Protograph codes: a small base graph copied `lift` times with every base
//! edge replaced by a random permutation between the copies.
//!
//! Text format:
//!
//! ```text
//! rows cols lift_default
//! <row 0: cols integer multiplicities>
//! ...
//! <row rows-1>
//! puncture: i j k        (optional, 0-based variable columns)
//! ```
//!
//! Blank lines and `#` comments are ignored.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Codebook, Family, NodeRole, ProtographCode, TannerGraph};
use crate::error::{Error, Result};
use crate::seeding::stream_rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtographSpec {
    /// Edge multiplicities, `rows × cols` (checks × variables).
    base: Vec<Vec<u32>>,
    punctured: Vec<usize>,
    lift_default: usize,
}

impl ProtographSpec {
    pub fn new(base: Vec<Vec<u32>>, punctured: Vec<usize>, lift_default: usize) -> Result<Self> {
        let cols = base.first().map_or(0, Vec::len);
        if base.is_empty() || cols == 0 {
            return Err(Error::invalid("protograph base matrix is empty"));
        }
        if base.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("protograph rows have different lengths"));
        }
        let mut punctured = punctured;
        punctured.sort_unstable();
        punctured.dedup();
        if punctured.iter().any(|&c| c >= cols) {
            return Err(Error::dim("punctured column out of range"));
        }
        if punctured.len() == cols {
            return Err(Error::invalid("every variable is punctured"));
        }
        if base.len() >= cols {
            return Err(Error::invalid("protograph needs more variables than checks"));
        }
        if lift_default == 0 {
            return Err(Error::invalid("default lifting factor must be positive"));
        }
        Ok(ProtographSpec {
            base,
            punctured,
            lift_default,
        })
    }

    pub fn rows(&self) -> usize {
        self.base.len()
    }

    pub fn cols(&self) -> usize {
        self.base[0].len()
    }

    pub fn multiplicity(&self, row: usize, col: usize) -> u32 {
        self.base[row][col]
    }

    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    pub fn lift_default(&self) -> usize {
        self.lift_default
    }

    /// Transmitted variable columns of the base graph.
    pub fn transmitted_cols(&self) -> usize {
        self.cols() - self.punctured.len()
    }

    /// `(cols − rows) / (cols − punctured)`, the rate assuming a full-rank
    /// lifted parity-check matrix.
    pub fn design_rate(&self) -> f64 {
        (self.cols() - self.rows()) as f64 / self.transmitted_cols() as f64
    }

    /// Default protographs shipped with the crate, by name: `rate-1/8`,
    /// `rate-1/9` and `rate-1/10`.
    pub fn builtin(name: &str) -> Option<ProtographSpec> {
        let text = match name {
            "rate-1/8" => RATE_1_8,
            "rate-1/9" => RATE_1_9,
            "rate-1/10" => RATE_1_10,
            _ => return None,
        };
        Some(text.parse().expect("builtin protographs parse"))
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["rate-1/8", "rate-1/9", "rate-1/10"]
    }
}

impl FromStr for ProtographSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty protograph file".into()))?;
        let nums = parse_numbers::<usize>(header)?;
        let [rows, cols, lift] = nums[..] else {
            return Err(Error::Config(format!(
                "protograph header must be `rows cols lift_default`, got {header:?}"
            )));
        };
        let mut base = Vec::with_capacity(rows);
        let mut punctured = Vec::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("puncture:") {
                punctured = parse_numbers(rest)?;
                continue;
            }
            let row = parse_numbers::<u32>(line)?;
            if row.len() != cols {
                return Err(Error::Config(format!(
                    "protograph row has {} entries, expected {cols}",
                    row.len()
                )));
            }
            base.push(row);
        }
        if base.len() != rows {
            return Err(Error::Config(format!(
                "protograph has {} rows, header says {rows}",
                base.len()
            )));
        }
        ProtographSpec::new(base, punctured, lift)
    }
}

fn parse_numbers<T: FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|_| Error::Config(format!("not a non-negative integer: {tok:?}")))
        })
        .collect()
}

impl fmt::Display for ProtographSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows(), self.cols(), self.lift_default)?;
        for row in &self.base {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        if !self.punctured.is_empty() {
            let cols: Vec<String> = self.punctured.iter().map(usize::to_string).collect();
            writeln!(f, "puncture: {}", cols.join(" "))?;
        }
        Ok(())
    }
}

// Default low-rate protographs, found by a small empirical search for fast
// flooding convergence on BSC(0.25). Columns 0-3 and the first two rows form
// a precode whose column 0 is punctured; every later row adds one degree-1
// parity column tied to two or three precode columns.
const RATE_1_8: &str = include_str!("../../protographs/rate-1-8.txt");
const RATE_1_9: &str = include_str!("../../protographs/rate-1-9.txt");
const RATE_1_10: &str = include_str!("../../protographs/rate-1-10.txt");

/// `count` permutations of `0..lift`, pairwise disjoint (no two send the same
/// copy to the same copy), so parallel base edges never collapse.
fn disjoint_permutations<R: Rng>(count: usize, lift: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    if count > lift {
        return Err(Error::invalid(format!(
            "edge multiplicity {count} exceeds the lifting factor {lift}"
        )));
    }
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(count);
    while perms.len() < count {
        let mut p: Vec<usize> = (0..lift).collect();
        p.shuffle(rng);
        let clashes = |p: &[usize], i: usize| perms.iter().any(|q| q[i] == p[i]);
        // Repair clashes by random swaps; give up and redraw after a while.
        let mut ok = false;
        for _ in 0..64 * lift.max(1) {
            let Some(i) = (0..lift).find(|&i| clashes(&p, i)) else {
                ok = true;
                break;
            };
            let j = rng.random_range(0..lift);
            p.swap(i, j);
            if clashes(&p, i) || clashes(&p, j) {
                p.swap(i, j);
            }
        }
        if ok {
            perms.push(p);
        }
    }
    Ok(perms)
}

/// Lifts `spec` by `lift` and builds the code. Lifted variable `c·lift + i`
/// is copy `i` of base column `c`; lifted check `r·lift + i` likewise.
///
/// The information set is the set of free columns of the lifted
/// parity-check matrix in reduced echelon form, so any lift is encodable;
/// user bit `j` selects the `j`-th null-space basis vector.
pub fn build_protograph_code(spec: &ProtographSpec, lift: usize, seed: u64) -> Result<Codebook> {
    if lift == 0 {
        return Err(Error::invalid("lifting factor must be positive"));
    }
    let mut rng = stream_rng(seed, 3);
    let (rows, cols) = (spec.rows(), spec.cols());
    let mut checks = vec![Vec::new(); rows * lift];
    for r in 0..rows {
        for c in 0..cols {
            let m = spec.multiplicity(r, c) as usize;
            for perm in disjoint_permutations(m, lift, &mut rng)? {
                for (i, &target) in perm.iter().enumerate() {
                    checks[r * lift + i].push(c * lift + target);
                }
            }
        }
    }
    let num_vars = cols * lift;
    let roles = (0..num_vars)
        .map(|v| {
            if spec.punctured.contains(&(v / lift)) {
                NodeRole::Punctured
            } else {
                NodeRole::Plain
            }
        })
        .collect();
    let transmitted: Vec<usize> = (0..num_vars)
        .filter(|v| !spec.punctured.contains(&(v / lift)))
        .collect();
    let graph = TannerGraph::new(num_vars, checks, roles, transmitted, Vec::new())?;
    let echelon = graph.parity_matrix().echelon();
    let code = ProtographCode {
        spec: spec.clone(),
        lift,
        basis: echelon.nullspace_basis(),
        free_cols: echelon.free_columns(),
        graph,
    };
    let n = code.graph.code_length();
    Ok(Codebook::from_family(n, seed, Family::Protograph(code)))
}
