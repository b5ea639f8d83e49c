//! Reproducible Monte Carlo estimation of the misidentification probability.
//!
//! Trial `i` of a point draws everything from `trial_seed(seed, i)`, so a
//! table depends only on the configuration and the master seed, never on the
//! number of workers.

mod config;

pub use config::{CodeParams, ExperimentConfig, ExperimentPoint, OneOrMany};

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::analysis::avg_transition_matrix;
use crate::attacks::Coalition;
use crate::decoders::{
    bp_bsc_decode, likelihood_decode_avg, md_erasure_decode, md_hamming_decode, modified_bp_decode,
    syndrome_erasure_decode, DecodeStatus, DecoderKind, Diagnostics,
};
use crate::ensembles::{
    build_protograph_code, gen_coset_code, gen_iid_codebook, gen_linear_code, gen_ra_code, Codebook, UserIndex,
};
use crate::error::{Error, Result};
use crate::seeding::{derive_seed, stream_rng, trial_seed};

const CODEBOOK: u64 = 1;
const KEY: u64 = 2;
const COALITION: u64 = 3;
const ATTACK: u64 = 4;
const DECODER: u64 = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    pub coalition: Vec<UserIndex>,
    pub accused: Option<UserIndex>,
    pub misidentified: bool,
    pub status: DecodeStatus,
    pub diagnostics: Diagnostics,
}

/// Draws the codebook of one trial (or the shared one under
/// `fixed_codebook`).
pub fn build_codebook(point: &ExperimentPoint, trial_seed: u64) -> Result<Codebook> {
    let base = if point.fixed_codebook { point.seed } else { trial_seed };
    let seed = derive_seed(base, CODEBOOK);
    let key_seed = derive_seed(trial_seed, KEY);
    match &point.code {
        CodeParams::Iid { users } => gen_iid_codebook(point.n, *users, seed),
        CodeParams::Linear { l } => gen_linear_code(point.n, *l, seed),
        CodeParams::Coset { l } => gen_coset_code(point.n, *l, seed, key_seed),
        CodeParams::Ra { q } => gen_ra_code(point.n / q, *q, seed),
        CodeParams::Protograph { spec, lift } => build_protograph_code(spec, *lift, seed),
    }
}

/// Runs trial `trial` of `point` against an already built codebook.
pub fn run_trial_with(point: &ExperimentPoint, codebook: &Codebook, trial: u64) -> Result<TrialResult> {
    let seed = trial_seed(point.seed, trial);
    let coalition = Coalition::sample(codebook, point.t, &mut stream_rng(seed, COALITION))?;
    let y = point.attack.apply(&coalition, &mut stream_rng(seed, ATTACK))?;
    let outcome = match point.decoder {
        DecoderKind::MdErasure => md_erasure_decode(&codebook.materialize(point.codebook_cap)?, &y)?,
        DecoderKind::MdHamming => md_hamming_decode(&codebook.materialize(point.codebook_cap)?, &y)?,
        DecoderKind::Likelihood => {
            let tm = avg_transition_matrix(point.t)?;
            likelihood_decode_avg(&codebook.materialize(point.codebook_cap)?, &y, &tm)?
        }
        DecoderKind::Syndrome => syndrome_erasure_decode(codebook, &y, &mut stream_rng(seed, DECODER))?,
        DecoderKind::ModifiedBp => modified_bp_decode(codebook, &y, point.n_max, point.guess_rule)?,
        DecoderKind::BpBsc => bp_bsc_decode(codebook, &y, point.crossover, point.max_iters)?,
    };
    Ok(TrialResult {
        trial,
        seed,
        misidentified: outcome.misidentifies(&coalition),
        coalition: coalition.users().to_vec(),
        accused: outcome.accused,
        status: outcome.status,
        diagnostics: outcome.diagnostics,
    })
}

/// Runs one trial: fresh codebook, coalition, attack and decoding.
pub fn run_trial(point: &ExperimentPoint, trial: u64) -> Result<TrialResult> {
    let codebook = build_codebook(point, trial_seed(point.seed, trial))?;
    run_trial_with(point, &codebook, trial)
}

/// Every trial of one point, in trial order, on the current rayon pool.
pub fn run_point(point: &ExperimentPoint) -> Result<Vec<TrialResult>> {
    point.validate()?;
    let shared = if point.fixed_codebook {
        Some(build_codebook(point, 0)?)
    } else {
        None
    };
    (0..point.trials)
        .into_par_iter()
        .map(|trial| match &shared {
            Some(cb) => run_trial_with(point, cb, trial),
            None => run_trial(point, trial),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub ensemble: String,
    pub attack: String,
    pub decoder: String,
    pub n: usize,
    pub rate: f64,
    pub t: usize,
    pub trials: u64,
    pub misid: u64,
    pub pm: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl ResultRow {
    pub fn from_trials(point: &ExperimentPoint, results: &[TrialResult]) -> Self {
        let trials = results.len() as u64;
        let misid = results.iter().filter(|r| r.misidentified).count() as u64;
        let pm = misid as f64 / trials.max(1) as f64;
        ResultRow {
            ensemble: point.ensemble().name().into(),
            attack: point.attack.name().into(),
            decoder: point.decoder.name().into(),
            n: point.n,
            rate: point.rate,
            t: point.t,
            trials,
            misid,
            pm,
            stderr: (pm * (1.0 - pm) / trials.max(1) as f64).sqrt(),
            seed: point.seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

pub const CSV_HEADER: &str = "ensemble,attack,decoder,n,rate,t,trials,misid,pm,stderr,seed";

impl ResultTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{},{},{},{:.6},{:.6},{}",
                r.ensemble, r.attack, r.decoder, r.n, r.rate, r.t, r.trials, r.misid, r.pm, r.stderr, r.seed
            );
        }
        out
    }
}

/// Runs every point of `config` with at most `jobs` workers (all cores when
/// `None`). `seed` overrides the configured master seed.
pub fn run_experiment(config: &ExperimentConfig, seed: Option<u64>, jobs: Option<usize>) -> Result<ResultTable> {
    let points = config.points(seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Runtime(format!("cannot start worker pool: {e}")))?;
    let mut table = ResultTable::default();
    for point in &points {
        let results = pool.install(|| run_point(point))?;
        table.rows.push(ResultRow::from_trials(point, &results));
    }
    Ok(table)
}
