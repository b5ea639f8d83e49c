//! `collufp`: run fingerprinting experiments and evaluate the closed forms.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collufp::analysis::{
    binary_entropy, empirical_distance_spectrum, entropy, gv_distance, md_achievable_rate_avg, mutual_info_avg,
    rank_deficiency_probability,
};
use collufp::ensembles::{gen_coset_code, gen_iid_codebook, gen_linear_code, gen_ra_code, DEFAULT_CODEBOOK_CAP};
use collufp::gf2::{brute_force_rank_count, count_rank_matrices};
use collufp::harness::run_experiment;
use collufp::{EnsembleKind, Error, ExperimentConfig};

const SEED_ENV: &str = "COLLUFP_SEED";

/// Largest `l·e` whose rank table is cross-checked by enumeration.
const ORACLE_MAX_ENTRIES: usize = 20;

#[derive(Parser)]
#[command(name = "collufp", version, about = "Collusion-resistant fingerprinting simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment described by a config file and print CSV.
    Simulate(SimulateArgs),
    /// Evaluate a closed-form quantity.
    Analyze {
        #[command(subcommand)]
        quantity: Quantity,
    },
    /// Print the distance spectrum of one codebook instance as CSV.
    Spectrum(SpectrumArgs),
    /// Print exact rank counts of l×e binary matrices, checked by enumeration
    /// where feasible.
    Ranktable {
        /// Largest number of rows.
        lmax: usize,
    },
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides COLLUFP_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Reuse one codebook instance for every trial.
    #[arg(long)]
    fixed_codebook: bool,
}

#[derive(Subcommand)]
enum Quantity {
    /// Entropy in bits of a binary source (`--p`) or a pmf (`--pmf`).
    Entropy {
        #[arg(long, conflicts_with = "pmf", required_unless_present = "pmf")]
        p: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        pmf: Option<Vec<f64>>,
    },
    /// Gilbert-Varshamov relative distance at a rate.
    Gv {
        #[arg(long)]
        rate: f64,
    },
    /// MD-achievable rate of the averaging attack (`--t`), or `1 − H(p)`
    /// for a marking attack seen as a BSC (`--crossover`).
    Rate {
        #[arg(long, conflicts_with = "crossover", required_unless_present = "crossover")]
        t: Option<usize>,
        #[arg(long)]
        crossover: Option<f64>,
    },
    /// Mutual information of the averaging channel for `t` pirates.
    Mi {
        #[arg(long)]
        t: usize,
    },
    /// Probability that an l×e random matrix loses two or more ranks, given
    /// that it is rank deficient.
    Rankprob {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        e: usize,
    },
}

#[derive(Args)]
struct SpectrumArgs {
    /// iid, linear, coset or ra.
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    n: usize,
    /// Codebook size of an i.i.d. ensemble.
    #[arg(long)]
    users: Option<u64>,
    /// Parity checks of a linear or coset code.
    #[arg(long)]
    l: Option<usize>,
    /// Repetition factor of an RA code.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CODEBOOK_CAP)]
    cap: u64,
}

/// Four decimals with trailing zeros removed.
fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn simulate(args: SimulateArgs) -> Result<String, Error> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if args.fixed_codebook {
        config.fixed_codebook = true;
    }
    let seed = match args.seed {
        Some(s) => Some(s),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}={v} is not a seed")))?),
            Err(_) => None,
        },
    };
    if args.jobs == Some(0) {
        return Err(usage("--jobs must be positive"));
    }
    let csv = run_experiment(&config, seed, args.jobs)?.to_csv();
    match args.out {
        Some(path) => {
            std::fs::write(&path, csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn analyze(quantity: Quantity) -> Result<String, Error> {
    let value = match quantity {
        Quantity::Entropy { p: Some(p), .. } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(usage(format!("p must lie in [0, 1], got {p}")));
            }
            binary_entropy(p)
        }
        Quantity::Entropy { pmf, .. } => entropy(&pmf.unwrap_or_default())?,
        Quantity::Gv { rate } => {
            if rate.is_nan() || rate < 0.0 {
                return Err(usage(format!("rate must be nonnegative, got {rate}")));
            }
            gv_distance(rate)
        }
        Quantity::Rate { t: Some(t), .. } => md_achievable_rate_avg(t)?,
        Quantity::Rate { crossover, .. } => {
            let p = crossover.unwrap_or(f64::NAN);
            if !(0.0..=1.0).contains(&p) {
                return Err(usage(format!("crossover must lie in [0, 1], got {p}")));
            }
            1.0 - binary_entropy(p)
        }
        Quantity::Mi { t } => mutual_info_avg(t)?,
        Quantity::Rankprob { l, e } => rank_deficiency_probability(l, e)?,
    };
    Ok(format!("{}\n", fmt_num(value)))
}

fn spectrum(args: SpectrumArgs) -> Result<String, Error> {
    let kind: EnsembleKind = args.ensemble.parse()?;
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| usage(format!("{} needs --{name}", kind.name())));
    let cb = match kind {
        EnsembleKind::Iid => {
            let users = args.users.ok_or_else(|| usage("iid needs --users"))?;
            gen_iid_codebook(args.n, users, args.seed)?
        }
        EnsembleKind::Linear => gen_linear_code(args.n, need(args.l, "l")?, args.seed)?,
        EnsembleKind::Coset => gen_coset_code(args.n, need(args.l, "l")?, args.seed, args.seed ^ 1)?,
        EnsembleKind::Ra => {
            let q = need(args.q, "q")?;
            if q == 0 || !args.n.is_multiple_of(q) {
                return Err(usage(format!("n={} is not a multiple of q={q}", args.n)));
            }
            gen_ra_code(args.n / q, q, args.seed)?
        }
        EnsembleKind::Protograph => return Err(usage("spectrum supports iid, linear, coset and ra")),
    };
    let est = empirical_distance_spectrum(&cb, args.cap)?;
    let n = est.n as f64;
    let mut out = String::from("d,pairs,exponent,predicted\n");
    for (d, &count) in est.pairs.iter().enumerate() {
        let exponent = if count == 0 { "-inf".to_string() } else { fmt_num((count as f64).log2() / n) };
        let predicted = 2.0 * est.rate + binary_entropy(d as f64 / n) - 1.0;
        let _ = writeln!(out, "{d},{count},{exponent},{}", fmt_num(predicted));
    }
    Ok(out)
}

fn ranktable(lmax: usize) -> Result<String, Error> {
    if lmax == 0 {
        return Err(usage("lmax must be positive"));
    }
    let mut out = String::from("l,e,k,count,oracle\n");
    for l in 1..=lmax {
        for e in 1..=l {
            for k in 0..=e {
                let count = count_rank_matrices(l, e, k);
                let oracle = if l * e <= ORACLE_MAX_ENTRIES {
                    if brute_force_rank_count(l, e, k)? != count {
                        return Err(Error::Runtime(format!("rank count mismatch at l={l}, e={e}, k={k}")));
                    }
                    "ok"
                } else {
                    "-"
                };
                let _ = writeln!(out, "{l},{e},{k},{count},{oracle}");
            }
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Analyze { quantity } => analyze(quantity),
        Command::Spectrum(args) => spectrum(args),
        Command::Ranktable { lmax } => ranktable(lmax),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("collufp: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
