//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line and
//! asserts the same condition.
//!
//! Run with `cargo test -p collufp --test acceptance -- --nocapture
//! --test-threads=1` to see the lines in order.

use std::collections::BTreeSet;

use collufp::analysis::{
    binary_entropy, close_pair_prob_bound, empirical_distance_spectrum, gv_distance, md_achievable_rate_avg,
    mutual_info_avg, rank_deficiency_probability,
};
use collufp::attacks::{averaging_attack, memoryless_marking_attack, xor3_attack, Coalition};
use collufp::decoders::{
    bp_peel, differing_variables, is_stopping_set, md_erasure_candidates, md_hamming_decode, modified_bp_decode,
    syndrome_candidates, BpState, DecodeStatus, GuessRule, PeelStatus,
};
use collufp::ensembles::{gen_coset_code, gen_iid_codebook, gen_linear_code, gen_ra_code};
use collufp::gf2::{brute_force_rank_count, count_rank_matrices};
use collufp::harness::{run_experiment, ResultRow};
use collufp::seeding::{derive_seed, stream_rng, trial_seed};
use collufp::{BitWord, ExperimentConfig};
use num_bigint::BigUint;
use rand::Rng;

fn report(id: &str, pass: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn table(toml: &str) -> Vec<ResultRow> {
    let config = ExperimentConfig::from_toml_str(toml).unwrap();
    run_experiment(&config, None, None).unwrap().rows
}

/// Consecutive estimates never rise by more than two standard errors of
/// their difference.
fn nonincreasing_within_2se(rows: &[ResultRow]) -> bool {
    rows.windows(2).all(|w| {
        let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].pm <= w[0].pm + 2.0 * se
    })
}

fn summary(rows: &[ResultRow]) -> String {
    rows.iter()
        .map(|r| format!("n={} p={:.3}±{:.3}", r.n, r.pm, r.stderr))
        .collect::<Vec<_>>()
        .join(", ")
}

fn pow2(k: usize) -> BigUint {
    BigUint::from(1u8) << k
}

#[test]
fn c01_rank_counts_are_exact() {
    let mut checked = 0;
    let mut ok = true;
    for l in 1..=4usize {
        for e in 1..=l {
            for k in 0..=e {
                ok &= count_rank_matrices(l, e, k) == brute_force_rank_count(l, e, k).unwrap();
                checked += 1;
            }
            ok &= count_rank_matrices(l, e, e - 1) == count_rank_matrices(e - 1, l, e - 1) * (pow2(e) - 1u8);
            for j in 0..e {
                let product: BigUint = (0..e - j).map(|p| pow2(l) - pow2(p)).product();
                ok &= count_rank_matrices(e - j, l, e - j) == product;
            }
        }
    }
    report("1", ok, format!("{checked} (l,e,k) counts match enumeration; both identities hold"));
}

/// Rank of a matrix whose columns are `l`-bit masks.
fn mask_rank(cols: &mut [u32]) -> usize {
    let mut rank = 0;
    for i in 0..cols.len() {
        let pivot = cols[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for c in cols[i + 1..].iter_mut() {
            if *c & low != 0 {
                *c ^= pivot;
            }
        }
    }
    rank
}

#[test]
fn c02_rank_deficiency_probability() {
    // The closed form conditions on the matrix being rank deficient, so the
    // sample is drawn from that conditional law by rejection.
    let (l, e, samples) = (20usize, 12usize, 100_000u64);
    let expected = rank_deficiency_probability(l, e).unwrap();
    let mut rng = stream_rng(0xC02, 0);
    let (mut accepted, mut deep, mut draws) = (0u64, 0u64, 0u64);
    let mut cols = vec![0u32; e];
    while accepted < samples {
        draws += 1;
        for c in cols.iter_mut() {
            *c = rng.random::<u32>() & ((1 << l) - 1);
        }
        let r = mask_rank(&mut cols);
        if r < e {
            accepted += 1;
            if r < e - 1 {
                deep += 1;
            }
        }
    }
    let p = deep as f64 / samples as f64;
    let se = (expected * (1.0 - expected) / samples as f64).sqrt();
    let pass = (p - expected).abs() <= 3.0 * se;
    report(
        "2",
        pass,
        format!("P(rank<e-1 | rank<e) = {p:.6} from {samples} of {draws} draws, closed form {expected:.6}, 3se = {:.6}", 3.0 * se),
    );
}

#[test]
fn c03_iid_averaging_md_erasure() {
    let good = table(
        r#"
        ensemble = "iid"
        n = 48
        users = 16384
        attack = "average"
        decoder = "md_erasure"
        trials = 200
        seed = 301
    "#,
    );
    let bad = table(
        r#"
        ensemble = "iid"
        n = 30
        users = 262144
        attack = "average"
        decoder = "md_erasure"
        trials = 200
        seed = 302
    "#,
    );
    let pass = good[0].pm <= 0.05 && bad[0].pm >= 0.10;
    report(
        "3",
        pass,
        format!("R={:.3}: p={:.3} (<=0.05); R={:.3}: p={:.3} (>=0.10)", good[0].rate, good[0].pm, bad[0].rate, bad[0].pm),
    );
}

#[test]
fn c04_linear_candidate_sets_agree() {
    let trials = 500u64;
    let mut agree = 0;
    for trial in 0..trials {
        let seed = trial_seed(0xC04, trial);
        let cb = gen_linear_code(40, 24, derive_seed(seed, 1)).unwrap();
        let coalition = Coalition::sample(&cb, 2, &mut stream_rng(seed, 3)).unwrap();
        let y = averaging_attack(&coalition);
        let table = cb.materialize(1 << 16).unwrap();
        let brute: BTreeSet<BitWord> =
            md_erasure_candidates(&table, &y).unwrap().into_iter().map(|u| table.word(u)).collect();
        let algebra: BTreeSet<BitWord> = syndrome_candidates(&cb, &y, 1 << 16).unwrap().into_iter().collect();
        if brute == algebra {
            agree += 1;
        }
    }
    report("4", agree == trials, format!("identical candidate sets on {agree}/{trials} trials"));
}

#[test]
fn c05_marking_md_hamming() {
    let (n, bits, trials) = (96usize, 14usize, 200u64);
    let mut pms = Vec::new();
    let (mut nearest, mut first, mut samples) = (0.0, 0.0, 0.0);
    for (name, coset) in [("iid", false), ("coset", true)] {
        let mut misid = 0;
        for trial in 0..trials {
            let seed = trial_seed(0xC05 + coset as u64, trial);
            let cb = if coset {
                gen_coset_code(n, n - bits, derive_seed(seed, 1), derive_seed(seed, 2)).unwrap()
            } else {
                gen_iid_codebook(n, 1 << bits, derive_seed(seed, 1)).unwrap()
            };
            let coalition = Coalition::sample(&cb, 2, &mut stream_rng(seed, 3)).unwrap();
            let y = memoryless_marking_attack(&coalition, &mut stream_rng(seed, 4)).unwrap();
            let out = md_hamming_decode(&cb.materialize(1 << bits).unwrap(), &y).unwrap();
            misid += out.misidentifies(&coalition) as u32;
            let word = y.as_binary().unwrap();
            let d: Vec<usize> = coalition.words().iter().map(|x| x.distance(word)).collect();
            nearest += *d.iter().min().unwrap() as f64 / n as f64;
            first += d[0] as f64 / n as f64;
            samples += 1.0;
        }
        pms.push((name, misid as f64 / trials as f64));
    }
    let nearest = nearest / samples;
    let first = first / samples;
    let rates_ok = pms.iter().all(|&(_, p)| p <= 0.10);
    let distance_ok = (nearest - 0.25).abs() <= 0.02;
    report(
        "5",
        rates_ok && distance_ok,
        format!(
            "p(iid)={:.3}, p(coset)={:.3} (<=0.10); mean nearest-pirate distance/n={nearest:.4} (0.25±0.02), fixed pirate {first:.4}",
            pms[0].1, pms[1].1
        ),
    );
}

#[test]
fn c06_xor3_defeats_md() {
    let mut rng = stream_rng(0xC06, 0);
    let cb = gen_iid_codebook(1000, 1 << 20, 61).unwrap();
    let reps = 30;
    let mut mean = [0.0f64; 3];
    for _ in 0..reps {
        let coalition = Coalition::sample(&cb, 3, &mut rng).unwrap();
        let w = coalition.words();
        let y = xor3_attack(&w[0], &w[1], &w[2]).unwrap();
        for (m, x) in mean.iter_mut().zip(w) {
            *m += x.distance(y.as_binary().unwrap()) as f64 / 1000.0 / reps as f64;
        }
    }
    let rows = table(
        r#"
        ensemble = "iid"
        n = 60
        users = 4096
        attack = "xor3"
        t = 3
        decoder = "md_hamming"
        trials = 200
        seed = 602
    "#,
    );
    let distance_ok = mean.iter().all(|d| (0.47..=0.53).contains(d));
    report(
        "6",
        distance_ok && rows[0].pm >= 0.5,
        format!("mean distances/n {mean:.3?} in [0.47, 0.53]; p={:.3} (>=0.5)", rows[0].pm),
    );
}

#[test]
fn c07_differing_variables_stop_peeling() {
    let trials = 100u64;
    let (mut stopping, mut peel_fails, mut nonempty) = (0, 0, 0);
    for trial in 0..trials {
        let seed = trial_seed(0xC07, trial);
        let cb = gen_ra_code(256, 3, derive_seed(seed, 1)).unwrap();
        let graph = cb.tanner_graph().unwrap();
        let coalition = Coalition::sample(&cb, 2, &mut stream_rng(seed, 3)).unwrap();
        let vd = differing_variables(&cb, &coalition).unwrap();
        if is_stopping_set(graph, &vd) {
            stopping += 1;
        }
        let y = averaging_attack(&coalition);
        let mut state = BpState::from_forged(graph, &y, 1).unwrap();
        let status = bp_peel(graph, &mut state);
        if vd.is_empty() || status != PeelStatus::Complete {
            peel_fails += 1;
        }
        nonempty += !vd.is_empty() as u32;
    }
    report(
        "7",
        stopping == trials && peel_fails == trials,
        format!(
            "V_d is a stopping set {stopping}/{trials}; plain peeling stalls whenever V_d is nonempty {peel_fails}/{trials} ({nonempty} nonempty)"
        ),
    );
}

fn ra_point_misid(n: usize, n_max: usize, rule: GuessRule, trials: u64, master: u64) -> (f64, bool) {
    let mut misid = 0;
    let mut outputs_are_pirates = true;
    for trial in 0..trials {
        let seed = trial_seed(master, trial);
        let cb = gen_ra_code(n / 3, 3, derive_seed(seed, 1)).unwrap();
        let coalition = Coalition::sample(&cb, 2, &mut stream_rng(seed, 3)).unwrap();
        let y = averaging_attack(&coalition);
        let out = modified_bp_decode(&cb, &y, n_max, rule).unwrap();
        misid += out.misidentifies(&coalition) as u32;
        if out.status == DecodeStatus::Identified {
            let word = out.codeword.as_ref().unwrap();
            outputs_are_pirates &= coalition.words().contains(word);
        }
    }
    (misid as f64 / trials as f64, outputs_are_pirates)
}

#[test]
fn c08_modified_bp_on_ra() {
    let (p8, pirates8) = ra_point_misid(3072, 8, GuessRule::Isolated, 100, 0xC08);
    let (p1, pirates1) = ra_point_misid(3072, 1, GuessRule::FirstErased, 100, 0xC08);
    let rows = table(
        r#"
        ensemble = "ra"
        n = [768, 1536, 3072]
        q = 3
        attack = "average"
        decoder = "modified_bp"
        n_max = 2
        trials = 100
        seed = 803
    "#,
    );
    let pass = p8 <= 0.05 && p1 > p8 && nonincreasing_within_2se(&rows) && pirates8 && pirates1;
    report(
        "8",
        pass,
        format!(
            "n=3072: p(N_max=8)={p8:.3} (<=0.05), p(N_max=1, first erased)={p1:.3}; N_max=2 sweep {}; outputs are pirate codewords: {}",
            summary(&rows),
            pirates8 && pirates1
        ),
    );
}

#[test]
fn c09_marking_bsc_bp_on_protograph() {
    let rows = table(
        r#"
        ensemble = "protograph"
        protograph = "rate-1/9"
        n = [1152, 2304, 4608]
        attack = "marking"
        decoder = "bp_bsc"
        max_iters = 60
        crossover = 0.25
        trials = 100
        seed = 901
    "#,
    );
    let last = rows.last().unwrap().pm;
    report(
        "9",
        nonincreasing_within_2se(&rows) && last <= 0.10,
        format!("{} (p at 4608 <= 0.10)", summary(&rows)),
    );
}

#[test]
fn c10_closed_forms() {
    let cap = 1.0 - binary_entropy(0.25);
    let mi = mutual_info_avg(3).unwrap();
    let rates: Vec<f64> = (2..=4).map(|t| md_achievable_rate_avg(t).unwrap()).collect();
    let pass = (cap - 0.18872).abs() <= 1e-4
        && (mi - 0.3113).abs() <= 1e-3
        && rates.iter().zip([0.5, 0.25, 0.125]).all(|(r, e)| (r - e).abs() < 1e-12)
        && gv_distance(1.2) == 0.0;
    report(
        "10",
        pass,
        format!("1-H(1/4)={cap:.5}, I(t=3)={mi:.4}, rates {rates:?}, gv(1.2)={}", gv_distance(1.2)),
    );
}

#[test]
fn c11_distance_spectrum_concentration() {
    // Interior: distances whose predicted pair count is at least 2^{0.1n},
    // where the tolerance is finer than the prediction itself.
    let (n, users, seeds) = (24usize, 64u64, 50u64);
    let rate = (users as f64).log2() / n as f64;
    let predicted = |d: usize| n as f64 * (2.0 * rate + binary_entropy(d as f64 / n as f64) - 1.0);
    let interior: Vec<usize> = (0..=n).filter(|&d| predicted(d) >= 0.1 * n as f64).collect();
    let mut good = 0;
    let mut worst = 0.0f64;
    let mut mid_gap = 0.0;
    for seed in 0..seeds {
        let cb = gen_iid_codebook(n, users, seed).unwrap();
        let s = empirical_distance_spectrum(&cb, users).unwrap();
        let gaps: Vec<f64> = interior.iter().map(|&d| ((s.pairs[d] as f64).log2() - predicted(d)).abs()).collect();
        let max_gap = gaps.iter().cloned().fold(0.0, f64::max);
        worst = worst.max(max_gap);
        mid_gap += ((s.pairs[n / 2] as f64).log2() - predicted(n / 2)).abs() / seeds as f64;
        if max_gap <= 0.1 * n as f64 {
            good += 1;
        }
    }

    let (big_n, eps) = (2048usize, 0.05);
    let big_users = 64u64;
    let bound = close_pair_prob_bound(big_n, (big_users as f64).log2() / big_n as f64, eps);
    let threshold = (big_n as f64 * (0.5 + eps)).floor() as usize;
    let (mut far, mut pairs) = (0u64, 0u64);
    for seed in 0..10 {
        let s = empirical_distance_spectrum(&gen_iid_codebook(big_n, big_users, 1000 + seed).unwrap(), big_users).unwrap();
        far += s.pairs[threshold + 1..].iter().sum::<u64>();
        pairs += s.total_pairs() as u64;
    }
    let freq = far as f64 / pairs as f64;
    let pass = good as f64 >= 0.9 * seeds as f64 && freq <= bound;
    report(
        "11",
        pass,
        format!(
            "n={n}: {good}/{seeds} seeds within 0.1n on d in {}..={} (largest gap {worst:.2} bits, mean gap at d=n/2 {mid_gap:.2} bits); n={big_n}: non-close frequency {freq:.2e} <= bound {bound:.3}",
            interior[0],
            interior[interior.len() - 1]
        ),
    );
}
