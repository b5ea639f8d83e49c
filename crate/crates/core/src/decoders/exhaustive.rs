//! Decoders that scan every codeword of a materialized codebook.

use num_bigint::BigUint;

use super::{DecodeOutcome, Diagnostics};
use crate::analysis::TransitionMatrix;
use crate::attacks::{erasures_from_average, ForgedCopy};
use crate::ensembles::CodewordTable;
use crate::error::{Error, Result};

fn check_len(table: &CodewordTable, y: &ForgedCopy) -> Result<()> {
    if table.code_length() != y.len() {
        return Err(Error::dim(format!(
            "forged copy of length {} for a codebook of length {}",
            y.len(),
            table.code_length()
        )));
    }
    if table.is_empty() {
        return Err(Error::invalid("empty codebook"));
    }
    Ok(())
}

/// Users whose codeword agrees with `y` on every unerased position, in
/// increasing order.
pub fn md_erasure_candidates(table: &CodewordTable, y: &ForgedCopy) -> Result<Vec<usize>> {
    check_len(table, y)?;
    let e = erasures_from_average(y)?;
    let known = e.known_bits().words();
    let mask = e.erased_mask().words();
    Ok(table
        .rows()
        .enumerate()
        .filter(|(_, row)| {
            row.iter()
                .zip(known)
                .zip(mask)
                .all(|((r, k), m)| (r ^ k) & !m == 0)
        })
        .map(|(u, _)| u)
        .collect())
}

/// Accuses the lowest-index codeword consistent with the unerased positions
/// of an averaged copy; more than `t` consistent codewords mark the outcome
/// ambiguous.
pub fn md_erasure_decode(table: &CodewordTable, y: &ForgedCopy) -> Result<DecodeOutcome> {
    let candidates = md_erasure_candidates(table, y)?;
    let (t, _) = y.as_averaged().expect("checked by erasures_from_average");
    let diagnostics = Diagnostics {
        erased: erasures_from_average(y)?.erased().len(),
        ..Diagnostics::default()
    };
    Ok(match candidates.first() {
        None => DecodeOutcome::failed(diagnostics),
        Some(&u) => DecodeOutcome::accuse(u.into(), candidates.len().into(), t, diagnostics),
    })
}

/// Minimum Hamming distance to a binary copy; ties go to the lowest index.
/// Distances are translation invariant, so a coset codebook can be scanned
/// as is: subtracting the key from both sides changes nothing.
pub fn md_hamming_decode(table: &CodewordTable, y: &ForgedCopy) -> Result<DecodeOutcome> {
    check_len(table, y)?;
    let y = y
        .as_binary()
        .ok_or_else(|| Error::invalid("Hamming decoding needs a binary forged copy"))?;
    let mut best = (u32::MAX, 0usize, 0usize);
    for (u, row) in table.rows().enumerate() {
        let d: u32 = row.iter().zip(y.words()).map(|(a, b)| (a ^ b).count_ones()).sum();
        if d < best.0 {
            best = (d, u, 1);
        } else if d == best.0 {
            best.2 += 1;
        }
    }
    Ok(DecodeOutcome::accuse(
        best.1.into(),
        best.2.into(),
        1,
        Diagnostics::default(),
    ))
}

/// Maximum likelihood under the averaging channel `tm`:
/// `argmax_u Σ_i log P(c_i | x_i(u))`, where a zero-probability transition
/// disqualifies the codeword. Ties go to the lowest index; more than `t`
/// maximizers mark the outcome ambiguous.
pub fn likelihood_decode_avg(table: &CodewordTable, y: &ForgedCopy, tm: &TransitionMatrix) -> Result<DecodeOutcome> {
    check_len(table, y)?;
    let (t, counts) = y
        .as_averaged()
        .ok_or_else(|| Error::invalid("likelihood decoding needs an averaged copy"))?;
    if t != tm.t() {
        return Err(Error::invalid(format!(
            "copy averaged over {t} pirates, channel built for {}",
            tm.t()
        )));
    }
    // Positions grouped by pirate-one count: one mask per count value.
    let stride = table.stride();
    let mut masks = vec![vec![0u64; stride]; t + 1];
    let mut sizes = vec![0u32; t + 1];
    for (i, &c) in counts.iter().enumerate() {
        masks[c as usize][i / 64] |= 1 << (i % 64);
        sizes[c as usize] += 1;
    }
    let classes: Vec<usize> = (0..=t).filter(|&j| sizes[j] > 0).collect();
    let log_one: Vec<f64> = (0..=t).map(|j| tm.prob(true, j).ln()).collect();
    let log_zero: Vec<f64> = (0..=t).map(|j| tm.prob(false, j).ln()).collect();

    let mut best: Option<(f64, usize, usize)> = None;
    'rows: for (u, row) in table.rows().enumerate() {
        let mut score = 0.0;
        for &j in &classes {
            let ones: u32 = row.iter().zip(&masks[j]).map(|(r, m)| (r & m).count_ones()).sum();
            let zeros = sizes[j] - ones;
            for (n, lp) in [(ones, log_one[j]), (zeros, log_zero[j])] {
                if n > 0 {
                    if lp == f64::NEG_INFINITY {
                        continue 'rows;
                    }
                    score += n as f64 * lp;
                }
            }
        }
        match &mut best {
            None => best = Some((score, u, 1)),
            Some((s, _, ties)) if (score - *s).abs() <= 1e-9 * s.abs().max(1.0) => *ties += 1,
            Some(b) if score > b.0 => *b = (score, u, 1),
            Some(_) => {}
        }
    }
    Ok(match best {
        None => DecodeOutcome::failed(Diagnostics::default()),
        Some((_, u, ties)) => DecodeOutcome::accuse(u.into(), BigUint::from(ties), t, Diagnostics::default()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::avg_transition_matrix;
    use crate::attacks::{averaging_attack, Coalition};
    use crate::decoders::DecodeStatus;
    use crate::ensembles::{coset_with_key, gen_coset_code, gen_iid_codebook};
    use crate::gf2::BitWord;
    use crate::seeding::stream_rng;
    use proptest::prelude::*;

    fn table_of(words: &[&str]) -> CodewordTable {
        let ws: Vec<BitWord> = words.iter().map(|w| w.parse().unwrap()).collect();
        CodewordTable::from_words(&ws).unwrap()
    }

    #[test]
    fn erasure_md_small_example() {
        // (+1,+1,−1), (+1,−1,+1), (−1,−1,−1); pirates 0 and 1.
        let table = table_of(&["110", "101", "000"]);
        let c = Coalition::from_words(vec![table.word(0), table.word(1)]).unwrap();
        let y = averaging_attack(&c);
        assert_eq!(y.value(0), 1.0);
        assert_eq!(md_erasure_candidates(&table, &y).unwrap(), vec![0, 1]);
        let out = md_erasure_decode(&table, &y).unwrap();
        assert_eq!(out.status, DecodeStatus::Identified);
        assert_eq!(out.accused, Some(0u8.into()));
        assert!(!out.misidentifies(&c));
    }

    #[test]
    fn erasure_md_without_erasures() {
        let table = table_of(&["0110", "1010", "0111"]);
        let y = ForgedCopy::Averaged { t: 2, counts: vec![2, 0, 2, 0] };
        let out = md_erasure_decode(&table, &y).unwrap();
        assert_eq!(out.accused, Some(1u8.into()));
        assert_eq!(out.candidates, 1u8.into());
        let bad = ForgedCopy::Averaged { t: 2, counts: vec![0, 0, 0, 2] };
        assert_eq!(md_erasure_decode(&table, &bad).unwrap().status, DecodeStatus::Failed);
    }

    #[test]
    fn hamming_examples() {
        let table = table_of(&["0000", "1100", "0011"]);
        let y = ForgedCopy::Binary("1100".parse().unwrap());
        assert_eq!(md_hamming_decode(&table, &y).unwrap().accused, Some(1u8.into()));
        // 1000 is at distance 1 from words 0 and 1: lowest index wins.
        let tie = ForgedCopy::Binary("1000".parse().unwrap());
        let out = md_hamming_decode(&table, &tie).unwrap();
        assert_eq!(out.accused, Some(0u8.into()));
        assert_eq!(out.status, DecodeStatus::Ambiguous);
        assert!(md_hamming_decode(&table, &ForgedCopy::Averaged { t: 2, counts: vec![0; 4] }).is_err());
    }

    #[test]
    fn hamming_is_key_invariant() {
        let mut rng = stream_rng(2, 0);
        for seed in 0..20 {
            let keyed = gen_coset_code(30, 20, seed, seed + 100).unwrap();
            let key = keyed.key().unwrap().clone();
            let plain = coset_with_key(30, 20, seed, BitWord::zeros(30)).unwrap();
            let y = BitWord::random(30, &mut rng);
            let shifted = ForgedCopy::Binary(&y ^ &key);
            let a = md_hamming_decode(&keyed.materialize(1 << 10).unwrap(), &shifted).unwrap();
            let b = md_hamming_decode(&plain.materialize(1 << 10).unwrap(), &ForgedCopy::Binary(y)).unwrap();
            assert_eq!(a.accused, b.accused);
        }
    }

    #[test]
    fn likelihood_all_plus_copy() {
        let table = table_of(&["1011", "1111", "0000", "1111"]);
        let y = ForgedCopy::Averaged { t: 3, counts: vec![3; 4] };
        let out = likelihood_decode_avg(&table, &y, &avg_transition_matrix(3).unwrap()).unwrap();
        assert_eq!(out.accused, Some(1u8.into()));
        assert_eq!(out.candidates, 2u8.into());
        let wrong_t = likelihood_decode_avg(&table, &y, &avg_transition_matrix(2).unwrap());
        assert!(wrong_t.is_err());
    }

    #[test]
    fn likelihood_matches_erasure_md_for_two_pirates() {
        let tm = avg_transition_matrix(2).unwrap();
        let mut rng = stream_rng(8, 0);
        for seed in 0..30 {
            let cb = gen_iid_codebook(14, 200, seed).unwrap();
            let table = cb.materialize(1 << 10).unwrap();
            let c = Coalition::sample(&cb, 2, &mut rng).unwrap();
            let y = averaging_attack(&c);
            let a = md_erasure_decode(&table, &y).unwrap();
            let b = likelihood_decode_avg(&table, &y, &tm).unwrap();
            assert_eq!(a.accused, b.accused);
            assert_eq!(a.candidates, b.candidates);
        }
    }

    proptest! {
        #[test]
        fn likelihood_equals_erasure_md_on_any_input(
            words in proptest::collection::vec(0u32..64, 2..12),
            counts in proptest::collection::vec(0u32..3, 6),
        ) {
            let ws: Vec<BitWord> = words.iter().map(|&v| BitWord::from_u64(6, v as u64)).collect();
            let table = CodewordTable::from_words(&ws).unwrap();
            let y = ForgedCopy::Averaged { t: 2, counts };
            let a = md_erasure_decode(&table, &y).unwrap();
            let b = likelihood_decode_avg(&table, &y, &avg_transition_matrix(2).unwrap()).unwrap();
            prop_assert_eq!(a.accused, b.accused);
        }
    }
}
