//! Erasure decoding of linear and coset codes by solving for the erased bits.

use num_bigint::BigUint;
use rand::Rng;

use super::{DecodeOutcome, Diagnostics};
use crate::attacks::{erasures_from_average, ForgedCopy};
use crate::ensembles::{Codebook, EnsembleKind};
use crate::error::{Error, Result};
use crate::gf2::{BitWord, SolutionSet};

/// Known part of the copy with the key removed, and the solution set of
/// `H_E · x_E = H_Ē · y_Ē`.
fn erased_system(codebook: &Codebook, y: &ForgedCopy) -> Result<(BitWord, Vec<usize>, SolutionSet)> {
    let parity = match codebook.kind() {
        EnsembleKind::Linear | EnsembleKind::Coset => codebook.parity_check().expect("linear family"),
        other => {
            return Err(Error::invalid(format!(
                "syndrome decoding needs a linear or coset code, got {}",
                other.name()
            )))
        }
    };
    if y.len() != codebook.n() {
        return Err(Error::dim("forged copy length differs from the code length"));
    }
    let e = erasures_from_average(y)?;
    let mut known = e.known_bits().clone();
    if let Some(key) = codebook.key() {
        known.xor_in(key);
        // Erased positions stay zero.
        let cleared: Vec<u64> = known
            .words()
            .iter()
            .zip(e.erased_mask().words())
            .map(|(k, m)| k & !m)
            .collect();
        known = BitWord::from_words(known.len(), cleared);
    }
    let syndrome = parity.mul_vec(&known)?;
    let erased = e.erased().to_vec();
    let solutions = parity.select_columns(&erased)?.solve_affine(&syndrome)?;
    Ok((known, erased, solutions))
}

/// Full codeword (key added back) for one solution on the erased positions.
fn complete(codebook: &Codebook, known: &BitWord, erased: &[usize], x: &BitWord) -> BitWord {
    let mut w = known.clone();
    w.scatter(erased, x);
    if let Some(key) = codebook.key() {
        w.xor_in(key);
    }
    w
}

/// Every codeword consistent with the unerased part of `y`, at most `limit`
/// of them, in Gray-code order of the solution space.
pub fn syndrome_candidates(codebook: &Codebook, y: &ForgedCopy, limit: usize) -> Result<Vec<BitWord>> {
    let (known, erased, solutions) = erased_system(codebook, y)?;
    Ok(solutions
        .enumerate(limit)
        .iter()
        .map(|x| complete(codebook, &known, &erased, x))
        .collect())
}

/// Recovers the erased pirate bits by linear algebra.
///
/// Exactly two solutions (the pirate pair) accuse the lower user index; a
/// unique solution accuses it; more solutions give an ambiguous outcome whose
/// accusation is a uniformly random solution. An inconsistent system fails.
pub fn syndrome_erasure_decode<R: Rng + ?Sized>(codebook: &Codebook, y: &ForgedCopy, rng: &mut R) -> Result<DecodeOutcome> {
    let (t, _) = y
        .as_averaged()
        .ok_or_else(|| Error::invalid("syndrome decoding needs an averaged copy"))?;
    let (known, erased, solutions) = erased_system(codebook, y)?;
    let diagnostics = Diagnostics {
        erased: erased.len(),
        ..Diagnostics::default()
    };
    let count = solutions.solution_count();
    let word = match solutions.dimension() {
        None => return Ok(DecodeOutcome::failed(diagnostics)),
        Some(dim) if dim <= 1 => {
            let users = solutions
                .enumerate(2)
                .iter()
                .map(|x| codebook.user_of_codeword(&complete(codebook, &known, &erased, x)))
                .collect::<Option<Vec<BigUint>>>()
                .ok_or_else(|| Error::Runtime("solution outside the codebook".into()))?;
            let lowest = users.into_iter().min().expect("consistent system has a solution");
            let mut out = DecodeOutcome::accuse(lowest, count, t, diagnostics);
            out.codeword = Some(codebook.codeword(out.accused.as_ref().unwrap())?);
            return Ok(out);
        }
        Some(_) => {
            let x = solutions.random_solution(rng).expect("consistent");
            complete(codebook, &known, &erased, &x)
        }
    };
    let user = codebook
        .user_of_codeword(&word)
        .ok_or_else(|| Error::Runtime("solution outside the codebook".into()))?;
    let mut out = DecodeOutcome::accuse(user, count, t, diagnostics);
    out.codeword = Some(word);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{averaging_attack, Coalition};
    use crate::decoders::{md_erasure_candidates, DecodeStatus};
    use crate::ensembles::{gen_coset_code, gen_iid_codebook, gen_linear_code};
    use crate::gf2::BitMatrix;
    use crate::seeding::stream_rng;
    use std::collections::BTreeSet;

    #[test]
    fn no_erasures_gives_the_common_word() {
        let cb = gen_linear_code(20, 8, 1).unwrap();
        let x = cb.codeword(&77u32.into()).unwrap();
        let counts = x.iter().map(|b| 2 * b as u32).collect();
        let y = ForgedCopy::Averaged { t: 2, counts };
        let out = syndrome_erasure_decode(&cb, &y, &mut stream_rng(0, 0)).unwrap();
        assert_eq!(out.accused, Some(77u32.into()));
        assert_eq!(out.candidates, 1u8.into());
        assert_eq!(out.codeword, Some(x));
    }

    #[test]
    fn two_solutions_are_the_pirates() {
        let mut rng = stream_rng(5, 0);
        let mut seen = 0;
        for seed in 0..200 {
            let cb = gen_linear_code(30, 18, seed).unwrap();
            let c = Coalition::sample(&cb, 2, &mut rng).unwrap();
            let y = averaging_attack(&c);
            let e = erasures_from_average(&y).unwrap();
            let h_e = cb.parity_check().unwrap().select_columns(e.erased()).unwrap();
            if h_e.rank() + 1 != e.erased().len() {
                continue;
            }
            seen += 1;
            let words: BTreeSet<BitWord> = syndrome_candidates(&cb, &y, 16).unwrap().into_iter().collect();
            let pirates: BTreeSet<BitWord> = c.words().iter().cloned().collect();
            assert_eq!(words, pirates);
            let out = syndrome_erasure_decode(&cb, &y, &mut rng).unwrap();
            assert_eq!(out.status, DecodeStatus::Identified);
            assert_eq!(out.accused.as_ref(), c.users().iter().min());
        }
        assert!(seen > 100);
    }

    #[test]
    fn constructed_rank_deficit_gives_two_solutions() {
        // Columns 1 and 2 equal: rank(H_E) = |E| − 1 on E = {1, 2}.
        let h = BitMatrix::parse_rows(&["1110", "0111", "1001"]).unwrap();
        let s = h.mul_vec(&"0100".parse().unwrap()).unwrap();
        let ss = h.select_columns(&[1, 2]).unwrap().solve_affine(&s).unwrap();
        let sols = ss.enumerate(10);
        assert_eq!(sols.len(), 2);
        for x in &sols {
            assert_eq!(h.select_columns(&[1, 2]).unwrap().mul_vec(x).unwrap(), s);
        }
    }

    #[test]
    fn coset_key_is_removed_first() {
        let mut rng = stream_rng(6, 0);
        for seed in 0..30 {
            let cb = gen_coset_code(32, 20, seed, seed ^ 0xff).unwrap();
            let c = Coalition::sample(&cb, 2, &mut rng).unwrap();
            let y = averaging_attack(&c);
            let out = syndrome_erasure_decode(&cb, &y, &mut rng).unwrap();
            assert_ne!(out.status, DecodeStatus::Failed);
            if out.status == DecodeStatus::Identified {
                assert!(!out.misidentifies(&c));
            }
            let table = cb.materialize(1 << 12).unwrap();
            let brute: BTreeSet<BitWord> = md_erasure_candidates(&table, &y)
                .unwrap()
                .into_iter()
                .map(|u| table.word(u))
                .collect();
            let algebra: BTreeSet<BitWord> = syndrome_candidates(&cb, &y, 1 << 12).unwrap().into_iter().collect();
            assert_eq!(brute, algebra);
        }
    }

    #[test]
    fn inconsistent_copy_fails() {
        let cb = gen_linear_code(16, 10, 3).unwrap();
        let mut rng = stream_rng(1, 1);
        let mut failures = 0;
        for _ in 0..20 {
            let counts = (0..16).map(|_| if rng.random::<bool>() { 2 } else { 0 }).collect();
            let y = ForgedCopy::Averaged { t: 2, counts };
            if syndrome_erasure_decode(&cb, &y, &mut rng).unwrap().status == DecodeStatus::Failed {
                failures += 1;
            }
        }
        assert!(failures > 10);
        let iid = gen_iid_codebook(16, 4, 0).unwrap();
        let y = ForgedCopy::Averaged { t: 2, counts: vec![0; 16] };
        assert!(syndrome_erasure_decode(&iid, &y, &mut rng).is_err());
    }
}
