use super::{Codebook, CosetCode, Family, LinearCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::seeding::stream_rng;

fn check_dims(n: usize, l: usize) -> Result<()> {
    if l == 0 || l >= n {
        return Err(Error::invalid(format!("need 0 < l < n, got l={l}, n={n}")));
    }
    Ok(())
}

/// Random linear code: an `l × n` parity-check matrix with fair-coin entries,
/// codebook = its null space. User `u` gets `Σ_j u_j b_j` over the canonical
/// null-space basis, so user 0 is always the all-zero word and the
/// information bits of a codeword sit at the free columns of `H`.
///
/// `M = 2^(n − rank H)`, which is `2^(n−l)` unless `H` is rank deficient.
pub fn gen_linear_code(n: usize, l: usize, seed: u64) -> Result<Codebook> {
    check_dims(n, l)?;
    let parity = BitMatrix::random(l, n, &mut stream_rng(seed, 0));
    let echelon = parity.echelon();
    let code = LinearCode {
        basis: echelon.nullspace_basis(),
        free_cols: echelon.free_columns(),
        parity,
    };
    Ok(Codebook::from_family(n, seed, Family::Linear(code)))
}

/// Coset code `u·G + k` with a random `(n−l) × n` generator `G` drawn from
/// `seed` and a fair-coin key word `k` drawn from `key_seed`.
pub fn gen_coset_code(n: usize, l: usize, seed: u64, key_seed: u64) -> Result<Codebook> {
    check_dims(n, l)?;
    let key = BitWord::random(n, &mut stream_rng(key_seed, 1));
    coset_with_key(n, l, seed, key)
}

/// Coset code with an explicit key. A zero key gives the plain linear code
/// generated by `G`.
pub fn coset_with_key(n: usize, l: usize, seed: u64, key: BitWord) -> Result<Codebook> {
    check_dims(n, l)?;
    if key.len() != n {
        return Err(Error::dim("key length must equal the code length"));
    }
    let generator = BitMatrix::random(n - l, n, &mut stream_rng(seed, 0));
    let dual = generator.nullspace();
    let parity = BitMatrix::from_rows(n, dual)?;
    Ok(Codebook::from_family(
        n,
        seed,
        Family::Coset(CosetCode {
            generator,
            key,
            parity,
        }),
    ))
}
