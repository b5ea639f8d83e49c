//! Identification decoders. Each returns a [`DecodeOutcome`] naming at most
//! one accused user.

mod bsc;
mod exhaustive;
mod peel;
mod syndrome;

pub use bsc::{bp_bsc, bp_bsc_decode, BscDecodeResult};
pub use exhaustive::{likelihood_decode_avg, md_erasure_candidates, md_erasure_decode, md_hamming_decode};
pub use peel::{
    bp_peel, differing_variables, is_stopping_set, modified_bp_decode, select_guess_node, BpState, GuessRule,
    PeelStatus,
};
pub use syndrome::{syndrome_candidates, syndrome_erasure_decode};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::attacks::Coalition;
use crate::ensembles::UserIndex;
use crate::gf2::BitWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    /// A single user is accused.
    Identified,
    /// More candidates than pirates; the accusation is one of them.
    Ambiguous,
    /// No accusation.
    Failed,
}

impl DecodeStatus {
    pub fn name(self) -> &'static str {
        match self {
            DecodeStatus::Identified => "identified",
            DecodeStatus::Ambiguous => "ambiguous",
            DecodeStatus::Failed => "failed",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Erased positions of the forged copy.
    pub erased: usize,
    /// Message-passing iterations (BSC) or peeling rounds.
    pub iterations: usize,
    /// Guesses made by the modified peeling decoder.
    pub guesses: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub accused: Option<UserIndex>,
    /// Number of codewords consistent with the input (1 for decoders that
    /// only produce a single estimate, 0 on failure).
    pub candidates: BigUint,
    /// Decoded codeword, when the decoder produces one.
    pub codeword: Option<BitWord>,
    pub diagnostics: Diagnostics,
}

impl DecodeOutcome {
    pub(crate) fn failed(diagnostics: Diagnostics) -> Self {
        DecodeOutcome {
            status: DecodeStatus::Failed,
            accused: None,
            candidates: BigUint::from(0u8),
            codeword: None,
            diagnostics,
        }
    }

    pub(crate) fn accuse(user: UserIndex, candidates: BigUint, t: usize, diagnostics: Diagnostics) -> Self {
        let status = if candidates > BigUint::from(t) {
            DecodeStatus::Ambiguous
        } else {
            DecodeStatus::Identified
        };
        DecodeOutcome {
            status,
            accused: Some(user),
            candidates,
            codeword: None,
            diagnostics,
        }
    }

    /// A failed decode or an accusation outside the coalition.
    pub fn misidentifies(&self, coalition: &Coalition) -> bool {
        !matches!(&self.accused, Some(u) if coalition.contains(u))
    }
}

/// Named decoders the harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    /// Consistency with the unerased positions of an averaged copy.
    MdErasure,
    /// Linear-algebra version of `MdErasure` for LINEAR and COSET codes.
    Syndrome,
    /// Minimum Hamming distance to a binary copy.
    MdHamming,
    /// Maximum likelihood under the averaging channel.
    Likelihood,
    /// Peeling with guesses on the accumulator chain.
    ModifiedBp,
    /// Sum-product decoding with a BSC prior.
    BpBsc,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::MdErasure => "md_erasure",
            DecoderKind::Syndrome => "syndrome",
            DecoderKind::MdHamming => "md_hamming",
            DecoderKind::Likelihood => "likelihood",
            DecoderKind::ModifiedBp => "modified_bp",
            DecoderKind::BpBsc => "bp_bsc",
        }
    }

    /// Whether the decoder reads averaged (rather than binary) copies.
    pub fn needs_averaged(self) -> bool {
        matches!(
            self,
            DecoderKind::MdErasure | DecoderKind::Syndrome | DecoderKind::Likelihood | DecoderKind::ModifiedBp
        )
    }

    /// Whether the decoder scans a materialized codebook.
    pub fn is_exhaustive(self) -> bool {
        matches!(self, DecoderKind::MdErasure | DecoderKind::MdHamming | DecoderKind::Likelihood)
    }
}
