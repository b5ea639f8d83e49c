//! Collusion-resistant fingerprinting: codebook ensembles, coalition attacks,
//! identification decoders and a Monte Carlo harness.

pub mod analysis;
pub mod attacks;
pub mod decoders;
pub mod ensembles;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod seeding;

pub use analysis::TransitionMatrix;
pub use attacks::{AttackKind, Coalition, ErasurePattern, ForgedCopy};
pub use decoders::{BpState, DecodeOutcome, DecodeStatus, DecoderKind};
pub use ensembles::{Codebook, EnsembleKind, ProtographSpec, TannerGraph, UserIndex};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitWord, SolutionSet};
pub use harness::{ExperimentConfig, ResultTable, TrialResult};
