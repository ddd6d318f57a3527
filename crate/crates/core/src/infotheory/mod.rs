//! Classical and small-quantum information measures: min-entropy and
//! guessing probability, statistical distance, distance to uniform, bias
//! and the XOR lemma, Hoeffding's inequality, the privacy-amplification
//! bound, and a chain-rule check against quantum side information.

mod dist;
pub mod exact;
mod hybrid;

pub use dist::{
    bias, cond_min_entropy, hoeffding_bound, min_entropy, pa_bound, pguess_classical,
    shannon_entropy, stat_distance, xor_lemma_bound, Dist, JointDist,
};
pub use hybrid::{
    chain_rule_check, dist_uniform, hybrid_min_entropy, pguess_binary_quantum, ChainRule,
    HybridState,
};

use thiserror::Error;

/// Tolerance for normalization checks at construction.
pub const NORM_TOL: f64 = 1e-9;
/// The XOR-lemma bound enumerates all 2^n parities; cap the exponent.
pub const MAX_XOR_BITS: usize = 12;

#[derive(Debug, Error)]
pub enum InfoError {
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("negative probability {0}")]
    NegativeProb(f64),
    #[error("label sets differ: {0} vs {1}")]
    LabelMismatch(usize, usize),
    #[error("expected a binary distribution, got {0} labels")]
    NotBinary(usize),
    #[error("size {0} exceeds limit {1}")]
    TooLarge(usize, usize),
    #[error("expected {0} entries, got {1}")]
    ShapeMismatch(usize, usize),
    #[error("parameter out of range: {0}")]
    OutOfRange(&'static str),
    #[error(transparent)]
    Quantum(#[from] crate::qsim::QsimError),
}
