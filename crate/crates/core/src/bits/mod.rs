//! GF(2) building blocks: bit vectors, bit matrices, binary codes and
//! strongly two-universal hashing.
//!
//! Bit vectors are stored as packed 64-bit words with an explicit length;
//! all operations keep the unused tail bits of the last word zero so that
//! popcounts and equality work directly on the words.

mod bitvec;
mod code;
mod hash;
mod matrix;
mod schur;

pub use bitvec::BitVec;
pub use code::BinaryCode;
pub use hash::{HashFamily, StrongHash};
pub use matrix::BitMatrix;
pub use schur::{find_c_tilde, lemma_schur_holds, CTildeSearch};

use thiserror::Error;

/// Errors raised by the GF(2) layer.
#[derive(Debug, Error)]
pub enum BitsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("codewords must be distinct (words {0} and {1} are equal)")]
    DuplicateCodeword(usize, usize),
    #[error("a code needs at least two codewords, got {0}")]
    TooFewCodewords(usize),
    #[error("codeword {0} has length {1}, expected {2}")]
    RaggedCodeword(usize, usize, usize),
    #[error("row span of an {0}-row matrix is too large to enumerate (limit 20 rows)")]
    SpanTooLarge(usize),
    #[error("invalid code file: {0}")]
    BadCodeFile(String),
    #[error("hash family needs 2^k >= m * 2^ell with k <= 48, got m={m}, ell={ell}")]
    HashFamilyTooLarge { m: usize, ell: usize },
    #[error("password index {0} out of range for family over {1} passwords")]
    PasswordOutOfRange(usize, usize),
}
