//! Dense simulation of small qubit systems.
//!
//! Everything here is exact linear algebra on `2^n`-dimensional arrays; no
//! sampling shortcuts are taken anywhere a distribution is computed. The
//! only randomness is in explicit `measure`-style helpers that consume an
//! RNG to draw an outcome from an exactly computed distribution.
//!
//! Conventions:
//! * Qubit `i` of an `n`-qubit register corresponds to bit `i` of a
//!   [`crate::bits::BitVec`], and to the `i`-th tensor factor from the left;
//!   computational basis state `|x>` lives at index `sum_i x_i 2^(n-1-i)`.
//! * Basis bit 0 is the computational basis, bit 1 the Hadamard basis, so a
//!   codeword doubles as a product-basis description.

mod basis;
mod eigen;
mod measure;
mod state;

pub use basis::{max_overlap, quantized_basis, single_qubit_probs, ProductBasis, QubitBasis};
pub use eigen::{hermitian_eigenvalues, operator_norm, trace_distance, trace_norm, CMat};
pub use measure::{
    bell_measure_pair, bell_outcome_probs, bell_parity, measure_dist, measure_dist_pure,
    norm_inequality_check, sample_outcome, state_in_basis, BellOutcome, NormInequality,
};
pub use state::{bits_to_index, index_to_bits, DensityMatrix, PureState};

use thiserror::Error;

/// Tolerance for construction-time validation (norms, Hermiticity, trace).
pub const CONSTRUCT_TOL: f64 = 1e-10;
/// Slack allowed on positive semidefiniteness: eigenvalues >= -PSD_TOL.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance for comparing computed matrices/norms against each other.
pub const EQ_TOL: f64 = 1e-9;
/// Tolerance when comparing against closed-form analytic values.
pub const ANALYTIC_TOL: f64 = 1e-12;

/// Statevectors beyond this many qubits are refused (memory, not time).
pub const MAX_PURE_QUBITS: usize = 14;
/// Dense matrices beyond this dimension are refused.
pub const MAX_DENSE_DIM: usize = 1024;

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("amplitude vector of length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("system too large: {0} (limit {1})")]
    TooLarge(usize, usize),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("basis vector is not normalized (norm {0})")]
    NotUnit(f64),
    #[error("basis vectors are not orthogonal (overlap {0:.3e})")]
    NotOrthogonal(f64),
    #[error("matrix {0} is not a projector (deviation {1:.3e})")]
    NotProjector(usize, f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("mixture weights must be a probability vector (sum {0})")]
    BadWeights(f64),
    #[error("exhaustive overlap computation needs every basis tagged with a codeword or n <= 10")]
    OverlapTooLarge,
    /// A basis or projector family needs at least two members.
    #[error("family needs at least 2 members, got {0}")]
    FamilyTooSmall(usize),
}
