//! Multi-basis measurement uncertainty.
//!
//! A family of product bases with small pairwise overlap c forces a
//! trade-off: no state can concentrate its outcome distribution on small
//! sets in several bases at once. This module implements that trade-off
//! at three levels of refinement:
//!
//! * [`sets_bound`] — the raw inequality: for any state and any choice of
//!   one outcome set per basis, the total captured probability mass is at
//!   most `1 + c(m-1) * max_{j!=k} sqrt(|L^j||L^k|)`.
//! * [`good_event`] — the derived event `E` on which the measured outcome
//!   lands in the "spread out" region of whichever basis was used, so the
//!   outcome keeps `(delta/2 - 2*eps) * n` bits of min-entropy, while `E`
//!   fails for at most one basis choice in aggregate.
//! * [`construct_jprime`] — the constructive form: an explicit joint
//!   distribution over (J, J', X, psi) in which J' is independent of the
//!   basis index J, and conditioned on any (J=j, J'=j') with j != j' (and
//!   on the flag psi) the outcome X keeps `(delta/2 - 2*eps) * n - 1` bits
//!   of min-entropy. The flag psi fails with probability at most
//!   `2 * 2^(-eps*n)`.
//!
//! Everything here is measurement statistics: states enter only through
//! their outcome distributions `Q^j`, which are computed once and, for the
//! J' construction, snapped onto an exact dyadic grid so the distributional
//! identities can be checked without float tolerances.

mod bound;
mod family;
mod goodevent;
mod jprime;

pub use bound::{sets_bound, SetsBound};
pub use family::BasisFamily;
pub use goodevent::{good_event, GoodEvent};
pub use jprime::{construct_jprime, CaseTag, JPrimeChecks, JPrimeResult};

use thiserror::Error;

use crate::infotheory::InfoError;
use crate::qsim::QsimError;

/// Errors from basis-family construction and the bound-checking operations.
#[derive(Debug, Error)]
pub enum UncertaintyError {
    /// A family needs at least two bases for any overlap statement.
    #[error("a basis family needs at least 2 members, got {0}")]
    FamilyTooSmall(usize),
    /// All members of a family must act on the same number of qubits.
    #[error("family members act on different qubit counts ({0} vs {1})")]
    MixedSizes(usize, usize),
    /// The spread parameter must satisfy 0 < eps < delta/4.
    #[error("epsilon must lie in (0, {limit}), got {epsilon}")]
    EpsilonOutOfRange { epsilon: f64, limit: f64 },
    /// An outcome index exceeds the dimension of the measured system.
    #[error("set for basis {basis} contains outcome {index}, but dim = {dim}")]
    SetOutOfRange {
        basis: usize,
        index: usize,
        dim: usize,
    },
    /// `sets_bound` takes exactly one outcome set per basis.
    #[error("expected one outcome set per basis ({expected}), got {got}")]
    SetCountMismatch { expected: usize, got: usize },
    /// The basis-choice distribution must have one weight per basis.
    #[error("basis-choice distribution has {got} entries for {expected} bases")]
    WeightCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Info(#[from] InfoError),
}
