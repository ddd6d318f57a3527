//! Simulation and verification toolkit for a password-based quantum
//! identification protocol and the entropic uncertainty relation that
//! underpins its security analysis.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`] — GF(2) vectors/matrices, binary codes, strongly two-universal
//!   hashing, and the Schur-product counting lemmas used by the user-security
//!   argument.
//! * [`qsim`] — small dense statevector/density-matrix simulation, product
//!   bases, operator norms, and Bell-pair parity measurements.
//! * [`infotheory`] — distributions, (conditional) min-entropy, guessing
//!   probabilities, statistical distance, XOR-lemma and privacy-amplification
//!   bounds.
//! * [`uncertainty`] — the "all but one" min-entropy machinery: the
//!   overlap-sum bound, the good event, and the explicit construction of the
//!   independent basis pointer `J'`.
//! * [`protocol`] — the identification protocol itself, dishonest-user and
//!   dishonest-server (single-qubit-operations) adversaries, and the Bell
//!   attack that motivates the qubit-wise model.
//!
//! Everything is deterministic given a 64-bit seed; Monte Carlo estimators
//! report their seed and standard error so that every number in the output
//! can be reproduced.

pub mod bits;
pub mod infotheory;
pub mod protocol;
pub mod qsim;
pub mod uncertainty;
