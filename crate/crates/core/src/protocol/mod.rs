//! The password-based identification protocol and its adversaries.
//!
//! One execution identifies a user to a server that shares a password
//! `w` drawn from `0..m`. The password indexes a codeword `c(w)` of a
//! binary code with minimum distance `d`, and the codeword fixes a
//! conjugate-coding basis for `n` qubits:
//!
//! 1. the user picks `x` uniformly from `{0,1}^n` and sends `|x>` encoded
//!    qubit-wise in the basis `c(w)`;
//! 2. the server measures every qubit in the basis `c(w)`, obtaining `x'`
//!    (equal to `x` when both parties are honest);
//! 3. the user picks a uniformly random `ell x n` binary matrix `F` and
//!    announces it;
//! 4. the server picks a strongly two-universal hash `g` from passwords
//!    to `ell` bits and announces it;
//! 5. the user announces `z = F x + g(w)`;
//! 6. the server accepts if and only if `z = F x' + g(w)`.
//!
//! Honest executions accept with probability exactly one and reveal
//! nothing about `w` beyond the hash mask. The interesting questions are
//! adversarial, and each gets its own corner of this module:
//!
//! * a **dishonest user** who does not know `w` can do no better than
//!   make the server's check collapse to a hash collision, so it wins
//!   with probability `2^-ell` per candidate pair ([`dishonest_user_run`],
//!   [`server_security_level`]);
//! * a **dishonest server** with a bounded quantum memory of `q` qubits
//!   faces the min-entropy bound of the uncertainty machinery, giving the
//!   closed-form security level of [`bqsm_bound`];
//! * a dishonest server restricted to **single-qubit operations** — store
//!   all `n` qubits, pick one product basis from the classical messages,
//!   measure everything at the end — is modelled exactly: [`sqom_run`]
//!   samples such an adversary's view, and [`user_security_sd`] computes,
//!   instance by instance, the exact statistical distance between the
//!   password and the adversary's view once the one candidate password
//!   the basis choice can vouch for is set aside;
//! * the **Bell attack** ([`bell_attack`]) is the reason the single-qubit
//!   restriction is load-bearing: with two-qubit Bell measurements a
//!   server holding two candidate passwords can test both at once and
//!   discard, on average, about one wrong candidate per execution.
//!
//! Everything that samples randomness takes a [`StreamRng`], which pins a
//! (seed, stream) pair and records both so any run can be replayed.

mod bell;
mod run;
mod security;
mod sqom;

pub use bell::{bell_attack_stats, bell_attack, BellAttack, BellAttackStats};
pub use run::{
    dishonest_accept_rate, dishonest_user_run, honest_accept_rate, honest_run, Transcript,
};
pub use security::{
    bqsm_bound, cell_distribution, server_security_level, user_security_sd, walsh_biases,
    BqsmBound, SdInstance, UserSecurityReport, WPrimeRule, MAX_EXACT_SD_QUBITS,
};
pub use sqom::{sqom_run, AdversaryView, SqomStrategy};

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{BinaryCode, BitsError, HashFamily};
use crate::qsim::QsimError;

#[derive(Debug, Error)]
pub enum ProtocolError {
    /// Password indices must be smaller than the code size m.
    #[error("password {0} out of range for an m={1} code")]
    PasswordOutOfRange(usize, usize),
    /// The hash output must carry at least one bit.
    #[error("hash output length ell must be at least 1")]
    EllTooSmall,
    /// The two Bell-attack candidates must be distinct passwords.
    #[error("the attack needs two distinct candidate passwords, got {0} twice")]
    CandidatesCoincide(usize),
    /// The storage-bound smoothing parameter has a hard range.
    #[error("kappa must lie in (0, {limit}), got {kappa}")]
    KappaOutOfRange { kappa: f64, limit: f64 },
    /// The Schur-counting slack must leave the quarter gap open.
    #[error("beta must lie in [0, 0.25), got {0}")]
    BetaOutOfRange(f64),
    /// Exact conditional distributions materialize 2^n-entry tables.
    #[error("exact cell distributions need n <= {MAX_EXACT_SD_QUBITS}, got {0}")]
    TooManyQubitsForExact(usize),
    /// Estimators need at least one trial.
    #[error("need at least one trial")]
    NoTrials,
    /// The requested coset `{x : Fx = u}` is empty, i.e. `u` is outside
    /// the image of `F`.
    #[error("no x satisfies Fx = u; the conditioning event has probability zero")]
    EmptyCoset,
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Shared setup for one protocol deployment: the code whose codewords
/// double as passwords and bases, the hash output length, and the seed
/// every estimator derives its randomness from.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolParams {
    /// Number of qubits = code length.
    pub n: usize,
    /// Hash output length in bits.
    pub ell: usize,
    /// Codewords; `code.m()` is the number of passwords.
    pub code: BinaryCode,
    /// Base seed; every run derives a per-trial stream from it.
    pub rng_seed: u64,
    family: HashFamily,
}

impl ProtocolParams {
    pub fn new(code: BinaryCode, ell: usize, rng_seed: u64) -> Result<Self, ProtocolError> {
        if ell == 0 {
            return Err(ProtocolError::EllTooSmall);
        }
        let family = HashFamily::new(code.m(), ell)?;
        Ok(ProtocolParams {
            n: code.n(),
            ell,
            code,
            rng_seed,
            family,
        })
    }

    /// Number of passwords.
    pub fn m(&self) -> usize {
        self.code.m()
    }

    /// Relative minimum distance d/n of the code.
    pub fn delta(&self) -> f64 {
        self.code.min_distance() as f64 / self.n as f64
    }

    /// The strongly two-universal family the server samples `g` from.
    pub fn hash_family(&self) -> &HashFamily {
        &self.family
    }

    /// The generator for one trial: stream `t` of the base seed.
    pub fn rng(&self, stream: u64) -> StreamRng {
        StreamRng::new(self.rng_seed, stream)
    }

    fn check_password(&self, w: usize) -> Result<(), ProtocolError> {
        if w >= self.m() {
            return Err(ProtocolError::PasswordOutOfRange(w, self.m()));
        }
        Ok(())
    }
}

/// A ChaCha generator pinned to a (seed, stream) pair.
///
/// Monte Carlo trial `t` runs on stream `t`, so trials are independent,
/// any subset can be replayed in isolation, and parallel execution gives
/// the same numbers as a sequential loop.
#[derive(Clone, Debug)]
pub struct StreamRng {
    rng: ChaCha12Rng,
    seed: u64,
    stream: u64,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        StreamRng { rng, seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.rng.try_fill_bytes(dest)
    }
}

/// One Monte Carlo estimate in the shape the command-line tools emit:
/// what was estimated, under which parameters, the value, its binomial
/// standard error, and how to reproduce it.
#[derive(Clone, Debug, Serialize)]
pub struct EstimatorRow {
    pub strategy: String,
    pub params: String,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

impl EstimatorRow {
    pub fn csv_header() -> &'static str {
        "strategy,params,estimate,stderr,trials,seed"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.strategy, self.params, self.estimate, self.stderr, self.trials, self.seed
        )
    }
}

/// Standard error of an empirical frequency `hits/trials`.
pub(crate) fn binomial_stderr(hits: usize, trials: usize) -> f64 {
    let p = hits as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVec;
    use rand::Rng;

    #[test]
    fn params_validate_inputs() {
        let code = BinaryCode::repetition(4);
        assert!(matches!(
            ProtocolParams::new(code.clone(), 0, 1),
            Err(ProtocolError::EllTooSmall)
        ));
        let params = ProtocolParams::new(code, 2, 1).unwrap();
        assert_eq!(params.n, 4);
        assert_eq!(params.m(), 2);
        assert_eq!(params.delta(), 1.0);
        assert!(matches!(
            params.check_password(2),
            Err(ProtocolError::PasswordOutOfRange(2, 2))
        ));
    }

    #[test]
    fn streams_are_independent_and_replayable() {
        let mut a = StreamRng::new(7, 0);
        let mut b = StreamRng::new(7, 1);
        let mut a2 = StreamRng::new(7, 0);
        let draws_a: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let draws_b: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let draws_a2: Vec<u64> = (0..4).map(|_| a2.next_u64()).collect();
        assert_eq!(draws_a, draws_a2, "same stream must replay identically");
        assert_ne!(draws_a, draws_b, "different streams must differ");
        assert_eq!(a.seed(), 7);
        assert_eq!(b.stream(), 1);
    }

    #[test]
    fn stream_rng_drives_generic_consumers() {
        let mut rng = StreamRng::new(3, 5);
        let v = BitVec::random(&mut rng, 130);
        assert_eq!(v.len(), 130);
        let x: f64 = rng.gen();
        assert!((0.0..1.0).contains(&x));
    }

    #[test]
    fn estimator_row_csv_shape() {
        let row = EstimatorRow {
            strategy: "honest".into(),
            params: "n=4 m=2 ell=2".into(),
            estimate: 1.0,
            stderr: 0.0,
            trials: 100,
            seed: 42,
        };
        let line = row.to_csv();
        assert_eq!(line.split(',').count(), EstimatorRow::csv_header().split(',').count());
        assert!(line.starts_with("honest,"));
    }

    #[test]
    fn binomial_stderr_basics() {
        assert_eq!(binomial_stderr(0, 100), 0.0);
        assert_eq!(binomial_stderr(100, 100), 0.0);
        let mid = binomial_stderr(50, 100);
        assert!((mid - 0.05).abs() < 1e-12);
    }
}
