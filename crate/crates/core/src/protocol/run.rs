//! Honest executions and the dishonest-user analysis.
//!
//! Both run functions simulate all six protocol steps. The quantum part
//! reduces to independent per-qubit measurements because the server
//! measures qubit-wise in a product basis, so each outcome bit is sampled
//! from the exact single-qubit distribution; the factorization behind
//! that shortcut is checked against full statevector simulation in the
//! adversary-model tests.

use rand::Rng;

use crate::bits::{BitMatrix, BitVec, StrongHash};
use crate::qsim::{single_qubit_probs, ProductBasis};

use super::{binomial_stderr, EstimatorRow, ProtocolError, ProtocolParams, StreamRng};

use serde::Serialize;

/// Everything both parties saw in one execution, plus the ground truth
/// and the (seed, stream) pair that replays it.
#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    /// The server's password (the shared one in an honest run).
    pub w: usize,
    /// The bits the user encoded.
    pub x: BitVec,
    /// The bits the server measured.
    pub x_received: BitVec,
    /// The user's hash matrix, announced in step 3.
    pub f: BitMatrix,
    /// The server's strong hash, announced in step 4.
    pub g: StrongHash,
    /// The masked check vector `F x + g(w)` announced by the user.
    pub z: BitVec,
    /// The server's recomputation `F x' + g(w)`.
    pub z_check: BitVec,
    pub accept: bool,
    pub seed: u64,
    pub stream: u64,
}

/// Measures `|x>` (encoded qubit-wise in the basis string `cw`) in the
/// product basis `theta`, sampling every qubit independently.
pub(crate) fn measure_qubitwise<R: Rng + ?Sized>(
    x: &BitVec,
    cw: &BitVec,
    theta: &ProductBasis,
    rng: &mut R,
) -> BitVec {
    let mut y = BitVec::zeros(x.len());
    for i in 0..x.len() {
        let (p0, _) = single_qubit_probs(x.get(i), cw.get(i), theta.qubit(i));
        if rng.gen::<f64>() >= p0 {
            y.set(i, true);
        }
    }
    y
}

/// One honest execution with the shared password `w`. Accepts with
/// probability exactly one: the server measures in the encoding basis,
/// so `x' = x` and the two check vectors coincide.
pub fn honest_run(
    params: &ProtocolParams,
    w: usize,
    rng: &mut StreamRng,
) -> Result<Transcript, ProtocolError> {
    params.check_password(w)?;
    run_with_encoding(params, w, w, rng)
}

/// One execution where the user does not know the password and plays
/// honestly for the guess `w_guess`, while the server checks against
/// `w_true`. For a wrong guess the server's test collapses to a hash
/// collision and accepts with probability exactly `2^-ell`.
pub fn dishonest_user_run(
    params: &ProtocolParams,
    w_true: usize,
    w_guess: usize,
    rng: &mut StreamRng,
) -> Result<Transcript, ProtocolError> {
    params.check_password(w_true)?;
    params.check_password(w_guess)?;
    run_with_encoding(params, w_true, w_guess, rng)
}

/// Steps 1-6 with the user encoding (and masking) under `w_user` and the
/// server measuring (and checking) under `w_server`.
fn run_with_encoding(
    params: &ProtocolParams,
    w_server: usize,
    w_user: usize,
    rng: &mut StreamRng,
) -> Result<Transcript, ProtocolError> {
    let n = params.n;
    let x = BitVec::random(rng, n);
    let server_basis = ProductBasis::from_codeword(params.code.encode(w_server));
    let x_received = measure_qubitwise(&x, params.code.encode(w_user), &server_basis, rng);
    let f = BitMatrix::random(rng, params.ell, n);
    let g = params.hash_family().sample(rng);
    let mut z = f.mul_vec(&x);
    z.xor_assign(&g.eval(w_user)?);
    let mut z_check = f.mul_vec(&x_received);
    z_check.xor_assign(&g.eval(w_server)?);
    let accept = z == z_check;
    Ok(Transcript {
        w: w_server,
        x,
        x_received,
        f,
        g,
        z,
        z_check,
        accept,
        seed: rng.seed(),
        stream: rng.stream(),
    })
}

/// Acceptance frequency of honest runs, one stream per trial.
pub fn honest_accept_rate(
    params: &ProtocolParams,
    w: usize,
    trials: usize,
) -> Result<EstimatorRow, ProtocolError> {
    params.check_password(w)?;
    if trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    let hits = (0..trials)
        .filter(|&t| {
            honest_run(params, w, &mut params.rng(t as u64))
                .expect("inputs validated")
                .accept
        })
        .count();
    Ok(EstimatorRow {
        strategy: "honest".into(),
        params: format!("n={} m={} ell={} w={}", params.n, params.m(), params.ell, w),
        estimate: hits as f64 / trials as f64,
        stderr: binomial_stderr(hits, trials),
        trials,
        seed: params.rng_seed,
    })
}

/// Acceptance frequency of a dishonest user who guesses `w_guess`
/// against a server holding `w_true`.
pub fn dishonest_accept_rate(
    params: &ProtocolParams,
    w_true: usize,
    w_guess: usize,
    trials: usize,
) -> Result<EstimatorRow, ProtocolError> {
    params.check_password(w_true)?;
    params.check_password(w_guess)?;
    if trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    let hits = (0..trials)
        .filter(|&t| {
            dishonest_user_run(params, w_true, w_guess, &mut params.rng(t as u64))
                .expect("inputs validated")
                .accept
        })
        .count();
    Ok(EstimatorRow {
        strategy: "dishonest-user".into(),
        params: format!(
            "n={} m={} ell={} w_true={} w_guess={}",
            params.n,
            params.m(),
            params.ell,
            w_true,
            w_guess
        ),
        estimate: hits as f64 / trials as f64,
        stderr: binomial_stderr(hits, trials),
        trials,
        seed: params.rng_seed,
    })
}
