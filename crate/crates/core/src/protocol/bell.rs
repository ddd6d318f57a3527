//! The two-candidate Bell attack.
//!
//! A dishonest server that can measure stored qubits *in pairs* can test
//! two candidate passwords per execution instead of one, which is what
//! makes the single-qubit restriction of the adversary model meaningful
//! rather than cosmetic.
//!
//! The attack checks one bit of `z`. Let `f` be the first nonzero row of
//! `F` and `r` its index, so `z_r = f.x + g(w)_r`. For each candidate
//! `w_k` the attacker wants the check bit `f.y_k + g(w_k)_r`, where
//! `y_k` is what measuring in the basis `c(w_k)` would have produced on
//! the positions selected by `f`:
//!
//! * where the two candidate codewords agree, one single-qubit
//!   measurement in the common basis serves both candidates;
//! * where they disagree, qubits are taken in pairs and measured in the
//!   Bell basis, which yields the parity of the pair under *both* basis
//!   hypotheses at once (with a Hadamard on the first qubit when the
//!   hypothesized bases within the pair differ);
//! * a leftover position (odd pool) is measured in the first candidate's
//!   basis and its outcome reused, noisily, for the second.
//!
//! A candidate whose check bit contradicts `z_r` is discarded. A true
//! first candidate never is — all parities feeding its check are
//! deterministic — and neither is a true second candidate on an even
//! pool. When neither candidate is the true password, the two hash bits
//! `g(w_k)_r + g(w)_r` are uniform and pairwise independent, so both
//! candidates are discarded with probability exactly 1/4 — about one
//! wrong password eliminated per execution on average, two in the lucky
//! quarter.

use rand::Rng;
use serde::Serialize;

use crate::bits::{BitMatrix, BitVec};
use crate::qsim::{bell_measure_pair, single_qubit_probs, QubitBasis};

use super::{binomial_stderr, ProtocolError, ProtocolParams, StreamRng};

/// One attack execution: the two check bits, the matching bit of `z`,
/// and which candidates got discarded.
#[derive(Clone, Debug, Serialize)]
pub struct BellAttack {
    pub w1: usize,
    pub w2: usize,
    /// `f.y_k + g(w_k)_r` for k = 1, 2.
    pub check: [bool; 2],
    /// The bit of `z` both checks are compared against.
    pub z_bit: bool,
    /// Candidates (subset of {w1, w2}) whose check bit contradicts z.
    pub discarded: Vec<usize>,
    /// Number of Bell pairs measured.
    pub pairs: usize,
    /// Whether an odd pool left one position measured singly.
    pub unpaired: bool,
    pub seed: u64,
    pub stream: u64,
}

/// Index of the first nonzero row of `f`, falling back to 0 for the
/// all-zero matrix (whose attack degenerates to comparing hash bits).
pub(crate) fn pick_check_row(f: &BitMatrix) -> usize {
    (0..f.nrows()).find(|&r| f.row(r).weight() > 0).unwrap_or(0)
}

/// Runs one honest-user execution against a Bell-capable server holding
/// the candidate pair `(w1, w2)` while the true password is `w_true`.
pub fn bell_attack(
    params: &ProtocolParams,
    w_true: usize,
    w1: usize,
    w2: usize,
    rng: &mut StreamRng,
) -> Result<BellAttack, ProtocolError> {
    params.check_password(w_true)?;
    params.check_password(w1)?;
    params.check_password(w2)?;
    if w1 == w2 {
        return Err(ProtocolError::CandidatesCoincide(w1));
    }
    let n = params.n;

    // The honest user's side of the run.
    let x = BitVec::random(rng, n);
    let cw_true = params.code.encode(w_true);
    let f_mat = BitMatrix::random(rng, params.ell, n);
    let g = params.hash_family().sample(rng);
    let mut z = f_mat.mul_vec(&x);
    z.xor_assign(&g.eval(w_true)?);

    let r = pick_check_row(&f_mat);
    let f = f_mat.row(r);
    let c1 = params.code.encode(w1);
    let c2 = params.code.encode(w2);

    // Positions that feed the check bit, split by whether the candidate
    // codewords agree there.
    let mut pool: Vec<usize> = Vec::new();
    let mut parity = [false, false];
    for i in 0..n {
        if !f.get(i) {
            continue;
        }
        if c1.get(i) == c2.get(i) {
            // Common hypothesis: one measurement serves both candidates.
            let theta = QubitBasis::conjugate(c1.get(i));
            let (p0, _) = single_qubit_probs(x.get(i), cw_true.get(i), &theta);
            let yi = rng.gen::<f64>() >= p0;
            parity[0] ^= yi;
            parity[1] ^= yi;
        } else {
            pool.push(i);
        }
    }

    let pairs = pool.len() / 2;
    for p in 0..pairs {
        let (i, j) = (pool[2 * p], pool[2 * p + 1]);
        // Within the pair the two hypotheses assign complementary bases,
        // so exactly one of them mixes bases iff c1_i != c1_j; the
        // Hadamard trick moves the deterministic readout to the slot of
        // the *second* qubit's hypothesized basis.
        let mixed = c1.get(i) != c1.get(j);
        let outcome = bell_measure_pair(
            x.get(i),
            cw_true.get(i),
            x.get(j),
            cw_true.get(j),
            mixed,
            rng,
        );
        if mixed {
            parity[0] ^= outcome.parity_for(c1.get(j));
            parity[1] ^= outcome.parity_for(c2.get(j));
        } else {
            parity[0] ^= outcome.parity_for(c1.get(i));
            parity[1] ^= outcome.parity_for(c2.get(i));
        }
    }

    let unpaired = pool.len() % 2 == 1;
    if unpaired {
        // One leftover qubit: measure it in the first candidate's basis
        // and live with a noisy contribution to the second check. This
        // keeps the first candidate's check reliable but means an odd
        // pool can falsely discard a true *second* candidate.
        let i = *pool.last().unwrap();
        let theta = QubitBasis::conjugate(c1.get(i));
        let (p0, _) = single_qubit_probs(x.get(i), cw_true.get(i), &theta);
        let yi = rng.gen::<f64>() >= p0;
        parity[0] ^= yi;
        parity[1] ^= yi;
    }

    let z_bit = z.get(r);
    let check = [
        parity[0] ^ g.eval(w1)?.get(r),
        parity[1] ^ g.eval(w2)?.get(r),
    ];
    let mut discarded = Vec::new();
    if check[0] != z_bit {
        discarded.push(w1);
    }
    if check[1] != z_bit {
        discarded.push(w2);
    }
    Ok(BellAttack {
        w1,
        w2,
        check,
        z_bit,
        discarded,
        pairs,
        unpaired,
        seed: rng.seed(),
        stream: rng.stream(),
    })
}

/// Discard statistics over many attack executions.
#[derive(Clone, Debug, Serialize)]
pub struct BellAttackStats {
    pub trials: usize,
    /// Frequency of executions discarding both candidates.
    pub double_discard_rate: f64,
    pub double_discard_stderr: f64,
    /// Mean number of candidates discarded per execution.
    pub avg_discards: f64,
    /// Largest number discarded in any single execution (at most 2).
    pub max_discards: usize,
    /// Frequency of executions that discarded the true password; must be
    /// zero whenever the true password is among the candidates.
    pub true_discard_rate: f64,
    pub seed: u64,
}

pub fn bell_attack_stats(
    params: &ProtocolParams,
    w_true: usize,
    w1: usize,
    w2: usize,
    trials: usize,
) -> Result<BellAttackStats, ProtocolError> {
    if trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    // Validate once; per-trial runs then cannot fail.
    bell_attack(params, w_true, w1, w2, &mut params.rng(0))?;
    let mut doubles = 0usize;
    let mut total = 0usize;
    let mut max_discards = 0usize;
    let mut true_hits = 0usize;
    for t in 0..trials {
        let run = bell_attack(params, w_true, w1, w2, &mut params.rng(t as u64))
            .expect("inputs validated");
        let k = run.discarded.len();
        total += k;
        max_discards = max_discards.max(k);
        if k == 2 {
            doubles += 1;
        }
        if run.discarded.contains(&w_true) {
            true_hits += 1;
        }
    }
    Ok(BellAttackStats {
        trials,
        double_discard_rate: doubles as f64 / trials as f64,
        double_discard_stderr: binomial_stderr(doubles, trials),
        avg_discards: total as f64 / trials as f64,
        max_discards,
        true_discard_rate: true_hits as f64 / trials as f64,
        seed: params.rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BinaryCode;

    fn c842() -> BinaryCode {
        BinaryCode::new(vec![
            BitVec::parse("00000000").unwrap(),
            BitVec::parse("11110000").unwrap(),
            BitVec::parse("00001111").unwrap(),
            BitVec::parse("11111111").unwrap(),
        ])
        .unwrap()
    }

    fn params(seed: u64) -> ProtocolParams {
        ProtocolParams::new(c842(), 2, seed).unwrap()
    }

    #[test]
    fn the_true_password_is_never_discarded() {
        // As the first candidate the true password is always safe; as the
        // second it is safe whenever the pool pairs up evenly (an odd
        // pool leaves the second check with one noisy bit).
        let params = params(17);
        let mut even_pool_checks = 0u32;
        for (w_true, w1, w2) in [(1, 1, 3), (1, 0, 1), (3, 3, 0), (2, 1, 2)] {
            for t in 0..800 {
                let run = bell_attack(&params, w_true, w1, w2, &mut params.rng(t)).unwrap();
                if w_true == w1 {
                    assert!(
                        !run.discarded.contains(&w_true),
                        "run {t} discarded the true first candidate {w_true} of ({w1},{w2})"
                    );
                    assert_eq!(run.check[0], run.z_bit);
                } else if !run.unpaired {
                    even_pool_checks += 1;
                    assert!(
                        !run.discarded.contains(&w_true),
                        "run {t} discarded the true second candidate {w_true} of ({w1},{w2})"
                    );
                    assert_eq!(run.check[1], run.z_bit);
                }
            }
        }
        assert!(even_pool_checks > 200, "even pools must actually occur");
    }

    #[test]
    fn both_wrong_candidates_fall_together_a_quarter_of_the_time() {
        let params = params(29);
        let trials = 10_000;
        let stats = bell_attack_stats(&params, 0, 1, 2, trials).unwrap();
        assert_eq!(stats.true_discard_rate, 0.0, "w_true=0 is not a candidate but may never be blamed");
        let p = 0.25;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (stats.double_discard_rate - p).abs() < 3.0 * sigma,
            "double-discard rate {} vs 1/4 (3 sigma = {})",
            stats.double_discard_rate,
            3.0 * sigma
        );
        assert_eq!(stats.max_discards, 2);
        // Each wrong candidate individually falls with probability 1/2,
        // so the mean discard count sits near 1.
        assert!((stats.avg_discards - 1.0).abs() < 0.05, "avg {}", stats.avg_discards);
    }

    #[test]
    fn candidate_pair_with_true_member_discards_at_most_the_other() {
        let params = params(43);
        let trials = 4_000;
        let stats = bell_attack_stats(&params, 1, 1, 2, trials).unwrap();
        assert_eq!(stats.true_discard_rate, 0.0);
        assert_eq!(stats.double_discard_rate, 0.0);
        // The wrong candidate's hash-bit offset is uniform, so it still
        // falls about half the time.
        assert!((stats.avg_discards - 0.5).abs() < 0.05, "avg {}", stats.avg_discards);
    }

    #[test]
    fn pools_of_both_parities_show_up() {
        // Candidates (1, 2) disagree on all 8 positions, so the pool size
        // equals the weight of the first nonzero row of F: both parities
        // occur across trials.
        let params = params(57);
        let mut saw_odd = false;
        let mut saw_even_pairs = false;
        for t in 0..200 {
            let run = bell_attack(&params, 0, 1, 2, &mut params.rng(t)).unwrap();
            if run.unpaired {
                saw_odd = true;
            } else if run.pairs > 0 {
                saw_even_pairs = true;
            }
        }
        assert!(saw_odd && saw_even_pairs, "odd {saw_odd}, even {saw_even_pairs}");
    }

    #[test]
    fn check_row_skips_leading_zero_rows() {
        let zero = BitVec::zeros(4);
        let f = BitMatrix::new(vec![zero.clone(), BitVec::parse("0110").unwrap()]).unwrap();
        assert_eq!(pick_check_row(&f), 1);
        let all_zero = BitMatrix::new(vec![zero.clone(), zero]).unwrap();
        assert_eq!(pick_check_row(&all_zero), 0);
    }

    #[test]
    fn attack_outcome_serializes() {
        let params = params(3);
        let run = bell_attack(&params, 0, 1, 2, &mut params.rng(6)).unwrap();
        let json = serde_json::to_string(&run).unwrap();
        for field in ["\"check\":", "\"z_bit\":", "\"discarded\":", "\"pairs\":"] {
            assert!(json.contains(field), "missing {field}");
        }
    }
}
