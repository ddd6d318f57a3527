//! The high-min-entropy event derived from the set-mass inequality.

use serde::Serialize;

use super::{BasisFamily, UncertaintyError};
use crate::infotheory::Dist;
use crate::qsim::{measure_dist, DensityMatrix};

/// Grace margin for the two threshold comparisons, so borderline float
/// values don't flap across Q^j(x) <= tau or Q^j(S^j) >= t.
const THRESH_TOL: f64 = 1e-12;

/// Description of the event E: per basis j, the low-probability outcome
/// set S^j, the conditional probability e_j = Pr[E | J=j], and the
/// min-entropy of the outcome on E, together with the bounds all of them
/// were checked against.
///
/// E happens when the measured outcome lands in S^J and the total mass of
/// S^J is itself at least t = 2^(-eps*n); the second clause discards basis
/// choices where the state is so concentrated that conditioning on S^j
/// would be conditioning on nearly nothing.
#[derive(Clone, Debug, Serialize)]
pub struct GoodEvent {
    /// S^j = {x : Q^j(x) <= 2^{-(delta/2 - eps) n}}, sorted outcome indices.
    pub sets: Vec<Vec<usize>>,
    /// e_j = Pr[E | J=j]: Q^j(S^j) where that mass reaches 2^{-eps n}, else 0.
    pub cond_probs: Vec<f64>,
    /// Hmin(X | J=j, E) = -log2 max_{x in S^j} Q^j(x)/e_j; None when e_j = 0.
    pub hmin: Vec<Option<f64>>,
    /// (m-1) - (2m-1) 2^{-eps n}, the guaranteed floor for sum_j e_j.
    pub sum_bound: f64,
    /// (delta/2 - 2 eps) n, the guaranteed floor for every defined Hmin entry.
    pub hmin_bound: f64,
    /// Pr[E] = sum_j P_J(j) e_j under the supplied basis-choice distribution.
    pub pr_event: f64,
    /// (1-p) - p (2m-1) 2^{-eps n} with p = max_j P_J(j).
    pub pr_event_bound: f64,
}

/// Builds the event description and asserts the three guaranteed bounds
/// (with 1e-9 slack): sum_j e_j >= sum_bound, every defined Hmin entry
/// >= hmin_bound, and Pr[E] >= pr_event_bound. A violation panics, since
/// it would mean the measurement layer or the family's overlap figure is
/// broken, not that the caller did anything wrong.
pub fn good_event(
    rho: &DensityMatrix,
    family: &BasisFamily,
    p_j: &Dist,
    epsilon: f64,
) -> Result<GoodEvent, UncertaintyError> {
    let m = family.m();
    let n = family.n();
    let delta = family.delta();
    if !(epsilon > 0.0 && epsilon < delta / 4.0) {
        return Err(UncertaintyError::EpsilonOutOfRange {
            epsilon,
            limit: delta / 4.0,
        });
    }
    if p_j.len() != m {
        return Err(UncertaintyError::WeightCountMismatch {
            expected: m,
            got: p_j.len(),
        });
    }

    let nf = n as f64;
    let tau = (-(delta / 2.0 - epsilon) * nf).exp2();
    let t = (-epsilon * nf).exp2();

    let mut sets = Vec::with_capacity(m);
    let mut cond_probs = Vec::with_capacity(m);
    let mut hmin = Vec::with_capacity(m);
    for j in 0..m {
        let q = measure_dist(rho, family.basis(j))?;
        let set: Vec<usize> = (0..q.len()).filter(|&x| q[x] <= tau + THRESH_TOL).collect();
        let mass: f64 = set.iter().map(|&x| q[x]).sum();
        let e_j = if mass >= t - THRESH_TOL { mass } else { 0.0 };
        if e_j > 0.0 {
            let top = set.iter().map(|&x| q[x]).fold(0.0, f64::max);
            hmin.push(Some(-(top / e_j).log2()));
        } else {
            hmin.push(None);
        }
        sets.push(set);
        cond_probs.push(e_j);
    }

    let tail = (2 * m - 1) as f64 * t;
    let sum_bound = (m - 1) as f64 - tail;
    let hmin_bound = (delta / 2.0 - 2.0 * epsilon) * nf;
    let p = p_j.max_prob();
    let pr_event: f64 = cond_probs
        .iter()
        .zip(p_j.probs())
        .map(|(e, pj)| e * pj)
        .sum();
    let pr_event_bound = (1.0 - p) - p * tail;

    let e_sum: f64 = cond_probs.iter().sum();
    assert!(
        e_sum >= sum_bound - 1e-9,
        "event mass sum {e_sum} fell below its floor {sum_bound}"
    );
    for (j, h) in hmin.iter().enumerate() {
        if let Some(h) = h {
            assert!(
                *h >= hmin_bound - 1e-9,
                "Hmin(X|J={j},E) = {h} fell below its floor {hmin_bound}"
            );
        }
    }
    assert!(
        pr_event >= pr_event_bound - 1e-9,
        "Pr[E] = {pr_event} fell below its floor {pr_event_bound}"
    );

    Ok(GoodEvent {
        sets,
        cond_probs,
        hmin,
        sum_bound,
        hmin_bound,
        pr_event,
        pr_event_bound,
    })
}
