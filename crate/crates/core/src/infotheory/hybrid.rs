use serde::Serialize;

use crate::qsim::{trace_norm, CMat, DensityMatrix, EQ_TOL};

use super::dist::{cond_min_entropy, Dist, JointDist};
use super::InfoError;

/// A classical-quantum (hybrid) state: a classical label X with weight
/// P_X(x) steering a quantum side system into state rho^x.
#[derive(Clone, Debug)]
pub struct HybridState {
    weights: Dist,
    side_states: Vec<DensityMatrix>,
}

impl HybridState {
    pub fn new(weights: Dist, side_states: Vec<DensityMatrix>) -> Result<Self, InfoError> {
        if weights.len() != side_states.len() || side_states.is_empty() {
            return Err(InfoError::LabelMismatch(weights.len(), side_states.len()));
        }
        let dim = side_states[0].dim();
        for s in &side_states {
            if s.dim() != dim {
                return Err(InfoError::LabelMismatch(s.dim(), dim));
            }
        }
        Ok(HybridState {
            weights,
            side_states,
        })
    }

    pub fn weights(&self) -> &Dist {
        &self.weights
    }

    pub fn side_states(&self) -> &[DensityMatrix] {
        &self.side_states
    }

    pub fn side_dim(&self) -> usize {
        self.side_states[0].dim()
    }

    /// Reduced state of the side system: sum_x P(x) rho^x.
    pub fn reduced_side(&self) -> CMat {
        let dim = self.side_dim();
        let mut out = CMat::zeros((dim, dim));
        for (x, rho) in self.side_states.iter().enumerate() {
            out = out + rho.mat().mapv(|z| z * self.weights.p(x));
        }
        out
    }
}

/// Guessing probability of a binary label given the quantum side system:
/// the Helstrom value (1 + ||P(0) rho^0 - P(1) rho^1||_1) / 2.
pub fn pguess_binary_quantum(rho: &HybridState) -> Result<f64, InfoError> {
    if rho.weights.len() != 2 {
        return Err(InfoError::NotBinary(rho.weights.len()));
    }
    let diff = rho.side_states[0].mat().mapv(|z| z * rho.weights.p(0))
        - rho.side_states[1].mat().mapv(|z| z * rho.weights.p(1));
    Ok(0.5 * (1.0 + trace_norm(&diff)?))
}

/// Distance from uniform of the label given the side system: half the
/// trace norm of rho_XE minus (uniform X) tensor rho_E. The block-diagonal
/// structure reduces this to a sum of per-label trace norms; for diagonal
/// (classical) side states it collapses to an expected statistical
/// distance.
pub fn dist_uniform(rho: &HybridState) -> Result<f64, InfoError> {
    let k = rho.weights.len() as f64;
    let reduced = rho.reduced_side();
    let mut total = 0.0;
    for (x, side) in rho.side_states.iter().enumerate() {
        let block = side.mat().mapv(|z| z * rho.weights.p(x)) - reduced.mapv(|z| z / k);
        total += trace_norm(&block)?;
    }
    Ok(0.5 * total)
}

/// Min-entropy of the pair (X, E): -log2 of the largest eigenvalue of the
/// block-diagonal hybrid state.
pub fn hybrid_min_entropy(rho: &HybridState) -> f64 {
    let top = rho
        .side_states
        .iter()
        .enumerate()
        .map(|(x, s)| rho.weights.p(x) * s.max_eigenvalue())
        .fold(0.0, f64::max);
    -top.log2()
}

/// Result of checking the min-entropy chain rule
/// `Hmin(X|YE) >= Hmin(X|Y) - Hmax(E)` with `Hmax(E) = log2 rank(rho_E)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChainRule {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of the chain rule for a binary X, classical Y and
/// quantum side system E. `weights` must have axes [X, Y] with |X| = 2;
/// `side` lists one density matrix per (x, y) pair, row-major.
pub fn chain_rule_check(
    weights: &JointDist,
    side: &[DensityMatrix],
) -> Result<ChainRule, InfoError> {
    if weights.shape().len() != 2 {
        return Err(InfoError::ShapeMismatch(2, weights.shape().len()));
    }
    let k = weights.shape()[1];
    if weights.shape()[0] != 2 {
        return Err(InfoError::NotBinary(weights.shape()[0]));
    }
    if side.len() != 2 * k {
        return Err(InfoError::ShapeMismatch(2 * k, side.len()));
    }
    let dim = side[0].dim();
    if dim > 16 {
        return Err(InfoError::TooLarge(dim, 16));
    }

    // lhs: -log2 of the averaged guessing probability over Y.
    let mut pguess = 0.0;
    for y in 0..k {
        let p0 = weights.p(&[0, y]);
        let p1 = weights.p(&[1, y]);
        let py = p0 + p1;
        if py == 0.0 {
            continue;
        }
        let cond = HybridState::new(
            Dist::from_probs(vec![p0 / py, p1 / py])?,
            vec![side[y].clone(), side[k + y].clone()],
        )?;
        pguess += py * pguess_binary_quantum(&cond)?;
    }
    let lhs = -pguess.log2();

    // rhs: classical conditional min-entropy minus the log-rank of the
    // reduced side state.
    let mut reduced = CMat::zeros((dim, dim));
    for y in 0..k {
        reduced = reduced + side[y].mat().mapv(|z| z * weights.p(&[0, y]));
        reduced = reduced + side[k + y].mat().mapv(|z| z * weights.p(&[1, y]));
    }
    let hmax = (DensityMatrix::new(reduced)?.rank() as f64).log2();
    let rhs = cond_min_entropy(weights) - hmax;

    Ok(ChainRule {
        lhs,
        rhs,
        holds: lhs >= rhs - EQ_TOL,
    })
}
