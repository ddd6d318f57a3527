//! The per-set mass inequality over a basis family.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{BasisFamily, UncertaintyError};
use crate::qsim::{measure_dist, DensityMatrix, EQ_TOL};

/// Both sides of the set-mass inequality for one (state, family, sets)
/// triple.
#[derive(Clone, Debug, Serialize)]
pub struct SetsBound {
    /// Q^j(L^j): measured mass the state puts on each basis's chosen set.
    pub masses: Vec<f64>,
    /// Sum of the per-basis masses.
    pub lhs: f64,
    /// 1 + c(m-1) * max_{j!=k} sqrt(|L^j| |L^k|).
    pub rhs: f64,
    /// Whether lhs <= rhs within EQ_TOL.
    pub holds: bool,
}

/// Evaluates sum_j Q^j(L^j) against 1 + c(m-1) max_{j!=k} sqrt(|L^j||L^k|),
/// one outcome set per basis. Duplicate indices within a set count once.
///
/// The exhaustive measurement keeps this to the dense-density regime
/// (n <= 10), which `DensityMatrix` already enforces.
pub fn sets_bound(
    rho: &DensityMatrix,
    family: &BasisFamily,
    sets: &[Vec<usize>],
) -> Result<SetsBound, UncertaintyError> {
    let m = family.m();
    if sets.len() != m {
        return Err(UncertaintyError::SetCountMismatch {
            expected: m,
            got: sets.len(),
        });
    }
    let dim = 1usize << family.n();
    let mut dedup: Vec<BTreeSet<usize>> = Vec::with_capacity(m);
    for (j, set) in sets.iter().enumerate() {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        if let Some(&bad) = s.iter().next_back() {
            if bad >= dim {
                return Err(UncertaintyError::SetOutOfRange {
                    basis: j,
                    index: bad,
                    dim,
                });
            }
        }
        dedup.push(s);
    }

    let mut masses = Vec::with_capacity(m);
    for (j, set) in dedup.iter().enumerate() {
        let q = measure_dist(rho, family.basis(j))?;
        masses.push(set.iter().map(|&x| q[x]).sum());
    }
    let lhs: f64 = masses.iter().sum();

    // max_{j!=k} sqrt(|L^j||L^k|) is attained by the two largest sets at
    // distinct indices, i.e. the top two entries of the size list.
    let mut sizes: Vec<usize> = dedup.iter().map(|s| s.len()).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let max_cross = ((sizes[0] * sizes[1]) as f64).sqrt();
    let rhs = 1.0 + family.c() * (m - 1) as f64 * max_cross;

    Ok(SetsBound {
        masses,
        lhs,
        rhs,
        holds: lhs <= rhs + EQ_TOL,
    })
}
