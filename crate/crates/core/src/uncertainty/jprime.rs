//! Constructing the basis-independent hint variable J'.
//!
//! Given measurement statistics Q^j snapped onto the dyadic grid, the good
//! event E (per-basis low-probability sets S^j with gated conditional
//! probabilities e_j) either already satisfies sum_j e_j = m-1 exactly
//! (case "zero"), or it is enlarged ("inflate", alpha > 0) or shrunk
//! ("deflate", alpha < 0) by per-cell coins until it does. Once the sum is
//! exactly m-1, the ratio rule
//!
//!   P(J'=j' | J=j, X=x, E') = Pr[not E' | J=j'] / Pr[E' | J=j]  (j' != j)
//!
//! together with J' := J off E' defines a J' that is exactly independent of
//! J, with J != J' precisely on E'. Conditioned on any (J=j, J'=j') with
//! j != j' and on the flag psi, the outcome X is distributed like Q^j
//! restricted to S^j, so its min-entropy clears (delta/2 - 2 eps)n - 1.
//!
//! One deviation from a literal uniform enlargement is forced: adding
//! alpha/m of event mass to every basis is infeasible whenever some basis
//! has off-event headroom h_j = 1 - e_j < alpha/m (the event would need
//! conditional probability above one). The enlargement used here is the
//! capped water-filling a_j = min(h_j, cap) with cap chosen so that
//! sum_j a_j = alpha exactly. It coincides with the uniform alpha/m
//! allocation whenever that is feasible, does not depend on the
//! basis-choice weights (so the J' marginal stays a function of the state
//! alone), and minimizes the largest single addition, which is what the
//! failure probability of psi is charged against.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::Serialize;

use super::{BasisFamily, UncertaintyError};
use crate::infotheory::exact::{log2_rat, rat_to_f64, rationalize_probs, to_grid, Rat};
use crate::infotheory::{Dist, JointDist};
use crate::qsim::{measure_dist, DensityMatrix};

/// Which branch of the case analysis built the joint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Zero,
    Inflate,
    Deflate,
}

/// Outcome of the post-construction verification.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JPrimeChecks {
    /// P_{JJ'}(j,j') = P_J(j) P_{J'}(j') held exactly in rational arithmetic.
    pub independence_exact: bool,
    /// Hmin(X | J=j, J'=j', psi) >= (delta/2 - 2 eps)n - 1 for every
    /// populated pair j != j' (with 1e-9 slack).
    pub hmin_ok: bool,
    /// Pr[psi] >= 1 - 2 * 2^(-eps n) (with 1e-9 slack).
    pub psi_ok: bool,
}

/// The constructed joint distribution of (J, J', X, psi) and the bounds it
/// was verified against. Axis `psi` is 1 where the flag holds; all mass
/// sits at psi = 1 except for the coined enlargement slice in the inflate
/// case.
#[derive(Clone, Debug, Serialize)]
pub struct JPrimeResult {
    pub joint: JointDist,
    pub case_tag: CaseTag,
    /// alpha = (m-1) - sum_j e_j, evaluated on the exact grid.
    pub alpha: f64,
    pub epsilon: f64,
    /// Present when some e_{j*} = 0 forces J' := j* with probability 1.
    pub degenerate: Option<usize>,
    /// (delta/2 - 2 eps)n - 1.
    pub hmin_bound: f64,
    /// True when hmin_bound < 0, i.e. the entropy claim carries no content
    /// at these parameters.
    pub vacuous: bool,
    /// Smallest Hmin(X | J=j, J'=j', psi) over populated pairs j != j';
    /// None when no off-diagonal pair carries psi=1 mass.
    pub min_hmin: Option<f64>,
    pub pr_psi: f64,
    /// 1 - 2 * 2^(-eps n).
    pub pr_psi_bound: f64,
    pub checks: JPrimeChecks,
}

fn int_rat(k: i64) -> Rat {
    Rat::from_integer(BigInt::from(k))
}

/// Exact water-filling: a_j = min(h_j, cap) with sum_j a_j = alpha.
/// Requires 0 < alpha < sum_j h_j, which the inflate branch guarantees
/// (sum h = 1 + alpha there).
fn water_fill(h: &[Rat], alpha: &Rat) -> Vec<Rat> {
    let m = h.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| h[i].cmp(&h[j]));
    let mut prefix = Rat::zero();
    for k in 0..m {
        // Suppose the k smallest bins saturate (a = h) and the rest sit at
        // the water level.
        let cap = (alpha - &prefix) / int_rat((m - k) as i64);
        let lower_ok = k == 0 || h[order[k - 1]] <= cap;
        if lower_ok && cap <= h[order[k]] {
            return h
                .iter()
                .map(|hj| if *hj <= cap { hj.clone() } else { cap.clone() })
                .collect();
        }
        prefix += &h[order[k]];
    }
    unreachable!("0 < alpha < sum(h) guarantees a water level");
}

/// Builds the joint distribution of (J, J', X, psi) exactly as the case
/// analysis prescribes, on the dyadic grid, and verifies the three
/// guarantees: exact independence of J and J', the per-pair min-entropy
/// floor, and the psi probability floor. Exact invariants (total mass one,
/// no negative probabilities, exact factorization) panic on violation
/// since they can only break if the construction itself is wrong; the two
/// float-facing floors are reported in [`JPrimeChecks`].
pub fn construct_jprime(
    rho: &DensityMatrix,
    family: &BasisFamily,
    p_j: &Dist,
    epsilon: f64,
) -> Result<JPrimeResult, UncertaintyError> {
    let m = family.m();
    let n = family.n();
    let nf = n as f64;
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
    let dim = 1usize << n;

    // Everything below runs on the grid: measured distributions, the two
    // thresholds, and all event algebra.
    let p_rat = rationalize_probs(p_j.probs());
    let mut q_rat: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for b in family.bases() {
        q_rat.push(rationalize_probs(&measure_dist(rho, b)?));
    }
    let tau = to_grid((-(delta / 2.0 - epsilon) * nf).exp2());
    let t = to_grid((-epsilon * nf).exp2());

    let mut in_set = vec![vec![false; dim]; m];
    let mut e = vec![Rat::zero(); m];
    for j in 0..m {
        let mut mass = Rat::zero();
        for x in 0..dim {
            if q_rat[j][x] <= tau {
                in_set[j][x] = true;
                mass += &q_rat[j][x];
            }
        }
        e[j] = if mass >= t { mass } else { Rat::zero() };
    }
    let alpha = e
        .iter()
        .fold(int_rat(m as i64 - 1), |acc, ej| acc - ej);

    // Per-basis probability of landing on the adjusted event E':
    // eprime_j = Pr[E' | J=j], with sum_j eprime_j = m-1 exactly.
    // `coin` is the per-cell enlargement probability off E (inflate);
    // `thin` the per-cell survival probability on E (deflate).
    let case_tag;
    let eprime: Vec<Rat>;
    let mut coin: Vec<Rat> = vec![Rat::zero(); m];
    let mut thin = Rat::one();
    if alpha.is_zero() {
        case_tag = CaseTag::Zero;
        eprime = e.clone();
    } else if alpha.is_positive() {
        case_tag = CaseTag::Inflate;
        let h: Vec<Rat> = e.iter().map(|ej| Rat::one() - ej).collect();
        let a = water_fill(&h, &alpha);
        for j in 0..m {
            if !a[j].is_zero() {
                coin[j] = &a[j] / &h[j];
            }
        }
        eprime = e.iter().zip(&a).map(|(ej, aj)| ej + aj).collect();
    } else {
        case_tag = CaseTag::Deflate;
        thin = int_rat(m as i64 - 1) / (int_rat(m as i64 - 1) - &alpha);
        eprime = e.iter().map(|ej| &thin * ej).collect();
    }
    let total_eprime = eprime.iter().fold(Rat::zero(), |acc, v| acc + v);
    assert_eq!(
        total_eprime,
        int_rat(m as i64 - 1),
        "adjusted event mass must sum to m-1 exactly"
    );
    let ebar: Vec<Rat> = eprime.iter().map(|v| Rat::one() - v).collect();

    let idx = |j: usize, jp: usize, x: usize, psi: usize| ((j * m + jp) * dim + x) * 2 + psi;
    let mut cells = vec![Rat::zero(); m * m * dim * 2];
    for j in 0..m {
        let gated = e[j].is_zero();
        for x in 0..dim {
            let mass = &p_rat[j] * &q_rat[j][x];
            if mass.is_zero() {
                continue;
            }
            if !gated && in_set[j][x] {
                // A true event cell. Inflate keeps it whole inside E'
                // (psi = 1); deflate keeps a `thin` fraction in E' and
                // parks the rest on the diagonal.
                let kept = if case_tag == CaseTag::Deflate {
                    &mass * &thin
                } else {
                    mass.clone()
                };
                for jp in 0..m {
                    if jp != j && !ebar[jp].is_zero() {
                        cells[idx(j, jp, x, 1)] += &kept * &ebar[jp] / &eprime[j];
                    }
                }
                let rest = mass - kept;
                if !rest.is_zero() {
                    cells[idx(j, j, x, 1)] += rest;
                }
            } else if case_tag == CaseTag::Inflate && !coin[j].is_zero() {
                // Off the event: the coin moves an a_j/h_j fraction into
                // the enlargement slice, which is exactly where psi fails.
                let moved = &mass * &coin[j];
                for jp in 0..m {
                    if jp != j && !ebar[jp].is_zero() {
                        cells[idx(j, jp, x, 0)] += &moved * &ebar[jp] / &eprime[j];
                    }
                }
                let rest = mass - moved;
                if !rest.is_zero() {
                    cells[idx(j, j, x, 1)] += rest;
                }
            } else {
                cells[idx(j, j, x, 1)] += mass;
            }
        }
    }

    // Exact invariants: total mass, non-negativity, and independence.
    let total = cells.iter().fold(Rat::zero(), |acc, c| acc + c);
    assert!(total.is_one(), "joint mass must be exactly 1, got {total}");
    assert!(
        cells.iter().all(|c| !c.is_negative()),
        "negative probability in the constructed joint"
    );
    let mut pjj = vec![Rat::zero(); m * m];
    for j in 0..m {
        for jp in 0..m {
            let mut acc = Rat::zero();
            for x in 0..dim {
                acc += &cells[idx(j, jp, x, 0)];
                acc += &cells[idx(j, jp, x, 1)];
            }
            pjj[j * m + jp] = acc;
        }
    }
    let pjprime: Vec<Rat> = (0..m)
        .map(|jp| (0..m).fold(Rat::zero(), |acc, j| acc + &pjj[j * m + jp]))
        .collect();
    for j in 0..m {
        for jp in 0..m {
            assert_eq!(
                pjj[j * m + jp],
                &p_rat[j] * &pjprime[jp],
                "J and J' must be exactly independent (pair {j},{jp})"
            );
        }
    }
    // The J' marginal is determined by the state alone: it equals the
    // adjusted complement probabilities regardless of P_J.
    for jp in 0..m {
        assert_eq!(pjprime[jp], ebar[jp], "J' marginal must equal 1 - eprime");
    }
    let degenerate = (0..m).find(|&jp| pjprime[jp].is_one());
    if degenerate.is_some() {
        assert_eq!(case_tag, CaseTag::Zero, "point-mass J' only arises at alpha = 0");
    }

    // Float-facing floors.
    let hmin_bound = (delta / 2.0 - 2.0 * epsilon) * nf - 1.0;
    let vacuous = hmin_bound < 0.0;
    let mut min_hmin: Option<f64> = None;
    let mut hmin_ok = true;
    for j in 0..m {
        for jp in 0..m {
            if jp == j {
                continue;
            }
            let mut mass = Rat::zero();
            let mut top = Rat::zero();
            for x in 0..dim {
                let c = &cells[idx(j, jp, x, 1)];
                if *c > top {
                    top = c.clone();
                }
                mass += c;
            }
            if mass.is_zero() {
                continue;
            }
            let h = -log2_rat(&(top / mass));
            if h < hmin_bound - 1e-9 {
                hmin_ok = false;
            }
            min_hmin = Some(min_hmin.map_or(h, |cur: f64| cur.min(h)));
        }
    }
    let psi_fail = (0..m)
        .flat_map(|j| (0..m).map(move |jp| (j, jp)))
        .fold(Rat::zero(), |acc, (j, jp)| {
            (0..dim).fold(acc, |a, x| a + &cells[idx(j, jp, x, 0)])
        });
    let pr_psi = 1.0 - rat_to_f64(&psi_fail);
    let pr_psi_bound = 1.0 - 2.0 * (-epsilon * nf).exp2();
    let psi_ok = pr_psi >= pr_psi_bound - 1e-9;

    let probs: Vec<f64> = cells.iter().map(rat_to_f64).collect();
    let joint = JointDist::new(
        vec!["j".into(), "jprime".into(), "x".into(), "psi".into()],
        vec![m, m, dim, 2],
        probs,
    )?;

    Ok(JPrimeResult {
        joint,
        case_tag,
        alpha: rat_to_f64(&alpha),
        epsilon,
        degenerate,
        hmin_bound,
        vacuous,
        min_hmin,
        pr_psi,
        pr_psi_bound,
        checks: JPrimeChecks {
            independence_exact: true,
            hmin_ok,
            psi_ok,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{BinaryCode, BitVec};
    use crate::infotheory::{min_entropy, shannon_entropy};
    use crate::qsim::PureState;
    use num::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn four_two_family() -> BasisFamily {
        let code = BinaryCode::new(vec![
            BitVec::parse("0000").unwrap(),
            BitVec::parse("1100").unwrap(),
            BitVec::parse("0011").unwrap(),
            BitVec::parse("1111").unwrap(),
        ])
        .unwrap();
        BasisFamily::from_code(&code).unwrap()
    }

    /// Mixture w * |v> + (1-w) * |w'> of one vector from each of two bases.
    fn two_point(
        fam: &BasisFamily,
        j1: usize,
        x1: u64,
        j2: usize,
        x2: u64,
        w: f64,
    ) -> DensityMatrix {
        let n = fam.n();
        let v1 = fam
            .basis(j1)
            .basis_state(&BitVec::from_u64(x1, n))
            .unwrap();
        let v2 = fam
            .basis(j2)
            .basis_state(&BitVec::from_u64(x2, n))
            .unwrap();
        DensityMatrix::mixture(&[(w, v1), (1.0 - w, v2)]).unwrap()
    }

    #[test]
    fn water_fill_matches_uniform_when_feasible_and_caps_otherwise() {
        let half = Rat::new(BigInt::from(1), BigInt::from(2));
        // Uniform feasible: h = (0.4, 1), alpha = 0.4 -> both get 0.2.
        let h = vec![Rat::new(BigInt::from(2), BigInt::from(5)), Rat::one()];
        let alpha = Rat::new(BigInt::from(2), BigInt::from(5));
        let a = water_fill(&h, &alpha);
        assert_eq!(a[0], Rat::new(BigInt::from(1), BigInt::from(5)));
        assert_eq!(a[1], Rat::new(BigInt::from(1), BigInt::from(5)));
        // Capped: h = (1, 0, 0, 1), alpha = 1 -> (1/2, 0, 0, 1/2), while
        // the uniform 1/4 would overfill the two empty bins.
        let h = vec![Rat::one(), Rat::zero(), Rat::zero(), Rat::one()];
        let a = water_fill(&h, &Rat::one());
        assert_eq!(a, vec![half.clone(), Rat::zero(), Rat::zero(), half]);
    }

    #[test]
    fn maximally_mixed_state_deflates_to_full_entropy() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let out = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.2).unwrap();
        assert_eq!(out.case_tag, CaseTag::Deflate);
        assert_eq!(out.alpha, -1.0);
        assert_eq!(out.degenerate, None);
        // Both conditionals are uniform on all 16 outcomes.
        assert!((out.min_hmin.unwrap() - 4.0).abs() < 1e-9);
        assert!(out.vacuous); // (0.5 - 0.4)*4 - 1 < 0
        assert!((out.pr_psi - 1.0).abs() < 1e-12);
        assert!(out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok);
        // Deflate thins E by (m-1)/(m-1-alpha) = 1/2, so the off-diagonal
        // J-J' mass is 1/2 * 1/2 * 1/2 per direction.
        assert!((out.joint.marginal(1).p(0) - 0.5).abs() < 1e-12);
        assert!((out.joint.marginal(1).p(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nonvacuous_bound_is_met_at_six_qubits() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(6)).unwrap();
        let rho = DensityMatrix::maximally_mixed(6).unwrap();
        let out = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.05).unwrap();
        assert!(!out.vacuous);
        assert!((out.hmin_bound - ((0.5 - 0.1) * 6.0 - 1.0)).abs() < 1e-12);
        assert!((out.min_hmin.unwrap() - 6.0).abs() < 1e-9);
        assert!(out.checks.hmin_ok && out.checks.psi_ok);
    }

    #[test]
    fn basis_vector_takes_the_degenerate_zero_branch() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let x = BitVec::parse("0101").unwrap();
        let rho = PureState::prepare(&x, &BitVec::zeros(4))
            .unwrap()
            .to_density()
            .unwrap();
        let out = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.1).unwrap();
        assert_eq!(out.case_tag, CaseTag::Zero);
        assert_eq!(out.alpha, 0.0);
        assert_eq!(out.degenerate, Some(0));
        // J' is the constant 0; given J=1 (the Hadamard side) the outcome
        // stays uniform: Hmin = 4.
        let jp_marg = out.joint.marginal(1);
        assert!((jp_marg.p(0) - 1.0).abs() < 1e-12);
        assert_eq!(jp_marg.p(1), 0.0);
        assert!((out.min_hmin.unwrap() - 4.0).abs() < 1e-9);
        assert!((out.pr_psi - 1.0).abs() < 1e-12);
        assert!(out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok);
    }

    #[test]
    fn two_point_mixture_inflates() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let rho = two_point(&fam, 0, 3, 1, 9, 0.5);
        let out = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.1).unwrap();
        assert_eq!(out.case_tag, CaseTag::Inflate);
        // Both bases gate to zero here (each keeps 15/32 < t), so the full
        // alpha = 1 is coined in and E' carries all the off-diagonal mass.
        assert!((out.alpha - 1.0).abs() < 1e-12);
        assert_eq!(out.degenerate, None);
        // No true event cells -> no off-diagonal psi=1 mass anywhere.
        assert_eq!(out.min_hmin, None);
        assert!((out.pr_psi - 0.5).abs() < 1e-12);
        assert!(out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok);
    }

    #[test]
    fn partial_inflate_keeps_event_side_entropy() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(6)).unwrap();
        // w = 0.35 leaves basis 0 above the gate (e_0 = 63 * 0.65 / 64,
        // just over t = 2^-0.72) while basis 1's remaining 0.345 gates to
        // zero: 0 < alpha < 1, with genuine event mass surviving.
        let rho = two_point(&fam, 0, 3, 1, 9, 0.35);
        let out = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.12).unwrap();
        assert_eq!(out.case_tag, CaseTag::Inflate);
        let expected_alpha = 1.0 - 63.0 * 0.65 / 64.0;
        assert!((out.alpha - expected_alpha).abs() < 1e-9);
        // Basis 0 keeps genuine event mass, so (j=0, j'=1) is populated at
        // psi = 1 and its conditional is Q^0 restricted to S^0: uniform on
        // the 63 light cells, Hmin = log2(63).
        let h = out.min_hmin.unwrap();
        assert!((h - 63.0f64.log2()).abs() < 1e-9);
        assert!(h > out.hmin_bound);
        assert!(out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok);
    }

    #[test]
    fn capped_inflate_on_the_four_basis_family() {
        // Equal mixture of a computational-basis vector and an all-Hadamard
        // vector: bases 0 and 3 gate to zero while bases 1 and 2 keep
        // everything (e = (0,1,1,0), alpha = 1). The uniform alpha/m = 1/4
        // is infeasible for the two full bases (h = 0); water-filling puts
        // 1/2 on each empty one instead.
        let fam = four_two_family();
        let rho = two_point(&fam, 0, 0, 3, 0, 0.5);
        let out = construct_jprime(&rho, &fam, &Dist::uniform(4), 0.02).unwrap();
        assert_eq!(out.case_tag, CaseTag::Inflate);
        assert!((out.alpha - 1.0).abs() < 1e-12);
        let jp = out.joint.marginal(1);
        assert!((jp.p(0) - 0.5).abs() < 1e-12);
        assert!(jp.p(1).abs() < 1e-15);
        assert!(jp.p(2).abs() < 1e-15);
        assert!((jp.p(3) - 0.5).abs() < 1e-12);
        // Pr[psi] = 1 - sum_j P_J(j) a_j = 1 - (1/4)(1/2 + 1/2) = 3/4.
        assert!((out.pr_psi - 0.75).abs() < 1e-12);
        assert!(out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok);
    }

    #[test]
    fn partial_deflate_on_six_qubits() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(6)).unwrap();
        let point = fam
            .basis(0)
            .basis_state(&BitVec::from_u64(5, 6))
            .unwrap();
        let mm = DensityMatrix::maximally_mixed(6).unwrap();
        let blended = point.to_density().unwrap().mat().mapv(|z| z * 0.4)
            + mm.mat().mapv(|z| z * 0.6);
        let rho = DensityMatrix::new(blended).unwrap();
        let out = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.2).unwrap();
        assert_eq!(out.case_tag, CaseTag::Deflate);
        // e = (1 - Q^0(5), 1) with Q^0(5) = 0.4 + 0.6/64.
        let expected_alpha = -(1.0 - (0.4 + 0.6 / 64.0));
        assert!((out.alpha - expected_alpha).abs() < 1e-9);
        assert!(out.alpha > -1.0 && out.alpha < 0.0);
        assert!(out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok);
    }

    #[test]
    fn markov_property_and_event_conditionals() {
        // On psi = 1, for each j with true event mass the conditional over
        // x must be identical across all populated j' != j, and equal to
        // Q^j restricted to S^j.
        let fam = four_two_family();
        let rho = two_point(&fam, 0, 0, 3, 0, 0.5);
        let out = construct_jprime(&rho, &fam, &Dist::uniform(4), 0.02).unwrap();
        let dim = 16;
        for j in [1usize, 2] {
            let q = measure_dist(&rho, fam.basis(j)).unwrap();
            let mut reference: Option<Vec<f64>> = None;
            for jp in [0usize, 3] {
                let mass: f64 = (0..dim).map(|x| out.joint.p(&[j, jp, x, 1])).sum();
                assert!(mass > 1e-12);
                let cond: Vec<f64> = (0..dim)
                    .map(|x| out.joint.p(&[j, jp, x, 1]) / mass)
                    .collect();
                // These bases keep every outcome (S^j is everything), so
                // the conditional is exactly Q^j.
                for x in 0..dim {
                    assert!((cond[x] - q[x]).abs() < 1e-9);
                }
                if let Some(r) = &reference {
                    for x in 0..dim {
                        assert!((r[x] - cond[x]).abs() < 1e-12);
                    }
                }
                reference = Some(cond);
            }
        }
    }

    #[test]
    fn jprime_marginal_ignores_basis_weights() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(6)).unwrap();
        let rho = two_point(&fam, 0, 11, 1, 38, 0.45);
        let uniform = construct_jprime(&rho, &fam, &Dist::uniform(2), 0.12).unwrap();
        let skewed = construct_jprime(
            &rho,
            &fam,
            &Dist::from_probs(vec![0.85, 0.15]).unwrap(),
            0.12,
        )
        .unwrap();
        assert_eq!(uniform.case_tag, skewed.case_tag);
        let mu = uniform.joint.marginal(1);
        let ms = skewed.joint.marginal(1);
        for jp in 0..2 {
            assert!((mu.p(jp) - ms.p(jp)).abs() < 1e-12);
        }
    }

    #[test]
    fn shannon_pairs_dominate_the_distance() {
        // H(Q^j) + H(Q^k) >= -log2 c^2 = d for every pair of bases.
        let mut rng = ChaCha12Rng::seed_from_u64(907);
        let rep4 = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let rep6 = BasisFamily::from_code(&BinaryCode::repetition(6)).unwrap();
        let f42 = four_two_family();
        for fam in [&rep4, &rep6, &f42] {
            let d = fam.delta() * fam.n() as f64;
            for _ in 0..20 {
                let n = fam.n();
                let rank = rng.gen_range(1..=1usize << n);
                let rho = DensityMatrix::random(&mut rng, n, rank).unwrap();
                let ent: Vec<f64> = (0..fam.m())
                    .map(|j| {
                        let q = measure_dist(&rho, fam.basis(j)).unwrap();
                        shannon_entropy(&Dist::from_probs(q).unwrap())
                    })
                    .collect();
                for j in 0..fam.m() {
                    for k in 0..fam.m() {
                        if j != k {
                            assert!(ent[j] + ent[k] >= d - 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn averaged_min_entropy_can_stay_below_one_bit() {
        // Equal mixture of one vector from each conjugate basis at n = 4:
        // both per-basis min-entropies equal -log2(17/32), so the average
        // is ~0.9125 < 1 even though delta = 1. This is the gap the J'
        // construction closes.
        let fam = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let rho = two_point(&fam, 0, 0, 1, 0, 0.5);
        let frozen = 0.9125371587496606; // -log2(17/32)
        let mut avg = 0.0;
        for j in 0..2 {
            let q = measure_dist(&rho, fam.basis(j)).unwrap();
            avg += 0.5 * min_entropy(&Dist::from_probs(q).unwrap());
        }
        assert!((avg - frozen).abs() < 1e-12);
        assert!(avg <= 1.0 + 1e-9);
    }

    #[test]
    fn rejects_bad_epsilon_and_weights() {
        let fam = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        for bad in [0.0, -0.2, 0.25, 1.0] {
            assert!(matches!(
                construct_jprime(&rho, &fam, &Dist::uniform(2), bad),
                Err(UncertaintyError::EpsilonOutOfRange { .. })
            ));
        }
        assert!(matches!(
            construct_jprime(&rho, &fam, &Dist::uniform(4), 0.1),
            Err(UncertaintyError::WeightCountMismatch {
                expected: 2,
                got: 4
            })
        ));
    }

    #[test]
    fn result_serializes_with_case_and_bounds() {
        let fam = four_two_family();
        let rho = two_point(&fam, 0, 0, 3, 0, 0.5);
        let out = construct_jprime(&rho, &fam, &Dist::uniform(4), 0.02).unwrap();
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"case_tag\":\"inflate\""));
        assert!(json.contains("\"alpha\":1.0"));
        assert!(json.contains("\"jprime\""));
        assert!(json.contains("\"independence_exact\":true"));
    }

    #[test]
    fn randomized_sweep_exercises_every_branch() {
        // 1000 instances across the repetition families (n = 4, 6) and the
        // [4,2] family, with generators skewed so each branch shows up at
        // least 50 times; every instance must pass all three checks.
        let mut rng = ChaCha12Rng::seed_from_u64(5821);
        let rep4 = BasisFamily::from_code(&BinaryCode::repetition(4)).unwrap();
        let rep6 = BasisFamily::from_code(&BinaryCode::repetition(6)).unwrap();
        let f42 = four_two_family();
        let mut counts = [0usize; 3];
        for i in 0..1000 {
            let fam = match i % 3 {
                0 => &rep4,
                1 => &rep6,
                _ => &f42,
            };
            let n = fam.n();
            let m = fam.m();
            let (rho, epsilon) = match i % 10 {
                // Basis vectors: degenerate zero branch.
                0..=2 => {
                    let j = rng.gen_range(0..m);
                    let x = rng.gen_range(0..1u64 << n);
                    let psi = fam.basis(j).basis_state(&BitVec::from_u64(x, n)).unwrap();
                    (psi.to_density().unwrap(), rng.gen_range(0.02..fam.delta() / 4.0 - 0.005))
                }
                // Two-point mixtures: inflate (alpha >= 1/2^n for the
                // repetition families; capped variants on the [4,2] one).
                3..=5 => {
                    let w = rng.gen_range(0.4..0.6);
                    let (j1, j2) = if m == 2 { (0, 1) } else { (0, 3) };
                    let x1 = rng.gen_range(0..1u64 << n);
                    let x2 = rng.gen_range(0..1u64 << n);
                    let eps_hi = if m == 2 { 0.19 } else { 0.021 };
                    (two_point(fam, j1, x1, j2, x2, w), rng.gen_range(0.015..eps_hi))
                }
                // Heavily mixed states: deflate.
                _ => {
                    let rank = rng.gen_range(2..=1usize << n);
                    let noise = DensityMatrix::random(&mut rng, n, rank).unwrap();
                    let mm = DensityMatrix::maximally_mixed(n).unwrap();
                    let w = rng.gen_range(0.0..0.1);
                    let blended = noise.mat().mapv(|z| z * w)
                        + mm.mat().mapv(|z| z * Complex::new(1.0 - w, 0.0));
                    (
                        DensityMatrix::new(blended).unwrap(),
                        rng.gen_range(0.02..fam.delta() / 4.0 - 0.005),
                    )
                }
            };
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let p_j = Dist::from_probs(raw.into_iter().map(|v| v / total).collect()).unwrap();
            let out = construct_jprime(&rho, fam, &p_j, epsilon).unwrap();
            assert!(
                out.checks.independence_exact && out.checks.hmin_ok && out.checks.psi_ok,
                "checks failed: case={:?} alpha={} eps={} fam m={}",
                out.case_tag,
                out.alpha,
                epsilon,
                m
            );
            counts[match out.case_tag {
                CaseTag::Zero => 0,
                CaseTag::Inflate => 1,
                CaseTag::Deflate => 2,
            }] += 1;
        }
        assert!(
            counts.iter().all(|&c| c >= 50),
            "branch coverage too thin: zero={} inflate={} deflate={}",
            counts[0],
            counts[1],
            counts[2]
        );
    }
}
