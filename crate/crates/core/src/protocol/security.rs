//! Security levels for the two dishonest-server models, computed rather
//! than merely bounded wherever the instance is small enough.
//!
//! For a single-qubit-operations adversary everything about one protocol
//! instance is exactly computable. Fix `(F, g)`. The basis choice is a
//! function of `z` alone, so conditioned on `Z = z` and `W = w` the
//! adversary's measured bits `Y` follow a closed-form law: `X` is
//! uniform on the coset `{x : Fx = z + g(w)}`, and `Y = X + Delta` with
//! independent per-position flips whose probabilities come from the
//! single-qubit measurement distributions. [`cell_distribution`] builds
//! that law as a `2^n` table by convolving the coset indicator with the
//! flip channels; its Fourier side (the Walsh spectrum produced by
//! [`walsh_biases`]) is supported on the row span of `F`, with each
//! in-span coefficient a product of per-position biases — the structure
//! the user-security argument runs on.
//!
//! [`user_security_sd`] then measures, per sampled `(F, g)` instance,
//! the exact statistical distance between the password and the
//! adversary's view once the single candidate password vouched for by
//! the quantized basis (the [`WPrimeRule`] candidate) is excluded, and
//! reports it next to the bound the counting argument promises for
//! instances whose `F` is good.
//!
//! The bounded-storage model gets the closed-form [`bqsm_bound`]; the
//! dishonest-user direction gets [`server_security_level`].

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{find_c_tilde, BinaryCode, BitMatrix, BitVec, CTildeSearch};
use crate::qsim::{quantized_basis, single_qubit_probs, ProductBasis};

use super::sqom::SqomStrategy;
use super::{ProtocolError, ProtocolParams};

/// Exact tables have 2^n entries; past 20 qubits the memory bill is due.
pub const MAX_EXACT_SD_QUBITS: usize = 20;

/// Slack for comparing exact Walsh coefficients against their analytic
/// per-position product bounds.
const SPAN_BIAS_TOL: f64 = 1e-9;

/// The dishonest-user security level: a user who does not know the
/// password convinces the server with probability at most
/// `C(m,2) * 2^-ell` (union over password pairs of the hash-collision
/// probability).
pub fn server_security_level(m: usize, ell: usize) -> f64 {
    let pairs = (m * (m - 1) / 2) as f64;
    pairs * (-(ell as f64)).exp2()
}

/// Security level against a dishonest server whose quantum storage is
/// capped at `q` qubits.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BqsmBound {
    pub q: usize,
    pub kappa: f64,
    /// `2^{-((delta/2 - 2 kappa) n - 1 - q - ell) / 2}`: what remains of
    /// the min-entropy bound after the storage and the hash output are
    /// chained away.
    pub guessing_term: f64,
    /// `4 * 2^{-kappa n}`: the smoothing cost of the good event.
    pub smoothing_term: f64,
    pub epsilon: f64,
    /// An epsilon of 1 or more guarantees nothing.
    pub vacuous: bool,
}

/// Evaluates the bounded-storage security level for a storage bound `q`
/// and a smoothing split `kappa` in (0, delta/4).
pub fn bqsm_bound(
    params: &ProtocolParams,
    q: usize,
    kappa: f64,
) -> Result<BqsmBound, ProtocolError> {
    let delta = params.delta();
    if !(kappa > 0.0 && kappa < delta / 4.0) {
        return Err(ProtocolError::KappaOutOfRange {
            kappa,
            limit: delta / 4.0,
        });
    }
    let n = params.n as f64;
    let exponent = ((delta / 2.0 - 2.0 * kappa) * n - 1.0 - q as f64 - params.ell as f64) / 2.0;
    let guessing_term = (-exponent).exp2();
    let smoothing_term = 4.0 * (-(kappa * n)).exp2();
    let epsilon = guessing_term + smoothing_term;
    Ok(BqsmBound {
        q,
        kappa,
        guessing_term,
        smoothing_term,
        epsilon,
        vacuous: epsilon >= 1.0,
    })
}

/// The candidate-password rule of the user-security argument: a codeword
/// `c` is vouched for by the quantized basis string `s` when some
/// nonzero row combination of `F` has Schur weight below
/// `(1/2)(1/4 - beta) d` against `c + s`. A good `F` admits at most one
/// such codeword; the rule resolves the exceptional cases arbitrarily
/// (password 0 when nothing qualifies, the first hit when two do).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WPrimeRule {
    pub beta: f64,
}

impl WPrimeRule {
    pub fn new(beta: f64) -> Result<Self, ProtocolError> {
        if !(0.0..0.25).contains(&beta) {
            return Err(ProtocolError::BetaOutOfRange(beta));
        }
        Ok(WPrimeRule { beta })
    }

    /// The Schur-weight floor `(1/2)(1/4 - beta) d` below which a masked
    /// combination counts as vouching.
    pub fn threshold(&self, d: u32) -> f64 {
        0.5 * (0.25 - self.beta) * d as f64
    }

    /// The candidate password for a quantized basis string, along with
    /// the raw search outcome.
    pub fn wprime(
        &self,
        f: &BitMatrix,
        theta_hat: &BitVec,
        code: &BinaryCode,
    ) -> Result<(usize, CTildeSearch), ProtocolError> {
        let search = find_c_tilde(f, theta_hat, code, self.beta)?;
        let w = match search {
            CTildeSearch::Unique(w) => w,
            CTildeSearch::Ambiguous(w, _) => w,
            CTildeSearch::None => 0,
        };
        Ok((w, search))
    }
}

/// Signed Walsh spectrum of a distribution on `{0,1}^n` given as a
/// `2^n` table: entry `alpha` is `E[(-1)^{alpha . Y}]`, so entry 0 is
/// the total mass and Parseval reads
/// `sum_alpha t[alpha]^2 = 2^n * sum_y p[y]^2`.
pub fn walsh_biases(p: &[f64]) -> Vec<f64> {
    assert!(p.len().is_power_of_two() && !p.is_empty());
    let mut t = p.to_vec();
    let mut h = 1;
    while h < t.len() {
        for chunk in t.chunks_mut(2 * h) {
            for i in 0..h {
                let (a, b) = (chunk[i], chunk[i + h]);
                chunk[i] = a + b;
                chunk[i + h] = a - b;
            }
        }
        h *= 2;
    }
    t
}

/// Reduce `v` against the pivot table of a GF(2) span (vectors stored as
/// integers, pivot `i` holding a vector whose highest set bit is `i`).
fn gf2_reduce(pivots: &[usize; 64], mut v: usize) -> usize {
    while v != 0 {
        let lead = usize::BITS as usize - 1 - v.leading_zeros() as usize;
        if pivots[lead] == 0 {
            break;
        }
        v ^= pivots[lead];
    }
    v
}

/// The exact law of the adversary's measured bits on one conditioning
/// cell: `X` uniform on the coset `{x : Fx = u}`, then position `i`
/// flipped independently with the probability of misreading `|x_i>`
/// encoded in basis `cw_i` when measuring in `theta_i`. Outcomes are
/// indexed LSB-first (position `i` contributes `2^i`).
pub fn cell_distribution(
    f: &BitMatrix,
    u: &BitVec,
    cw: &BitVec,
    theta: &ProductBasis,
) -> Result<Vec<f64>, ProtocolError> {
    let n = f.ncols();
    if n > MAX_EXACT_SD_QUBITS {
        return Err(ProtocolError::TooManyQubitsForExact(n));
    }
    if u.len() != f.nrows() || cw.len() != n || theta.n() != n {
        return Err(ProtocolError::Bits(crate::bits::BitsError::LengthMismatch(
            u.len().max(cw.len()).max(theta.n()),
            n,
        )));
    }
    let size = 1usize << n;
    let target = u.to_index();

    // F applied to every x, built incrementally: adding the lowest set
    // bit of the index XORs in the matching column of F.
    let mut col_push = vec![0usize; n];
    for (i, push) in col_push.iter_mut().enumerate() {
        let mut col = 0usize;
        for r in 0..f.nrows() {
            if f.row(r).get(i) {
                col |= 1 << r;
            }
        }
        *push = col;
    }
    let mut fx = vec![0usize; size];
    for idx in 1..size {
        fx[idx] = fx[idx & (idx - 1)] ^ col_push[idx.trailing_zeros() as usize];
    }

    let members = fx.iter().filter(|&&v| v == target).count();
    if members == 0 {
        return Err(ProtocolError::EmptyCoset);
    }
    let mut p = vec![0.0f64; size];
    let weight = 1.0 / members as f64;
    for (idx, &v) in fx.iter().enumerate() {
        if v == target {
            p[idx] = weight;
        }
    }

    // Convolve with the per-position flip channels. The channel is
    // symmetric (misread probability independent of the encoded bit), so
    // the x = 0 law fixes it.
    for i in 0..n {
        let (keep, flip) = single_qubit_probs(false, cw.get(i), theta.qubit(i));
        let mask = 1usize << i;
        for idx in 0..size {
            if idx & mask == 0 {
                let (a, b) = (p[idx], p[idx | mask]);
                p[idx] = keep * a + flip * b;
                p[idx | mask] = flip * a + keep * b;
            }
        }
    }
    Ok(p)
}

/// Exact results for one sampled `(F, g)` instance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SdInstance {
    pub stream: u64,
    /// Worst-case (over the candidate value being conditioned on) exact
    /// statistical distance between (view, password) and the product of
    /// their marginals, given that the candidate is wrong.
    pub sd: f64,
    /// Conditioning events with positive probability.
    pub groups: usize,
    /// (z, w != w'(z)) cells checked against the Schur floor.
    pub cells: usize,
    /// How many of those satisfied it.
    pub hbound_cells: usize,
    /// Worst per-cell distance of Y from uniform.
    pub dunif_max: f64,
    /// Largest Walsh coefficient at a vector outside the row span of F
    /// (exactly zero in theory; float noise in practice).
    pub offspan_bias_max: f64,
    /// Whether every in-span coefficient respected its per-position
    /// product bound.
    pub span_bias_ok: bool,
    /// Schur floor held in every cell and no ambiguity arose.
    pub good_f: bool,
    /// F surjective onto {0,1}^ell, making Z exactly uniform.
    pub full_rank: bool,
    /// Some z produced an ambiguous candidate search.
    pub ambiguous: bool,
}

/// Aggregate report of [`user_security_sd`].
#[derive(Clone, Debug, Serialize)]
pub struct UserSecurityReport {
    pub strategy: String,
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Worst exact distance seen across instances.
    pub sd_max: f64,
    pub sd_mean: f64,
    /// Standard error of the per-instance distances.
    pub sd_stderr: f64,
    /// Per-cell uniformity bound for good instances:
    /// `(1/2) 2^{ell/2 - (1/4)(1/4 - beta) d}`.
    pub sd_bound: f64,
    /// Whether that bound promises anything at all.
    pub vacuous: bool,
    /// Probability mass the counting argument concedes to bad F:
    /// `C(m,2) 2^{2 ell} exp(-2 d beta^2)`.
    pub atmost_bound: f64,
    pub good_f_rate: f64,
    /// Fraction of (z, w != w') cells satisfying the Schur floor.
    pub hbound_cell_rate: f64,
    pub dunif_max: f64,
    pub offspan_bias_max: f64,
    pub span_bias_ok: bool,
    pub instances: Vec<SdInstance>,
}

/// Samples `trials` protocol instances and computes, for each, the exact
/// statistical distance the single-qubit-operations adversary achieves
/// between the password and its view once its vouched-for candidate is
/// wrong, together with the spectral quantities the security argument is
/// made of. Instances run in parallel; results are keyed by stream, so
/// the report is reproducible.
pub fn user_security_sd(
    params: &ProtocolParams,
    strategy: &SqomStrategy,
    rule: &WPrimeRule,
    trials: usize,
) -> Result<UserSecurityReport, ProtocolError> {
    if trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    if params.n > MAX_EXACT_SD_QUBITS {
        return Err(ProtocolError::TooManyQubitsForExact(params.n));
    }
    let d = params.code.min_distance() as f64;
    let sd_bound = 0.5 * ((params.ell as f64) / 2.0 - 0.25 * (0.25 - rule.beta) * d).exp2();
    let m = params.m() as f64;
    let atmost_bound =
        (m * (m - 1.0) / 2.0) * (2.0 * params.ell as f64).exp2() * (-2.0 * d * rule.beta * rule.beta).exp();

    let instances: Vec<SdInstance> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sd_instance(params, strategy, rule, t))
        .collect::<Result<_, _>>()?;

    let sd_mean = instances.iter().map(|i| i.sd).sum::<f64>() / trials as f64;
    let sd_var = if trials > 1 {
        instances
            .iter()
            .map(|i| (i.sd - sd_mean).powi(2))
            .sum::<f64>()
            / (trials - 1) as f64
    } else {
        0.0
    };
    let total_cells: usize = instances.iter().map(|i| i.cells).sum();
    let ok_cells: usize = instances.iter().map(|i| i.hbound_cells).sum();
    Ok(UserSecurityReport {
        strategy: strategy.name(),
        beta: rule.beta,
        trials,
        seed: params.rng_seed,
        sd_max: instances.iter().map(|i| i.sd).fold(0.0, f64::max),
        sd_mean,
        sd_stderr: (sd_var / trials as f64).sqrt(),
        sd_bound,
        vacuous: sd_bound >= 1.0,
        atmost_bound,
        good_f_rate: instances.iter().filter(|i| i.good_f).count() as f64 / trials as f64,
        hbound_cell_rate: ok_cells as f64 / total_cells.max(1) as f64,
        dunif_max: instances.iter().map(|i| i.dunif_max).fold(0.0, f64::max),
        offspan_bias_max: instances
            .iter()
            .map(|i| i.offspan_bias_max)
            .fold(0.0, f64::max),
        span_bias_ok: instances.iter().all(|i| i.span_bias_ok),
        instances,
    })
}

fn sd_instance(
    params: &ProtocolParams,
    strategy: &SqomStrategy,
    rule: &WPrimeRule,
    stream: u64,
) -> Result<SdInstance, ProtocolError> {
    let mut rng = params.rng(stream);
    let n = params.n;
    let ell = params.ell;
    let m = params.m();
    let code = &params.code;
    let size = 1usize << n;
    let zcount = 1usize << ell;

    let f = BitMatrix::random(&mut rng, ell, n);
    let g = params.hash_family().sample(&mut rng);
    let thr = rule.threshold(code.min_distance());

    // The adversary's side per z: basis, quantization, candidate.
    let mut thetas = Vec::with_capacity(zcount);
    let mut theta_hats = Vec::with_capacity(zcount);
    let mut wprimes = Vec::with_capacity(zcount);
    let mut ambiguous = false;
    for zi in 0..zcount {
        let z = BitVec::from_u64(zi as u64, ell);
        let theta = strategy.basis_rule(code, &f, &g, &z)?;
        let hat =
            BitVec::from_bools(&(0..n).map(|i| quantized_basis(theta.qubit(i))).collect::<Vec<_>>());
        let (wp, search) = rule.wprime(&f, &hat, code)?;
        ambiguous |= matches!(search, CTildeSearch::Ambiguous(_, _));
        thetas.push(theta);
        theta_hats.push(hat);
        wprimes.push(wp);
    }

    // Column space of F: the exact law of F(X) is uniform on it.
    let mut pivots = [0usize; 64];
    let mut rank = 0usize;
    for i in 0..n {
        let mut col = 0usize;
        for r in 0..ell {
            if f.row(r).get(i) {
                col |= 1 << r;
            }
        }
        let reduced = gf2_reduce(&pivots, col);
        if reduced != 0 {
            let lead = usize::BITS as usize - 1 - reduced.leading_zeros() as usize;
            pivots[lead] = reduced;
            rank += 1;
        }
    }
    let full_rank = rank == ell;
    let pfx = (-(rank as f64)).exp2();

    let gw: Vec<BitVec> = (0..m)
        .map(|w| g.eval(w))
        .collect::<Result<_, _>>()?;
    let gw_idx: Vec<usize> = gw.iter().map(BitVec::to_index).collect();

    // Unnormalized joint law of (W, Z): uniform password, then z lands
    // on g(w) plus a uniform point of the column space.
    let mut joint = vec![vec![0.0f64; zcount]; m];
    for w in 0..m {
        for zi in 0..zcount {
            if gf2_reduce(&pivots, zi ^ gw_idx[w]) == 0 {
                joint[w][zi] = pfx / m as f64;
            }
        }
    }

    // Structural Schur-floor audit over every (z, w != w'(z)) cell.
    let span = f.span_without_zero()?;
    let mut cells = 0usize;
    let mut hbound_cells = 0usize;
    let mut good_f = !ambiguous;
    for zi in 0..zcount {
        for w in 0..m {
            if w == wprimes[zi] {
                continue;
            }
            cells += 1;
            let mask = code.encode(w).xor(&theta_hats[zi]);
            let ok = span
                .iter()
                .all(|v| !((v.schur(&mask).weight() as f64) < thr));
            if ok {
                hbound_cells += 1;
            } else {
                good_f = false;
            }
        }
    }

    // Span membership over Walsh indices.
    let mut in_span = vec![false; size];
    in_span[0] = true;
    for v in &span {
        in_span[v.to_index()] = true;
    }

    // Exact statistical distance per conditioning event {W' = v, W != v},
    // plus per-cell spectral checks on the first pass.
    let uniform = 1.0 / size as f64;
    let mut sd = 0.0f64;
    let mut groups = 0usize;
    let mut dunif_max = 0.0f64;
    let mut offspan_bias_max = 0.0f64;
    let mut span_bias_ok = true;
    for v in 0..m {
        let zs: Vec<usize> = (0..zcount).filter(|&zi| wprimes[zi] == v).collect();
        if zs.is_empty() {
            continue;
        }
        let mass: f64 = zs
            .iter()
            .map(|&zi| (0..m).filter(|&w| w != v).map(|w| joint[w][zi]).sum::<f64>())
            .sum();
        if mass == 0.0 {
            continue;
        }
        groups += 1;
        let mut pw = vec![0.0f64; m];
        for &zi in &zs {
            for (w, jw) in joint.iter().enumerate() {
                if w != v {
                    pw[w] += jw[zi] / mass;
                }
            }
        }

        // Pass one: accumulate the w-mixture per z and audit each cell.
        let mut pe = vec![vec![0.0f64; size]; zs.len()];
        for (si, &zi) in zs.iter().enumerate() {
            for w in 0..m {
                if w == v || joint[w][zi] == 0.0 {
                    continue;
                }
                let c = joint[w][zi] / mass;
                let u = BitVec::from_u64((zi ^ gw_idx[w]) as u64, ell);
                let py = cell_distribution(&f, &u, code.encode(w), &thetas[zi])?;

                let dunif = 0.5 * py.iter().map(|p| (p - uniform).abs()).sum::<f64>();
                dunif_max = dunif_max.max(dunif);
                let spectrum = walsh_biases(&py);
                let mask_idx = code.encode(w).xor(&theta_hats[zi]).to_index();
                for (alpha, coeff) in spectrum.iter().enumerate().skip(1) {
                    let bias = coeff.abs();
                    if in_span[alpha] {
                        let mismatches = (alpha & mask_idx).count_ones() as f64;
                        if bias > (-0.5 * mismatches).exp2() + SPAN_BIAS_TOL {
                            span_bias_ok = false;
                        }
                    } else if bias > offspan_bias_max {
                        offspan_bias_max = bias;
                    }
                }

                for (acc, p) in pe[si].iter_mut().zip(&py) {
                    *acc += c * p;
                }
            }
        }

        // Pass two: total variation against the product of marginals.
        let mut tv = 0.0f64;
        for (si, &zi) in zs.iter().enumerate() {
            let pe_mass: f64 = pe[si].iter().sum();
            for w in 0..m {
                if w == v {
                    continue;
                }
                if joint[w][zi] == 0.0 {
                    tv += pw[w] * pe_mass;
                    continue;
                }
                let c = joint[w][zi] / mass;
                let u = BitVec::from_u64((zi ^ gw_idx[w]) as u64, ell);
                let py = cell_distribution(&f, &u, code.encode(w), &thetas[zi])?;
                for (y, p) in py.iter().enumerate() {
                    tv += (c * p - pw[w] * pe[si][y]).abs();
                }
            }
        }
        sd = sd.max(0.5 * tv);
    }

    Ok(SdInstance {
        stream,
        sd,
        groups,
        cells,
        hbound_cells,
        dunif_max,
        offspan_bias_max,
        span_bias_ok,
        good_f,
        full_rank,
        ambiguous,
    })
}
