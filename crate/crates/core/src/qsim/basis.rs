use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::bits::BitVec;

use super::state::PureState;
use super::{QsimError, ANALYTIC_TOL, CONSTRUCT_TOL, MAX_PURE_QUBITS};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// An orthonormal basis of C^2, stored as two explicit unit vectors in
/// computational-basis coordinates. Storing the vectors (rather than an
/// (alpha, beta) pair) keeps the orthonormality invariant checkable for
/// arbitrary complex amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitBasis {
    v: [[Complex64; 2]; 2],
}

impl QubitBasis {
    pub fn new(v0: [Complex64; 2], v1: [Complex64; 2]) -> Result<Self, QsimError> {
        for v in [&v0, &v1] {
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > CONSTRUCT_TOL {
                return Err(QsimError::NotUnit(norm));
            }
        }
        let ip = v0[0].conj() * v1[0] + v0[1].conj() * v1[1];
        if ip.norm() > CONSTRUCT_TOL {
            return Err(QsimError::NotOrthogonal(ip.norm()));
        }
        Ok(QubitBasis { v: [v0, v1] })
    }

    /// The {|0>, |1>} basis ('+' in conjugate-coding notation).
    pub fn computational() -> Self {
        QubitBasis {
            v: [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        }
    }

    /// The {|+>, |->} basis ('x' in conjugate-coding notation).
    pub fn hadamard() -> Self {
        QubitBasis {
            v: [[c(S, 0.0), c(S, 0.0)], [c(S, 0.0), c(-S, 0.0)]],
        }
    }

    /// Real rotation by `t`: {(cos t, sin t), (-sin t, cos t)}.
    pub fn from_angle(t: f64) -> Self {
        let (sin, cos) = t.sin_cos();
        QubitBasis {
            v: [[c(cos, 0.0), c(sin, 0.0)], [c(-sin, 0.0), c(cos, 0.0)]],
        }
    }

    /// The basis exactly halfway between computational and Hadamard
    /// (rotation by pi/8), the extremal case of the measurement-bias bound.
    pub fn breidbart() -> Self {
        Self::from_angle(std::f64::consts::FRAC_PI_8)
    }

    /// The conjugate-coding basis selected by a codeword bit.
    pub fn conjugate(bit: bool) -> Self {
        if bit {
            Self::hadamard()
        } else {
            Self::computational()
        }
    }

    /// Basis from the amplitude pair {alpha|0>+beta|1>, beta|0>-alpha|1>}.
    /// This pair is orthonormal only when conj(alpha)*beta is real, which
    /// the constructor enforces via the generic validity check.
    pub fn from_amplitudes(alpha: Complex64, beta: Complex64) -> Result<Self, QsimError> {
        Self::new([alpha, beta], [beta, -alpha])
    }

    /// A uniformly random orthonormal basis: Gaussian-normalized v0, with
    /// v1 its orthogonal complement carrying an independent random phase.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut v0 = [
                c(rng.sample(StandardNormal), rng.sample(StandardNormal)),
                c(rng.sample(StandardNormal), rng.sample(StandardNormal)),
            ];
            let norm = (v0[0].norm_sqr() + v0[1].norm_sqr()).sqrt();
            if norm < 1e-6 {
                continue;
            }
            v0[0] /= norm;
            v0[1] /= norm;
            let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let v1 = [phase * v0[1].conj(), -phase * v0[0].conj()];
            return Self::new(v0, v1).expect("construction is orthonormal by design");
        }
    }

    pub fn vector(&self, k: usize) -> [Complex64; 2] {
        self.v[k]
    }

    /// The unitary taking this basis to the computational one: row k is
    /// conj(v_k), so (U psi)_k = <v_k | psi>.
    pub fn rotation(&self) -> [[Complex64; 2]; 2] {
        [
            [self.v[0][0].conj(), self.v[0][1].conj()],
            [self.v[1][0].conj(), self.v[1][1].conj()],
        ]
    }
}

/// Outcome probabilities when the qubit state H^b |x> is measured in the
/// basis `theta`: returns (|<v0|state>|^2, |<v1|state>|^2).
pub fn single_qubit_probs(x: bool, b: bool, theta: &QubitBasis) -> (f64, f64) {
    let state: [Complex64; 2] = match (b, x) {
        (false, false) => [c(1.0, 0.0), c(0.0, 0.0)],
        (false, true) => [c(0.0, 0.0), c(1.0, 0.0)],
        (true, false) => [c(S, 0.0), c(S, 0.0)],
        (true, true) => [c(S, 0.0), c(-S, 0.0)],
    };
    let amp = |k: usize| theta.v[k][0].conj() * state[0] + theta.v[k][1].conj() * state[1];
    (amp(0).norm_sqr(), amp(1).norm_sqr())
}

/// Rounds an arbitrary qubit basis to the conjugate-coding basis it most
/// resembles: the bit j maximizing max_k |<v_k | H^j |0>|. Ties (the
/// Breidbart basis) resolve deterministically to 0; the comparison carries
/// a small margin so that exact ties are not decided by rounding noise.
pub fn quantized_basis(theta: &QubitBasis) -> bool {
    let overlap = |target: [Complex64; 2]| -> f64 {
        (0..2)
            .map(|k| (theta.v[k][0].conj() * target[0] + theta.v[k][1].conj() * target[1]).norm())
            .fold(0.0, f64::max)
    };
    let o0 = overlap([c(1.0, 0.0), c(0.0, 0.0)]);
    let o1 = overlap([c(S, 0.0), c(S, 0.0)]);
    o1 > o0 + ANALYTIC_TOL
}

/// A product basis over n qubits. Bases derived from a codeword carry the
/// codeword as a tag: qubit i is computational where c_i = 0 and Hadamard
/// where c_i = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductBasis {
    qubits: Vec<QubitBasis>,
    codeword: Option<BitVec>,
}

impl ProductBasis {
    pub fn from_codeword(cword: &BitVec) -> Self {
        ProductBasis {
            qubits: cword.iter().map(QubitBasis::conjugate).collect(),
            codeword: Some(cword.clone()),
        }
    }

    pub fn from_qubits(qubits: Vec<QubitBasis>) -> Self {
        ProductBasis {
            qubits,
            codeword: None,
        }
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit(&self, i: usize) -> &QubitBasis {
        &self.qubits[i]
    }

    pub fn qubits(&self) -> &[QubitBasis] {
        &self.qubits
    }

    pub fn codeword(&self) -> Option<&BitVec> {
        self.codeword.as_ref()
    }

    /// The full basis vector indexed by the outcome string x.
    pub fn basis_state(&self, x: &BitVec) -> Result<PureState, QsimError> {
        if x.len() != self.n() {
            return Err(QsimError::DimensionMismatch(x.len(), self.n()));
        }
        if self.n() > MAX_PURE_QUBITS {
            return Err(QsimError::TooLarge(self.n(), MAX_PURE_QUBITS));
        }
        let mut amps = vec![c(1.0, 0.0)];
        for (i, xi) in x.iter().enumerate() {
            let v = self.qubits[i].vector(usize::from(xi));
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * v[0]);
                next.push(a * v[1]);
            }
            amps = next;
        }
        PureState::from_amplitudes(amps)
    }
}

/// The maximum overlap of a basis family: max over pairs of distinct bases
/// and all pairs of basis vectors of |<x|_j |y>_k|. Families whose members
/// all carry codeword tags use the closed form 2^{-d/2} with d the minimum
/// pairwise Hamming distance; otherwise the maximum is found by exhaustive
/// inner products, which is limited to n <= 10.
pub fn max_overlap(family: &[ProductBasis]) -> Result<f64, QsimError> {
    if family.len() < 2 {
        return Err(QsimError::FamilyTooSmall(family.len()));
    }
    let n = family[0].n();
    for b in family {
        if b.n() != n {
            return Err(QsimError::DimensionMismatch(b.n(), n));
        }
    }
    if family.iter().all(|b| b.codeword().is_some()) {
        let mut dmin = u32::MAX;
        for (j, bj) in family.iter().enumerate() {
            for bk in &family[j + 1..] {
                dmin = dmin.min(bj.codeword().unwrap().distance(bk.codeword().unwrap()));
            }
        }
        return Ok((-(dmin as f64) / 2.0).exp2());
    }
    if n > 10 {
        return Err(QsimError::OverlapTooLarge);
    }
    let mut best = 0.0f64;
    for (j, bj) in family.iter().enumerate() {
        for bk in &family[j + 1..] {
            // Per-qubit table of |<v_a | w_b>| for this pair of bases.
            let mut t = vec![[[0.0f64; 2]; 2]; n];
            for (i, ti) in t.iter_mut().enumerate() {
                for (a, row) in ti.iter_mut().enumerate() {
                    for (b, entry) in row.iter_mut().enumerate() {
                        let va = bj.qubit(i).vector(a);
                        let wb = bk.qubit(i).vector(b);
                        *entry = (va[0].conj() * wb[0] + va[1].conj() * wb[1]).norm();
                    }
                }
            }
            for x in 0..(1usize << n) {
                for y in 0..(1usize << n) {
                    let mut p = 1.0;
                    for (i, ti) in t.iter().enumerate() {
                        p *= ti[(x >> (n - 1 - i)) & 1][(y >> (n - 1 - i)) & 1];
                    }
                    best = best.max(p);
                }
            }
        }
    }
    Ok(best)
}
