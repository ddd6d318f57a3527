use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::bits::BitVec;

use super::eigen::{dagger, hermitian_deviation};
use super::{
    hermitian_eigenvalues, CMat, QsimError, CONSTRUCT_TOL, MAX_DENSE_DIM, MAX_PURE_QUBITS, PSD_TOL,
};

/// Index of the computational basis state `|x>`; qubit 0 is the leftmost
/// tensor factor and therefore the most significant bit.
pub fn bits_to_index(x: &BitVec) -> usize {
    let mut idx = 0usize;
    for b in x.iter() {
        idx = (idx << 1) | usize::from(b);
    }
    idx
}

/// Inverse of [`bits_to_index`].
pub fn index_to_bits(idx: usize, n: usize) -> BitVec {
    let mut v = BitVec::zeros(n);
    for i in 0..n {
        v.set(i, (idx >> (n - 1 - i)) & 1 == 1);
    }
    v
}

/// A pure state of `n <= 14` qubits: `2^n` amplitudes with unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    n: usize,
}

impl PureState {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(QsimError::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_PURE_QUBITS {
            return Err(QsimError::TooLarge(n, MAX_PURE_QUBITS));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > CONSTRUCT_TOL {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(PureState { amps, n })
    }

    /// `|x>` encoded qubit-wise: qubit `i` is `H^{c_i} |x_i>`, i.e. the
    /// computational basis where the codeword bit is 0 and the Hadamard
    /// (diagonal) basis where it is 1.
    pub fn prepare(x: &BitVec, c: &BitVec) -> Result<Self, QsimError> {
        if x.len() != c.len() {
            return Err(QsimError::DimensionMismatch(x.len(), c.len()));
        }
        if x.len() > MAX_PURE_QUBITS {
            return Err(QsimError::TooLarge(x.len(), MAX_PURE_QUBITS));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for (xi, ci) in x.iter().zip(c.iter()) {
            let q: [Complex64; 2] = match (ci, xi) {
                (false, false) => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                (false, true) => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                (true, false) => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
                (true, true) => [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
            };
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        // Products of exact 1/sqrt(2) factors stay normalized to within
        // a few ulps, well inside CONSTRUCT_TOL.
        Self::from_amplitudes(amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Apply a single-qubit operator in place (used for basis rotations).
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &[[Complex64; 2]; 2]) {
        assert!(qubit < self.n);
        let stride = 1usize << (self.n - 1 - qubit);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for off in 0..stride {
                let i0 = base + off;
                let i1 = i0 + stride;
                let a0 = self.amps[i0];
                let a1 = self.amps[i1];
                self.amps[i0] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i1] = u[1][0] * a0 + u[1][1] * a1;
            }
            base += stride * 2;
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, QsimError> {
        let dim = self.amps.len();
        if dim > MAX_DENSE_DIM {
            return Err(QsimError::TooLarge(dim, MAX_DENSE_DIM));
        }
        let mat = CMat::from_shape_fn((dim, dim), |(i, j)| self.amps[i] * self.amps[j].conj());
        DensityMatrix::new(mat)
    }
}

impl Serialize for PureState {
    /// Serialized as an array of `[re, im]` pairs for golden-file tests.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.amps.len()))?;
        for a in &self.amps {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// A density matrix on `n` qubits: Hermitian, unit trace, PSD (all checked
/// at construction).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
    n: usize,
}

impl DensityMatrix {
    pub fn new(mat: CMat) -> Result<Self, QsimError> {
        let dim = mat.nrows();
        if dim != mat.ncols() {
            return Err(QsimError::DimensionMismatch(dim, mat.ncols()));
        }
        if !dim.is_power_of_two() {
            return Err(QsimError::NotPowerOfTwo(dim));
        }
        if dim > MAX_DENSE_DIM {
            return Err(QsimError::TooLarge(dim, MAX_DENSE_DIM));
        }
        let n = dim.trailing_zeros() as usize;
        let dev = hermitian_deviation(&mat);
        if dev > CONSTRUCT_TOL {
            return Err(QsimError::NotHermitian(dev));
        }
        let trace: Complex64 = (0..dim).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > CONSTRUCT_TOL || trace.im.abs() > CONSTRUCT_TOL {
            return Err(QsimError::BadTrace(trace.re));
        }
        let min_eig = hermitian_eigenvalues(&mat)?[0];
        if min_eig < -PSD_TOL {
            return Err(QsimError::NotPsd(min_eig));
        }
        Ok(DensityMatrix { mat, n })
    }

    pub fn from_pure(psi: &PureState) -> Result<Self, QsimError> {
        psi.to_density()
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, QsimError> {
        let dim = 1usize << n;
        if dim > MAX_DENSE_DIM {
            return Err(QsimError::TooLarge(dim, MAX_DENSE_DIM));
        }
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        let mat = CMat::from_shape_fn((dim, dim), |(i, j)| if i == j { w } else { Complex64::new(0.0, 0.0) });
        Self::new(mat)
    }

    /// Convex mixture of pure states.
    pub fn mixture(parts: &[(f64, PureState)]) -> Result<Self, QsimError> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.is_empty() || (total - 1.0).abs() > CONSTRUCT_TOL || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(QsimError::BadWeights(total));
        }
        let dim = parts[0].1.dim();
        let mut mat = CMat::zeros((dim, dim));
        for (w, psi) in parts {
            if psi.dim() != dim {
                return Err(QsimError::DimensionMismatch(psi.dim(), dim));
            }
            let amps = psi.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    mat[(i, j)] += *w * amps[i] * amps[j].conj();
                }
            }
        }
        Self::new(mat)
    }

    /// Random density matrix of the given rank, sampled by normalising
    /// `G G^dagger` for a complex Gaussian (Ginibre) `dim x rank` matrix.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Result<Self, QsimError> {
        let dim = 1usize << n;
        let rank = rank.clamp(1, dim);
        let g = Array2::from_shape_fn((dim, rank), |_| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let mut mat = g.dot(&dagger(&g));
        let trace: f64 = (0..dim).map(|i| mat[(i, i)].re).sum();
        mat.mapv_inplace(|z| z / trace);
        // Clean up rounding asymmetry before validation.
        for i in 0..dim {
            mat[(i, i)] = Complex64::new(mat[(i, i)].re, 0.0);
            for j in (i + 1)..dim {
                let avg = 0.5 * (mat[(i, j)] + mat[(j, i)].conj());
                mat[(i, j)] = avg;
                mat[(j, i)] = avg.conj();
            }
        }
        Self::new(mat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// Largest eigenvalue (used for min-entropy of the measurement source).
    pub fn max_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)
            .expect("validated at construction")
            .last()
            .copied()
            .unwrap_or(0.0)
    }

    /// Numerical rank: eigenvalues above `PSD_TOL` relative to the largest.
    pub fn rank(&self) -> usize {
        let eig = hermitian_eigenvalues(&self.mat).expect("validated at construction");
        let top = eig.last().copied().unwrap_or(0.0).max(1e-300);
        eig.iter().filter(|&&l| l > PSD_TOL * top.max(1.0)).count()
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dim = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..dim)
            .map(|i| (0..dim).map(|j| [self.mat[(i, j)].re, self.mat[(i, j)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}
