use ndarray::Array2;
use num_complex::Complex64;

use super::{QsimError, MAX_DENSE_DIM};

/// Dense complex matrix, the working type of this module.
pub type CMat = Array2<Complex64>;

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi rotations, ascending.
///
/// Jacobi is slow compared to Householder tridiagonalisation but converges
/// to machine precision, needs ~60 lines, and at the dimensions used here
/// (<= 2^10) runs in well under a second — good trade for a routine whose
/// job is to be an oracle for norms and trace distances.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>, QsimError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(QsimError::DimensionMismatch(n, a.ncols()));
    }
    if n > MAX_DENSE_DIM {
        return Err(QsimError::TooLarge(n, MAX_DENSE_DIM));
    }
    let herm_dev = hermitian_deviation(a);
    let scale = frobenius(a).max(1e-300);
    if herm_dev > 1e-8 * scale.max(1.0) {
        return Err(QsimError::NotHermitian(herm_dev));
    }
    let mut m = a.clone();
    // Symmetrise exactly so rounding in the input cannot bias the sweep.
    for p in 0..n {
        m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
        for q in (p + 1)..n {
            let avg = 0.5 * (m[(p, q)] + m[(q, p)].conj());
            m[(p, q)] = avg;
            m[(q, p)] = avg.conj();
        }
    }
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eig);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, p, q);
            }
        }
    }
    // Quadratic convergence makes 60 sweeps unreachable in practice.
    panic!("Jacobi eigensolver failed to converge on a {n}x{n} matrix");
}

/// One complex Jacobi rotation zeroing the (p, q) entry of Hermitian `m`.
fn jacobi_rotate(m: &mut CMat, p: usize, q: usize) {
    let n = m.nrows();
    let apq = m[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U is the identity outside rows/cols p,q; inside:
    //   U[p,p] = c           U[p,q] = s e^{i phi}
    //   U[q,p] = -s e^{-i phi}   U[q,q] = c
    // and we form U^dagger M U.
    let se = phase * s;
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = c * mip - se.conj() * miq;
        m[(i, q)] = se * mip + c * miq;
    }
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = c * mpj - se * mqj;
        m[(q, j)] = se.conj() * mpj + c * mqj;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Operator (spectral) norm of an arbitrary matrix: the largest singular
/// value, computed as sqrt(lambda_max(A^dagger A)).
pub fn operator_norm(a: &CMat) -> Result<f64, QsimError> {
    if a.nrows() != a.ncols() {
        return Err(QsimError::DimensionMismatch(a.nrows(), a.ncols()));
    }
    // A^dagger A is Hermitian PSD by construction.
    let ata = dagger(a).dot(a);
    let eig = hermitian_eigenvalues(&ata)?;
    Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Trace norm ||A||_1 of a Hermitian matrix: the sum of |eigenvalues|.
pub fn trace_norm(a: &CMat) -> Result<f64, QsimError> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|l| l.abs()).sum())
}

/// Trace distance between two density matrices: half the trace norm of
/// their difference. Always in [0, 1].
pub fn trace_distance(
    rho: &super::DensityMatrix,
    sigma: &super::DensityMatrix,
) -> Result<f64, QsimError> {
    if rho.dim() != sigma.dim() {
        return Err(QsimError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let diff = rho.mat() - sigma.mat();
    Ok(0.5 * trace_norm(&diff)?)
}

pub(crate) fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub(crate) fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn hermitian_deviation(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for p in 0..n {
        for q in p..n {
            dev = dev.max((a[(p, q)] - a[(q, p)].conj()).norm());
        }
    }
    dev
}
