use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BitVec, BitsError};

/// A matrix over GF(2), stored as a list of row [`BitVec`]s of equal length.
///
/// In the protocol this is the `ell x n` matrix `F` the user broadcasts; the
/// extractor output is `F x` and the adversary works with the row span of
/// `F`, so both directions are provided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

/// Row-span enumeration is exponential in the number of rows; anything past
/// this limit is a caller bug, not a workload.
const MAX_SPAN_ROWS: usize = 20;

impl BitMatrix {
    pub fn new(rows: Vec<BitVec>) -> Result<Self, BitsError> {
        let cols = rows.first().map_or(0, BitVec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(BitsError::RaggedCodeword(i, r.len(), cols));
            }
        }
        Ok(BitMatrix { rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: (0..rows).map(|_| BitVec::random(rng, cols)).collect(),
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// Matrix-vector product `F x` (length = number of rows).
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(self.cols, x.len(), "matrix has {} cols, vector {}", self.cols, x.len());
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            out.set(i, row.inner(x));
        }
        out
    }

    /// The row combination `s F` for a selector `s` over the rows.
    pub fn row_combo(&self, s: &BitVec) -> BitVec {
        assert_eq!(s.len(), self.rows.len());
        let mut acc = BitVec::zeros(self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            if s.get(i) {
                acc.xor_assign(row);
            }
        }
        acc
    }

    /// Every element of the row span (including zero), deduplicated.
    pub fn row_span(&self) -> Result<Vec<BitVec>, BitsError> {
        if self.rows.len() > MAX_SPAN_ROWS {
            return Err(BitsError::SpanTooLarge(self.rows.len()));
        }
        let basis = self.row_basis();
        let mut span = Vec::with_capacity(1 << basis.len());
        span.push(BitVec::zeros(self.cols));
        for b in &basis {
            let mut doubled = Vec::with_capacity(span.len() * 2);
            for v in &span {
                doubled.push(v.clone());
                doubled.push(v.xor(b));
            }
            span = doubled;
        }
        Ok(span)
    }

    /// The nonzero elements of the row span.
    pub fn span_without_zero(&self) -> Result<Vec<BitVec>, BitsError> {
        Ok(self
            .row_span()?
            .into_iter()
            .filter(|v| !v.is_zero())
            .collect())
    }

    /// An independent set of rows spanning the row space, in fully reduced
    /// echelon form (each basis row is zero at every other row's pivot).
    pub fn row_basis(&self) -> Vec<BitVec> {
        let mut basis: Vec<BitVec> = Vec::new();
        for row in &self.rows {
            let mut v = row.clone();
            for b in &basis {
                let pivot = leading_one(b).expect("basis rows are nonzero");
                if v.get(pivot) {
                    v.xor_assign(b);
                }
            }
            if v.is_zero() {
                continue;
            }
            // v is zero at all existing pivots, so its own pivot is new.
            let pivot = leading_one(&v).unwrap();
            for b in &mut basis {
                if b.get(pivot) {
                    b.xor_assign(&v);
                }
            }
            basis.push(v);
            basis.sort_by_key(|b| leading_one(b));
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.row_basis().len()
    }

    /// A basis of the kernel `{x : F x = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let basis = self.row_basis();
        let pivots: Vec<usize> = basis.iter().map(|b| leading_one(b).unwrap()).collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut kernel = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            // Back-substitute: pivot variable p must cancel row b's parity.
            for (b, &p) in basis.iter().zip(&pivots) {
                if b.get(f) {
                    v.set(p, true);
                }
            }
            kernel.push(v);
        }
        kernel
    }
}

/// Index of the first set bit, if any.
fn leading_one(v: &BitVec) -> Option<usize> {
    (0..v.len()).find(|&i| v.get(i))
}
