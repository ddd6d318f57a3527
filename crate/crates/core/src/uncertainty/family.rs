//! A family of product bases together with its overlap figure.

use super::UncertaintyError;
use crate::bits::BinaryCode;
use crate::qsim::{max_overlap, ProductBasis};

/// m product bases on n qubits, with the maximum pairwise overlap
/// c = max |<v|w>| over vectors from distinct members, and the rate
/// delta = -(1/n) log2 c^2.
///
/// Small c (large delta) is what drives every bound in this module. A
/// family built from a binary code — one basis per codeword, Hadamard on
/// the 1-coordinates — has c = 2^(-d/2) and delta = d/n exactly, where d
/// is the code's minimum distance.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    bases: Vec<ProductBasis>,
    c: f64,
    delta: f64,
}

impl BasisFamily {
    /// Family derived from a binary code: codeword bit i = 1 means qubit i
    /// is read in the Hadamard basis, 0 means computational.
    pub fn from_code(code: &BinaryCode) -> Result<Self, UncertaintyError> {
        let bases = code.words().iter().map(ProductBasis::from_codeword).collect();
        Self::from_bases(bases)
    }

    /// Family from arbitrary product bases. The overlap c comes from
    /// `max_overlap`, so untagged families are limited to 10 qubits.
    pub fn from_bases(bases: Vec<ProductBasis>) -> Result<Self, UncertaintyError> {
        if bases.len() < 2 {
            return Err(UncertaintyError::FamilyTooSmall(bases.len()));
        }
        let n = bases[0].n();
        for b in &bases {
            if b.n() != n {
                return Err(UncertaintyError::MixedSizes(n, b.n()));
            }
        }
        let c = max_overlap(&bases)?;
        // Codeword families get the exact rate d/n: squaring c = 2^(-d/2)
        // in floats loses the last bit whenever d is odd.
        let delta = if bases.iter().all(|b| b.codeword().is_some()) {
            let mut dmin = u32::MAX;
            for (j, bj) in bases.iter().enumerate() {
                for bk in &bases[j + 1..] {
                    dmin = dmin.min(bj.codeword().unwrap().distance(bk.codeword().unwrap()));
                }
            }
            dmin as f64 / n as f64
        } else {
            -(c * c).log2() / (n as f64)
        };
        Ok(BasisFamily { bases, c, delta })
    }

    pub fn n(&self) -> usize {
        self.bases[0].n()
    }

    pub fn m(&self) -> usize {
        self.bases.len()
    }

    /// Maximum overlap between vectors of distinct bases.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Overlap rate delta = -(1/n) log2 c^2.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bases(&self) -> &[ProductBasis] {
        &self.bases
    }

    pub fn basis(&self, j: usize) -> &ProductBasis {
        &self.bases[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVec;
    use crate::qsim::QubitBasis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn repetition_code_family_has_unit_rate() {
        for n in [1, 2, 4, 6] {
            let fam = BasisFamily::from_code(&BinaryCode::repetition(n)).unwrap();
            assert_eq!(fam.m(), 2);
            assert_eq!(fam.n(), n);
            assert!((fam.c() - (-(n as f64) / 2.0).exp2()).abs() < 1e-15);
            // Exact for odd n too: the rate comes from the distance, not
            // from squaring c.
            assert_eq!(fam.delta(), 1.0);
        }
    }

    #[test]
    fn four_two_code_family_rate_is_exactly_half() {
        let code = BinaryCode::new(vec![
            BitVec::parse("0000").unwrap(),
            BitVec::parse("1100").unwrap(),
            BitVec::parse("0011").unwrap(),
            BitVec::parse("1111").unwrap(),
        ])
        .unwrap();
        assert_eq!(code.min_distance(), 2);
        let fam = BasisFamily::from_code(&code).unwrap();
        assert_eq!(fam.m(), 4);
        assert_eq!(fam.c(), 0.5);
        assert_eq!(fam.delta(), 0.5);
    }

    #[test]
    fn from_bases_matches_from_code_for_conjugate_pair() {
        let code = BinaryCode::repetition(3);
        let via_code = BasisFamily::from_code(&code).unwrap();
        let comp: Vec<QubitBasis> = (0..3).map(|_| QubitBasis::computational()).collect();
        let had: Vec<QubitBasis> = (0..3).map(|_| QubitBasis::hadamard()).collect();
        let via_bases = BasisFamily::from_bases(vec![
            ProductBasis::from_qubits(comp),
            ProductBasis::from_qubits(had),
        ])
        .unwrap();
        // The untagged route goes through the exhaustive overlap scan and
        // must land on the same figure up to float noise.
        assert!((via_code.c() - via_bases.c()).abs() < 1e-12);
        assert!((via_code.delta() - via_bases.delta()).abs() < 1e-12);
    }

    #[test]
    fn random_qubit_families_stay_in_range() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..50 {
            let bases: Vec<ProductBasis> = (0..3)
                .map(|_| {
                    ProductBasis::from_qubits(
                        (0..2).map(|_| QubitBasis::random(&mut rng)).collect(),
                    )
                })
                .collect();
            let fam = BasisFamily::from_bases(bases).unwrap();
            assert!(fam.c() > 0.0 && fam.c() <= 1.0 + 1e-12);
            assert!(fam.delta() >= -1e-12 && fam.delta() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_tiny_and_mismatched_families() {
        let one = vec![ProductBasis::from_codeword(&BitVec::zeros(2))];
        assert!(matches!(
            BasisFamily::from_bases(one),
            Err(UncertaintyError::FamilyTooSmall(1))
        ));
        let mixed = vec![
            ProductBasis::from_codeword(&BitVec::zeros(2)),
            ProductBasis::from_codeword(&BitVec::zeros(3)),
        ];
        assert!(matches!(
            BasisFamily::from_bases(mixed),
            Err(UncertaintyError::MixedSizes(2, 3))
        ));
    }
}
