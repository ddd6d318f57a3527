//! Exact rational arithmetic used where float tolerances would blur a
//! structural identity. Measured distributions are snapped to a fixed
//! dyadic grid; once on the grid, sums, event probabilities, and
//! independence factorizations are computed without any rounding.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Grid resolution: probabilities are rounded to multiples of 2^-GRID_BITS.
pub const GRID_BITS: u32 = 60;

/// 2^k as an exact rational, for either sign of k.
pub fn pow2(k: i64) -> Rat {
    let mag = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

/// Rounds to the nearest grid point, clamping tiny negative noise to zero.
/// The float is first expanded to its exact binary value so no precision
/// is lost before the grid rounding.
pub fn to_grid(x: f64) -> Rat {
    let exact = Rat::from_float(x).expect("finite float");
    let r = (exact * pow2(GRID_BITS as i64)).round() / pow2(GRID_BITS as i64);
    if r.is_negative() {
        Rat::zero()
    } else {
        r
    }
}

/// Snaps a probability vector to the grid, then repairs the largest entry
/// so the total is exactly 1.
pub fn rationalize_probs(probs: &[f64]) -> Vec<Rat> {
    let mut rats: Vec<Rat> = probs.iter().map(|p| to_grid(*p)).collect();
    let total: Rat = rats.iter().cloned().sum();
    let imax = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty probability vector");
    rats[imax] += Rat::one() - total;
    debug_assert!(!rats[imax].is_negative(), "repair overwhelmed the mode");
    debug_assert!(rats.iter().cloned().sum::<Rat>().is_one());
    rats
}

/// log2 of a positive rational, accurate to f64 precision even when the
/// numerator or denominator far exceeds the f64 range.
pub fn log2_rat(r: &Rat) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive rational");
    log2_big(r.numer()) - log2_big(r.denom())
}

fn log2_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 53;
    let top: BigInt = x >> shift;
    top.to_f64().expect("53 bits fit in f64").log2() + shift as f64
}

/// Rational to float via the log, robust to huge numerators/denominators.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * log2_rat(&r.abs()).exp2()
}
