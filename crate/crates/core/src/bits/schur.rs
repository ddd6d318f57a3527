use super::{BinaryCode, BitMatrix, BitVec, BitsError};

/// Outcome of the candidate-codeword search in [`find_c_tilde`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CTildeSearch {
    /// No codeword admits a low-weight masked combination.
    None,
    /// Exactly one codeword does; this is the adversary's best password guess.
    Unique(usize),
    /// Two codewords qualify — the event the counting bound shows is rare.
    Ambiguous(usize, usize),
}

/// Check the Schur-weight property of a random extractor matrix `F`: for
/// every pair `f, g` (not necessarily distinct) of nonzero row combinations,
/// the Schur product `f (.) g` restricted to the index set `mask` must have
/// weight strictly above `(1/4 - beta) * |mask|`.
///
/// An `F` with linearly dependent rows has a shrunken nonzero span, so the
/// quantifier automatically ranges over fewer vectors (and is vacuously true
/// for the zero matrix).
pub fn lemma_schur_holds(f: &BitMatrix, mask: &BitVec, beta: f64) -> Result<bool, BitsError> {
    assert!(
        (0.0..0.25).contains(&beta),
        "beta must lie in [0, 1/4), got {beta}"
    );
    let k = mask.weight() as f64;
    let threshold = (0.25 - beta) * k;
    let span = f.span_without_zero()?;
    for (i, a) in span.iter().enumerate() {
        // The Schur product is symmetric, so the pair (j, i) repeats (i, j).
        for b in &span[i..] {
            if (a.schur(b).weight_within(mask) as f64) <= threshold {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Search for codewords `c` such that some nonzero `f` in the row span of
/// `F` has `|f (.) (c + s)| < (1/2)(1/4 - beta) d`, where `d` is the code's
/// minimum distance and `s` is the adversary's (quantized) basis string.
///
/// The counting argument behind the user-security theorem says that for a
/// random `F` at most one codeword qualifies except with small probability;
/// [`CTildeSearch::Ambiguous`] reports the exceptional case so Monte Carlo
/// sweeps can tally its frequency.
pub fn find_c_tilde(
    f: &BitMatrix,
    s: &BitVec,
    code: &BinaryCode,
    beta: f64,
) -> Result<CTildeSearch, BitsError> {
    assert!(
        (0.0..0.25).contains(&beta),
        "beta must lie in [0, 1/4), got {beta}"
    );
    if s.len() != code.n() {
        return Err(BitsError::LengthMismatch(s.len(), code.n()));
    }
    let threshold = 0.5 * (0.25 - beta) * code.min_distance() as f64;
    let span = f.span_without_zero()?;
    let mut hits = Vec::new();
    for (w, c) in code.words().iter().enumerate() {
        let shifted = c.xor(s);
        if span
            .iter()
            .any(|v| (v.schur(&shifted).weight() as f64) < threshold)
        {
            hits.push(w);
            if hits.len() == 2 {
                return Ok(CTildeSearch::Ambiguous(hits[0], hits[1]));
            }
        }
    }
    Ok(match hits.first() {
        None => CTildeSearch::None,
        Some(&w) => CTildeSearch::Unique(w),
    })
}
