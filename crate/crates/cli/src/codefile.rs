//! Where each command gets its code from: a text file when `--code` is
//! given, otherwise a built-in block family sized by `--n` and `--m`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qid_core::bits::{BinaryCode, BitVec};

/// Load the code file, or build the block code: `log2(m)` blocks of
/// `n / log2(m)` positions, block `j` of word `w` all-ones iff bit `j`
/// of `w` is set. Minimum distance is the block width. Returns the code
/// and a label recording where it came from.
pub fn resolve(path: Option<&Path>, n: usize, m: usize) -> Result<(BinaryCode, String)> {
    if let Some(path) = path {
        let code = BinaryCode::load(path)
            .with_context(|| format!("loading code from {}", path.display()))?;
        return Ok((code, path.display().to_string()));
    }
    if m < 2 || !m.is_power_of_two() {
        bail!("built-in family needs m a power of two and at least 2, got {m} (or pass --code)");
    }
    let blocks = m.trailing_zeros() as usize;
    if n == 0 || n % blocks != 0 {
        bail!("built-in family needs n divisible by log2(m) = {blocks}, got {n} (or pass --code)");
    }
    let width = n / blocks;
    let words = (0..m)
        .map(|w| {
            BitVec::from_bools(
                &(0..n)
                    .map(|i| w >> (i / width) & 1 == 1)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let code = BinaryCode::new(words)?;
    Ok((code, format!("block(n={n}, m={m})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_families_by_hand() {
        let (rep, label) = resolve(None, 4, 2).unwrap();
        assert_eq!(rep, BinaryCode::repetition(4));
        assert_eq!(label, "block(n=4, m=2)");

        let (two, _) = resolve(None, 8, 4).unwrap();
        assert_eq!(two.min_distance(), 4);
        assert_eq!(two.words()[1], BitVec::parse("11110000").unwrap());
        assert_eq!(two.words()[2], BitVec::parse("00001111").unwrap());

        let (three, _) = resolve(None, 6, 8).unwrap();
        assert_eq!(three.m(), 8);
        assert_eq!(three.min_distance(), 2);
    }

    #[test]
    fn unsupported_shapes_are_rejected() {
        assert!(resolve(None, 4, 3).is_err());
        assert!(resolve(None, 7, 4).is_err());
        assert!(resolve(None, 4, 1).is_err());
    }
}
