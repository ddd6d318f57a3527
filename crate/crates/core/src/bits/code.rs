use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BitVec, BitsError};

/// A binary code: a list of `m >= 2` distinct codewords of common length
/// `n`, with the minimum pairwise Hamming distance computed once at
/// construction by exhaustive comparison.
///
/// Codewords double as basis assignments for n-qubit conjugate coding
/// (bit 0 = computational, bit 1 = Hadamard), which is why text files may
/// also spell them with '+' and 'x'.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCode {
    words: Vec<BitVec>,
    n: usize,
    d: u32,
}

impl BinaryCode {
    pub fn new(words: Vec<BitVec>) -> Result<Self, BitsError> {
        if words.len() < 2 {
            return Err(BitsError::TooFewCodewords(words.len()));
        }
        let n = words[0].len();
        for (i, w) in words.iter().enumerate() {
            if w.len() != n {
                return Err(BitsError::RaggedCodeword(i, w.len(), n));
            }
        }
        let mut d = u32::MAX;
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                let dist = words[i].distance(&words[j]);
                if dist == 0 {
                    return Err(BitsError::DuplicateCodeword(i, j));
                }
                d = d.min(dist);
            }
        }
        Ok(BinaryCode { words, n, d })
    }

    /// The length-`n` repetition code {0^n, 1^n} with distance n.
    pub fn repetition(n: usize) -> Self {
        BinaryCode::new(vec![BitVec::zeros(n), BitVec::ones(n)]).expect("valid by construction")
    }

    /// Code length (number of qubits).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codewords (number of passwords).
    pub fn m(&self) -> usize {
        self.words.len()
    }

    /// Minimum pairwise Hamming distance.
    pub fn min_distance(&self) -> u32 {
        self.d
    }

    /// Encode a password index into its codeword.
    pub fn encode(&self, w: usize) -> &BitVec {
        &self.words[w]
    }

    pub fn words(&self) -> &[BitVec] {
        &self.words
    }

    /// Parse the on-disk format: UTF-8 text, one codeword per line over
    /// {0,1,+,x}, with an optional first-line header `n=<n> m=<m>`.
    pub fn parse_text(text: &str) -> Result<Self, BitsError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        let mut declared: Option<(usize, usize)> = None;
        if let Some(first) = lines.peek() {
            if first.starts_with("n=") {
                let header = lines.next().unwrap();
                declared = Some(parse_header(header)?);
            }
        }
        let words: Vec<BitVec> = lines.map(BitVec::parse).collect::<Result<_, _>>()?;
        let code = BinaryCode::new(words)?;
        if let Some((n, m)) = declared {
            if code.n != n || code.words.len() != m {
                return Err(BitsError::BadCodeFile(format!(
                    "header says n={n} m={m} but file has n={} m={}",
                    code.n,
                    code.words.len()
                )));
            }
        }
        Ok(code)
    }

    pub fn load(path: &Path) -> Result<Self, BitsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BitsError::BadCodeFile(format!("{}: {e}", path.display())))?;
        Self::parse_text(&text)
    }

    pub fn to_text(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        writeln!(out, "n={} m={}", self.n, self.words.len()).unwrap();
        for w in &self.words {
            writeln!(out, "{w}").unwrap();
        }
        out
    }
}

fn parse_header(header: &str) -> Result<(usize, usize), BitsError> {
    let mut n = None;
    let mut m = None;
    for field in header.split_whitespace() {
        if let Some(v) = field.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = field.strip_prefix("m=") {
            m = v.parse().ok();
        } else {
            return Err(BitsError::BadCodeFile(format!("bad header field {field:?}")));
        }
    }
    match (n, m) {
        (Some(n), Some(m)) => Ok((n, m)),
        _ => Err(BitsError::BadCodeFile(format!("incomplete header {header:?}"))),
    }
}
