//! `qidlab overlap`: the pairwise overlap and rate of a code-derived
//! basis family, cross-checked exhaustively at small sizes.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use qid_core::qsim::{max_overlap, ProductBasis};
use qid_core::uncertainty::BasisFamily;

use crate::codefile;
use crate::output::{CheckRow, Report};

/// Codeword families admit a closed form: the largest inner product
/// between vectors of distinct bases is 2^(-d/2), where d is the code's
/// minimum distance. Exhaustive enumeration stays feasible to 8 qubits.
const CROSSCHECK_MAX_N: usize = 8;

#[derive(Args, Debug)]
pub struct OverlapArgs {
    /// Code file: optional `n=<n> m=<m>` header, one word per line,
    /// `#` comments allowed.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Code length for the built-in block family (ignored with --code).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Number of codewords for the built-in block family.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

pub fn run(args: &OverlapArgs, seed: u64) -> Result<Report> {
    let (code, origin) = codefile::resolve(args.code.as_deref(), args.n, args.m)?;
    let family = BasisFamily::from_code(&code)?;
    let (n, m, d) = (code.n(), code.m(), code.min_distance());
    let label = format!("n={n} m={m} d={d}");

    let mut report = Report::new("overlap", seed);
    report.param("code", &origin);
    report.param("n", n);
    report.param("m", m);
    report.param("d", d);

    let closed = (-(d as f64) / 2.0).exp2();
    report.push(CheckRow {
        name: "overlap-closed-form".into(),
        params: label.clone(),
        estimate: family.c(),
        stderr: 0.0,
        bound: closed,
        pass: (family.c() - closed).abs() <= 1e-12,
        claim: "largest overlap between vectors of distinct codeword bases is 2^(-d/2)".into(),
    });

    let rate = d as f64 / n as f64;
    report.push(CheckRow {
        name: "delta-rate".into(),
        params: label.clone(),
        estimate: family.delta(),
        stderr: 0.0,
        bound: rate,
        pass: family.delta() == rate,
        claim: "overlap rate -(1/n) log2 c^2 equals d/n exactly".into(),
    });

    let crosschecked = n <= CROSSCHECK_MAX_N;
    if crosschecked {
        // Strip the codeword tags so max_overlap has to enumerate inner
        // products instead of reading the distance.
        let stripped: Vec<ProductBasis> = family
            .bases()
            .iter()
            .map(|b| ProductBasis::from_qubits(b.qubits().to_vec()))
            .collect();
        let exhaustive = max_overlap(&stripped)?;
        report.push(CheckRow {
            name: "exhaustive-crosscheck".into(),
            params: label,
            estimate: exhaustive,
            stderr: 0.0,
            bound: family.c(),
            pass: (exhaustive - family.c()).abs() <= 1e-10,
            claim: "brute-force maximum inner product matches the closed form within 1e-10".into(),
        });
    }

    report.detail = Some(serde_json::json!({
        "n": n,
        "m": m,
        "d": d,
        "c": family.c(),
        "delta": family.delta(),
        "crosschecked": crosschecked,
    }));
    Ok(report)
}
