//! `qidlab protocol-suite`: every protocol-level security statement as
//! one verdict row — honest correctness, the dishonest-user rate and its
//! union bound, the exact single-qubit-adversary analysis, the paired
//! Bell attack, and the closed-form storage bound.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use qid_core::bits::{BinaryCode, BitVec};
use qid_core::protocol::{
    bell_attack_stats, bqsm_bound, dishonest_accept_rate, honest_accept_rate,
    server_security_level, user_security_sd, ProtocolParams, SqomStrategy, WPrimeRule,
};

use crate::codefile;
use crate::output::{CheckRow, Report};

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Code file shared by all sub-experiments.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Code length for the built-in block family (ignored with --code).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Number of passwords for the built-in block family.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Hash output length in bits.
    #[arg(long, default_value_t = 4)]
    pub ell: usize,
    /// Margin in the Schur-floor threshold (1/2)(1/4 - beta) d of the
    /// single-qubit-adversary analysis.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Smoothing split for the storage-bound row; must lie in
    /// (0, delta/4) for that row's rate-1/4 reference code.
    #[arg(long, default_value_t = 0.015625)]
    pub kappa: f64,
    /// Monte Carlo trials for each estimated rate.
    #[arg(long, default_value_t = 4000)]
    pub trials: usize,
}

pub fn run(args: &SuiteArgs, seed: u64) -> Result<Report> {
    let (code, origin) = codefile::resolve(args.code.as_deref(), args.n, args.m)?;
    let params = ProtocolParams::new(code, args.ell, seed)?;
    let (n, m, ell) = (params.n, params.m(), params.ell);

    let mut report = Report::new("protocol-suite", seed);
    report.param("code", &origin);
    report.param("n", n);
    report.param("m", m);
    report.param("ell", ell);
    report.param("beta", args.beta);
    report.param("kappa", args.kappa);
    report.param("trials", args.trials);

    let honest = honest_accept_rate(&params, 0, args.trials)?;
    report.push(CheckRow {
        name: "honest-accept".into(),
        params: format!("w=0 trials={}", args.trials),
        estimate: honest.estimate,
        stderr: honest.stderr,
        bound: 1.0,
        pass: honest.estimate == 1.0,
        claim: "an honest user holding the right password is always accepted".into(),
    });

    let dishonest = dishonest_accept_rate(&params, 0, 1, args.trials)?;
    let collision = (-(ell as f64)).exp2();
    report.push(CheckRow {
        name: "dishonest-accept".into(),
        params: format!("w_true=0 w_guess=1 trials={}", args.trials),
        estimate: dishonest.estimate,
        stderr: dishonest.stderr,
        bound: collision,
        pass: (dishonest.estimate - collision).abs() <= 3.0 * dishonest.stderr + 1e-12,
        claim: "a wrong password is accepted at the 2^-ell hash-collision rate (within 3 sigma)"
            .into(),
    });

    let level = server_security_level(m, ell);
    report.push(CheckRow {
        name: "server-security-level".into(),
        params: format!("m={m} ell={ell}"),
        estimate: dishonest.estimate,
        stderr: dishonest.stderr,
        bound: level,
        pass: dishonest.estimate <= level + 3.0 * dishonest.stderr,
        claim: "the observed cheating rate stays below the C(m,2) 2^-ell union bound".into(),
    });

    // The exact single-qubit-adversary analysis is cheap per instance but
    // exponential in n, so it gets a small slice of the trial budget.
    let sd_trials = (args.trials / 500).max(4);
    let rule = WPrimeRule::new(args.beta)?;
    let sqom = user_security_sd(&params, &SqomStrategy::Breidbart, &rule, sd_trials)?;
    let good_within = sqom
        .instances
        .iter()
        .filter(|i| i.good_f)
        .all(|i| i.sd <= 2.0 * sqom.sd_bound + 1e-9);
    report.push(CheckRow {
        name: "sqom-user-security".into(),
        params: format!(
            "strategy={} beta={} instances={sd_trials} good_f_rate={}",
            sqom.strategy, args.beta, sqom.good_f_rate
        ),
        estimate: sqom.sd_max,
        stderr: sqom.sd_stderr,
        bound: 2.0 * sqom.sd_bound,
        pass: sqom.span_bias_ok && sqom.offspan_bias_max < 1e-9 && good_within,
        claim: "single-qubit attacks: no signal off the row span, and good instances stay \
                within twice the per-cell uniformity bound"
            .into(),
    });

    if m >= 3 {
        let bell = bell_attack_stats(&params, 0, 1, 2, args.trials)?;
        report.push(CheckRow {
            name: "bell-double-discard".into(),
            params: format!("w_true=0 candidates=(1,2) trials={}", args.trials),
            estimate: bell.double_discard_rate,
            stderr: bell.double_discard_stderr,
            bound: 0.25,
            pass: (bell.double_discard_rate - 0.25).abs() <= 3.0 * bell.double_discard_stderr + 1e-12
                && bell.true_discard_rate == 0.0,
            claim: "with both candidates wrong, paired measurements discard the two together \
                    a quarter of the time (within 3 sigma)"
                .into(),
        });
    } else {
        let bell = bell_attack_stats(&params, 0, 0, 1, args.trials)?;
        report.push(CheckRow {
            name: "bell-true-safe".into(),
            params: format!("w_true=0 candidates=(0,1) trials={}", args.trials),
            estimate: bell.true_discard_rate,
            stderr: 0.0,
            bound: 0.0,
            pass: bell.true_discard_rate == 0.0,
            claim: "the true password leading the candidate pair is never discarded".into(),
        });
    }

    // Closed-form storage bound on a reference instance big enough to
    // bite: 1000 qubits, codewords 250 apart, 20 hash bits, 50 stored
    // qubits. Only kappa is taken from the flags.
    let mut far = BitVec::zeros(1000);
    for i in 0..250 {
        far.set(i, true);
    }
    let ref_code = BinaryCode::new(vec![BitVec::zeros(1000), far])?;
    let ref_params = ProtocolParams::new(ref_code, 20, seed)?;
    let storage = bqsm_bound(&ref_params, 50, args.kappa)?;
    report.push(CheckRow {
        name: "storage-bound".into(),
        params: format!("n=1000 d=250 ell=20 q=50 kappa={}", args.kappa),
        estimate: storage.epsilon,
        stderr: 0.0,
        bound: 5e-4,
        pass: storage.epsilon <= 5e-4 && !storage.vacuous,
        claim: "a server storing 50 of 1000 qubits cheats with probability under 5e-4".into(),
    });

    Ok(report)
}
