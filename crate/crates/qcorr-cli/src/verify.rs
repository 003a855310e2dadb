//! Seeded verification suites for the entropy inequalities and identities:
//! Araki-Lieb, partition invariance, strong subadditivity, the pure
//! tripartite identities, the entropy-difference bound and the pairwise
//! information chain bound.
//!
//! Inequality checks record their minimum signed slack; identity checks
//! record -(max |difference|), so in both cases a check passes iff its worst
//! slack is at least -tol. Trial seeds are drawn once from the master seed,
//! which makes the whole report reproducible byte for byte.

use crate::output::{fmt12, round_floats, OutputFormat};
use qcorr::correlation::{
    check_partition_invariance, check_pure_tripartite_identities, check_strong_subadditivity,
    mutual_information,
};
use qcorr::entropy::{partial_trace, subsystem_entropies, von_neumann_entropy};
use qcorr::states::{random_mixed, random_pure};
use qcorr::SetPartition;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub passes: usize,
    pub worst_slack: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub log_base: f64,
    pub checks: Vec<CheckSummary>,
    pub all_pass: bool,
}

struct Accumulator {
    name: &'static str,
    trials: usize,
    passes: usize,
    worst: f64,
}

impl Accumulator {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            passes: 0,
            worst: f64::INFINITY,
        }
    }

    fn record(&mut self, slack: f64, tol: f64) {
        self.trials += 1;
        if slack >= -tol {
            self.passes += 1;
        }
        if slack < self.worst {
            self.worst = slack;
        }
    }

    fn finish(self, tol: f64) -> CheckSummary {
        CheckSummary {
            name: self.name.to_string(),
            trials: self.trials,
            passes: self.passes,
            worst_slack: self.worst,
            pass: self.worst >= -tol,
        }
    }
}

type SuiteResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_suite(seed: u64, trials: usize, tol: f64, base: f64) -> SuiteResult<SuiteReport> {
    use rand_like::SeedStream;
    let mut stream = SeedStream::new(seed);

    let mut araki = Accumulator::new("araki_lieb");
    let mut invariance = Accumulator::new("partition_invariance");
    let mut ssa = Accumulator::new("strong_subadditivity");
    let mut pure_identities = Accumulator::new("pure_tripartite_identities");
    let mut diff_bound = Accumulator::new("entropy_difference_bound");
    let mut chain_bound = Accumulator::new("pairwise_information_chain");

    // Araki-Lieb on mixed bipartite states of varying dimension and rank.
    for t in 0..trials {
        let dims: &[usize] = if t % 2 == 0 { &[2, 2] } else { &[2, 3] };
        let dim: usize = dims.iter().product();
        let rank = 1 + (t % dim);
        let s = random_mixed(dims, rank, stream.next())?;
        let total = von_neumann_entropy(&s, base)?;
        let sa = von_neumann_entropy(&partial_trace(&s, &[0])?, base)?;
        let sb = von_neumann_entropy(&partial_trace(&s, &[1])?, base)?;
        let lower = total - (sa - sb).abs();
        let upper = sa + sb - total;
        araki.record(lower.min(upper), tol);
    }

    // Partition invariance on 4-qubit states across random bipartitions.
    let bipartitions: Vec<SetPartition> = {
        let mut ps = Vec::new();
        for left in [
            vec![0usize, 1],
            vec![0, 2],
            vec![0, 3],
            vec![0],
            vec![1],
            vec![0, 1, 2],
        ] {
            ps.push(SetPartition::bipartition(&left, 4)?);
        }
        ps
    };
    for t in 0..trials {
        let s = if t % 2 == 0 {
            random_pure(&[2, 2, 2, 2], stream.next())
        } else {
            random_mixed(&[2, 2, 2, 2], 1 + (t % 16), stream.next())?
        };
        let p1 = &bipartitions[t % bipartitions.len()];
        let p2 = &bipartitions[(t + 1 + t % (bipartitions.len() - 1)) % bipartitions.len()];
        let inv = check_partition_invariance(&s, p1, p2, base)?;
        invariance.record(-inv.difference.abs(), tol);
    }

    // Strong subadditivity on mixed tripartite states, both qubit registers
    // and mixed-dimension systems.
    for t in 0..trials {
        let dims: &[usize] = if t % 2 == 0 { &[2, 2, 2] } else { &[2, 3, 4] };
        let dim: usize = dims.iter().product();
        let rank = 1 + (t % dim);
        let s = random_mixed(dims, rank, stream.next())?;
        let rep = check_strong_subadditivity(&s, base)?;
        ssa.record(rep.min_slack, tol);
    }

    // Pure tripartite identities and the entropy-difference bound.
    for t in 0..trials {
        let dims: &[usize] = if t % 3 == 2 { &[2, 2, 3] } else { &[2, 2, 2] };
        let s = random_pure(dims, stream.next());
        let rep = check_pure_tripartite_identities(&s, base)?;
        // Split the combined report: identities vs the difference bound.
        let mut worst_identity = f64::INFINITY;
        let mut worst_bound = f64::INFINITY;
        for v in &rep.verdicts {
            if v.name.starts_with("pure_entropy_difference_bound") {
                worst_bound = worst_bound.min(v.slack);
            } else {
                worst_identity = worst_identity.min(v.slack);
            }
        }
        pure_identities.record(worst_identity, tol);
        diff_bound.record(worst_bound, tol);

        // Chain bound: I(X;Y) + I(X;Z) <= S(A) + S(B) + S(C).
        let bound: f64 = subsystem_entropies(&s, base)?.iter().sum();
        let mut worst_chain = f64::INFINITY;
        for x in 0..3usize {
            let others: Vec<usize> = (0..3).filter(|&k| k != x).collect();
            let ixy = mutual_information(&s, &[x], &[others[0]], base)?;
            let ixz = mutual_information(&s, &[x], &[others[1]], base)?;
            worst_chain = worst_chain.min(bound - ixy - ixz);
        }
        chain_bound.record(worst_chain, tol);
    }

    let checks = vec![
        araki.finish(tol),
        invariance.finish(tol),
        ssa.finish(tol),
        pure_identities.finish(tol),
        diff_bound.finish(tol),
        chain_bound.finish(tol),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        seed,
        trials,
        tol,
        log_base: base,
        checks,
        all_pass,
    })
}

pub fn render(report: &SuiteReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut doc = serde_json::to_value(report).expect("suite serializes");
            round_floats(&mut doc);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        OutputFormat::Csv => {
            let mut out = String::from("check,trials,passes,worst_slack,pass\n");
            for c in &report.checks {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.name,
                    c.trials,
                    c.passes,
                    fmt12(c.worst_slack),
                    c.pass
                ));
            }
            out.push_str(&format!(
                "summary,seed={},tol={},base={},{}\n",
                report.seed,
                fmt12(report.tol),
                fmt12(report.log_base),
                if report.all_pass { "pass" } else { "fail" }
            ));
            out
        }
        OutputFormat::Text => {
            let mut out = format!(
                "{:<30} {:>7} {:>7} {:>20} {:>6}\n",
                "check", "trials", "passes", "worst_slack", "pass"
            );
            for c in &report.checks {
                out.push_str(&format!(
                    "{:<30} {:>7} {:>7} {:>20} {:>6}\n",
                    c.name,
                    c.trials,
                    c.passes,
                    fmt12(c.worst_slack),
                    if c.pass { "yes" } else { "NO" }
                ));
            }
            out.push_str(&format!(
                "{} (seed {}, tol {}, log base {})\n",
                if report.all_pass {
                    "all checks passed"
                } else {
                    "CHECKS FAILED"
                },
                report.seed,
                fmt12(report.tol),
                fmt12(report.log_base)
            ));
            out
        }
    }
}

// Small deterministic seed stream so the CLI does not need a rand dependency.
mod rand_like {
    /// SplitMix64: the standard 64-bit seed sequencer.
    pub struct SeedStream {
        state: u64,
    }

    impl SeedStream {
        pub fn new(seed: u64) -> Self {
            Self { state: seed }
        }

        pub fn next(&mut self) -> u64 {
            self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = self.state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        }
    }
}
