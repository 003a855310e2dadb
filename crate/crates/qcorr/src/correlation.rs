//! The index of correlation and everything built on it: group mutual
//! information, internal/external decompositions over set partitions, the
//! tripartite Lambda parameter, the recursive pairwise expansion, and
//! inequality checks that report signed slack.
//!
//! Slack conventions: inequality checks report `lhs - rhs` of the form
//! `lhs >= rhs`, so a healthy check has slack >= 0 and anything below the
//! negative tolerance is a violation. Identity checks report `-(|a - b|)` so
//! the same "slack >= -tol" pass rule applies uniformly.

use crate::entropy::{partial_trace, subsystem_entropies, von_neumann_entropy, EntropyError};
use crate::partitions::{PartitionError, SetPartition};
use crate::states::MultipartiteState;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute slack tolerance used by the default checks.
pub const DEFAULT_SLACK_TOL: f64 = 1e-8;
/// Purity deficit accepted by pure-state-only checks.
pub const PURITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("subsystem groups must be nonempty and disjoint")]
    OverlappingGroups,

    #[error("partition does not match the state: {0}")]
    BadPartition(String),

    #[error("operation requires exactly {expected} subsystems, state has {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("state has {got} subsystems, need at least {min}")]
    TooFewSubsystems { min: usize, got: usize },

    #[error("ordering must be a permutation of the subsystem indices")]
    BadOrdering,

    #[error("state purity deficit {0:.3e} exceeds tolerance")]
    NotPure(f64),

    #[error("marginal entropy {0} is negative")]
    NegativeEntropy(f64),

    #[error(transparent)]
    Entropy(#[from] EntropyError),

    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// One named check with its signed slack.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub slack: f64,
    pub pass: bool,
}

impl Verdict {
    /// Inequality verdict for `lhs >= rhs`; slack is the signed margin.
    pub fn inequality(name: impl Into<String>, slack: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            slack,
            pass: slack >= -tol,
        }
    }

    /// Identity verdict for `a == b`; slack is -(|a - b|).
    pub fn identity(name: impl Into<String>, a: f64, b: f64, tol: f64) -> Self {
        let slack = -(a - b).abs();
        Self {
            name: name.into(),
            slack,
            pass: slack >= -tol,
        }
    }
}

/// Entropies, index of correlation, decomposition and inequality verdicts
/// for one state and one partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationReport {
    /// Per-subsystem entropies S(j), index order.
    pub entropies: Vec<f64>,
    /// Total entropy S.
    pub total_entropy: f64,
    /// Index of correlation I = sum_j S(j) - S.
    pub index: f64,
    /// Blocks of the partition the decomposition refers to.
    pub blocks: Vec<Vec<usize>>,
    /// Internal index of correlation per block.
    pub internal: Vec<f64>,
    /// External correlation E = I - sum(internal).
    pub external: f64,
    /// Inequality/identity verdicts with signed slacks.
    pub verdicts: Vec<Verdict>,
    /// Logarithm base the entropies are reported in.
    pub log_base: f64,
}

/// Index of correlation I = sum_j S(j) - S (Shannon units of `base`).
pub fn index_of_correlation(s: &MultipartiteState, base: f64) -> Result<f64, CorrelationError> {
    let marginals = subsystem_entropies(s, base)?;
    let total = von_neumann_entropy(s, base)?;
    Ok(marginals.iter().sum::<f64>() - total)
}

/// Mutual information I(a;b) = S(a) + S(b) - S(ab) between two disjoint
/// subsystem groups, computed on the reduced state of their union.
pub fn mutual_information(
    s: &MultipartiteState,
    a: &[usize],
    b: &[usize],
    base: f64,
) -> Result<f64, CorrelationError> {
    if a.is_empty() || b.is_empty() {
        return Err(CorrelationError::OverlappingGroups);
    }
    if a.iter().any(|i| b.contains(i)) {
        return Err(CorrelationError::OverlappingGroups);
    }
    let union: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    let joint = partial_trace(s, &union)?;
    // Within the joint state, group a occupies the first a.len() slots.
    let a_local: Vec<usize> = (0..a.len()).collect();
    let b_local: Vec<usize> = (a.len()..union.len()).collect();
    let sa = von_neumann_entropy(&partial_trace(&joint, &a_local)?, base)?;
    let sb = von_neumann_entropy(&partial_trace(&joint, &b_local)?, base)?;
    let sab = von_neumann_entropy(&joint, base)?;
    Ok(sa + sb - sab)
}

/// The correlation among the blocks of `p` treated as single systems:
/// sum_b S(block_b) - S. For the finest partition this is the index of
/// correlation itself; for coarser partitions it is the external correlation
/// computed along an independent route from the decomposition identity.
pub fn intergroup_index(
    s: &MultipartiteState,
    p: &SetPartition,
    base: f64,
) -> Result<f64, CorrelationError> {
    check_partition(s, p)?;
    let mut sum = 0.0;
    for block in p.blocks() {
        sum += von_neumann_entropy(&partial_trace(s, block)?, base)?;
    }
    Ok(sum - von_neumann_entropy(s, base)?)
}

fn check_partition(s: &MultipartiteState, p: &SetPartition) -> Result<(), CorrelationError> {
    if p.n() != s.n_subsystems() {
        return Err(CorrelationError::BadPartition(format!(
            "partition is over {} indices, state has {} subsystems",
            p.n(),
            s.n_subsystems()
        )));
    }
    Ok(())
}

/// Internal/external decomposition of the index of correlation over a set
/// partition. The external term is defined by subtraction, so the report
/// satisfies `index = sum(internal) + external` exactly; an
/// `external_consistency` verdict compares it against the independently
/// computed inter-block correlation.
pub fn decompose(
    s: &MultipartiteState,
    p: &SetPartition,
    base: f64,
) -> Result<CorrelationReport, CorrelationError> {
    check_partition(s, p)?;
    let entropies = subsystem_entropies(s, base)?;
    let total_entropy = von_neumann_entropy(s, base)?;
    let index = entropies.iter().sum::<f64>() - total_entropy;

    let mut internal = Vec::with_capacity(p.len());
    for block in p.blocks() {
        let block_state = partial_trace(s, block)?;
        internal.push(index_of_correlation(&block_state, base)?);
    }
    let external = index - internal.iter().sum::<f64>();

    let mut verdicts =
        standard_verdicts(s, &entropies, total_entropy, index, base, DEFAULT_SLACK_TOL)?;
    let independent_external = intergroup_index(s, p, base)?;
    verdicts.push(Verdict::identity(
        "external_consistency",
        external,
        independent_external,
        DEFAULT_SLACK_TOL,
    ));

    Ok(CorrelationReport {
        entropies,
        total_entropy,
        index,
        blocks: p.blocks().to_vec(),
        internal,
        external,
        verdicts,
        log_base: base,
    })
}

/// Full analysis report against the finest partition: per-subsystem
/// entropies, the index, and the standard inequality verdicts.
pub fn analyze(
    s: &MultipartiteState,
    base: f64,
    tol: f64,
) -> Result<CorrelationReport, CorrelationError> {
    let p = SetPartition::finest(s.n_subsystems());
    let entropies = subsystem_entropies(s, base)?;
    let total_entropy = von_neumann_entropy(s, base)?;
    let index = entropies.iter().sum::<f64>() - total_entropy;
    let mut internal = Vec::with_capacity(p.len());
    for block in p.blocks() {
        let block_state = partial_trace(s, block)?;
        internal.push(index_of_correlation(&block_state, base)?);
    }
    let external = index - internal.iter().sum::<f64>();
    let verdicts = standard_verdicts(s, &entropies, total_entropy, index, base, tol)?;
    Ok(CorrelationReport {
        entropies,
        total_entropy,
        index,
        blocks: p.blocks().to_vec(),
        internal,
        external,
        verdicts,
        log_base: base,
    })
}

fn standard_verdicts(
    s: &MultipartiteState,
    entropies: &[f64],
    total_entropy: f64,
    index: f64,
    base: f64,
    tol: f64,
) -> Result<Vec<Verdict>, CorrelationError> {
    let n = s.n_subsystems();
    let mut verdicts = Vec::new();
    verdicts.push(Verdict::inequality("index_nonnegative", index, tol));

    // Upper bound from the actual marginals: I <= sum_j S(j), i.e. S >= 0.
    let quantum_max: f64 = entropies.iter().sum();
    verdicts.push(Verdict::inequality(
        "quantum_bound_marginals",
        quantum_max - index,
        tol,
    ));

    // Bound from maximal marginals log(dim_j).
    let bounds = classical_quantum_bounds(&maximal_marginals(s, base))?;
    verdicts.push(Verdict::inequality(
        "quantum_bound_max_marginals",
        bounds.quantum_max - index,
        tol,
    ));

    if n == 2 {
        let lower = total_entropy - (entropies[0] - entropies[1]).abs();
        let upper = entropies[0] + entropies[1] - total_entropy;
        verdicts.push(Verdict::inequality("araki_lieb_lower", lower, tol));
        verdicts.push(Verdict::inequality("araki_lieb_upper", upper, tol));
    }

    if n == 3 {
        let ssa = check_strong_subadditivity(s, base)?;
        verdicts.push(Verdict::inequality(
            "strong_subadditivity",
            ssa.min_slack,
            tol,
        ));
        if s.is_pure(PURITY_TOL) {
            let tri = check_pure_tripartite_identities(s, base)?;
            verdicts.extend(tri.verdicts);
        }
    }

    Ok(verdicts)
}

fn maximal_marginals(s: &MultipartiteState, base: f64) -> Vec<f64> {
    s.dims()
        .iter()
        .map(|&d| (d as f64).ln() / base.ln())
        .collect()
}

/// Margin of the index of correlation above the classical ceiling computed
/// from maximal marginals: `I - sum_{j >= 2} log(dim_j)` with dimensions
/// sorted by entropy capacity. A strictly positive margin cannot be produced
/// by any classical description of the subsystems.
pub fn nonclassical_margin(s: &MultipartiteState, base: f64) -> Result<f64, CorrelationError> {
    let bounds = classical_quantum_bounds(&maximal_marginals(s, base))?;
    Ok(index_of_correlation(s, base)? - bounds.classical_max)
}

/// Whether the state's correlation strength lies in the necessarily
/// non-classical region (margin above the classical ceiling exceeds `tol`).
/// The converse does not hold: weakly correlated states may still be
/// non-classical in other respects.
pub fn is_necessarily_nonclassical(
    s: &MultipartiteState,
    base: f64,
    tol: f64,
) -> Result<bool, CorrelationError> {
    Ok(nonclassical_margin(s, base)? > tol)
}

/// Result of comparing the decomposition totals of two partitions.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionInvariance {
    pub total_first: f64,
    pub total_second: f64,
    pub difference: f64,
}

impl PartitionInvariance {
    pub fn pass(&self, tol: f64) -> bool {
        self.difference.abs() <= tol
    }
}

/// Checks that `sum(internal) + external` agrees between two partitions,
/// with the external term computed along the independent inter-block route
/// so the comparison is not vacuous.
pub fn check_partition_invariance(
    s: &MultipartiteState,
    p1: &SetPartition,
    p2: &SetPartition,
    base: f64,
) -> Result<PartitionInvariance, CorrelationError> {
    let total = |p: &SetPartition| -> Result<f64, CorrelationError> {
        let mut internal_sum = 0.0;
        for block in p.blocks() {
            let block_state = partial_trace(s, block)?;
            internal_sum += index_of_correlation(&block_state, base)?;
        }
        Ok(internal_sum + intergroup_index(s, p, base)?)
    };
    let total_first = total(p1)?;
    let total_second = total(p2)?;
    Ok(PartitionInvariance {
        total_first,
        total_second,
        difference: total_first - total_second,
    })
}

/// The tripartite inclusion-exclusion parameter
/// Lambda = S(A) + S(B) + S(C) - S(AB) - S(AC) - S(BC) + S.
/// Zero for pure and for uncorrelated tripartite states; may be negative.
pub fn lambda_parameter(s: &MultipartiteState, base: f64) -> Result<f64, CorrelationError> {
    if s.n_subsystems() != 3 {
        return Err(CorrelationError::WrongArity {
            expected: 3,
            got: s.n_subsystems(),
        });
    }
    let h = |keep: &[usize]| -> Result<f64, CorrelationError> {
        Ok(von_neumann_entropy(&partial_trace(s, keep)?, base)?)
    };
    let singles = h(&[0])? + h(&[1])? + h(&[2])?;
    let pairs = h(&[0, 1])? + h(&[0, 2])? + h(&[1, 2])?;
    let total = von_neumann_entropy(s, base)?;
    Ok(singles - pairs + total)
}

/// Expansion of the total index into n-1 pairwise terms
/// `I(k; [k+1 .. n-1])`, each computed on the reduced state of the tail
/// {k, ..., n-1}. The terms sum to the index of correlation.
pub fn pairwise_expansion(s: &MultipartiteState, base: f64) -> Result<Vec<f64>, CorrelationError> {
    let order: Vec<usize> = (0..s.n_subsystems()).collect();
    pairwise_expansion_ordered(s, &order, base)
}

/// [`pairwise_expansion`] under a caller-chosen qubit ordering. Different
/// orderings give different term lists with the same sum.
pub fn pairwise_expansion_ordered(
    s: &MultipartiteState,
    order: &[usize],
    base: f64,
) -> Result<Vec<f64>, CorrelationError> {
    let n = s.n_subsystems();
    if n < 2 {
        return Err(CorrelationError::TooFewSubsystems { min: 2, got: n });
    }
    if order.len() != n {
        return Err(CorrelationError::BadOrdering);
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(CorrelationError::BadOrdering);
        }
        seen[i] = true;
    }
    let mut terms = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let tail = &order[k..];
        let tail_state = partial_trace(s, tail)?;
        let rest: Vec<usize> = (1..tail.len()).collect();
        terms.push(mutual_information(&tail_state, &[0], &rest, base)?);
    }
    Ok(terms)
}

/// Strong subadditivity and mutual-information monotonicity for tripartite
/// states, every labeling, with the minimum slack reported.
#[derive(Debug, Clone, Serialize)]
pub struct StrongSubadditivityReport {
    pub verdicts: Vec<Verdict>,
    pub min_slack: f64,
}

impl StrongSubadditivityReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.min_slack >= -tol
    }
}

/// Evaluates S(XY) + S(YZ) >= S(Y) + S for the three choices of shared
/// subsystem Y, and the monotonicity form `I(X;[YZ]) >= I(X;Y)` for all six
/// ordered pairs.
pub fn check_strong_subadditivity(
    s: &MultipartiteState,
    base: f64,
) -> Result<StrongSubadditivityReport, CorrelationError> {
    if s.n_subsystems() != 3 {
        return Err(CorrelationError::WrongArity {
            expected: 3,
            got: s.n_subsystems(),
        });
    }
    let h = |keep: &[usize]| -> Result<f64, CorrelationError> {
        Ok(von_neumann_entropy(&partial_trace(s, keep)?, base)?)
    };
    let singles = [h(&[0])?, h(&[1])?, h(&[2])?];
    let mut pair = [[0.0f64; 3]; 3];
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let v = h(&[i, j])?;
        pair[i][j] = v;
        pair[j][i] = v;
    }
    let total = von_neumann_entropy(s, base)?;

    let mut verdicts = Vec::new();
    let tol = DEFAULT_SLACK_TOL;
    for shared in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&k| k != shared).collect();
        let slack = pair[shared][others[0]] + pair[shared][others[1]] - singles[shared] - total;
        verdicts.push(Verdict::inequality(
            format!("ssa_shared_{shared}"),
            slack,
            tol,
        ));
    }
    for x in 0..3 {
        for y in 0..3 {
            if x == y {
                continue;
            }
            let z = 3 - x - y;
            // I(x;[yz]) - I(x;y) = S(xy) + S(yz) - S(y) - S
            let slack = pair[x][y] + pair[y][z] - singles[y] - total;
            verdicts.push(Verdict::inequality(
                format!("monotonicity_{x}_{y}"),
                slack,
                tol,
            ));
        }
    }
    let min_slack = verdicts
        .iter()
        .map(|v| v.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(StrongSubadditivityReport {
        verdicts,
        min_slack,
    })
}

/// Identity and bound checks specific to pure tripartite states.
#[derive(Debug, Clone, Serialize)]
pub struct TripartiteReport {
    pub verdicts: Vec<Verdict>,
    pub min_slack: f64,
}

impl TripartiteReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.min_slack >= -tol
    }
}

/// For pure tripartite states, verifies
/// - `I([ABC]) = I(A;B) + I(A;C) + I(B;C)`,
/// - `I(X;Y) + I(X;Z) = I(X;[YZ])` for every anchor X,
/// - S(X) >= |S(Y) - S(Z)| for every labeling.
pub fn check_pure_tripartite_identities(
    s: &MultipartiteState,
    base: f64,
) -> Result<TripartiteReport, CorrelationError> {
    if s.n_subsystems() != 3 {
        return Err(CorrelationError::WrongArity {
            expected: 3,
            got: s.n_subsystems(),
        });
    }
    let deficit = 1.0 - s.purity();
    if deficit > PURITY_TOL {
        return Err(CorrelationError::NotPure(deficit));
    }
    let tol = DEFAULT_SLACK_TOL;
    let total_index = index_of_correlation(s, base)?;
    let mut pairwise = [[0.0f64; 3]; 3];
    for (x, y) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let v = mutual_information(s, &[x], &[y], base)?;
        pairwise[x][y] = v;
        pairwise[y][x] = v;
    }
    let singles = {
        let e = subsystem_entropies(s, base)?;
        [e[0], e[1], e[2]]
    };

    let mut verdicts = Vec::new();
    verdicts.push(Verdict::identity(
        "pure_total_equals_pairwise_sum",
        total_index,
        pairwise[0][1] + pairwise[0][2] + pairwise[1][2],
        tol,
    ));
    for x in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&k| k != x).collect();
        let grouped = mutual_information(s, &[x], &others, base)?;
        verdicts.push(Verdict::identity(
            format!("pure_anchored_sum_{x}"),
            pairwise[x][others[0]] + pairwise[x][others[1]],
            grouped,
            tol,
        ));
        let slack = singles[x] - (singles[others[0]] - singles[others[1]]).abs();
        verdicts.push(Verdict::inequality(
            format!("pure_entropy_difference_bound_{x}"),
            slack,
            tol,
        ));
    }
    let min_slack = verdicts
        .iter()
        .map(|v| v.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(TripartiteReport {
        verdicts,
        min_slack,
    })
}

/// Classical and quantum ceilings on the index of correlation given the
/// subsystem entropies (sorted descending internally):
/// classical_max = sum of all but the largest, quantum_max = the full sum,
/// gap = the largest entropy.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationBounds {
    pub classical_max: f64,
    pub quantum_max: f64,
    pub gap: f64,
    /// For exactly two entropies: the bipartite bound 2 inf(S(A), S(B)).
    pub bipartite_quantum_max: Option<f64>,
    /// For exactly two entropies: the bipartite classical bound inf(S(A), S(B)).
    pub bipartite_classical_max: Option<f64>,
}

pub fn classical_quantum_bounds(
    marginal_entropies: &[f64],
) -> Result<CorrelationBounds, CorrelationError> {
    if marginal_entropies.is_empty() {
        return Err(CorrelationError::OverlappingGroups);
    }
    let mut sorted = Vec::with_capacity(marginal_entropies.len());
    for &e in marginal_entropies {
        if e < -1e-9 || !e.is_finite() {
            return Err(CorrelationError::NegativeEntropy(e));
        }
        sorted.push(e.max(0.0));
    }
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let quantum_max: f64 = sorted.iter().sum();
    let classical_max: f64 = sorted[1..].iter().sum();
    let gap = sorted[0];
    let (bq, bc) = if sorted.len() == 2 {
        (Some(2.0 * sorted[1]), Some(sorted[1]))
    } else {
        (None, None)
    };
    Ok(CorrelationBounds {
        classical_max,
        quantum_max,
        gap,
        bipartite_quantum_max: bq,
        bipartite_classical_max: bc,
    })
}
