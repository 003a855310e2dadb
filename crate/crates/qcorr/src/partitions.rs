//! Integer and set partition machinery: enumeration, the asymptotic count
//! estimate, and the irreducible 2/3 block decomposition.
//!
//! Integer partitions count the *shapes* of a split of n subsystems; set
//! partitions enumerate the physically distinct splits of labeled
//! subsystems. Reports should say which of the two counts they use.

use std::f64::consts::PI;
use thiserror::Error;

/// Integer partition enumeration is capped here to bound memory.
pub const MAX_INTEGER_PARTITION_N: usize = 60;
/// Set partition enumeration is capped here (Bell number 115975 at n = 10).
pub const MAX_SET_PARTITION_N: usize = 10;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("n = {n} outside supported range [{min}, {max}]")]
    OutOfRange { n: usize, min: usize, max: usize },

    #[error("no integers p, q with 2p + 3q = {0}")]
    NoDecomposition(usize),

    #[error("invalid set partition: {0}")]
    InvalidPartition(String),
}

/// A partition of the integer n into non-increasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// Iterator over the partitions of n in descending lexicographic order:
/// (n), (n-1, 1), ..., (1, 1, ..., 1).
pub struct IntegerPartitions {
    current: Option<Vec<usize>>,
}

impl Iterator for IntegerPartitions {
    type Item = IntegerPartition;

    fn next(&mut self) -> Option<IntegerPartition> {
        let current = self.current.take()?;
        let item = IntegerPartition {
            parts: current.clone(),
        };
        // Find the rightmost part > 1; everything after it is a row of 1s.
        if let Some(i) = current.iter().rposition(|&p| p > 1) {
            let trailing_ones = current.len() - i - 1;
            let mass = current[i] + trailing_ones;
            let head = current[i] - 1;
            let mut next = current[..i].to_vec();
            let full = mass / head;
            let rem = mass % head;
            next.extend(std::iter::repeat_n(head, full));
            if rem > 0 {
                next.push(rem);
            }
            self.current = Some(next);
        }
        Some(item)
    }
}

/// Lazy enumeration of the integer partitions of n (descending lex order).
pub fn integer_partitions(n: usize) -> Result<IntegerPartitions, PartitionError> {
    if !(1..=MAX_INTEGER_PARTITION_N).contains(&n) {
        return Err(PartitionError::OutOfRange {
            n,
            min: 1,
            max: MAX_INTEGER_PARTITION_N,
        });
    }
    Ok(IntegerPartitions {
        current: Some(vec![n]),
    })
}

/// All integer partitions of n, descending lexicographic.
pub fn enumerate_integer_partitions(n: usize) -> Result<Vec<IntegerPartition>, PartitionError> {
    Ok(integer_partitions(n)?.collect())
}

/// Exact p(n) by running the enumerator without materializing the partitions.
pub fn count_integer_partitions(n: usize) -> Result<u64, PartitionError> {
    Ok(integer_partitions(n)?.count() as u64)
}

/// Asymptotic estimate p(n) ~ exp(pi sqrt(2n/3)) / (4 n sqrt(3)).
pub fn hardy_ramanujan_estimate(n: usize) -> f64 {
    assert!(n >= 1, "estimate defined for n >= 1");
    let x = n as f64;
    (PI * (2.0 * x / 3.0).sqrt()).exp() / (4.0 * x * 3.0_f64.sqrt())
}

/// Canonical split n = 2p + 3q favouring 3-blocks: the number of 3-blocks is
/// maximal subject to the remainder being even. Returns (p, q).
pub fn irreducible_decomposition(n: usize) -> Result<(usize, usize), PartitionError> {
    if n < 2 {
        return Err(PartitionError::NoDecomposition(n));
    }
    match n % 3 {
        0 => Ok((0, n / 3)),
        1 => {
            if n < 4 {
                return Err(PartitionError::NoDecomposition(n));
            }
            Ok((2, (n - 4) / 3))
        }
        _ => Ok((1, (n - 2) / 3)),
    }
}

/// A grouping of the subsystem indices {0, ..., n-1} into disjoint nonempty
/// blocks. Canonical form: indices ascending within each block, blocks
/// ordered by their smallest index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl SetPartition {
    /// Validates that the blocks are disjoint, nonempty and cover 0..n, then
    /// stores them in canonical order.
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(PartitionError::InvalidPartition("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(PartitionError::InvalidPartition(format!(
                        "index {i} out of range for n = {n}"
                    )));
                }
                if seen[i] {
                    return Err(PartitionError::InvalidPartition(format!(
                        "index {i} appears twice"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(PartitionError::InvalidPartition(
                "blocks do not cover every index".into(),
            ));
        }
        let mut blocks = blocks;
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { blocks, n })
    }

    /// The partition into singletons.
    pub fn finest(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|i| vec![i]).collect(),
            n,
        }
    }

    /// Two-block partition: `left` and its complement.
    pub fn bipartition(left: &[usize], n: usize) -> Result<Self, PartitionError> {
        let mut in_left = vec![false; n];
        for &i in left {
            if i >= n {
                return Err(PartitionError::InvalidPartition(format!(
                    "index {i} out of range for n = {n}"
                )));
            }
            in_left[i] = true;
        }
        let right: Vec<usize> = (0..n).filter(|&i| !in_left[i]).collect();
        Self::new(vec![left.to_vec(), right], n)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// All set partitions of {0, ..., n-1}, enumerated through restricted growth
/// strings so the output is in a canonical block-sorted order.
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>, PartitionError> {
    if !(1..=MAX_SET_PARTITION_N).contains(&n) {
        return Err(PartitionError::OutOfRange {
            n,
            min: 1,
            max: MAX_SET_PARTITION_N,
        });
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    rgs_recurse(&mut labels, 1, 0, n, &mut out);
    Ok(out)
}

fn rgs_recurse(
    labels: &mut Vec<usize>,
    pos: usize,
    max_used: usize,
    n: usize,
    out: &mut Vec<SetPartition>,
) {
    if pos == n {
        let block_count = max_used + 1;
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); block_count];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l].push(i);
        }
        out.push(SetPartition { blocks, n });
        return;
    }
    for label in 0..=max_used + 1 {
        labels[pos] = label;
        rgs_recurse(labels, pos + 1, max_used.max(label), n, out);
    }
    labels[pos] = 0;
}
