//! # qcorr
//!
//! A small toolkit for analysing the information content of correlations in
//! multipartite quantum states at desk scale (up to ~10 qubits).
//!
//! The central quantity is the index of correlation
//!
//! ```text
//! I(1;2;...;N) = sum_j S(j) - S
//! ```
//!
//! the difference between the sum of the subsystem entropies and the total
//! von Neumann entropy. Everything else is built around it:
//!
//! - [`linalg`]: dense complex matrices, tensor products and a self-contained
//!   cyclic-Jacobi Hermitian eigensolver.
//! - [`states`]: canonical state constructors (GHZ, Schmidt, classically
//!   correlated mixtures), seeded random ensembles and purification.
//! - [`entropy`]: partial trace and von Neumann entropy.
//! - [`correlation`]: the correlation index, internal/external decompositions
//!   over set partitions, tripartite identities and inequality checks with
//!   signed slack reporting.
//! - [`partitions`]: integer/set partition enumeration, the asymptotic
//!   partition-count estimate and the irreducible 2/3 block decomposition.
//! - [`ghz_audit`]: numerical audits of the claim that GHZ-form states are
//!   the only simultaneous optimizers of the pairwise correlation expansion.
//!
//! Entropies are reported in units of the chosen logarithm base (base 2,
//! "bits", throughout the tests). Subsystems are indexed from 0 and the basis
//! ordering is big-endian: subsystem 0 is the most significant index factor.

pub mod correlation;
pub mod entropy;
pub mod ghz_audit;
pub mod linalg;
pub mod partitions;
pub mod states;

pub use correlation::{CorrelationBounds, CorrelationError, CorrelationReport, Verdict};
pub use entropy::{partial_trace, von_neumann_entropy, EntropyError};
pub use ghz_audit::{AuditError, AuditResult};
pub use linalg::{hermitian_eig, tensor_product, ComplexMatrix, HermitianEig, LinalgError};
pub use partitions::{IntegerPartition, PartitionError, SetPartition};
pub use states::{MultipartiteState, StateError, StateSpec};
