//! Multipartite density operators: canonical constructors, seeded random
//! ensembles, purification and JSON ingestion.
//!
//! Basis ordering is big-endian throughout: subsystem 0 is the most
//! significant index factor, so for qubits the computational basis index of
//! |b0 b1 ... b(n-1)> is `sum_k b_k * 2^(n-1-k)`.

use crate::linalg::{hermitian_eig, tensor_product, ComplexMatrix, LinalgError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Accepted hermiticity deviation of a density operator.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Accepted deviation of the trace from 1.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues below this are an invariant violation; values in
/// `[EIGENVALUE_FLOOR, 0)` are numerical noise.
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Accepted deviation of a pure amplitude vector's norm from 1.
pub const NORM_TOL: f64 = 1e-8;
/// Eigenvalues above this count towards the numerical rank.
pub const RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("need at least 2 subsystems, got {0}")]
    InvalidArity(usize),

    #[error("bit pattern must be {expected} values of 0 or 1")]
    BadBitPattern { expected: usize },

    #[error("probabilities must be nonnegative and sum to 1 (sum deviation {sum_dev:.3e})")]
    BadDistribution { sum_dev: f64 },

    #[error("rank {rank} outside [1, {max}]")]
    BadRank { rank: usize, max: usize },

    #[error("amplitude vector norm {norm} differs from 1 by more than {tol:.1e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("dimension {got} does not match the product of subsystem dims ({expected})")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("subsystem dimension list must be nonempty with every entry >= 1")]
    BadDims,

    #[error("density operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("density operator trace {0} differs from 1 beyond tolerance")]
    BadTrace(f64),

    #[error("density operator has eigenvalue {0:.3e} below the negativity floor")]
    NotPositive(f64),

    #[error("state spec must contain exactly one of `pure` or `density`")]
    AmbiguousSpec,

    #[error("local operator {index} is not unitary within tolerance")]
    NotUnitary { index: usize },

    #[error("expected {expected} local unitaries, got {got}")]
    UnitaryCount { expected: usize, got: usize },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A density operator together with the ordered list of subsystem dimensions.
#[derive(Debug, Clone)]
pub struct MultipartiteState {
    rho: ComplexMatrix,
    dims: Vec<usize>,
}

impl MultipartiteState {
    /// Validating constructor: checks dimensions, hermiticity, unit trace and
    /// positivity (via a full eigendecomposition, so intended for ingesting
    /// small user-supplied matrices, not for hot paths).
    pub fn new(rho: ComplexMatrix, dims: Vec<usize>) -> Result<Self, StateError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(StateError::BadDims);
        }
        let expected: usize = dims.iter().product();
        if rho.rows() != expected || rho.cols() != expected {
            return Err(StateError::DimensionMismatch {
                got: rho.rows(),
                expected,
            });
        }
        let dev = rho.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian(dev));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(StateError::BadTrace(tr.re));
        }
        let eig = hermitian_eig(&rho, HERMITICITY_TOL)?;
        if eig.eigenvalues[0] < EIGENVALUE_FLOOR {
            return Err(StateError::NotPositive(eig.eigenvalues[0]));
        }
        Ok(Self { rho, dims })
    }

    /// Pure state |psi><psi| from an amplitude vector.
    pub fn from_amplitudes(amps: &[Complex64], dims: &[usize]) -> Result<Self, StateError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(StateError::BadDims);
        }
        let expected: usize = dims.iter().product();
        if amps.len() != expected {
            return Err(StateError::DimensionMismatch {
                got: amps.len(),
                expected,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized {
                norm,
                tol: NORM_TOL,
            });
        }
        Ok(Self {
            rho: ComplexMatrix::outer(amps),
            dims: dims.to_vec(),
        })
    }

    /// Internal constructor for matrices that are valid by construction.
    pub(crate) fn from_parts_unchecked(rho: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(rho.rows(), dims.iter().product::<usize>());
        Self { rho, dims }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.rho.rows()
    }

    /// tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        let f = self.rho.frobenius_norm();
        f * f
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        1.0 - self.purity() <= tol
    }

    /// Tensor product of two states: rho_a (x) rho_b on the concatenated
    /// subsystem list.
    pub fn product(a: &Self, b: &Self) -> Self {
        let rho = tensor_product(&a.rho, &b.rho);
        let mut dims = a.dims.clone();
        dims.extend_from_slice(&b.dims);
        Self { rho, dims }
    }
}

/// GHZ-class state (|b_0 ... b_(n-1)> + |complement>)/sqrt(2) on n qubits.
pub fn ghz(n: usize, bits: &[u8]) -> Result<MultipartiteState, StateError> {
    if n < 2 {
        return Err(StateError::InvalidArity(n));
    }
    if bits.len() != n || bits.iter().any(|&b| b > 1) {
        return Err(StateError::BadBitPattern { expected: n });
    }
    let dim = 1usize << n;
    let idx: usize = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let comp = (dim - 1) ^ idx;
    let amp = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[idx] = amp;
    amps[comp] = amp;
    MultipartiteState::from_amplitudes(&amps, &vec![2; n])
}

/// Bipartite pure state with Schmidt coefficients `sqrt(probs[j])` in the
/// computational bases: sum_j sqrt(p_j) |j,j>. Subsystem dimensions are
/// `probs.len()`, padded up to 2 so single-outcome distributions still embed
/// in a qubit pair.
pub fn schmidt_state(probs: &[f64]) -> Result<MultipartiteState, StateError> {
    if probs.is_empty() || probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(StateError::BadDistribution { sum_dev: f64::NAN });
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(StateError::BadDistribution {
            sum_dev: (sum - 1.0).abs(),
        });
    }
    let d = probs.len().max(2);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for (j, &p) in probs.iter().enumerate() {
        amps[j * d + j] = Complex64::new(p.sqrt(), 0.0);
    }
    MultipartiteState::from_amplitudes(&amps, &[d, d])
}

/// The rank-2 classically correlated mixture
/// (|0...0><0...0| + |1...1><1...1|)/2 on n qubits.
pub fn classical_correlated(n: usize) -> Result<MultipartiteState, StateError> {
    if n < 2 {
        return Err(StateError::InvalidArity(n));
    }
    let dim = 1usize << n;
    let mut rho = ComplexMatrix::zeros(dim, dim);
    rho.set(0, 0, Complex64::new(0.5, 0.0));
    rho.set(dim - 1, dim - 1, Complex64::new(0.5, 0.0));
    Ok(MultipartiteState::from_parts_unchecked(rho, vec![2; n]))
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random pure state: a complex-normal amplitude vector, normalized.
/// Deterministic for a given seed.
pub fn random_pure(dims: &[usize], seed: u64) -> MultipartiteState {
    assert!(
        !dims.is_empty() && dims.iter().all(|&d| d >= 1),
        "dims must be nonempty with entries >= 1"
    );
    let dim: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut amps: Vec<Complex64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for a in &mut amps {
                *a /= norm;
            }
            return MultipartiteState::from_parts_unchecked(
                ComplexMatrix::outer(&amps),
                dims.to_vec(),
            );
        }
    }
}

/// Amplitude vector of a Haar-random pure state; the same distribution that
/// backs [`random_pure`].
pub fn random_pure_amplitudes(dim: usize, seed: u64) -> Vec<Complex64> {
    assert!(dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut amps: Vec<Complex64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for a in &mut amps {
                *a /= norm;
            }
            return amps;
        }
    }
}

/// Ginibre-induced random density operator G G^H / tr(G G^H) with G of shape
/// (dim x rank). Deterministic for a given seed.
pub fn random_mixed(
    dims: &[usize],
    rank: usize,
    seed: u64,
) -> Result<MultipartiteState, StateError> {
    assert!(
        !dims.is_empty() && dims.iter().all(|&d| d >= 1),
        "dims must be nonempty with entries >= 1"
    );
    let dim: usize = dims.iter().product();
    if rank == 0 || rank > dim {
        return Err(StateError::BadRank { rank, max: dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_normal(&mut rng));
        let mut rho = g.matmul(&g.adjoint());
        let tr = rho.trace().re;
        if tr > 1e-12 {
            rho = rho.scale(1.0 / tr);
            return Ok(MultipartiteState::from_parts_unchecked(rho, dims.to_vec()));
        }
    }
}

/// Minimal purification: a pure state on `dims ++ [r]`, r the numerical rank
/// of the input (eigenvalues > 1e-10), whose partial trace over the appended
/// ancilla recovers the input. A pure input gains a trivial rank-1 ancilla.
pub fn purify(s: &MultipartiteState) -> Result<MultipartiteState, StateError> {
    let eig = hermitian_eig(s.rho(), 1e-8)?;
    let dim = s.total_dim();
    // Keep eigenvalues above the rank cutoff, largest first.
    let mut kept: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, l)| l > RANK_CUTOFF)
        .map(|(i, l)| (l, i))
        .collect();
    kept.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let rank = kept.len().max(1);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim * rank];
    for (a, &(l, col)) in kept.iter().enumerate() {
        let w = l.sqrt();
        for i in 0..dim {
            amps[i * rank + a] = eig.eigenvectors.get(i, col) * w;
        }
    }
    // Renormalize away the mass of any dropped near-zero eigenvalues.
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    let mut dims = s.dims().to_vec();
    dims.push(rank);
    Ok(MultipartiteState::from_parts_unchecked(
        ComplexMatrix::outer(&amps),
        dims,
    ))
}

/// Apply one 2x2 (or d x d) unitary per subsystem: rho -> U rho U^H with
/// U = u_0 (x) u_1 (x) ... Verifies each factor is unitary within 1e-8.
pub fn apply_local_unitaries(
    s: &MultipartiteState,
    unitaries: &[ComplexMatrix],
) -> Result<MultipartiteState, StateError> {
    let n = s.n_subsystems();
    if unitaries.len() != n {
        return Err(StateError::UnitaryCount {
            expected: n,
            got: unitaries.len(),
        });
    }
    let mut u = ComplexMatrix::identity(1);
    for (k, uk) in unitaries.iter().enumerate() {
        let d = s.dims()[k];
        if uk.rows() != d || uk.cols() != d {
            return Err(StateError::NotUnitary { index: k });
        }
        let gram = uk.adjoint().matmul(uk);
        if gram.max_abs_diff(&ComplexMatrix::identity(d)) > 1e-8 {
            return Err(StateError::NotUnitary { index: k });
        }
        u = tensor_product(&u, uk);
    }
    let rho = u.matmul(s.rho()).matmul(&u.adjoint());
    Ok(MultipartiteState::from_parts_unchecked(
        rho,
        s.dims().to_vec(),
    ))
}

/// Random unitary from QR-style orthonormalization of a Ginibre matrix.
#[allow(clippy::needless_range_loop)]
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    assert!(dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'outer: loop {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_normal(&mut rng));
        // Modified Gram-Schmidt on columns.
        let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| g.column_vec(j)).collect();
        for j in 0..dim {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for i in 0..dim {
                    let delta = cols[k][i] * proj;
                    cols[j][i] -= delta;
                }
            }
            let norm = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                continue 'outer;
            }
            for a in &mut cols[j] {
                *a /= norm;
            }
        }
        return ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i]);
    }
}

/// JSON ingestion form of a state: either a pure amplitude vector or a dense
/// density matrix, amplitudes row-major and big-endian.
///
/// Schema: `{"label": string, "dims": [int], "pure": [[re,im],...]}` or
/// `{"label": string, "dims": [int], "density": [[[re,im],...],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpec {
    pub label: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Vec<[f64; 2]>>>,
}

impl StateSpec {
    pub fn into_state(self) -> Result<MultipartiteState, StateError> {
        match (self.pure, self.density) {
            (Some(amps), None) => {
                let v: Vec<Complex64> = amps
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                MultipartiteState::from_amplitudes(&v, &self.dims)
            }
            (None, Some(rows)) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(StateError::DimensionMismatch {
                        got: rows.iter().map(|r| r.len()).max().unwrap_or(0),
                        expected: n,
                    });
                }
                let m = ComplexMatrix::from_fn(n, n, |i, j| {
                    Complex64::new(rows[i][j][0], rows[i][j][1])
                });
                MultipartiteState::new(m, self.dims)
            }
            _ => Err(StateError::AmbiguousSpec),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghz_two_qubits_is_bell() {
        let g = ghz(2, &[0, 0]).unwrap();
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        assert!(g.rho().max_abs_diff(bell.rho()) < 1e-12);
        assert_eq!(g.dims(), &[2, 2]);
    }

    #[test]
    fn ghz_three_qubits_amplitudes() {
        let g = ghz(3, &[0, 0, 0]).unwrap();
        let s = 0.5; // |1/sqrt(2)|^2
        assert!((g.rho().get(0, 0).re - s).abs() < 1e-12);
        assert!((g.rho().get(7, 7).re - s).abs() < 1e-12);
        assert!((g.rho().get(0, 7).re - s).abs() < 1e-12);
        assert!((g.rho().get(1, 1).norm()) < 1e-15);
    }

    #[test]
    fn ghz_bit_pattern_places_support() {
        // bits = 010 -> support on |010> (index 2) and |101> (index 5)
        let g = ghz(3, &[0, 1, 0]).unwrap();
        assert!((g.rho().get(2, 2).re - 0.5).abs() < 1e-12);
        assert!((g.rho().get(5, 5).re - 0.5).abs() < 1e-12);
        assert!(g.rho().get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn ghz_complement_bits_give_identical_state() {
        let a = ghz(4, &[0, 1, 1, 0]).unwrap();
        let b = ghz(4, &[1, 0, 0, 1]).unwrap();
        assert!(a.rho().max_abs_diff(b.rho()) <= 1e-12);
    }

    #[test]
    fn ghz_rejects_small_n_and_bad_bits() {
        assert!(matches!(ghz(1, &[0]), Err(StateError::InvalidArity(1))));
        assert!(matches!(
            ghz(2, &[0, 2]),
            Err(StateError::BadBitPattern { .. })
        ));
        assert!(matches!(
            ghz(2, &[0]),
            Err(StateError::BadBitPattern { .. })
        ));
    }

    #[test]
    fn schmidt_rejects_bad_distributions() {
        assert!(schmidt_state(&[0.5, 0.4]).is_err());
        assert!(schmidt_state(&[-0.1, 1.1]).is_err());
        assert!(schmidt_state(&[]).is_err());
    }

    #[test]
    fn schmidt_single_outcome_is_product_in_qubit_pair() {
        let s = schmidt_state(&[1.0]).unwrap();
        assert_eq!(s.dims(), &[2, 2]);
        assert!((s.rho().get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_correlated_is_rank_two_diagonal() {
        let s = classical_correlated(3).unwrap();
        assert!((s.rho().get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((s.rho().get(7, 7).re - 0.5).abs() < 1e-15);
        assert!(s.rho().get(0, 7).norm() < 1e-15);
        assert!((s.purity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_pure_is_deterministic_and_normalized() {
        let a = random_pure(&[2, 2], 7);
        let b = random_pure(&[2, 2], 7);
        assert!(a.rho().max_abs_diff(b.rho()) == 0.0);
        assert!((a.rho().trace().re - 1.0).abs() < 1e-12);
        assert!(a.is_pure(1e-12));
        let other = random_pure(&[2, 2], 8);
        assert!(a.rho().max_abs_diff(other.rho()) > 1e-3);
    }

    #[test]
    fn random_mixed_rank_one_is_pure() {
        let s = random_mixed(&[2, 2], 1, 3).unwrap();
        assert!(s.is_pure(1e-10));
        let full = random_mixed(&[2, 2], 4, 3).unwrap();
        assert!(!full.is_pure(1e-3));
        assert!(matches!(
            random_mixed(&[2, 2], 5, 3),
            Err(StateError::BadRank { .. })
        ));
    }

    #[test]
    fn random_mixed_is_deterministic() {
        let a = random_mixed(&[2, 3], 4, 99).unwrap();
        let b = random_mixed(&[2, 3], 4, 99).unwrap();
        assert!(a.rho().max_abs_diff(b.rho()) == 0.0);
    }

    #[test]
    fn purify_pure_input_appends_trivial_ancilla() {
        let s = ghz(2, &[0, 0]).unwrap();
        let p = purify(&s).unwrap();
        assert_eq!(p.dims(), &[2, 2, 1]);
        // Density operator is unchanged up to the trivial factor.
        assert!(p.rho().max_abs_diff(s.rho()) < 1e-10);
    }

    #[test]
    fn purify_maximally_mixed_qubit_gives_maximally_entangled_pair() {
        let rho = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
        ]);
        let s = MultipartiteState::new(rho, vec![2]).unwrap();
        let p = purify(&s).unwrap();
        assert_eq!(p.dims(), &[2, 2]);
        assert!(p.is_pure(1e-12));
        // Schmidt coefficients are both 1/2 -> purity of either marginal 1/2.
        let m = crate::entropy::partial_trace(&p, &[0]).unwrap();
        assert!((m.purity() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn state_spec_roundtrip_and_validation() {
        let json = r#"{"label":"bell","dims":[2,2],
            "pure":[[0.7071067811865476,0.0],[0.0,0.0],[0.0,0.0],[0.7071067811865476,0.0]]}"#;
        let spec: StateSpec = serde_json::from_str(json).unwrap();
        let s = spec.into_state().unwrap();
        assert!(s.is_pure(1e-10));

        let bad = StateSpec {
            label: "both".into(),
            dims: vec![2],
            pure: Some(vec![[1.0, 0.0], [0.0, 0.0]]),
            density: Some(vec![vec![[1.0, 0.0]]]),
        };
        assert!(matches!(bad.into_state(), Err(StateError::AmbiguousSpec)));
    }

    #[test]
    fn state_new_rejects_invalid_densities() {
        let not_trace_one = ComplexMatrix::identity(2);
        assert!(matches!(
            MultipartiteState::new(not_trace_one, vec![2]),
            Err(StateError::BadTrace(_))
        ));

        let mut non_positive = ComplexMatrix::zeros(2, 2);
        non_positive.set(0, 0, c(1.5, 0.0));
        non_positive.set(1, 1, c(-0.5, 0.0));
        assert!(matches!(
            MultipartiteState::new(non_positive, vec![2]),
            Err(StateError::NotPositive(_))
        ));

        let mut non_herm = ComplexMatrix::zeros(2, 2);
        non_herm.set(0, 0, c(0.5, 0.0));
        non_herm.set(1, 1, c(0.5, 0.0));
        non_herm.set(0, 1, c(0.3, 0.0));
        assert!(matches!(
            MultipartiteState::new(non_herm, vec![2]),
            Err(StateError::NotHermitian(_))
        ));
    }

    #[test]
    fn apply_local_unitaries_preserves_spectra() {
        let g = ghz(3, &[0, 0, 0]).unwrap();
        let us: Vec<ComplexMatrix> = (0..3).map(|k| random_unitary(2, 40 + k as u64)).collect();
        let rotated = apply_local_unitaries(&g, &us).unwrap();
        assert!((rotated.rho().trace().re - 1.0).abs() < 1e-10);
        assert!(rotated.is_pure(1e-10));
        // A non-unitary factor is rejected.
        let bad = vec![
            ComplexMatrix::identity(2).scale(2.0),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
        ];
        assert!(matches!(
            apply_local_unitaries(&g, &bad),
            Err(StateError::NotUnitary { index: 0 })
        ));
    }

    #[test]
    fn every_constructor_output_revalidates() {
        // Round-trip each constructor's output through the validating
        // constructor, which checks hermiticity, trace and positivity.
        let outputs: Vec<MultipartiteState> = vec![
            ghz(3, &[0, 1, 0]).unwrap(),
            schmidt_state(&[0.3, 0.7]).unwrap(),
            classical_correlated(3).unwrap(),
            random_pure(&[2, 3], 5),
            random_mixed(&[2, 2], 3, 6).unwrap(),
            purify(&random_mixed(&[2, 2], 2, 7).unwrap()).unwrap(),
        ];
        for s in outputs {
            MultipartiteState::new(s.rho().clone(), s.dims().to_vec())
                .expect("constructor output fails validation");
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        for seed in 0..5u64 {
            let u = random_unitary(2, seed);
            let gram = u.adjoint().matmul(&u);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }
        let u4 = random_unitary(4, 9);
        let gram = u4.adjoint().matmul(&u4);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }
}
