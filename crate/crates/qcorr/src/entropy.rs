//! Partial trace and von Neumann entropy.
//!
//! The partial trace is computed by direct summation over the traced
//! multi-indices rather than by reshaping tricks, so the implementation can
//! be checked against a brute-force oracle entry by entry.

use crate::linalg::{hermitian_eig, ComplexMatrix, LinalgError};
use crate::states::MultipartiteState;
use num_complex::Complex64;
use thiserror::Error;

/// Hermiticity tolerance used when diagonalizing density operators that have
/// passed through arithmetic (partial traces, rotations).
pub const STATE_EIG_TOL: f64 = 1e-8;
/// Eigenvalues below this floor are an error, not noise.
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Eigenvalues at or below this are treated as exact zeros (0 log 0 := 0).
pub const EIGENVALUE_ZERO: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("keep set invalid: {0}")]
    BadIndexSet(String),

    #[error("eigenvalue {0:.3e} is below the {EIGENVALUE_FLOOR:.0e} negativity floor")]
    NegativeEigenvalue(f64),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Reduced density operator on the listed subsystems.
///
/// `keep` is an ordered list of distinct subsystem indices; the output
/// subsystems appear in exactly that order, so passing a permuted list
/// produces the correspondingly permuted reduced state. The trace is
/// preserved.
pub fn partial_trace(
    s: &MultipartiteState,
    keep: &[usize],
) -> Result<MultipartiteState, EntropyError> {
    let dims = s.dims();
    let n = dims.len();
    if keep.is_empty() {
        return Err(EntropyError::BadIndexSet("empty keep set".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(EntropyError::BadIndexSet(format!(
            "index {bad} out of range for {n} subsystems"
        )));
    }
    let mut seen = vec![false; n];
    for &k in keep {
        if seen[k] {
            return Err(EntropyError::BadIndexSet(format!("duplicate index {k}")));
        }
        seen[k] = true;
    }

    // Big-endian strides: subsystem k advances the flat index by
    // prod(dims[k+1..]).
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let traced: Vec<usize> = (0..n).filter(|k| !seen[*k]).collect();

    // Flat-index offsets contributed by every multi-index over a subsystem
    // subset, enumerated in row-major order of that subset.
    let offsets = |subset: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &k in subset {
            let mut next = Vec::with_capacity(out.len() * dims[k]);
            for &base in &out {
                for d in 0..dims[k] {
                    next.push(base + d * strides[k]);
                }
            }
            out = next;
        }
        out
    };
    let keep_offsets = offsets(keep);
    let traced_offsets = offsets(&traced);

    let dk = keep_offsets.len();
    let rho = s.rho();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (i, &ro) in keep_offsets.iter().enumerate() {
        for (j, &co) in keep_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &to in &traced_offsets {
                acc += rho.get(ro + to, co + to);
            }
            out.set(i, j, acc);
        }
    }
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    Ok(MultipartiteState::from_parts_unchecked(out, keep_dims))
}

/// Entropy of a spectrum: -sum_i l_i log_base(l_i) over eigenvalues above the
/// zero clamp. Eigenvalues below the negativity floor are an error.
pub fn spectrum_entropy(eigenvalues: &[f64], base: f64) -> Result<f64, EntropyError> {
    assert!(base > 1.0, "logarithm base must exceed 1");
    let ln_base = base.ln();
    let mut h = 0.0;
    for &l in eigenvalues {
        if l < EIGENVALUE_FLOOR {
            return Err(EntropyError::NegativeEigenvalue(l));
        }
        if l > EIGENVALUE_ZERO {
            h -= l * l.ln() / ln_base;
        }
    }
    Ok(h)
}

/// von Neumann entropy -tr(rho log rho) in units of the given logarithm base
/// (base 2 gives bits).
pub fn von_neumann_entropy(s: &MultipartiteState, base: f64) -> Result<f64, EntropyError> {
    let eig = hermitian_eig(s.rho(), STATE_EIG_TOL)?;
    spectrum_entropy(&eig.eigenvalues, base)
}

/// Entropy of the reduced state on subsystem `k`.
pub fn subsystem_entropy(s: &MultipartiteState, k: usize, base: f64) -> Result<f64, EntropyError> {
    von_neumann_entropy(&partial_trace(s, &[k])?, base)
}

/// Entropy of every single subsystem, in index order.
pub fn subsystem_entropies(s: &MultipartiteState, base: f64) -> Result<Vec<f64>, EntropyError> {
    (0..s.n_subsystems())
        .map(|k| subsystem_entropy(s, k, base))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{classical_correlated, ghz, random_mixed, random_pure, schmidt_state};

    fn binary_entropy_bits(p: f64) -> f64 {
        let q = 1.0 - p;
        -(p * p.log2() + q * q.log2())
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = random_mixed(&[2], 2, 5).unwrap();
        let b = random_mixed(&[3], 3, 6).unwrap();
        let ab = MultipartiteState::product(&a, &b);
        let ra = partial_trace(&ab, &[0]).unwrap();
        let rb = partial_trace(&ab, &[1]).unwrap();
        assert!(ra.rho().max_abs_diff(a.rho()) < 1e-12);
        assert!(rb.rho().max_abs_diff(b.rho()) < 1e-12);
    }

    #[test]
    fn partial_trace_ghz_pair_is_classical_mixture() {
        let g = ghz(3, &[0, 0, 0]).unwrap();
        let pair = partial_trace(&g, &[1, 2]).unwrap();
        let expect = classical_correlated(2).unwrap();
        assert!(pair.rho().max_abs_diff(expect.rho()) < 1e-12);
    }

    #[test]
    fn partial_trace_matches_brute_force_oracle() {
        // Brute-force: rho_keep[(i0,i1),(j0,j1)] = sum_t rho[(i0,t,i1),(j0,t,j1)]
        // on a (2,3,2) system keeping subsystems 0 and 2.
        let s = random_mixed(&[2, 3, 2], 7, 21).unwrap();
        let reduced = partial_trace(&s, &[0, 2]).unwrap();
        let rho = s.rho();
        for i0 in 0..2 {
            for i1 in 0..2 {
                for j0 in 0..2 {
                    for j1 in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for t in 0..3 {
                            let r = i0 * 6 + t * 2 + i1;
                            let c = j0 * 6 + t * 2 + j1;
                            acc += rho.get(r, c);
                        }
                        let got = reduced.rho().get(i0 * 2 + i1, j0 * 2 + j1);
                        assert!((got - acc).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_preserves_trace() {
        for seed in 0..5u64 {
            let s = random_mixed(&[2, 2, 3], 6, seed).unwrap();
            for keep in [&[0usize][..], &[1, 2][..], &[2, 0][..]] {
                let r = partial_trace(&s, keep).unwrap();
                assert!((r.rho().trace().re - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let s = random_pure(&[2, 2], 0);
        assert!(partial_trace(&s, &[]).is_err());
        assert!(partial_trace(&s, &[2]).is_err());
        assert!(partial_trace(&s, &[0, 0]).is_err());
    }

    #[test]
    fn pure_states_have_zero_entropy() {
        let s = random_pure(&[2, 2, 2], 13);
        let h = von_neumann_entropy(&s, 2.0).unwrap();
        assert!(h.abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_qubit_is_one_bit() {
        let g = ghz(2, &[0, 0]).unwrap();
        let m = partial_trace(&g, &[0]).unwrap();
        assert!((von_neumann_entropy(&m, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_matches_binary_entropy_oracle() {
        // diag(1/3, 2/3) -> h(1/3) ~ 0.918296 bits
        let s = schmidt_state(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let m = partial_trace(&s, &[0]).unwrap();
        let h = von_neumann_entropy(&m, 2.0).unwrap();
        assert!((h - binary_entropy_bits(1.0 / 3.0)).abs() < 1e-10);
        assert!((h - 0.918296).abs() < 1e-6);
    }

    #[test]
    fn entropy_in_nats_converts() {
        let g = ghz(2, &[0, 0]).unwrap();
        let m = partial_trace(&g, &[0]).unwrap();
        let nats = von_neumann_entropy(&m, std::f64::consts::E).unwrap();
        assert!((nats - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn pure_bipartite_marginal_entropies_are_equal() {
        for seed in 0..10u64 {
            let s = random_pure(&[2, 3], seed);
            let ha = von_neumann_entropy(&partial_trace(&s, &[0]).unwrap(), 2.0).unwrap();
            let hb = von_neumann_entropy(&partial_trace(&s, &[1]).unwrap(), 2.0).unwrap();
            assert!((ha - hb).abs() <= 1e-8, "seed {seed}: {ha} vs {hb}");
        }
    }

    #[test]
    fn pure_tripartite_complementary_marginals_match() {
        for seed in 0..10u64 {
            let s = random_pure(&[2, 2, 2], seed + 50);
            let h1 = von_neumann_entropy(&partial_trace(&s, &[0]).unwrap(), 2.0).unwrap();
            let h23 = von_neumann_entropy(&partial_trace(&s, &[1, 2]).unwrap(), 2.0).unwrap();
            assert!((h1 - h23).abs() <= 1e-8);
        }
    }

    #[test]
    fn entropy_invariant_under_keep_relabeling() {
        let s = random_mixed(&[2, 2, 3], 5, 77).unwrap();
        let fwd = von_neumann_entropy(&partial_trace(&s, &[0, 2]).unwrap(), 2.0).unwrap();
        let rev = von_neumann_entropy(&partial_trace(&s, &[2, 0]).unwrap(), 2.0).unwrap();
        assert!((fwd - rev).abs() <= 1e-9);
    }

    #[test]
    fn araki_lieb_holds_on_samples() {
        for seed in 0..25u64 {
            let dims: &[usize] = if seed % 2 == 0 { &[2, 2] } else { &[2, 3] };
            let dim: usize = dims.iter().product();
            let rank = 1 + (seed as usize % dim);
            let s = random_mixed(dims, rank, seed).unwrap();
            let h = von_neumann_entropy(&s, 2.0).unwrap();
            let ha = von_neumann_entropy(&partial_trace(&s, &[0]).unwrap(), 2.0).unwrap();
            let hb = von_neumann_entropy(&partial_trace(&s, &[1]).unwrap(), 2.0).unwrap();
            assert!(h >= (ha - hb).abs() - 1e-8, "lower bound, seed {seed}");
            assert!(h <= ha + hb + 1e-8, "subadditivity, seed {seed}");
        }
    }

    #[test]
    fn entropy_bounded_by_log_dim() {
        for seed in 0..10u64 {
            let s = random_mixed(&[2, 3], 6, seed + 200).unwrap();
            let h = von_neumann_entropy(&s, 2.0).unwrap();
            assert!(h >= -1e-9);
            assert!(h <= (6.0_f64).log2() + 1e-9);
        }
    }

    #[test]
    fn spectrum_entropy_rejects_negative_eigenvalues() {
        assert!(matches!(
            spectrum_entropy(&[-1e-6, 1.000001], 2.0),
            Err(EntropyError::NegativeEigenvalue(_))
        ));
        // Values inside the clamp window are treated as zero.
        let h = spectrum_entropy(&[-5e-10, 5e-11, 1.0], 2.0).unwrap();
        assert!(h.abs() < 1e-12);
    }
}
