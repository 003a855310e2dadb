//! Numerical audits of the special role of GHZ-form states.
//!
//! The simultaneous-optimality profile for n qubits is (2, 1, ..., 1) bits
//! across the n-1 terms of the pairwise expansion. This module provides a
//! structural classifier for GHZ-form states (single-qubit marginals
//! maximally mixed, pair marginals rank-2 with locally orthogonal product
//! eigenvectors, and an explicit reconstruction of the local bases that maps
//! the state onto two complementary bit strings), plus sampling and
//! projected-ascent audits that look for non-GHZ states achieving the
//! profile.

use crate::correlation::{index_of_correlation, pairwise_expansion, CorrelationError};
use crate::entropy::{partial_trace, EntropyError};
use crate::linalg::{hermitian_eig, ComplexMatrix, LinalgError};
use crate::states::{ghz, schmidt_state, MultipartiteState, StateError};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// States sampled at random count as profile-achievers within this deviation.
pub const SAMPLING_PROFILE_TOL: f64 = 1e-3;
/// Constructed states must match the profile this tightly.
pub const CONSTRUCTED_PROFILE_TOL: f64 = 1e-8;
/// Ascent outputs within this deviation count as converged optima.
pub const OPTIMIZER_DEVIATION_TOL: f64 = 1e-4;
/// Structural tolerance used when classifying sampled/optimized achievers.
pub const GHZ_STRUCT_TOL: f64 = 5e-2;
/// Structural tolerance used when classifying exactly constructed states.
pub const GHZ_EXACT_TOL: f64 = 1e-6;
/// Iteration cap for one projected-ascent run.
pub const ASCENT_MAX_ITERS: usize = 200;
/// Central-difference step for numerical gradients.
pub const ASCENT_GRAD_STEP: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("n = {n} outside supported range [{min}, {max}]")]
    InvalidArity { n: usize, min: usize, max: usize },

    #[error("state purity deficit {0:.3e} exceeds tolerance")]
    NotPure(f64),

    #[error("all subsystems must be qubits")]
    NotQubits,

    #[error(transparent)]
    Correlation(#[from] CorrelationError),

    #[error(transparent)]
    Entropy(#[from] EntropyError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error(transparent)]
    State(#[from] StateError),
}

/// The simultaneously optimal pairwise profile for n qubits:
/// (2, 1, ..., 1) bits, length n-1, summing to n.
pub fn optimal_profile(n: usize) -> Result<Vec<f64>, AuditError> {
    if n < 2 {
        return Err(AuditError::InvalidArity {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let mut profile = vec![1.0; n - 1];
    profile[0] = 2.0;
    Ok(profile)
}

/// Largest absolute deviation of a profile from its target.
pub fn profile_deviation(profile: &[f64], target: &[f64]) -> f64 {
    profile
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t).abs())
        .fold(0.0, f64::max)
}

/// Outcome of an optimization or uniqueness audit.
///
/// `profile`/`max_dev`/`best_objective` describe the best candidate found;
/// `ghz_form` is the audit verdict (for [`audit_simultaneous_optimality`]:
/// every simultaneous profile-achiever passed the structural GHZ test; for
/// [`maximize_index`]: the best state itself passed). Fields not in the
/// serialized schema carry diagnostics for text reports.
#[derive(Debug, Clone, Serialize)]
pub struct AuditResult {
    pub n: usize,
    pub profile: Vec<f64>,
    pub target: Vec<f64>,
    pub max_dev: f64,
    pub ghz_form: bool,
    pub best_objective: f64,
    pub starts: usize,
    pub seed: u64,
    #[serde(skip)]
    pub trials: usize,
    #[serde(skip)]
    pub achievers: usize,
    #[serde(skip)]
    pub non_ghz_achievers: usize,
    /// States matching the stored-order profile but not the profile under
    /// every relabeling. These exist for n >= 4 and are not simultaneous
    /// optimizers; see [`audit_simultaneous_optimality`].
    #[serde(skip)]
    pub single_order_achievers: usize,
    #[serde(skip)]
    pub iterations: usize,
}

/// Largest deviation of any proper-subset entropy from one bit.
///
/// Achieving the pairwise profile (2, 1, ..., 1) under *every* qubit
/// ordering is equivalent to every proper nonempty subset of the qubits
/// carrying exactly one bit of entropy: the first term pins the single-qubit
/// marginals and each later term propagates S(T + {k}) = S(T) down every
/// tail chain. This quantity therefore measures simultaneous (rather than
/// stored-order) profile achievement.
pub fn subset_entropy_deviation(s: &MultipartiteState) -> Result<f64, AuditError> {
    let n = s.n_subsystems();
    let mut worst = 0.0f64;
    for mask in 1..(1usize << n) - 1 {
        let keep: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let h = crate::entropy::von_neumann_entropy(&partial_trace(s, &keep)?, 2.0)?;
        worst = worst.max((h - 1.0).abs());
    }
    Ok(worst)
}

/// Structural GHZ-form classifier.
///
/// Returns true iff there exist per-qubit orthonormal bases in which the
/// state reads (|b_0 ... b_(n-1)> + e^(i phi) |complement>)/sqrt(2). The
/// test is constructive: every single-qubit marginal must be maximally
/// mixed within `tol`; every pair marginal must have exactly two eigenvalues
/// 1/2 whose shared eigenspace contains two product states with locally
/// orthogonal factors; the local bases recovered from the pairs anchored at
/// qubit 0 are then applied to the state, which must leave exactly two
/// amplitudes of squared magnitude 1/2 on complementary bit strings. The
/// relative phase between the two branches is unconstrained, and the verdict
/// is invariant under per-qubit local unitaries.
pub fn check_ghz_form(s: &MultipartiteState, tol: f64) -> Result<bool, AuditError> {
    let n = s.n_subsystems();
    if n < 2 {
        return Err(AuditError::InvalidArity {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    if s.dims().iter().any(|&d| d != 2) {
        return Err(AuditError::NotQubits);
    }
    let purity_deficit = 1.0 - s.purity();
    if purity_deficit > tol {
        return Err(AuditError::NotPure(purity_deficit));
    }

    // Single-qubit marginals must be maximally mixed.
    for k in 0..n {
        let m = partial_trace(s, &[k])?;
        let eig = hermitian_eig(m.rho(), 1e-8)?;
        if eig.eigenvalues.iter().any(|l| (l - 0.5).abs() > tol) {
            return Ok(false);
        }
    }
    if n == 2 {
        // A pure two-qubit state with maximally mixed marginals has Schmidt
        // coefficients (1/2, 1/2), which is exactly the GHZ-2 (Bell) class.
        return Ok(true);
    }

    // Pair marginals: exactly two eigenvalues 1/2, the rest zero.
    let mut anchored: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        for j in i + 1..n {
            let m = partial_trace(s, &[i, j])?;
            let eig = hermitian_eig(m.rho(), 1e-8)?;
            let ev = &eig.eigenvalues;
            if (ev[3] - 0.5).abs() > tol
                || (ev[2] - 0.5).abs() > tol
                || ev[1].abs() > tol
                || ev[0].abs() > tol
            {
                return Ok(false);
            }
            if i == 0 {
                anchored.push((
                    eig.eigenvectors.column_vec(2),
                    eig.eigenvectors.column_vec(3),
                ));
            }
        }
    }

    // Recover per-qubit bases from the pairs (0, j). Each half-eigenspace
    // contains exactly two product states when the state is GHZ-form.
    let mut u_local: Vec<[Complex64; 2]> = vec![[Complex64::new(0.0, 0.0); 2]; n];
    let mut v_local: Vec<[Complex64; 2]> = vec![[Complex64::new(0.0, 0.0); 2]; n];
    for (j, (w1, w2)) in anchored.iter().enumerate() {
        let qubit = j + 1;
        let Some((cand_a, cand_b)) = product_pair_in_span(w1, w2) else {
            return Ok(false);
        };
        let (fa0, fa1) = match split_two_qubit_product(&cand_a) {
            Some(f) => f,
            None => return Ok(false),
        };
        let (fb0, fb1) = match split_two_qubit_product(&cand_b) {
            Some(f) => f,
            None => return Ok(false),
        };
        if qubit == 1 {
            // First anchor fixes the basis of qubit 0 and qubit 1.
            if overlap(&fa0, &fb0) > 0.5 || overlap(&fa1, &fb1) > 0.5 {
                return Ok(false);
            }
            u_local[0] = fa0;
            v_local[0] = fb0;
            u_local[1] = fa1;
            v_local[1] = fb1;
        } else {
            // Align this pair's qubit-0 factor with the established basis.
            let to_u = overlap(&fa0, &u_local[0]);
            let to_v = overlap(&fa0, &v_local[0]);
            if to_u > to_v {
                if to_u < 0.5 {
                    return Ok(false);
                }
                u_local[qubit] = fa1;
                v_local[qubit] = fb1;
            } else {
                if to_v < 0.5 {
                    return Ok(false);
                }
                u_local[qubit] = fb1;
                v_local[qubit] = fa1;
            }
        }
    }

    // Rotate the state into the recovered bases and demand support on two
    // complementary bit strings with weight 1/2 each.
    let mut amps = pure_amplitudes(s);
    for (k, (u, v)) in u_local.iter().zip(&v_local).enumerate() {
        let gate = [[u[0].conj(), u[1].conj()], [v[0].conj(), v[1].conj()]];
        apply_qubit_gate(&mut amps, n, k, &gate);
    }
    let probs: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let top = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let comp = ((1usize << n) - 1) ^ top;
    let p1 = probs[top];
    let p2 = probs[comp];
    if (p1 - 0.5).abs() > tol || (p2 - 0.5).abs() > tol {
        return Ok(false);
    }
    if (1.0 - p1 - p2).abs() > tol {
        return Ok(false);
    }
    Ok(true)
}

/// |<a|b>| for single-qubit vectors.
fn overlap(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm()
}

/// Amplitudes of a (near-)pure state from the dominant column of rho.
fn pure_amplitudes(s: &MultipartiteState) -> Vec<Complex64> {
    let rho = s.rho();
    let d = rho.rows();
    let mut best = 0;
    let mut best_val = -1.0;
    for j in 0..d {
        let v = rho.get(j, j).re;
        if v > best_val {
            best_val = v;
            best = j;
        }
    }
    let norm = best_val.max(f64::MIN_POSITIVE).sqrt();
    (0..d).map(|i| rho.get(i, best) / norm).collect()
}

/// In-place single-qubit gate on an n-qubit amplitude vector (big-endian).
fn apply_qubit_gate(amps: &mut [Complex64], n: usize, k: usize, u: &[[Complex64; 2]; 2]) {
    let stride = 1usize << (n - 1 - k);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for offset in base..base + stride {
            let a0 = amps[offset];
            let a1 = amps[offset + stride];
            amps[offset] = u[0][0] * a0 + u[0][1] * a1;
            amps[offset + stride] = u[1][0] * a0 + u[1][1] * a1;
        }
        base += 2 * stride;
    }
}

/// The two product states inside span{w1, w2} of a two-qubit space, if they
/// exist. A combination alpha w1 + beta w2 is a product state iff its 2x2
/// amplitude matrix is singular, which reduces to a homogeneous quadratic in
/// (alpha, beta).
fn product_pair_in_span(
    w1: &[Complex64],
    w2: &[Complex64],
) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let det = |w: &[Complex64]| w[0] * w[3] - w[1] * w[2];
    let sum: Vec<Complex64> = w1.iter().zip(w2).map(|(a, b)| a + b).collect();
    let a = det(w1);
    let c = det(w2);
    let m = det(&sum) - a - c;
    let (r1, r2) = solve_homogeneous_quadratic(a, m, c)?;
    let build = |(alpha, beta): (Complex64, Complex64)| -> Vec<Complex64> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        w1.iter()
            .zip(w2)
            .map(|(x, y)| (x * alpha + y * beta) / norm)
            .collect()
    };
    Some((build(r1), build(r2)))
}

/// Roots of a alpha^2 + m alpha beta + c beta^2 = 0 as projective pairs
/// (alpha, beta); None when the form is degenerate or the roots coincide.
fn solve_homogeneous_quadratic(
    a: Complex64,
    m: Complex64,
    c: Complex64,
) -> Option<((Complex64, Complex64), (Complex64, Complex64))> {
    let scale = a.norm().max(m.norm()).max(c.norm());
    if scale == 0.0 {
        return None;
    }
    let (a, m, c) = (a / scale, m / scale, c / scale);
    let one = Complex64::new(1.0, 0.0);
    let tiny = 1e-12;

    let roots = if a.norm() <= tiny {
        if m.norm() <= tiny {
            return None; // c beta^2 = 0 has a double root at (1, 0)
        }
        ((one, Complex64::new(0.0, 0.0)), (-c / m, one))
    } else {
        let disc = (m * m - a * c * 4.0).sqrt();
        let plus = m + disc;
        let minus = m - disc;
        let q = if plus.norm() >= minus.norm() {
            -plus * 0.5
        } else {
            -minus * 0.5
        };
        if q.norm() <= tiny {
            return None; // double root at the origin of the chart
        }
        ((q / a, one), (c / q, one))
    };

    // Reject (near-)coincident projective roots.
    let ((a1, b1), (a2, b2)) = roots;
    let n1 = (a1.norm_sqr() + b1.norm_sqr()).sqrt();
    let n2 = (a2.norm_sqr() + b2.norm_sqr()).sqrt();
    let cross = (a1 * b2 - a2 * b1).norm() / (n1 * n2);
    if cross < 1e-6 {
        return None;
    }
    Some(roots)
}

/// Factor a two-qubit product state into its single-qubit parts. Returns
/// None when either marginal is too mixed for the vector to be a product.
fn split_two_qubit_product(w: &[Complex64]) -> Option<([Complex64; 2], [Complex64; 2])> {
    let factor = |m: [[Complex64; 2]; 2]| -> Option<[Complex64; 2]> {
        let mat = ComplexMatrix::from_rows(&[vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]]);
        let eig = hermitian_eig(&mat, 1e-6).ok()?;
        // Ascending order: the principal eigenvector is the last column.
        if eig.eigenvalues[1] < 0.8 {
            return None;
        }
        let col = eig.eigenvectors.column_vec(1);
        Some([col[0], col[1]])
    };
    // Marginal of qubit 0: rho0[i][j] = sum_k w[i*2+k] conj(w[j*2+k])
    let rho0 = [
        [
            w[0] * w[0].conj() + w[1] * w[1].conj(),
            w[0] * w[2].conj() + w[1] * w[3].conj(),
        ],
        [
            w[2] * w[0].conj() + w[3] * w[1].conj(),
            w[2] * w[2].conj() + w[3] * w[3].conj(),
        ],
    ];
    // Marginal of qubit 1: rho1[i][j] = sum_k w[k*2+i] conj(w[k*2+j])
    let rho1 = [
        [
            w[0] * w[0].conj() + w[2] * w[2].conj(),
            w[0] * w[1].conj() + w[2] * w[3].conj(),
        ],
        [
            w[1] * w[0].conj() + w[3] * w[2].conj(),
            w[1] * w[1].conj() + w[3] * w[3].conj(),
        ],
    ];
    Some((factor(rho0)?, factor(rho1)?))
}

fn qubit_state_from_amps(amps: &[Complex64], n: usize) -> MultipartiteState {
    MultipartiteState::from_parts_unchecked(ComplexMatrix::outer(amps), vec![2; n])
}

/// Sampling + optimization audit of the claim that only GHZ-form states
/// simultaneously achieve the profile (2, 1, ..., 1).
///
/// A state counts as a simultaneous achiever when its stored-order pairwise
/// expansion matches the profile *and* the match survives every relabeling
/// of the qubits (checked through [`subset_entropy_deviation`]). Matching
/// the stored order alone is not enough: for n >= 4 there are pure states
/// whose expansion reads (2, 1, ..., 1) in one ordering while other pair
/// marginals carry more than one bit; these are counted separately and are
/// not simultaneous optimizers.
///
/// For `trials` seeded Haar-random pure states the expansion is evaluated
/// directly; any simultaneous achiever (within 1e-3 bits) must pass the
/// structural GHZ test. `starts` optimizer runs then hunt for achievers:
/// projected ascent on the min-slack objective, followed by Gauss-Newton
/// refinement first on the stored-order residuals (which surfaces the
/// single-order states) and then on the all-subset residuals. Every
/// converged optimum (deviation below 1e-4) must pass the GHZ test.
/// Constructed probes run alongside: a GHZ state must achieve the profile
/// exactly, and for even n >= 4 a product of Bell pairs, despite maximizing
/// the total index, must be rejected as a non-simultaneous optimizer.
pub fn audit_simultaneous_optimality(
    n: usize,
    trials: usize,
    starts: usize,
    seed: u64,
) -> Result<AuditResult, AuditError> {
    if !(2..=8).contains(&n) {
        return Err(AuditError::InvalidArity { n, min: 2, max: 8 });
    }
    let target = optimal_profile(n)?;
    let mut achievers = 0usize;
    let mut non_ghz = 0usize;
    let mut single_order = 0usize;
    let mut probes_ok = true;

    // Probe: the GHZ state achieves the profile exactly, under every
    // ordering, and is classified as GHZ-form.
    let g = ghz(n, &vec![0u8; n])?;
    let g_profile = pairwise_expansion(&g, 2.0)?;
    let g_dev = profile_deviation(&g_profile, &target);
    if g_dev > CONSTRUCTED_PROFILE_TOL
        || subset_entropy_deviation(&g)? > CONSTRUCTED_PROFILE_TOL
        || !check_ghz_form(&g, GHZ_EXACT_TOL)?
    {
        probes_ok = false;
    }

    // Probe: a product of Bell pairs maximizes the index but must not match
    // the simultaneous profile.
    if n >= 4 && n.is_multiple_of(2) {
        let bell = schmidt_state(&[0.5, 0.5])?;
        let mut state = bell.clone();
        for _ in 1..n / 2 {
            state = MultipartiteState::product(&state, &bell);
        }
        let profile = pairwise_expansion(&state, 2.0)?;
        if profile_deviation(&profile, &target) < SAMPLING_PROFILE_TOL {
            probes_ok = false;
        }
    }

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let trial_seeds: Vec<u64> = (0..trials).map(|_| master.next_u64()).collect();
    let start_seeds: Vec<u64> = (0..starts).map(|_| master.next_u64()).collect();

    // classify() buckets one candidate and enforces the GHZ assertion on
    // simultaneous achievers.
    let mut classify = |st: &MultipartiteState, tol: f64| -> Result<(), AuditError> {
        let profile = pairwise_expansion(st, 2.0)?;
        if profile_deviation(&profile, &target) >= tol {
            return Ok(());
        }
        if subset_entropy_deviation(st)? < tol.max(OPTIMIZER_DEVIATION_TOL) {
            achievers += 1;
            if !check_ghz_form(st, GHZ_STRUCT_TOL)? {
                non_ghz += 1;
            }
        } else {
            single_order += 1;
        }
        Ok(())
    };

    for &ts in &trial_seeds {
        let amps = crate::states::random_pure_amplitudes(1 << n, ts);
        let st = qubit_state_from_amps(&amps, n);
        classify(&st, SAMPLING_PROFILE_TOL)?;
    }

    let objective = |amps: &[Complex64]| -> Result<f64, AuditError> {
        let st = qubit_state_from_amps(amps, n);
        let profile = pairwise_expansion(&st, 2.0)?;
        Ok(profile
            .iter()
            .zip(&target)
            .map(|(p, t)| p - t)
            .fold(f64::INFINITY, f64::min))
    };
    // Stored-order residuals: the n-1 expansion terms against the profile.
    let order_residuals = |amps: &[Complex64]| -> Result<Vec<f64>, AuditError> {
        let st = qubit_state_from_amps(amps, n);
        let profile = pairwise_expansion(&st, 2.0)?;
        Ok(profile.iter().zip(&target).map(|(p, t)| p - t).collect())
    };
    // Simultaneous residuals: every proper-subset entropy against one bit.
    let subset_masks: Vec<Vec<usize>> = (1..(1usize << n) - 1)
        .map(|mask| (0..n).filter(|k| mask & (1 << k) != 0).collect())
        .collect();
    let subset_residuals = |amps: &[Complex64]| -> Result<Vec<f64>, AuditError> {
        let st = qubit_state_from_amps(amps, n);
        subset_masks
            .iter()
            .map(|keep| {
                Ok(crate::entropy::von_neumann_entropy(&partial_trace(&st, keep)?, 2.0)? - 1.0)
            })
            .collect()
    };

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut iterations = 0usize;
    for &ss in &start_seeds {
        let x0 = crate::states::random_pure_amplitudes(1 << n, ss);
        // Global phase: ascend the min-slack objective. The surface is flat
        // to fourth order at the corner, so ascent alone stalls around 1e-2;
        // Gauss-Newton passes on the residual systems finish the job.
        let (x, _, iters) = ascend(&objective, x0, ASCENT_MAX_ITERS)?;
        iterations += iters;
        let (x_order, order_iters) = gauss_newton_refine(&order_residuals, x.clone())?;
        iterations += order_iters;
        let st_order = qubit_state_from_amps(&x_order, n);
        classify(&st_order, OPTIMIZER_DEVIATION_TOL)?;

        let (x_sim, sim_iters) = gauss_newton_refine(&subset_residuals, x)?;
        iterations += sim_iters;
        let st_sim = qubit_state_from_amps(&x_sim, n);
        classify(&st_sim, OPTIMIZER_DEVIATION_TOL)?;

        let obj = objective(&x_sim)?;
        let profile = pairwise_expansion(&st_sim, 2.0)?;
        let dev = profile_deviation(&profile, &target);
        if best.as_ref().is_none_or(|(b, _, _)| obj > *b) {
            best = Some((obj, profile, dev));
        }
    }

    // Describe the best candidate found; with no optimizer starts fall back
    // to the exact GHZ probe.
    let (best_objective, profile, max_dev) = match best {
        Some((obj, profile, dev)) => (obj, profile, dev),
        None => (
            g_profile
                .iter()
                .zip(&target)
                .map(|(p, t)| p - t)
                .fold(f64::INFINITY, f64::min),
            g_profile,
            g_dev,
        ),
    };

    Ok(AuditResult {
        n,
        profile,
        target,
        max_dev,
        ghz_form: probes_ok && non_ghz == 0,
        best_objective,
        starts,
        seed,
        trials,
        achievers,
        non_ghz_achievers: non_ghz,
        single_order_achievers: single_order,
        iterations,
    })
}

/// Multi-start projected gradient ascent on the index of correlation over
/// pure n-qubit states. For pure states the index reduces to the sum of the
/// single-qubit entropies, which is what the inner loop evaluates; the
/// reported best objective is recomputed through the full definition.
pub fn maximize_index(n: usize, starts: usize, seed: u64) -> Result<AuditResult, AuditError> {
    if !(2..=6).contains(&n) {
        return Err(AuditError::InvalidArity { n, min: 2, max: 6 });
    }
    let target = optimal_profile(n)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let start_seeds: Vec<u64> = (0..starts).map(|_| master.next_u64()).collect();

    let objective =
        |amps: &[Complex64]| -> Result<f64, AuditError> { Ok(marginal_entropy_sum(amps, n)) };

    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut iterations = 0usize;
    for &ss in &start_seeds {
        let x0 = crate::states::random_pure_amplitudes(1 << n, ss);
        let (x, obj, iters) = ascend(&objective, x0, ASCENT_MAX_ITERS)?;
        iterations += iters;
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, x));
        }
    }

    let (profile, max_dev, best_objective, ghz_form) = match best {
        Some((_, amps)) => {
            let st = qubit_state_from_amps(&amps, n);
            let profile = pairwise_expansion(&st, 2.0)?;
            let dev = profile_deviation(&profile, &target);
            let full_index = index_of_correlation(&st, 2.0)?;
            let ghz_form = check_ghz_form(&st, GHZ_STRUCT_TOL)?;
            (profile, dev, full_index, ghz_form)
        }
        None => {
            // No starts requested: report the exact GHZ reference point.
            let g = ghz(n, &vec![0u8; n])?;
            let profile = pairwise_expansion(&g, 2.0)?;
            let dev = profile_deviation(&profile, &target);
            let idx = index_of_correlation(&g, 2.0)?;
            (profile, dev, idx, true)
        }
    };

    Ok(AuditResult {
        n,
        profile,
        target,
        max_dev,
        ghz_form,
        best_objective,
        starts,
        seed,
        trials: 0,
        achievers: 0,
        non_ghz_achievers: 0,
        single_order_achievers: 0,
        iterations,
    })
}

/// Sum of single-qubit marginal entropies (bits) straight from amplitudes;
/// equals the index of correlation for pure states.
fn marginal_entropy_sum(amps: &[Complex64], n: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..n {
        let stride = 1usize << (n - 1 - k);
        let dim = amps.len();
        let mut p00 = 0.0f64;
        let mut p11 = 0.0f64;
        let mut off = Complex64::new(0.0, 0.0);
        let mut base = 0;
        while base < dim {
            for offset in base..base + stride {
                let a0 = amps[offset];
                let a1 = amps[offset + stride];
                p00 += a0.norm_sqr();
                p11 += a1.norm_sqr();
                off += a0 * a1.conj();
            }
            base += 2 * stride;
        }
        // Eigenvalues of the 2x2 marginal in closed form.
        let tr = p00 + p11;
        let gap = ((p00 - p11) * (p00 - p11) + 4.0 * off.norm_sqr()).sqrt();
        let l1 = 0.5 * (tr + gap);
        let l2 = 0.5 * (tr - gap);
        for l in [l1, l2] {
            if l > 1e-12 {
                total -= l * l.log2();
            }
        }
    }
    total
}

/// Damped Gauss-Newton iteration driving a residual vector to zero over the
/// sphere of amplitude vectors. The systems here are underdetermined (few
/// residuals, 2^(n+1) real parameters), so each step is the minimum-norm
/// solution of the linearized equations.
#[allow(clippy::needless_range_loop)]
fn gauss_newton_refine<F>(
    residuals: &F,
    mut x: Vec<Complex64>,
) -> Result<(Vec<Complex64>, usize), AuditError>
where
    F: Fn(&[Complex64]) -> Result<Vec<f64>, AuditError>,
{
    normalize(&mut x);
    let m = residuals(&x)?.len();
    let h = ASCENT_GRAD_STEP;
    let dim2 = 2 * x.len();
    let mut iters = 0usize;

    for _ in 0..ASCENT_MAX_ITERS {
        iters += 1;
        let r = residuals(&x)?;
        let rn2: f64 = r.iter().map(|v| v * v).sum();
        if rn2.sqrt() < 1e-9 {
            break;
        }
        let mut jac = vec![vec![0.0f64; dim2]; m];
        for i in 0..dim2 {
            let mut xp = x.clone();
            bump(&mut xp, i, h);
            normalize(&mut xp);
            let rp = residuals(&xp)?;
            let mut xm = x.clone();
            bump(&mut xm, i, -h);
            normalize(&mut xm);
            let rm = residuals(&xm)?;
            for k in 0..m {
                jac[k][i] = (rp[k] - rm[k]) / (2.0 * h);
            }
        }
        // Normal system (J J^T + damping) y = r; step = -J^T y.
        let mut gram = vec![vec![0.0f64; m]; m];
        for p in 0..m {
            for q in 0..m {
                gram[p][q] = (0..dim2).map(|i| jac[p][i] * jac[q][i]).sum();
            }
        }
        let damping = 1e-10 * (0..m).map(|p| gram[p][p]).sum::<f64>().max(1e-30);
        for (p, row) in gram.iter_mut().enumerate() {
            row[p] += damping;
        }
        let Some(y) = solve_small_system(gram, r.clone()) else {
            break;
        };

        let mut step = 1.0f64;
        let mut improved = false;
        while step > 1e-10 {
            let mut xt = x.clone();
            for i in 0..dim2 {
                let d: f64 = -(0..m).map(|k| jac[k][i] * y[k]).sum::<f64>();
                bump(&mut xt, i, step * d);
            }
            normalize(&mut xt);
            let rt = residuals(&xt)?;
            let rtn2: f64 = rt.iter().map(|v| v * v).sum();
            if rtn2 < rn2 * (1.0 - 1e-4 * step) {
                x = xt;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((x, iters))
}

/// Gaussian elimination with partial pivoting for the tiny normal systems.
#[allow(clippy::needless_range_loop)]
fn solve_small_system(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let mut piv = col;
        for row in col + 1..m {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        if a[col][col].abs() < 1e-300 {
            return None;
        }
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for c in col..m {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..m).rev() {
        for c in col + 1..m {
            b[col] -= a[col][c] * b[c];
        }
        b[col] /= a[col][col];
    }
    Some(b)
}

/// Projected gradient ascent on the unit sphere of amplitude vectors:
/// central-difference gradients of f(x / |x|) with backtracking line search.
#[allow(clippy::needless_range_loop)]
fn ascend<F>(
    f: &F,
    mut x: Vec<Complex64>,
    max_iters: usize,
) -> Result<(Vec<Complex64>, f64, usize), AuditError>
where
    F: Fn(&[Complex64]) -> Result<f64, AuditError>,
{
    normalize(&mut x);
    let mut fx = f(&x)?;
    let h = ASCENT_GRAD_STEP;
    let dim2 = 2 * x.len();
    let mut step: f64 = 0.5;
    let mut iters = 0;

    for _ in 0..max_iters {
        iters += 1;
        let mut grad = vec![0.0f64; dim2];
        for i in 0..dim2 {
            let mut xp = x.clone();
            bump(&mut xp, i, h);
            normalize(&mut xp);
            let fp = f(&xp)?;
            let mut xm = x.clone();
            bump(&mut xm, i, -h);
            normalize(&mut xm);
            let fm = f(&xm)?;
            grad[i] = (fp - fm) / (2.0 * h);
        }
        let gn2: f64 = grad.iter().map(|g| g * g).sum();
        if gn2.sqrt() < 1e-9 {
            break;
        }

        step = (step * 2.0).min(1.0);
        let mut improved = false;
        while step > 1e-12 {
            let mut xt = x.clone();
            for (i, g) in grad.iter().enumerate() {
                bump(&mut xt, i, step * g);
            }
            normalize(&mut xt);
            let ft = f(&xt)?;
            if ft > fx + 1e-4 * step * gn2 {
                x = xt;
                fx = ft;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((x, fx, iters))
}

fn normalize(x: &mut [Complex64]) {
    let norm = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in x.iter_mut() {
            *a /= norm;
        }
    }
}

fn bump(x: &mut [Complex64], component: usize, delta: f64) {
    let idx = component / 2;
    if component.is_multiple_of(2) {
        x[idx].re += delta;
    } else {
        x[idx].im += delta;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{apply_local_unitaries, random_pure, random_unitary};

    fn w_state() -> MultipartiteState {
        let a = 1.0 / 3.0_f64.sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[1] = Complex64::new(a, 0.0); // |001>
        amps[2] = Complex64::new(a, 0.0); // |010>
        amps[4] = Complex64::new(a, 0.0); // |100>
        MultipartiteState::from_amplitudes(&amps, &[2, 2, 2]).unwrap()
    }

    #[test]
    fn optimal_profile_shape() {
        assert_eq!(optimal_profile(2).unwrap(), vec![2.0]);
        assert_eq!(optimal_profile(4).unwrap(), vec![2.0, 1.0, 1.0]);
        for n in 2..=8 {
            let p = optimal_profile(n).unwrap();
            assert_eq!(p.len(), n - 1);
            assert_eq!(p.iter().sum::<f64>(), n as f64);
        }
        assert!(optimal_profile(1).is_err());
    }

    #[test]
    fn ghz_states_pass_the_classifier() {
        for n in 2..=5usize {
            let g = ghz(n, &vec![0u8; n]).unwrap();
            assert!(check_ghz_form(&g, GHZ_EXACT_TOL).unwrap(), "n = {n}");
        }
        // Arbitrary bit patterns too.
        let g = ghz(4, &[0, 1, 1, 0]).unwrap();
        assert!(check_ghz_form(&g, GHZ_EXACT_TOL).unwrap());
    }

    #[test]
    fn classifier_is_invariant_under_local_unitaries() {
        for seed in 0..8u64 {
            let g = ghz(3, &[0, 1, 0]).unwrap();
            let us: Vec<ComplexMatrix> = (0..3)
                .map(|k| random_unitary(2, seed * 31 + k as u64))
                .collect();
            let rotated = apply_local_unitaries(&g, &us).unwrap();
            assert!(
                check_ghz_form(&rotated, GHZ_EXACT_TOL).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn w_state_is_rejected() {
        // Single-qubit marginals of the W state have spectrum (2/3, 1/3).
        assert!(!check_ghz_form(&w_state(), GHZ_EXACT_TOL).unwrap());
    }

    #[test]
    fn product_and_bell_pair_states_are_rejected() {
        let prod = random_pure(&[2], 1);
        let prod3 = MultipartiteState::product(
            &MultipartiteState::product(&prod, &random_pure(&[2], 2)),
            &random_pure(&[2], 3),
        );
        assert!(!check_ghz_form(&prod3, GHZ_EXACT_TOL).unwrap());

        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        let two_bells = MultipartiteState::product(&bell, &bell);
        // Single-qubit marginals are maximally mixed, but the cross pair
        // marginals are rank 4.
        assert!(!check_ghz_form(&two_bells, GHZ_EXACT_TOL).unwrap());
    }

    #[test]
    fn skewed_entangled_pair_is_rejected() {
        let s = schmidt_state(&[0.8, 0.2]).unwrap();
        assert!(!check_ghz_form(&s, GHZ_EXACT_TOL).unwrap());
    }

    #[test]
    fn classifier_rejects_mixed_and_non_qubit_inputs() {
        let mixed = crate::states::classical_correlated(3).unwrap();
        assert!(matches!(
            check_ghz_form(&mixed, 1e-6),
            Err(AuditError::NotPure(_))
        ));
        let qutrit = random_pure(&[3, 3], 4);
        assert!(matches!(
            check_ghz_form(&qutrit, 1e-6),
            Err(AuditError::NotQubits)
        ));
    }

    #[test]
    fn pair_marginal_spectra_certify_higher_marginals() {
        // Cross-check the classifier against the full marginal-spectrum
        // condition on a mid-sized instance: every k-qubit marginal of a
        // rotated GHZ state has exactly two eigenvalues 1/2.
        let g = ghz(5, &[0, 1, 0, 0, 1]).unwrap();
        let us: Vec<ComplexMatrix> = (0..5).map(|k| random_unitary(2, 900 + k as u64)).collect();
        let s = apply_local_unitaries(&g, &us).unwrap();
        assert!(check_ghz_form(&s, GHZ_EXACT_TOL).unwrap());
        let subsets: Vec<Vec<usize>> = vec![
            vec![0, 1],
            vec![1, 3],
            vec![0, 2, 4],
            vec![1, 2, 3],
            vec![0, 1, 2, 3],
            vec![1, 2, 3, 4],
        ];
        for keep in subsets {
            let m = partial_trace(&s, &keep).unwrap();
            let eig = hermitian_eig(m.rho(), 1e-8).unwrap();
            let ev = eig.eigenvalues;
            let d = ev.len();
            assert!((ev[d - 1] - 0.5).abs() < 1e-9);
            assert!((ev[d - 2] - 0.5).abs() < 1e-9);
            for &l in &ev[..d - 2] {
                assert!(l.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn audit_ghz_probe_and_bell_probe() {
        let res = audit_simultaneous_optimality(4, 50, 0, 11).unwrap();
        assert!(res.ghz_form, "probes or sampled achievers failed");
        assert_eq!(res.trials, 50);
        // With no optimizer starts the reported profile is the GHZ probe.
        assert!(res.max_dev <= 1e-8);
    }

    #[test]
    fn audit_sampling_finds_no_spurious_achievers() {
        let res = audit_simultaneous_optimality(3, 200, 0, 5).unwrap();
        assert_eq!(res.non_ghz_achievers, 0);
        assert!(res.ghz_form);
    }

    #[test]
    fn audit_optimizer_converges_to_ghz_form() {
        let res = audit_simultaneous_optimality(3, 0, 4, 123).unwrap();
        assert!(res.ghz_form);
        assert!(
            res.max_dev < OPTIMIZER_DEVIATION_TOL,
            "ascent did not reach the profile: dev = {}, profile = {:?}",
            res.max_dev,
            res.profile
        );
        assert!(res.achievers >= 1);
    }

    #[test]
    fn audit_separates_single_order_matches_at_n4() {
        // For four qubits there are pure states whose stored-order expansion
        // reads (2, 1, 1) even though other pair marginals exceed one bit.
        // The optimizer finds them; they must be bucketed as stored-order
        // matches, not as simultaneous achievers, and every simultaneous
        // achiever must be GHZ-form.
        let res = audit_simultaneous_optimality(4, 0, 2, 777).unwrap();
        assert!(res.single_order_achievers >= 1, "{res:?}");
        assert_eq!(res.non_ghz_achievers, 0, "{res:?}");
        assert!(res.ghz_form);
        assert!(res.achievers >= 1);
        assert!(res.max_dev < OPTIMIZER_DEVIATION_TOL);
    }

    #[test]
    fn subset_deviation_distinguishes_ghz_from_bell_products() {
        let g = ghz(4, &[0, 0, 0, 0]).unwrap();
        assert!(subset_entropy_deviation(&g).unwrap() < 1e-10);
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        let two_bells = MultipartiteState::product(&bell, &bell);
        // The (0,1) pair of a Bell product is pure: deviation a full bit.
        let dev = subset_entropy_deviation(&two_bells).unwrap();
        assert!((dev - 1.0).abs() < 1e-9, "dev {dev}");
    }

    #[test]
    fn audit_rejects_bad_arity() {
        assert!(matches!(
            audit_simultaneous_optimality(1, 1, 0, 0),
            Err(AuditError::InvalidArity { .. })
        ));
        assert!(matches!(
            audit_simultaneous_optimality(9, 1, 0, 0),
            Err(AuditError::InvalidArity { .. })
        ));
    }

    #[test]
    fn maximize_index_reaches_known_optima() {
        let res2 = maximize_index(2, 6, 21).unwrap();
        assert!(res2.best_objective >= 1.99, "n=2: {}", res2.best_objective);
        let res3 = maximize_index(3, 8, 22).unwrap();
        assert!(res3.best_objective >= 2.99, "n=3: {}", res3.best_objective);
        // The bound I <= n is never exceeded.
        assert!(res2.best_objective <= 2.0 + 1e-6);
        assert!(res3.best_objective <= 3.0 + 1e-6);
    }

    #[test]
    fn double_ghz_evaluates_to_six_bits_without_optimization() {
        let g = ghz(3, &[0, 0, 0]).unwrap();
        let double = MultipartiteState::product(&g, &g);
        let idx = index_of_correlation(&double, 2.0).unwrap();
        assert!((idx - 6.0).abs() < 1e-8);
    }

    #[test]
    fn bell_pair_anywhere_decouples_the_rest() {
        // A Bell pair on the last two qubits of a product forces
        // I(n-2; [(n-1) n]) = 0 exactly.
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        for seed in 0..5u64 {
            let head = random_pure(&[2, 2], seed + 70);
            let s = MultipartiteState::product(&head, &bell);
            let i = crate::correlation::mutual_information(&s, &[1], &[2, 3], 2.0).unwrap();
            assert!(i.abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn near_maximal_pair_correlation_excludes_third_parties() {
        // Monogamy-flavoured bound: perturb Bell (x) (random pair) slightly;
        // whenever I(2;3) stays within 1e-3 of 2 bits, I(1;[23]) stays small.
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        let mut checked = 0;
        for seed in 0..6u64 {
            let head = random_pure(&[2, 2], seed + 800);
            let base = MultipartiteState::product(&head, &bell);
            let base_amps = pure_amplitudes(&base);
            for (k, delta) in [(0usize, 0.0f64), (1, 0.002), (2, 0.004)] {
                let noise = crate::states::random_pure_amplitudes(16, seed * 10 + k as u64);
                let mut amps: Vec<Complex64> = base_amps
                    .iter()
                    .zip(&noise)
                    .map(|(a, n)| a + n * delta)
                    .collect();
                normalize(&mut amps);
                let s = qubit_state_from_amps(&amps, 4);
                let pair = crate::correlation::mutual_information(&s, &[2], &[3], 2.0).unwrap();
                if pair >= 2.0 - 1e-3 {
                    let spread =
                        crate::correlation::mutual_information(&s, &[1], &[2, 3], 2.0).unwrap();
                    assert!(spread <= 0.05, "seed {seed} delta {delta}: {spread}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 6, "perturbation sweep too weak: {checked}");
    }

    #[test]
    fn audit_result_serializes_fixed_schema() {
        let res = audit_simultaneous_optimality(3, 2, 0, 1).unwrap();
        let json = serde_json::to_value(&res).unwrap();
        let obj = json.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|s| s.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            vec![
                "best_objective",
                "ghz_form",
                "max_dev",
                "n",
                "profile",
                "seed",
                "starts",
                "target"
            ]
        );
    }
}
