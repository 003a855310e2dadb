//! Dense complex matrices, tensor products and Hermitian eigendecomposition.
//!
//! The eigensolver is a self-contained cyclic Jacobi sweep over complex
//! Hermitian matrices. Jacobi is slower than Householder-based methods for
//! large matrices but is deterministic, simple to verify, and entirely
//! adequate for the dimensions this crate targets (<= 1024, i.e. 10 qubits).

use num_complex::Complex64;
use thiserror::Error;

/// Maximum number of full Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Convergence target for the off-diagonal Frobenius norm, relative to the
/// Frobenius norm of the input.
pub const JACOBI_REL_TARGET: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m - m^H| entry {deviation:.3e} exceeds {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from nested rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// Column vector |v> as an n x 1 matrix.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    /// Outer product |v><v|.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Column j as an owned vector.
    pub fn column_vec(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude of self - other.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m[i][j] - conj(m[j][i])|` over all entries; infinity if any
    /// entry is non-finite.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if !d.is_finite() {
                    return f64::INFINITY;
                }
                dev = dev.max(d);
            }
        }
        dev
    }
}

/// Kronecker (tensor) product: entry `[(i*b.rows + k), (j*b.cols + l)]` is
/// `a[i,j] * b[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Tensor product of state vectors.
pub fn tensor_product_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Result of a Hermitian eigendecomposition: `m = V diag(lambda) V^H` with
/// eigenvalues ascending and eigenvectors as the columns of `eigenvectors`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// `tol` bounds the accepted hermiticity deviation of the input; the matrix
/// is symmetrized to (m + m^H)/2 before iterating. Eigenvalues are returned
/// ascending, ties broken by the first differing eigenvector component, so
/// the output is reproducible for identical inputs.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEig, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    // hermiticity_deviation maps non-finite entries to infinity, so a
    // plain comparison also rejects NaN-contaminated input.
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(LinalgError::NotHermitian { deviation, tol });
    }
    let n = m.rows();

    // Symmetrize so the iteration starts from an exactly Hermitian matrix.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);
    for i in 0..n {
        let d = a.get(i, i);
        a.set(i, i, Complex64::new(d.re, 0.0));
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    let target = JACOBI_REL_TARGET * scale.max(f64::MIN_POSITIVE);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            return Ok(collect_eig(&a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let off_norm = off_diagonal_norm(&a);
    if off_norm <= target {
        return Ok(collect_eig(&a, v));
    }
    Err(LinalgError::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        off_norm,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating a[p][q].
///
/// The rotation G is the identity except G[p][p] = c, G[p][q] = s*alpha,
/// G[q][p] = -s*conj(alpha), G[q][q] = c, with alpha = a[p][q]/|a[p][q]|;
/// the update is a <- G^H a G, v <- v G.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let alpha = apq / r;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sa = alpha * s;
    let sac = alpha.conj() * s;

    let n = a.rows();
    // a <- a G (columns p and q)
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c - akq * sac);
        a.set(k, q, akp * sa + akq * c);
    }
    // a <- G^H a (rows p and q)
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c - aqk * sa);
        a.set(q, k, apk * sac + aqk * c);
    }
    // v <- v G
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * sac);
        v.set(k, q, vkp * sa + vkq * c);
    }
    // The rotation zeroes this pair analytically; pin it and keep the
    // diagonal exactly real.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p);
    a.set(p, p, Complex64::new(dp.re, 0.0));
    let dq = a.get(q, q);
    a.set(q, q, Complex64::new(dq.re, 0.0));
}

fn collect_eig(a: &ComplexMatrix, v: ComplexMatrix) -> HermitianEig {
    let n = a.rows();
    let evals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        evals[i]
            .partial_cmp(&evals[j])
            .expect("eigenvalues are finite")
            .then_with(|| column_cmp(&v, i, j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    HermitianEig {
        eigenvalues,
        eigenvectors,
    }
}

/// Deterministic tie-break: compare columns i and j by the first component
/// that differs, real part first.
fn column_cmp(v: &ComplexMatrix, i: usize, j: usize) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for k in 0..v.rows() {
        let a = v.get(k, i);
        let b = v.get(k, j);
        match a.re.partial_cmp(&b.re) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
        match a.im.partial_cmp(&b.im) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let g = random_matrix(n, n, seed);
        g.add(&g.adjoint()).scale(0.5)
    }

    #[test]
    fn tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        let out = tensor_product(&i2, &i2);
        assert_eq!(out, ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_basis_projectors() {
        // |0><0| (x) |1><1| has its single 1 at (1,1) under big-endian ordering.
        let p0 = ComplexMatrix::from_fn(2, 2, |i, j| {
            c(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0)
        });
        let p1 = ComplexMatrix::from_fn(2, 2, |i, j| {
            c(if i == 1 && j == 1 { 1.0 } else { 0.0 }, 0.0)
        });
        let out = tensor_product(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(out.get(i, j), c(expect, 0.0));
            }
        }
    }

    #[test]
    fn tensor_matches_double_loop_oracle() {
        let a = random_matrix(2, 2, 11);
        let b = random_matrix(3, 3, 12);
        let out = tensor_product(&a, &b);
        assert_eq!(out.rows(), 6);
        assert_eq!(out.cols(), 6);
        // Independent brute-force construction.
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        let expect = a.get(i, j) * b.get(k, l);
                        let got = out.get(i * 3 + k, j * 3 + l);
                        assert!((got - expect).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn eig_identity() {
        let eig = hermitian_eig(&ComplexMatrix::identity(2), 1e-12).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        let x = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let eig = hermitian_eig(&x, 1e-12).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        // Eigenvectors are (1, -1)/sqrt(2) and (1, 1)/sqrt(2) up to phase.
        let s = 1.0 / 2.0_f64.sqrt();
        let minus = [c(s, 0.0), c(-s, 0.0)];
        let plus = [c(s, 0.0), c(s, 0.0)];
        let overlap = |col: usize, target: &[Complex64; 2]| -> f64 {
            (0..2)
                .map(|k| eig.eigenvectors.get(k, col).conj() * target[k])
                .sum::<Complex64>()
                .norm()
        };
        assert!((overlap(0, &minus) - 1.0).abs() < 1e-12);
        assert!((overlap(1, &plus) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstruction_residual() {
        for seed in [3u64, 17, 99] {
            let m = random_hermitian(8, seed);
            let eig = hermitian_eig(&m, 1e-12).unwrap();
            let v = &eig.eigenvectors;
            // residual max |m v - v diag(lambda)|
            let mv = m.matmul(v);
            let mut vd = v.clone();
            for j in 0..8 {
                for i in 0..8 {
                    vd.set(i, j, v.get(i, j) * eig.eigenvalues[j]);
                }
            }
            assert!(mv.max_abs_diff(&vd) <= 1e-10, "seed {seed}");
            // unitarity of V
            let vhv = v.adjoint().matmul(v);
            assert!(vhv.max_abs_diff(&ComplexMatrix::identity(8)) <= 1e-10);
            // eigenvalues ascending
            for w in eig.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn eig_trace_matches_eigenvalue_sum() {
        for seed in [1u64, 2, 3, 4] {
            let m = random_hermitian(6, seed);
            let eig = hermitian_eig(&m, 1e-12).unwrap();
            let sum: f64 = eig.eigenvalues.iter().sum();
            assert!((sum - m.trace().re).abs() <= 1e-9);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
        ]);
        match hermitian_eig(&m, 1e-9) {
            Err(LinalgError::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eig_rejects_nan_as_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, c(f64::NAN, 0.0));
        assert!(matches!(
            hermitian_eig(&m, 1e-9),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&m, 1e-9),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn tensor_trace_multiplicative() {
        for seed in 0..10u64 {
            let a = random_matrix(3, 3, seed);
            let b = random_matrix(4, 4, seed + 1000);
            let lhs = tensor_product(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() <= 1e-10);
        }
    }
}
