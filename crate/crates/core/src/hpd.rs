//! Hermitian and positive-definite matrices with a cached spectral decomposition.
//!
//! Everything downstream (metric computations, operator means, fixed-point
//! solvers) funnels through the two types here. [`HermMatrix`] guarantees exact
//! conjugate symmetry; [`PdMatrix`] additionally guarantees a strictly positive
//! spectrum and carries its eigendecomposition, so spectral calculus
//! (`apply_fn`, square roots, inverses) never re-factorizes.
//!
//! The eigensolver is a cyclic-by-rows complex Jacobi iteration. Jacobi is
//! slower than tridiagonalization for large matrices but is simple, respects
//! Hermitian structure exactly, and delivers small relative errors on the
//! well-conditioned moderate sizes this crate targets.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum number of full Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 64;
/// Off-diagonal Frobenius norm is driven below this multiple of the full norm.
const SWEEP_TOL: f64 = 1e-14;
/// Relative asymmetry allowed in raw input before it is rejected.
const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues at or below this multiple of the norm are treated as singular.
const PD_FLOOR: f64 = 1e-14;

/// A square matrix with exact conjugate symmetry.
///
/// Construction symmetrizes its input, so `m[(i, j)] == m[(j, i)].conj()`
/// holds bit-for-bit and diagonal entries have zero imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix {
    mat: DMatrix<Complex64>,
}

impl HermMatrix {
    /// Wraps a raw matrix, verifying shape, finiteness and approximate
    /// conjugate symmetry (within `1e-12 * max(1, ||M||_F)` entrywise), then
    /// replaces it with its Hermitian part `(M + M*)/2`.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        for v in mat.iter() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidMatrix("non-finite entry".into()));
            }
        }
        let tol = HERMITIAN_TOL * mat.norm().max(1.0);
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                let d = mat[(i, j)] - mat[(j, i)].conj();
                if d.norm() > tol {
                    return Err(Error::InvalidMatrix(format!(
                        "not Hermitian: entries ({i},{j}) and ({j},{i}) differ by {:.3e}",
                        d.norm()
                    )));
                }
            }
        }
        Ok(Self::symmetrized(mat))
    }

    /// Hermitian part `(M + M*)/2` with no asymmetry check. Used internally to
    /// scrub round-off after products that are Hermitian in exact arithmetic.
    pub fn symmetrized(mat: DMatrix<Complex64>) -> Self {
        let n = mat.nrows();
        let mut out = mat;
        for i in 0..n {
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = 0.5 * (out[(i, j)] + out[(j, i)].conj());
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Self { mat: out }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidMatrix("empty diagonal".into()));
        }
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite diagonal entry".into()));
        }
        let n = diag.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(Self { mat })
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }
}

/// Spectral decomposition `M = Q diag(values) Q*` with `values` ascending and
/// `Q` unitary (columns are the corresponding eigenvectors).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl EigenDecomposition {
    /// Rebuilds `Q diag(values) Q*`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.assemble_with(&self.values)
    }

    /// `Q diag(vals) Q*` for a replacement spectrum `vals` in the same basis;
    /// this is scalar functional calculus when `vals[i] = phi(values[i])`.
    pub fn assemble_with(&self, vals: &[f64]) -> DMatrix<Complex64> {
        debug_assert_eq!(vals.len(), self.values.len());
        let mut scaled = self.vectors.clone();
        for (j, &v) in vals.iter().enumerate() {
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= v;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing `a[(p, q)]`, accumulated into `q_acc`.
fn jacobi_rotate(a: &mut DMatrix<Complex64>, q_acc: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let n = a.nrows();
    let gamma = a[(p, q)];
    let r = gamma.norm();
    if r == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let phase = gamma / r;
    let tau = (beta - alpha) / (2.0 * r);
    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
    let tt = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + tt * tt).sqrt();
    let s = phase * (tt * c);

    // Left-multiply by U*: rows p and q.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = c * apj - s * aqj;
        a[(q, j)] = s.conj() * apj + c * aqj;
    }
    // Right-multiply by U: columns p and q.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = c * aip - s.conj() * aiq;
        a[(i, q)] = s * aip + c * aiq;
    }
    // The transformed 2x2 block is known in closed form; writing it directly
    // keeps the pivot exactly zero and the diagonal exactly real.
    a[(p, p)] = Complex64::new(alpha - tt * r, 0.0);
    a[(q, q)] = Complex64::new(beta + tt * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for i in 0..n {
        let qip = q_acc[(i, p)];
        let qiq = q_acc[(i, q)];
        q_acc[(i, p)] = c * qip - s.conj() * qiq;
        q_acc[(i, q)] = s * qip + c * qiq;
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Iterates row-cyclic sweeps until the off-diagonal Frobenius norm falls
/// below `1e-14 * ||M||_F`, then sorts eigenvalues ascending. Fails with
/// [`Error::Numerical`] if 64 sweeps do not reach the threshold (Jacobi
/// converges quadratically, so on finite input this indicates NaN poisoning
/// or similar corruption rather than slow progress).
pub fn eigh(h: &HermMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    let fro = a.norm();
    let threshold = SWEEP_TOL * fro;

    if n > 1 && fro > 0.0 {
        let mut off = off_diagonal_norm(&a);
        let mut sweeps = 0;
        while off > threshold {
            if sweeps == MAX_SWEEPS {
                return Err(Error::Numerical(format!(
                    "eigensolver stalled: off-diagonal norm {off:.3e} above {threshold:.3e} \
                     after {MAX_SWEEPS} sweeps"
                )));
            }
            for p in 0..n - 1 {
                for r in p + 1..n {
                    jacobi_rotate(&mut a, &mut q, p, r);
                }
            }
            sweeps += 1;
            off = off_diagonal_norm(&a);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = q[(i, src)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// A Hermitian positive-definite matrix bundled with its eigendecomposition.
///
/// The decomposition is computed once at construction; square roots and
/// inverse square roots are derived from it lazily and cached, so repeated
/// congruence-and-function evaluations against the same matrix (the inner
/// loop of every fixed-point solver here) cost one factorization total.
#[derive(Clone, Debug)]
pub struct PdMatrix {
    herm: HermMatrix,
    eig: EigenDecomposition,
    sqrt: OnceLock<DMatrix<Complex64>>,
    inv_sqrt: OnceLock<DMatrix<Complex64>>,
}

impl PdMatrix {
    /// Validates positivity of an already-Hermitian matrix.
    pub fn try_new(herm: HermMatrix) -> Result<Self> {
        let eig = eigh(&herm)?;
        Self::from_decomposition(herm, eig)
    }

    /// Validates and wraps a raw complex matrix.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        Self::try_new(HermMatrix::new(mat)?)
    }

    fn from_decomposition(herm: HermMatrix, eig: EigenDecomposition) -> Result<Self> {
        let floor = PD_FLOOR * herm.frobenius_norm().max(1.0);
        let lambda_min = eig.values[0];
        if lambda_min <= floor {
            return Err(Error::InvalidMatrix(format!(
                "not positive definite: smallest eigenvalue {lambda_min:.6e} \
                 (singularity floor {floor:.3e})"
            )));
        }
        Ok(Self {
            herm,
            eig,
            sqrt: OnceLock::new(),
            inv_sqrt: OnceLock::new(),
        })
    }

    /// Builds the matrix `Q diag(values) Q*` from spectral data, reusing the
    /// basis instead of re-factorizing. `values` need not be sorted.
    fn from_spectrum(values: &[f64], basis: &DMatrix<Complex64>) -> Result<Self> {
        let n = basis.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for i in 0..n {
                vectors[(i, dst)] = basis[(i, src)];
            }
        }
        let eig = EigenDecomposition {
            values: sorted,
            vectors,
        };
        let herm = HermMatrix::symmetrized(eig.reconstruct());
        Self::from_decomposition(herm, eig)
    }

    pub fn identity(n: usize) -> Self {
        let herm = HermMatrix::identity(n);
        let eig = EigenDecomposition {
            values: vec![1.0; n],
            vectors: DMatrix::identity(n, n),
        };
        Self {
            herm,
            eig,
            sqrt: OnceLock::new(),
            inv_sqrt: OnceLock::new(),
        }
    }

    /// Positive diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::try_new(HermMatrix::from_diagonal(diag)?)
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn as_herm(&self) -> &HermMatrix {
        &self.herm
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.herm.as_matrix()
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn lambda_min(&self) -> f64 {
        self.eig.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eig.values.last().unwrap()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.herm.frobenius_norm()
    }

    fn spectral_image(&self, values: &[f64]) -> DMatrix<Complex64> {
        let n = self.dim();
        let q = &self.eig.vectors;
        let mut scaled = q.clone();
        for (j, &v) in values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        scaled * q.adjoint()
    }

    /// `A^{1/2}` as a raw matrix, computed once and cached.
    pub fn sqrt_matrix(&self) -> &DMatrix<Complex64> {
        self.sqrt.get_or_init(|| {
            let values: Vec<f64> = self.eig.values.iter().map(|v| v.sqrt()).collect();
            self.spectral_image(&values)
        })
    }

    /// `A^{-1/2}` as a raw matrix, computed once and cached.
    pub fn inv_sqrt_matrix(&self) -> &DMatrix<Complex64> {
        self.inv_sqrt.get_or_init(|| {
            let values: Vec<f64> = self.eig.values.iter().map(|v| 1.0 / v.sqrt()).collect();
            self.spectral_image(&values)
        })
    }

    /// `A^{1/2}` as a full [`PdMatrix`] (shares the eigenbasis, no new solve).
    pub fn sqrt_pd(&self) -> PdMatrix {
        let values: Vec<f64> = self.eig.values.iter().map(|v| v.sqrt()).collect();
        Self::from_spectrum(&values, &self.eig.vectors)
            .expect("square root of a positive spectrum is positive")
    }

    /// `A^{-1}` (shares the eigenbasis, no new solve).
    pub fn inverse_pd(&self) -> PdMatrix {
        let values: Vec<f64> = self.eig.values.iter().map(|v| 1.0 / v).collect();
        Self::from_spectrum(&values, &self.eig.vectors)
            .expect("inverse of a positive spectrum is positive")
    }

    /// `alpha * A` for `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<PdMatrix> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scale factor must be positive and finite, got {alpha}"
            )));
        }
        let values: Vec<f64> = self.eig.values.iter().map(|v| alpha * v).collect();
        Self::from_spectrum(&values, &self.eig.vectors)
    }

    /// Spectral calculus: `phi(A) = Q diag(phi(lambda_i)) Q*` as a Hermitian
    /// matrix. `phi` may reject an eigenvalue by returning an error.
    pub fn apply_fn<F>(&self, mut phi: F) -> Result<HermMatrix>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut values = Vec::with_capacity(self.dim());
        for &lambda in &self.eig.values {
            let v = phi(lambda)?;
            if !v.is_finite() {
                return Err(Error::Numerical(format!(
                    "function of eigenvalue {lambda:.6e} is not finite"
                )));
            }
            values.push(v);
        }
        Ok(HermMatrix::symmetrized(self.spectral_image(&values)))
    }

    /// Spectral calculus for functions with positive values; the result keeps
    /// the eigenbasis, so no fresh factorization is performed.
    pub fn apply_fn_pd<F>(&self, mut phi: F) -> Result<PdMatrix>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut values = Vec::with_capacity(self.dim());
        for &lambda in &self.eig.values {
            let v = phi(lambda)?;
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Numerical(format!(
                    "function of eigenvalue {lambda:.6e} is {v:.6e}, expected positive"
                )));
            }
            values.push(v);
        }
        Self::from_spectrum(&values, &self.eig.vectors)
    }

    /// Congruence `C A C*` for invertible `C`. Warns via `log` when the
    /// conditioning of `C` (estimated from the spectrum of `C* C`) exceeds
    /// 1e8; fails if the image is numerically singular.
    pub fn congruence(&self, c: &DMatrix<Complex64>) -> Result<PdMatrix> {
        if c.nrows() != self.dim() || c.ncols() != self.dim() {
            return Err(Error::InvalidMatrix(format!(
                "congruence factor is {}x{}, expected {n}x{n}",
                c.nrows(),
                c.ncols(),
                n = self.dim()
            )));
        }
        if c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidMatrix(
                "congruence factor has non-finite entries".into(),
            ));
        }
        let gram = eigh(&HermMatrix::symmetrized(c.adjoint() * c))?;
        let smin = gram.values[0].max(0.0).sqrt();
        let smax = gram.values[gram.values.len() - 1].max(0.0).sqrt();
        if smin <= PD_FLOOR * smax.max(1.0) {
            return Err(Error::InvalidMatrix(format!(
                "congruence factor is numerically singular (singular values in \
                 [{smin:.3e}, {smax:.3e}])"
            )));
        }
        if smax / smin > 1e8 {
            log::warn!(
                "congruence factor is ill-conditioned (condition number {:.3e}); \
                 positivity of the image may be unreliable",
                smax / smin
            );
        }
        let image = HermMatrix::symmetrized(c * self.matrix() * c.adjoint());
        Self::try_new(image)
    }
}

/// Weighted sum `sum_i w_i A_i` of positive matrices (weights positive).
pub fn weighted_sum(weights: &[f64], mats: &[PdMatrix]) -> Result<PdMatrix> {
    if weights.len() != mats.len() || mats.is_empty() {
        return Err(Error::InvalidInput(format!(
            "weighted sum needs matching nonempty lists, got {} weights and {} matrices",
            weights.len(),
            mats.len()
        )));
    }
    let n = mats[0].dim();
    if mats.iter().any(|m| m.dim() != n) {
        return Err(Error::InvalidInput("matrices differ in dimension".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for (w, m) in weights.iter().zip(mats) {
        acc += m.matrix() * Complex64::new(*w, 0.0);
    }
    PdMatrix::try_new(HermMatrix::symmetrized(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn eigh_identity_is_trivial() {
        let e = eigh(&HermMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigh_sorts_diagonal_ascending() {
        let h = HermMatrix::from_diagonal(&[3.0, 1.0, 2.0]).unwrap();
        let e = eigh(&h).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert!(rel_err(&e.reconstruct(), h.as_matrix()) < 1e-14);
    }

    #[test]
    fn eigh_real_symmetric_2x2() {
        let h = HermMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
        ))
        .unwrap();
        let e = eigh(&h).unwrap();
        assert_relative_eq!(e.values[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn eigh_complex_offdiagonal() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = HermMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        ))
        .unwrap();
        let e = eigh(&h).unwrap();
        assert_relative_eq!(e.values[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], 3.0, max_relative = 1e-14);
        assert!(rel_err(&e.reconstruct(), h.as_matrix()) < 1e-13);
    }

    #[test]
    fn eigh_one_by_one() {
        let h = HermMatrix::from_diagonal(&[5.0]).unwrap();
        let e = eigh(&h).unwrap();
        assert_eq!(e.values, vec![5.0]);
        assert_eq!(e.vectors[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn eigh_reconstructs_dense_hermitian() {
        let h = HermMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[
                c(4.0, 0.0),
                c(1.0, 2.0),
                c(0.5, -0.25),
                c(1.0, -2.0),
                c(6.0, 0.0),
                c(-1.0, 1.0),
                c(0.5, 0.25),
                c(-1.0, -1.0),
                c(3.0, 0.0),
            ],
        ))
        .unwrap();
        let e = eigh(&h).unwrap();
        assert!(rel_err(&e.reconstruct(), h.as_matrix()) < 1e-13);
        // Eigenvectors are orthonormal.
        let qhq = e.vectors.adjoint() * &e.vectors;
        assert!(rel_err(&qhq, &DMatrix::identity(3, 3)) < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermMatrix::new(m), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let h = HermMatrix::from_diagonal(&[1.0, -0.5]).unwrap();
        assert!(matches!(PdMatrix::try_new(h), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let a = PdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let s = a.sqrt_pd();
        assert_relative_eq!(s.matrix()[(0, 0)].re, 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.matrix()[(1, 1)].re, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = PdMatrix::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(3.0, 0.0)],
        ))
        .unwrap();
        let s = a.sqrt_matrix();
        assert!(rel_err(&(s * s), a.matrix()) < 1e-10);
        let isq = a.inv_sqrt_matrix();
        assert!(rel_err(&(isq * a.matrix() * isq), &DMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn inverse_of_diagonal() {
        let a = PdMatrix::from_diagonal(&[2.0, 4.0]).unwrap();
        let inv = a.inverse_pd();
        assert_relative_eq!(inv.matrix()[(0, 0)].re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(inv.matrix()[(1, 1)].re, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn apply_identity_function_reconstructs() {
        let a = PdMatrix::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[c(5.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)],
        ))
        .unwrap();
        let same = a.apply_fn(Ok).unwrap();
        assert!(rel_err(same.as_matrix(), a.matrix()) < 1e-12);
    }

    #[test]
    fn congruence_by_twice_identity_quadruples() {
        let a = PdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let c2 = DMatrix::from_diagonal_element(2, 2, c(2.0, 0.0));
        let out = a.congruence(&c2).unwrap();
        assert!(rel_err(out.matrix(), &(a.matrix() * c(4.0, 0.0))) < 1e-14);
    }

    #[test]
    fn congruence_by_singular_factor_fails() {
        let a = PdMatrix::identity(2);
        let zero = DMatrix::<Complex64>::zeros(2, 2);
        assert!(a.congruence(&zero).is_err());
    }

    #[test]
    fn weighted_sum_of_diagonals() {
        let a = PdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let b = PdMatrix::from_diagonal(&[3.0, 4.0]).unwrap();
        let s = weighted_sum(&[0.5, 0.5], &[a, b]).unwrap();
        assert_relative_eq!(s.matrix()[(0, 0)].re, 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.matrix()[(1, 1)].re, 3.0, max_relative = 1e-14);
    }
}
