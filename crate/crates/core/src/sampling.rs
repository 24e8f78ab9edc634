//! Seeded random generation of Hermitian and positive definite matrices.
//!
//! Everything is driven by an explicitly seeded ChaCha stream so that test
//! failures, property-suite tables, and CLI runs are reproducible: the same
//! seed always yields the same matrices, and per-instance streams make the
//! result independent of evaluation order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::hpd::{eigh, HermMatrix, PdMatrix};

/// Seeded generator. Instance streams (`instance_rng`) of the same seed are
/// mutually independent, so work can be distributed without changing output.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator for `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn standard_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random Hermitian matrix with independent standard-normal entries
/// (Gaussian unitary ensemble scaling).
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> HermMatrix {
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        mat[(i, i)] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in i + 1..n {
            let z = standard_complex(rng);
            mat[(i, j)] = z;
            mat[(j, i)] = z.conj();
        }
    }
    HermMatrix::symmetrized(mat)
}

/// Haar-like random unitary: the eigenvector basis of a random Hermitian
/// matrix. Columns are orthonormal to working precision.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> Result<DMatrix<Complex64>> {
    let herm = random_hermitian(rng, n);
    Ok(eigh(&herm)?.vectors)
}

/// Random positive definite matrix `Q e^{D} Q*` where `D` has independent
/// `N(0, sigma^2)` diagonal entries. `sigma` controls the log-eigenvalue
/// spread and hence the conditioning: expected extreme log-eigenvalues are
/// roughly `±sigma·sqrt(2 ln n)`.
pub fn random_pd<R: Rng>(rng: &mut R, n: usize, sigma: f64) -> Result<PdMatrix> {
    let q = random_unitary(rng, n)?;
    let logs: Vec<f64> = (0..n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut mat = q.clone();
    for (j, lg) in logs.iter().enumerate() {
        let scale = Complex64::new(lg.exp(), 0.0);
        for i in 0..n {
            mat[(i, j)] *= scale;
        }
    }
    let prod = &mat * q.adjoint();
    PdMatrix::from_matrix(prod)
}

/// Random positive definite matrix inside the closed Thompson ball of radius
/// `r` around `center`: `A^{1/2} Q e^{D} Q* A^{1/2}` with `|D_ii| <= r`,
/// which gives `d_inf(result, center) = max_i |D_ii| <= r` exactly.
pub fn random_pd_in_ball<R: Rng>(rng: &mut R, center: &PdMatrix, r: f64) -> Result<PdMatrix> {
    let n = center.dim();
    let q = random_unitary(rng, n)?;
    let mut mat = q.clone();
    for j in 0..n {
        let d: f64 = rng.random_range(-r..=r);
        let scale = Complex64::new(d.exp(), 0.0);
        for i in 0..n {
            mat[(i, j)] *= scale;
        }
    }
    let w = &mat * q.adjoint();
    let half = center.sqrt_matrix();
    PdMatrix::from_matrix(half * w * half)
}

/// Random positive semidefinite bump `s · GG*/n` (Wishart, scaled); adding it
/// to a matrix moves it up in the Loewner order.
pub fn random_psd_bump<R: Rng>(rng: &mut R, n: usize, s: f64) -> HermMatrix {
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = standard_complex(rng);
        }
    }
    let prod = &g * g.adjoint() * Complex64::new(s / n as f64, 0.0);
    HermMatrix::symmetrized(prod)
}

/// Random invertible matrix with controlled conditioning:
/// `U diag(e^{N(0,sigma^2)}) V*` for independent random unitaries `U`, `V`.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize, sigma: f64) -> Result<DMatrix<Complex64>> {
    let u = random_unitary(rng, n)?;
    let v = random_unitary(rng, n)?;
    let mut mid = u;
    for j in 0..n {
        let s: f64 = rng.sample(StandardNormal);
        let scale = Complex64::new((sigma * s).exp(), 0.0);
        for i in 0..n {
            mid[(i, j)] *= scale;
        }
    }
    Ok(mid * v.adjoint())
}

/// Random point of the open probability simplex, bounded away from the
/// boundary (each weight at least `1/(4k)` before normalization noise).
pub fn random_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.25..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}
