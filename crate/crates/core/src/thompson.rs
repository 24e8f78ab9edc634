//! Thompson (part) metric on the positive-definite cone, the semidefinite
//! order, and closed-form contraction estimates for affine maps on the cone.

use crate::error::{Error, Result};
use crate::hpd::{eigh, HermMatrix, PdMatrix};

/// A Thompson-metric distance in natural-log units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThompsonDistance {
    pub value: f64,
}

/// Contraction coefficient of the affine map `B -> aA + bB` on a metric ball,
/// together with the inputs it was computed from.
#[derive(Clone, Copy, Debug)]
pub struct ContractionEstimate {
    pub rho: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
}

fn check_same_dim(a: &PdMatrix, b: &PdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Least `alpha` with `A <= alpha B`: the largest eigenvalue of
/// `B^{-1/2} A B^{-1/2}`.
pub fn mratio(a: &PdMatrix, b: &PdMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    let isq = b.inv_sqrt_matrix();
    let w = HermMatrix::symmetrized(isq * a.matrix() * isq);
    let eig = eigh(&w)?;
    Ok(*eig.values.last().unwrap())
}

/// Thompson metric `max(log mratio(A,B), log mratio(B,A))`.
///
/// The value is clamped below at zero but is otherwise reported raw: near
/// coincident arguments it bottoms out at the eigensolver floor (around
/// `1e-15` times the condition number) instead of snapping to zero. Solvers
/// rely on these tiny distances to tell a converged iteration from one that
/// is still drifting, so a cosmetic snap here would mask real movement.
pub fn d_inf(a: &PdMatrix, b: &PdMatrix) -> Result<ThompsonDistance> {
    check_same_dim(a, b)?;
    let forward = mratio(a, b)?.ln();
    let backward = mratio(b, a)?.ln();
    let value = forward.max(backward).max(0.0);
    Ok(ThompsonDistance { value })
}

/// Semidefinite order test: `A <= B` up to slack, i.e. the smallest eigenvalue
/// of `B - A` is at least `-tol * max(1, ||B||_F)`.
pub fn order_leq(a: &PdMatrix, b: &PdMatrix, tol: f64) -> Result<bool> {
    check_same_dim(a, b)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "order tolerance must be a nonnegative number, got {tol}"
        )));
    }
    let diff = HermMatrix::symmetrized(b.matrix() - a.matrix());
    let eig = eigh(&diff)?;
    Ok(eig.values[0] >= -tol * b.frobenius_norm().max(1.0))
}

/// How far `A <= B` is from holding: `max(0, -lambda_min(B - A))` scaled by
/// `max(1, ||B||_F)`. Zero when the order holds exactly;
/// [`order_leq`]`(a, b, tol)` is equivalent to `order_defect(a, b) <= tol`.
pub fn order_defect(a: &PdMatrix, b: &PdMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    let diff = HermMatrix::symmetrized(b.matrix() - a.matrix());
    let eig = eigh(&diff)?;
    Ok((-eig.values[0]).max(0.0) / b.frobenius_norm().max(1.0))
}

/// Contraction coefficient of `B -> aA + bB` on the closed Thompson ball of
/// radius `r` around `A`:
///
/// `rho = log((e^{-R} + e^{2r}) / (e^{-R} + 1)) / (2r)` with
/// `R = r + |log a - log b|`.
pub fn rho_affine(r: f64, a: f64, b: f64) -> Result<ContractionEstimate> {
    for (name, v) in [("r", r), ("a", a), ("b", b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let big_r = r + (a.ln() - b.ln()).abs();
    let em = (-big_r).exp();
    let rho = ((em + (2.0 * r).exp()) / (em + 1.0)).ln() / (2.0 * r);
    debug_assert!(rho > 0.0 && rho < 1.0);
    Ok(ContractionEstimate { rho, r, a, b })
}

/// Upper bound on `d(sum A_i, sum B_i)` from the per-index distances
/// `dist_ab[i] = d(A_i, B_i)` and the distances `cross_a[i] = d(A_m, A_i)`,
/// `cross_b[i] = d(B_m, B_i)` to the pair `m` with the largest `dist_ab`
/// (lowest index on ties). Returns the log of the larger of the two weighted
/// averages of `e^{dist_ab[i]}`; never exceeds `max(dist_ab)`.
pub fn weighted_upper_bound(dist_ab: &[f64], cross_a: &[f64], cross_b: &[f64]) -> Result<f64> {
    if dist_ab.is_empty() {
        return Err(Error::InvalidInput("empty distance list".into()));
    }
    if dist_ab.len() != cross_a.len() || dist_ab.len() != cross_b.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} distances, {} and {} cross distances",
            dist_ab.len(),
            cross_a.len(),
            cross_b.len()
        )));
    }
    for list in [dist_ab, cross_a, cross_b] {
        if list.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "distances must be finite and nonnegative".into(),
            ));
        }
    }
    let average = |cross: &[f64]| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (d, c) in dist_ab.iter().zip(cross) {
            let w = (-c).exp();
            num += d.exp() * w;
            den += w;
        }
        num / den
    };
    Ok(average(cross_a).max(average(cross_b)).ln())
}
