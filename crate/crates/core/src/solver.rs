//! Multivariable mean solvers.
//!
//! The central object is the fixed-point equation
//!
//! ```text
//!     X = sum_i w_i M(X, A_i)
//! ```
//!
//! over positive definite matrices, where `M` is the two-variable operator
//! mean of a representing function. [`induced_solve`] runs the Picard
//! iteration for it (a Thompson-metric contraction, so the fixed point is
//! unique and the iteration is globally convergent). [`lambda_extension`]
//! drives a family of such solves along a shrinking weight schedule
//! `t_{l+1} = shrink * t_l`; the iterates decrease monotonically in the
//! Loewner order and their limit solves the generalized Karcher equation,
//! whose residual [`karcher_residual`] measures. [`classical_karcher`] is the
//! natural-log instance of that limit, and [`power_mean`] the `x^s` instance
//! of the induced solve.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hpd::{eigh, weighted_sum, HermMatrix, PdMatrix};
use crate::io::format_f64;
use crate::logpair::{logpair_power, semigroup_member, LogPair};
use crate::repfn::RepresentingFunction;
use crate::thompson::{d_inf, order_leq};

/// Iteration cap for each inner solve inside a lambda schedule. The inner
/// contraction factor degrades like `1 - t`, so late levels legitimately
/// need many cheap iterations; warm starts keep the practical count far
/// below this.
const LAMBDA_INNER_MAX: usize = 2_000_000;
/// Loewner-order tolerance for the monotone-schedule assertion (eigensolver
/// floor on the smallest eigenvalue of the difference).
const MONOTONE_TOL: f64 = 1e-9;

/// A weighted tuple of positive definite matrices of common dimension.
#[derive(Clone, Debug)]
pub struct MeanProblem {
    weights: Vec<f64>,
    matrices: Vec<PdMatrix>,
}

impl MeanProblem {
    /// Validates positivity of the weights, that they sum to 1 (within
    /// 1e-14), and that all matrices share one dimension.
    pub fn new(weights: Vec<f64>, matrices: Vec<PdMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != matrices.len() {
            return Err(Error::InvalidInput(format!(
                "need matching nonempty weight and matrix lists, got {} and {}",
                weights.len(),
                matrices.len()
            )));
        }
        for &w in &weights {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "weights must be positive, got {w}"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidInput(format!(
                "weights must sum to 1 within 1e-14, got {total:.16}"
            )));
        }
        let n = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != n) {
            return Err(Error::InvalidInput(
                "all matrices must share one dimension".into(),
            ));
        }
        Ok(Self { weights, matrices })
    }

    /// As [`MeanProblem::new`] but rescales the weights to sum to exactly 1
    /// first. Returns the rescaling factor alongside (1.0 when untouched).
    pub fn normalized(weights: Vec<f64>, matrices: Vec<PdMatrix>) -> Result<(Self, f64)> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("empty weight list".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidInput(format!(
                "weight sum must be positive and finite, got {total}"
            )));
        }
        let scaled: Vec<f64> = weights.iter().map(|w| w / total).collect();
        Ok((Self::new(scaled, matrices)?, total))
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn matrices(&self) -> &[PdMatrix] {
        &self.matrices
    }

    /// Weighted arithmetic mean of the tuple; the solvers' starting iterate
    /// (it is an upper bound for every mean considered here, so iterations
    /// begin inside a known order interval).
    pub fn arithmetic(&self) -> Result<PdMatrix> {
        weighted_sum(&self.weights, &self.matrices)
    }

    /// Weighted harmonic mean `(sum_i w_i A_i^{-1})^{-1}` (the matching
    /// lower bound).
    pub fn harmonic(&self) -> Result<PdMatrix> {
        let inverses: Vec<PdMatrix> = self.matrices.iter().map(|m| m.inverse_pd()).collect();
        Ok(weighted_sum(&self.weights, &inverses)?.inverse_pd())
    }
}

/// Diagnostics from a solver run.
#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    /// Total fixed-point map applications (summed over levels for schedules).
    pub iterations: usize,
    /// Thompson distance moved per iteration (per level for schedules).
    pub step_distances: Vec<f64>,
    /// `d_inf(X, map(X))` at the returned iterate, measured with one extra
    /// map application.
    pub fixed_point_residual: f64,
    /// Normalized generalized-Karcher residual (schedules only).
    pub karcher_residual: Option<f64>,
    /// Ratio of the last two step distances: an empirical contraction rate.
    pub rho_estimate: Option<f64>,
    /// The weight schedule actually visited (schedules only).
    pub t_schedule: Option<Vec<f64>>,
}

impl SolveReport {
    /// Flat `key=value` serialization, one line per entry, `t_l=` lines
    /// repeated per visited level. Stable formatting so identical runs
    /// produce byte-identical reports.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("iterations={}\n", self.iterations));
        out.push_str(&format!(
            "residual={}\n",
            format_f64(self.fixed_point_residual)
        ));
        if let Some(kr) = self.karcher_residual {
            out.push_str(&format!("karcher_residual={}\n", format_f64(kr)));
        }
        if let Some(rho) = self.rho_estimate {
            out.push_str(&format!("rho={}\n", format_f64(rho)));
        }
        if let Some(ts) = &self.t_schedule {
            for t in ts {
                out.push_str(&format!("t_l={}\n", format_f64(*t)));
            }
        }
        out
    }

    /// Step distances as a two-column CSV for plotting.
    pub fn steps_csv(&self) -> String {
        let mut out = String::from("step,distance\n");
        for (i, d) in self.step_distances.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, format_f64(*d)));
        }
        out
    }
}

/// The two-variable operator mean `M(A, B) = A^{1/2} f(A^{-1/2} B A^{-1/2})
/// A^{1/2}`.
pub fn mean_eval(f: &RepresentingFunction, a: &PdMatrix, b: &PdMatrix) -> Result<PdMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let raw = mean_eval_raw(f, a, b)?;
    PdMatrix::from_matrix(raw)
}

/// Same product without the final re-factorization; the building block for
/// weighted sums of means, which factor once after summing.
fn mean_eval_raw(
    f: &RepresentingFunction,
    a: &PdMatrix,
    b: &PdMatrix,
) -> Result<DMatrix<Complex64>> {
    let isa = a.inv_sqrt_matrix();
    let w = HermMatrix::symmetrized(isa * b.matrix() * isa);
    let eig = eigh(&w)?;
    let mut vals = Vec::with_capacity(eig.values.len());
    for &lambda in &eig.values {
        let y = f.eval(lambda)?;
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::Numerical(format!(
                "{} produced a non-positive value {y:.6e} at eigenvalue {lambda:.6e}",
                f.label()
            )));
        }
        vals.push(y);
    }
    let fw = eig.assemble_with(&vals);
    let sa = a.sqrt_matrix();
    Ok(sa * fw * sa)
}

/// One application of the fixed-point map `X -> sum_i w_i M(X, A_i)`.
fn induced_map(f: &RepresentingFunction, p: &MeanProblem, x: &PdMatrix) -> Result<PdMatrix> {
    let n = p.dim();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for (w, a) in p.weights().iter().zip(p.matrices()) {
        let term = mean_eval_raw(f, x, a)?;
        acc += term * Complex64::new(*w, 0.0);
    }
    PdMatrix::from_matrix(acc)
}

/// Solves `X = sum_i w_i M(X, A_i)` by Picard iteration from the weighted
/// arithmetic mean, stopping when a step moves less than `tol` in Thompson
/// distance.
///
/// The right-trivial function (`f(x) = x`, so `M(X, A) = A`) short-circuits:
/// the equation then reads `X = sum_i w_i A_i` directly. The left-trivial
/// function is rejected, since `M(X, A) = X` makes every `X` a solution.
pub fn induced_solve(
    f: &RepresentingFunction,
    p: &MeanProblem,
    tol: f64,
    max_iter: usize,
) -> Result<(PdMatrix, SolveReport)> {
    let start = p.arithmetic()?;
    solve_from(f, p, start, tol, max_iter)
}

/// [`induced_solve`] with an explicit starting iterate (used by schedules to
/// warm-start each level from the previous solution).
pub(crate) fn solve_from(
    f: &RepresentingFunction,
    p: &MeanProblem,
    start: PdMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<(PdMatrix, SolveReport)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    if f.is_left_trivial() {
        return Err(Error::InvalidMean(format!(
            "{} is the left-trivial mean M(X, A) = X; its fixed-point equation \
             does not determine X",
            f.label()
        )));
    }
    if start.dim() != p.dim() {
        return Err(Error::InvalidInput(format!(
            "starting iterate dimension {} does not match problem dimension {}",
            start.dim(),
            p.dim()
        )));
    }

    if f.is_right_trivial() {
        let x = p.arithmetic()?;
        let image = induced_map(f, p, &x)?;
        let report = SolveReport {
            iterations: 1,
            step_distances: Vec::new(),
            fixed_point_residual: d_inf(&x, &image)?.value,
            ..SolveReport::default()
        };
        return Ok((x, report));
    }

    let mut x = start;
    let mut steps: Vec<f64> = Vec::new();
    for iter in 1..=max_iter {
        let y = induced_map(f, p, &x)?;
        let d = d_inf(&y, &x)?.value;
        steps.push(d);
        x = y;
        if d <= tol {
            let image = induced_map(f, p, &x)?;
            let residual = d_inf(&x, &image)?.value;
            let rho = match steps.len() {
                0 | 1 => None,
                m => {
                    let prev = steps[m - 2];
                    (prev > 0.0).then(|| steps[m - 1] / prev)
                }
            };
            let report = SolveReport {
                iterations: iter,
                step_distances: steps,
                fixed_point_residual: residual,
                karcher_residual: None,
                rho_estimate: rho,
                t_schedule: None,
            };
            return Ok((x, report));
        }
    }
    let last_step = steps.last().copied().unwrap_or(f64::NAN);
    let report = SolveReport {
        iterations: max_iter,
        step_distances: steps,
        fixed_point_residual: last_step,
        ..SolveReport::default()
    };
    Err(Error::SolverStalled {
        message: format!(
            "fixed-point iteration for {} still moved {last_step:.3e} per step \
             after {max_iter} iterations (tol {tol:.3e})",
            f.label()
        ),
        report: Box::new(report),
        last_iterate: Box::new(x),
    })
}

/// The matrix power mean: the induced solve of `G_s(X, A) = X^{1/2}
/// (X^{-1/2} A X^{-1/2})^s X^{1/2}`. At `s = 1` the inducing mean is
/// right-trivial and the equation collapses to the arithmetic mean.
pub fn power_mean(
    s: f64,
    p: &MeanProblem,
    tol: f64,
    max_iter: usize,
) -> Result<(PdMatrix, SolveReport)> {
    if !(s.is_finite() && s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "power-mean exponent must lie in (0, 1], got {s}"
        )));
    }
    let f = if s == 1.0 {
        RepresentingFunction::harmonic_mixture(&[(1.0, 1.0)])?
    } else {
        RepresentingFunction::power_family(s, 0.0)?
    };
    induced_solve(&f, p, tol, max_iter)
}

/// Shrinking-weight schedule toward the generalized Karcher mean of a log
/// pair: solves the induced equation for the semigroup member `f_{t_l}`,
/// `t_l = t_start * shrink^l`, warm-starting each level from the previous
/// solution, and stops once consecutive solutions are `tol_lambda`-close in
/// Thompson distance.
///
/// The solutions decrease monotonically in the Loewner order along the
/// schedule; a violation beyond the eigensolver floor aborts with an error
/// since it signals a broken pair (or a bug), not roundoff.
///
/// Inner tolerances: each level solves to
/// `max(min(inner_tol, 0.25 * tol_lambda * t_l), noise_floor)`. The
/// `t_l`-proportional term keeps the inner error safely below the outer
/// stopping differences, which themselves scale like `t_l`; a fixed inner
/// tolerance would either waste work at early levels or, worse, let inner
/// bias masquerade as schedule movement near the stop. The floor keeps the
/// target above the pair's own evaluation noise.
pub fn lambda_extension(
    lp: &Arc<LogPair>,
    p: &MeanProblem,
    t_start: f64,
    shrink: f64,
    tol_lambda: f64,
    inner_tol: f64,
    max_outer: usize,
) -> Result<(PdMatrix, SolveReport)> {
    if !(t_start.is_finite() && t_start > 0.0 && t_start <= lp.t0() + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "schedule start must lie in (0, t0 = {}], got {t_start}",
            lp.t0()
        )));
    }
    if !(shrink.is_finite() && shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidInput(format!(
            "shrink factor must lie in (0, 1), got {shrink}"
        )));
    }
    if !(tol_lambda.is_finite() && tol_lambda > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tol_lambda must be positive, got {tol_lambda}"
        )));
    }
    if !(inner_tol.is_finite() && inner_tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "inner_tol must be positive, got {inner_tol}"
        )));
    }
    if max_outer == 0 {
        return Err(Error::InvalidInput("max_outer must be at least 1".into()));
    }

    let mut prev: Option<PdMatrix> = None;
    let mut schedule: Vec<f64> = Vec::new();
    let mut outer_steps: Vec<f64> = Vec::new();
    let mut total_inner = 0usize;
    let mut last_inner_residual = 0.0;
    let mut t = t_start;
    for _ in 0..max_outer {
        let f_t = semigroup_member(lp, t)?;
        let eff_tol = inner_tol
            .min(0.25 * tol_lambda * t)
            .max(lp.eval_noise_floor());
        let start = match &prev {
            Some(x) => x.clone(),
            None => p.arithmetic()?,
        };
        let (x_new, inner_report) = solve_from(&f_t, p, start, eff_tol, LAMBDA_INNER_MAX)?;
        total_inner += inner_report.iterations;
        last_inner_residual = inner_report.fixed_point_residual;
        schedule.push(t);

        if let Some(x_prev) = &prev {
            if !order_leq(&x_new, x_prev, MONOTONE_TOL)? {
                return Err(Error::Numerical(format!(
                    "schedule iterate at t = {t:.6e} is not below its predecessor \
                     (beyond tolerance {MONOTONE_TOL:.1e}); the pair {} does not \
                     generate a decreasing family here",
                    lp.label()
                )));
            }
            let d = d_inf(&x_new, x_prev)?.value;
            outer_steps.push(d);
            if d < tol_lambda {
                let kr = karcher_residual(lp, &x_new, p)?;
                let report = SolveReport {
                    iterations: total_inner,
                    step_distances: outer_steps,
                    fixed_point_residual: last_inner_residual,
                    karcher_residual: Some(kr),
                    rho_estimate: None,
                    t_schedule: Some(schedule),
                };
                return Ok((x_new, report));
            }
        }
        prev = Some(x_new);
        t *= shrink;
    }

    let report = SolveReport {
        iterations: total_inner,
        step_distances: outer_steps,
        fixed_point_residual: last_inner_residual,
        karcher_residual: None,
        rho_estimate: None,
        t_schedule: Some(schedule),
    };
    let last = prev.expect("max_outer >= 1 guarantees at least one level");
    Err(Error::SolverStalled {
        message: format!(
            "schedule for {} still moved {:.3e} between levels after {max_outer} \
             levels (tol_lambda {tol_lambda:.3e})",
            lp.label(),
            report.step_distances.last().copied().unwrap_or(f64::NAN)
        ),
        report: Box::new(report),
        last_iterate: Box::new(last),
    })
}

/// The classical Karcher mean: the lambda schedule of the natural-log pair
/// (power `q = 0`), with default start 0.5 and halving.
pub fn classical_karcher(
    p: &MeanProblem,
    tol_lambda: f64,
    max_outer: usize,
) -> Result<(PdMatrix, SolveReport)> {
    let lp = Arc::new(logpair_power(0.0)?);
    lambda_extension(&lp, p, 0.5, 0.5, tol_lambda, tol_lambda, max_outer)
}

/// Norm of the generalized Karcher field at `X`:
/// `|| sum_i w_i X^{1/2} log(X^{-1/2} A_i X^{-1/2}) X^{1/2} ||_F / ||X||_F`,
/// using the pair's logarithm. Zero exactly at the schedule limit; the
/// normalization makes the verdict invariant under uniform scaling.
pub fn karcher_residual(lp: &LogPair, x: &PdMatrix, p: &MeanProblem) -> Result<f64> {
    if x.dim() != p.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            p.dim()
        )));
    }
    let n = x.dim();
    let sx = x.sqrt_matrix();
    let isx = x.inv_sqrt_matrix();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for (w, a) in p.weights().iter().zip(p.matrices()) {
        let wmat = HermMatrix::symmetrized(isx * a.matrix() * isx);
        let eig = eigh(&wmat)?;
        let logs: Vec<f64> = eig
            .values
            .iter()
            .map(|&lambda| lp.log(lambda))
            .collect::<Result<_>>()?;
        let lw = eig.assemble_with(&logs);
        acc += (sx * lw * sx) * Complex64::new(*w, 0.0);
    }
    Ok(acc.norm() / x.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_pd, random_weights, seeded_rng};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn scalar(v: f64) -> PdMatrix {
        PdMatrix::from_diagonal(&[v]).unwrap()
    }

    fn scalar_of(x: &PdMatrix) -> f64 {
        x.eigenvalues()[0]
    }

    fn random_problem(seed: u64, k: usize, n: usize, sigma: f64) -> MeanProblem {
        let mut rng = seeded_rng(seed);
        let mats: Vec<PdMatrix> = (0..k).map(|_| random_pd(&mut rng, n, sigma).unwrap()).collect();
        let w = random_weights(&mut rng, k);
        MeanProblem::new(w, mats).unwrap()
    }

    #[test]
    fn problem_rejects_bad_weights() {
        let mats = vec![PdMatrix::identity(2), PdMatrix::identity(2)];
        assert!(MeanProblem::new(vec![0.5, 0.6], mats.clone()).is_err());
        assert!(MeanProblem::new(vec![1.2, -0.2], mats.clone()).is_err());
        let (p, total) = MeanProblem::normalized(vec![2.0, 3.0], mats).unwrap();
        assert_abs_diff_eq!(total, 5.0);
        assert_abs_diff_eq!(p.weights()[0], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn mean_eval_of_equal_arguments_is_identity_map() {
        let f = RepresentingFunction::power_family(0.3, 0.5).unwrap();
        let a = random_pd(&mut seeded_rng(1), 4, 0.8).unwrap();
        let m = mean_eval(&f, &a, &a).unwrap();
        assert!(d_inf(&m, &a).unwrap().value < 1e-12);
    }

    #[test]
    fn mean_eval_geometric_on_commuting_inputs() {
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let a = PdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let b = PdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let m = mean_eval(&f, &a, &b).unwrap();
        assert_relative_eq!(m.matrix()[(0, 0)].re, 2.0, max_relative = 1e-12);
        assert_relative_eq!(m.matrix()[(1, 1)].re, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn induced_solve_is_idempotent() {
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let a = random_pd(&mut seeded_rng(2), 3, 0.7).unwrap();
        let p = MeanProblem::new(vec![0.2, 0.3, 0.5], vec![a.clone(), a.clone(), a.clone()])
            .unwrap();
        let (x, report) = induced_solve(&f, &p, 1e-11, 100).unwrap();
        assert!(d_inf(&x, &a).unwrap().value < 1e-11);
        assert!(report.iterations <= 2);
    }

    #[test]
    fn arithmetic_function_is_self_inducing() {
        // f = (1-t) + t x induces X = (1-t) X + t sum w A, i.e. the weighted
        // arithmetic mean, for every t.
        let f = RepresentingFunction::power_family(0.35, 1.0).unwrap();
        let p = random_problem(3, 3, 4, 0.8);
        let (x, _) = induced_solve(&f, &p, 1e-12, 10_000).unwrap();
        let arith = p.arithmetic().unwrap();
        assert!(d_inf(&x, &arith).unwrap().value < 1e-10);
    }

    #[test]
    fn right_trivial_shortcut_returns_arithmetic() {
        let f = RepresentingFunction::harmonic_mixture(&[(1.0, 1.0)]).unwrap();
        let p = random_problem(4, 3, 3, 0.6);
        let (x, report) = induced_solve(&f, &p, 1e-12, 10).unwrap();
        assert!(d_inf(&x, &p.arithmetic().unwrap()).unwrap().value < 1e-13);
        assert!(report.fixed_point_residual < 1e-12);
    }

    #[test]
    fn left_trivial_is_rejected() {
        let f = RepresentingFunction::harmonic_mixture(&[(0.0, 1.0)]).unwrap();
        let p = random_problem(5, 2, 2, 0.5);
        assert!(matches!(
            induced_solve(&f, &p, 1e-10, 10),
            Err(Error::InvalidMean(_))
        ));
    }

    #[test]
    fn harmonic_fixed_point_at_equal_weights_is_geometric() {
        // With f harmonic and two equal weights, the scalar fixed-point
        // equation x = (1/2) H(x,a) + (1/2) H(x,b) rearranges to x^2 = ab:
        // the induced mean is the geometric mean of the pair, not the
        // harmonic mean.
        let f = RepresentingFunction::power_family(0.5, -1.0).unwrap();
        let p = MeanProblem::new(vec![0.5, 0.5], vec![scalar(2.0), scalar(8.0)]).unwrap();
        let (x, _) = induced_solve(&f, &p, 1e-13, 10_000).unwrap();
        assert_abs_diff_eq!(scalar_of(&x), 4.0, epsilon = 1e-9);
    }

    #[test]
    fn scalar_solve_matches_two_variable_reduction() {
        // 1x1 problems collapse to x = a g(b/a) with g the two-weight
        // reduced function of f.
        let f = RepresentingFunction::power_family(0.4, 0.5).unwrap();
        let (w1, w2) = (0.3, 0.7);
        let (a, b) = (2.0, 5.0);
        let g = crate::repfn::induced2_repfn(&f, w1, w2).unwrap();
        let expect = a * g.eval(b / a).unwrap();
        let p = MeanProblem::new(vec![w1, w2], vec![scalar(a), scalar(b)]).unwrap();
        let (x, _) = induced_solve(&f, &p, 1e-13, 10_000).unwrap();
        assert_abs_diff_eq!(scalar_of(&x), expect, epsilon = 1e-10);
    }

    #[test]
    fn power_mean_scalar_half() {
        let p = MeanProblem::new(vec![0.5, 0.5], vec![scalar(1.0), scalar(9.0)]).unwrap();
        let (x, _) = power_mean(0.5, &p, 1e-12, 10_000).unwrap();
        assert_abs_diff_eq!(scalar_of(&x), 4.0, epsilon = 1e-10);
    }

    #[test]
    fn power_mean_commuting_is_entrywise() {
        let a = PdMatrix::from_diagonal(&[1.0, 8.0]).unwrap();
        let b = PdMatrix::from_diagonal(&[4.0, 2.0]).unwrap();
        let p = MeanProblem::new(vec![0.5, 0.5], vec![a, b]).unwrap();
        let s = 0.5;
        let (x, _) = power_mean(s, &p, 1e-12, 10_000).unwrap();
        // Entrywise scalar power mean ((a^s + b^s)/2)^{1/s}.
        let e0 = ((1f64.powf(s) + 4f64.powf(s)) / 2.0).powf(1.0 / s);
        let e1 = ((8f64.powf(s) + 2f64.powf(s)) / 2.0).powf(1.0 / s);
        assert_relative_eq!(x.matrix()[(0, 0)].re, e0, max_relative = 1e-8);
        assert_relative_eq!(x.matrix()[(1, 1)].re, e1, max_relative = 1e-8);
    }

    #[test]
    fn power_mean_at_one_is_arithmetic() {
        let p = random_problem(6, 3, 3, 0.7);
        let (x, _) = power_mean(1.0, &p, 1e-12, 10).unwrap();
        assert!(d_inf(&x, &p.arithmetic().unwrap()).unwrap().value < 1e-13);
    }

    #[test]
    fn nonconvergence_carries_report_and_iterate() {
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let p = random_problem(7, 3, 3, 0.9);
        match induced_solve(&f, &p, 1e-15, 3) {
            Err(Error::SolverStalled { report, last_iterate, .. }) => {
                assert_eq!(report.iterations, 3);
                assert_eq!(report.step_distances.len(), 3);
                assert_eq!(last_iterate.dim(), 3);
            }
            other => panic!("expected stall, got {other:?}"),
        }
    }

    #[test]
    fn lambda_commuting_diagonal_limit() {
        // Wide spread (two decades of eigenvalue ratio) makes late schedule
        // levels expensive (inner contraction degrades like 1 - t), so this
        // oracle runs at a coarse tol_lambda; tight-tolerance behavior is
        // covered by the small-spread tests below.
        let a = PdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let b = PdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let c = PdMatrix::identity(2);
        let third = 1.0 / 3.0;
        let w = vec![third, third, 1.0 - 2.0 * third];
        let p = MeanProblem::new(w, vec![a, b, c]).unwrap();
        let lp = Arc::new(logpair_power(0.0).unwrap());
        let (x, report) = lambda_extension(&lp, &p, 0.5, 0.5, 1e-5, 1e-8, 60).unwrap();
        let expect = 4f64.powf(third);
        assert_relative_eq!(x.matrix()[(0, 0)].re, expect, max_relative = 1e-4);
        assert_relative_eq!(x.matrix()[(1, 1)].re, expect, max_relative = 1e-4);
        assert!(report.karcher_residual.unwrap() < 1e-3);
        let ts = report.t_schedule.unwrap();
        assert!(ts.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn lambda_of_affine_pair_exits_immediately() {
        let p = random_problem(8, 3, 3, 0.6);
        let lp = Arc::new(logpair_power(1.0).unwrap());
        let (x, report) = lambda_extension(&lp, &p, 0.5, 0.5, 1e-9, 1e-11, 60).unwrap();
        assert!(d_inf(&x, &p.arithmetic().unwrap()).unwrap().value < 1e-9);
        assert_eq!(report.t_schedule.unwrap().len(), 2);
    }

    #[test]
    fn lambda_single_matrix_returns_it() {
        let a = random_pd(&mut seeded_rng(9), 3, 0.8).unwrap();
        let p = MeanProblem::new(vec![1.0], vec![a.clone()]).unwrap();
        let lp = Arc::new(logpair_power(0.5).unwrap());
        let (x, _) = lambda_extension(&lp, &p, 0.5, 0.5, 1e-9, 1e-11, 60).unwrap();
        assert!(d_inf(&x, &a).unwrap().value < 1e-9);
    }

    #[test]
    fn lambda_rejects_start_above_validated_range() {
        let base = RepresentingFunction::power_family(0.4, 0.0).unwrap();
        let lp = Arc::new(crate::logpair::logpair_from_f(&base, 1e-12).unwrap());
        let p = random_problem(10, 2, 2, 0.5);
        assert!(lambda_extension(&lp, &p, 0.5, 0.5, 1e-8, 1e-10, 60).is_err());
    }

    #[test]
    fn karcher_residual_vanishes_at_common_point() {
        let a = random_pd(&mut seeded_rng(11), 3, 0.8).unwrap();
        let p = MeanProblem::new(
            vec![0.4, 0.6],
            vec![a.clone(), a.clone()],
        )
        .unwrap();
        let lp = logpair_power(0.0).unwrap();
        assert!(karcher_residual(&lp, &a, &p).unwrap() < 1e-13);
    }

    #[test]
    fn arithmetic_mean_fails_geometric_karcher_equation() {
        let p = random_problem(12, 3, 3, 0.9);
        let lp = logpair_power(0.0).unwrap();
        let arith = p.arithmetic().unwrap();
        assert!(karcher_residual(&lp, &arith, &p).unwrap() > 1e-3);
    }

    #[test]
    fn classical_karcher_of_pair_is_geometric_mean() {
        let mut rng = seeded_rng(13);
        let a = random_pd(&mut rng, 3, 0.005).unwrap();
        let b = random_pd(&mut rng, 3, 0.005).unwrap();
        let p = MeanProblem::new(vec![0.5, 0.5], vec![a.clone(), b.clone()]).unwrap();
        let (x, _) = classical_karcher(&p, 1e-9, 80).unwrap();
        let geo = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let expect = mean_eval(&geo, &a, &b).unwrap();
        assert!(d_inf(&x, &expect).unwrap().value < 1e-8);
    }

    #[test]
    fn two_schedules_agree() {
        let p = random_problem(14, 3, 3, 0.02);
        let lp = Arc::new(logpair_power(0.5).unwrap());
        let tol = 1e-7;
        let (x1, _) = lambda_extension(&lp, &p, 0.5, 0.5, tol, 1e-10, 80).unwrap();
        let (x2, _) = lambda_extension(&lp, &p, 0.25, 0.4, tol, 1e-10, 80).unwrap();
        assert!(d_inf(&x1, &x2).unwrap().value < 2.0 * tol);
    }

    #[test]
    fn report_serialization_is_flat_kv() {
        let report = SolveReport {
            iterations: 7,
            step_distances: vec![0.5, 0.25],
            fixed_point_residual: 1e-11,
            karcher_residual: Some(2e-9),
            rho_estimate: Some(0.5),
            t_schedule: Some(vec![0.5, 0.25]),
        };
        let kv = report.to_kv();
        assert!(kv.contains("iterations=7\n"));
        assert!(kv.contains("residual="));
        assert!(kv.contains("karcher_residual="));
        assert!(kv.matches("t_l=").count() == 2);
        let csv = report.steps_csv();
        assert!(csv.starts_with("step,distance\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
