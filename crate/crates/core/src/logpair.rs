//! Logarithm/exponential pairs attached to operator means.
//!
//! Every non-trivial representing function `f` has a unique increasing
//! function `log_I` with `log_I(1) = 0`, `log_I'(1) = 1` solving the
//! functional equation `log_I(f(x)) = f'(1) log_I(x)`. It is obtained as the
//! limit of the Koenigs iteration `(f^{on}(x) - 1)/f'(1)^n`, and together with
//! its inverse `exp_I` generates the one-parameter family
//! `f_t = exp_I(t log_I)` interpolating the mean across weights.
//!
//! Three constructions are provided: closed-form pairs of the power family,
//! numeric pairs recovered by the Koenigs iteration from an arbitrary mean,
//! and the affine shortcut `log = (f - 1)/f'(1)` (which satisfies the slope
//! normalization but generally not the functional equation, so it carries no
//! semigroup claim).
//!
//! Like the representing functions, all evaluation is done in deviation
//! coordinates (`log_dev(u) = log(1+u)`, `exp_dev(y) = exp(y) - 1`) so the
//! tiny deviations that drive fixed-point stopping rules keep full relative
//! accuracy.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hpd::{eigh, HermMatrix};
use crate::repfn::{canonical_grid, illinois, inverse_envelope_hint, scalar_invert, RepresentingFunction};

/// Iteration cap for the Koenigs limit.
const KOENIGS_MAX_ITER: usize = 300;
/// Default stopping tolerance for Koenigs runs when none is supplied.
pub const KOENIGS_DEFAULT_TOL: f64 = 1e-12;
/// Slope-at-1 normalization check tolerance.
const SLOPE_TOL: f64 = 1e-6;
const SLOPE_STEP: f64 = 1e-5;
/// Verdict threshold for the Loewner positive-semidefiniteness test.
const LOEWNER_TOL: f64 = -1e-10;
/// Argument range for inversions (matches `scalar_invert`).
const INVERT_MIN: f64 = 1e-12;
const INVERT_MAX: f64 = 1e12;

/// How a pair was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairProvenance {
    /// Closed-form `((x^q - 1)/q, (qy + 1)^{1/q})`.
    ClosedFormPower,
    /// Koenigs iteration on a representing function.
    KoenigsNumeric,
    /// Affine normalization `(f - 1)/f'(1)` of a representing function.
    AffineFromF,
}

#[derive(Clone, Debug)]
enum PairKind {
    Power {
        q: f64,
    },
    Koenigs {
        base: RepresentingFunction,
        tol: f64,
        /// `(u, log_dev(u))` at the canonical grid, sorted by `u`; keys are
        /// the exact floats produced by `canonical_grid()`, so lookups during
        /// validation and residual checks are exact hits.
        memo: Vec<(f64, f64)>,
    },
    Affine {
        base: RepresentingFunction,
    },
}

/// A strictly increasing logarithm map with `log(1) = 0`, `log'(1) = 1`,
/// bundled with its inverse.
#[derive(Clone, Debug)]
pub struct LogPair {
    kind: PairKind,
    t0: f64,
    label: String,
}

impl LogPair {
    /// Largest parameter for which semigroup members are validated means.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn provenance(&self) -> PairProvenance {
        match self.kind {
            PairKind::Power { .. } => PairProvenance::ClosedFormPower,
            PairKind::Koenigs { .. } => PairProvenance::KoenigsNumeric,
            PairKind::Affine { .. } => PairProvenance::AffineFromF,
        }
    }

    /// Descriptor string (CLI syntax for constructible kinds).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Relative size of evaluation noise: closed forms are exact to rounding,
    /// numeric pairs run iterations and inversions. Solvers use this to floor
    /// their inner tolerances so stopping rules stay achievable.
    pub fn eval_noise_floor(&self) -> f64 {
        match self.kind {
            PairKind::Power { .. } => 1e-14,
            _ => 5e-13,
        }
    }

    /// `log(x)` for `x > 0`.
    pub fn log(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::OutOfRange(format!(
                "logarithm maps are defined on (0,inf), got {x}"
            )));
        }
        // Below 1/2 the deviation u = x - 1 pins against -1, so its absolute
        // rounding (~1e-16) is amplified by the map's slope there (1/x^2 for
        // q = -1). Closed-form pairs evaluate directly on x instead, which
        // keeps the result relative-accurate; from 1/2 up the deviation is
        // exact (Sterbenz) or cancellation-free.
        if x < 0.5 {
            if let PairKind::Power { q } = &self.kind {
                return Ok(power_log_direct(*q, x));
            }
        }
        self.log_dev(x - 1.0)
    }

    /// `log(1 + u)` in deviation form.
    pub fn log_dev(&self, u: f64) -> Result<f64> {
        if !(u.is_finite() && u > -1.0) {
            return Err(Error::OutOfRange(format!(
                "deviation argument must be finite and exceed -1, got {u}"
            )));
        }
        match &self.kind {
            PairKind::Power { q } => Ok(power_log_dev(*q, u)),
            PairKind::Koenigs { base, tol, memo } => {
                if let Ok(idx) = memo.binary_search_by(|probe| probe.0.total_cmp(&u)) {
                    return Ok(memo[idx].1);
                }
                koenigs_dev(base, u, *tol)
            }
            PairKind::Affine { base } => Ok(base.eval_dev(u)? / base.tprime()),
        }
    }

    /// `exp(y)`, the inverse of `log`.
    pub fn exp(&self, y: f64) -> Result<f64> {
        Ok(1.0 + self.exp_dev(y)?)
    }

    /// `exp(y) - 1` in deviation form. Closed-form pairs evaluate directly;
    /// numeric pairs invert `log_dev` on a bracket seeded by the envelope
    /// `u/(1+u) <= log_dev(u) <= u`, which pins the solution into
    /// `[y, y/(1-y)]` and keeps the search local even for tiny `y`.
    pub fn exp_dev(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::OutOfRange(format!("non-finite exponent {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if let PairKind::Power { q } = &self.kind {
            return power_exp_dev(*q, y);
        }

        let mut lo;
        let mut hi;
        if y < 0.0 {
            lo = y.max(-1.0 + INVERT_MIN);
            hi = y / (1.0 - y);
        } else if y < 1.0 {
            lo = y;
            hi = y / (1.0 - y);
        } else {
            lo = y;
            hi = 4.0 * y + 4.0;
        }
        let mut flo = self.log_dev(lo)?;
        while flo > y {
            // Only reachable at the domain edge u -> -1 where the envelope
            // argument degrades; back off toward x = 0.
            if 1.0 + lo <= INVERT_MIN {
                return Err(Error::OutOfRange(format!(
                    "exponent {y:.6e} below the range of {}",
                    self.label
                )));
            }
            lo = (1.0 + lo) / 4.0 - 1.0;
            if 1.0 + lo < INVERT_MIN {
                lo = INVERT_MIN - 1.0;
            }
            flo = self.log_dev(lo)?;
        }
        let mut fhi = self.log_dev(hi)?;
        while fhi < y {
            if 1.0 + hi >= INVERT_MAX {
                return Err(Error::OutOfRange(format!(
                    "exponent {y:.6e} above the range of {}",
                    self.label
                )));
            }
            hi = (1.0 + hi) * 4.0 - 1.0;
            if 1.0 + hi > INVERT_MAX {
                hi = INVERT_MAX - 1.0;
            }
            fhi = self.log_dev(hi)?;
        }
        let tol_y = self.eval_noise_floor().max(1e-13) * y.abs().max(1.0);
        illinois(&|u: f64| self.log_dev(u), y, lo, hi, flo, fhi, tol_y)
    }
}

/// `(x^q - 1)/q` straight from `x`, for arguments far from the fixed point
/// where the deviation form would round through `x - 1`.
fn power_log_direct(q: f64, x: f64) -> f64 {
    if q.abs() < 1e-8 {
        x.ln()
    } else {
        f64::exp_m1(q * x.ln()) / q
    }
}

fn power_log_dev(q: f64, u: f64) -> f64 {
    if q == 1.0 {
        u
    } else if q == -1.0 {
        u / (1.0 + u)
    } else if q.abs() < 1e-8 {
        f64::ln_1p(u)
    } else {
        f64::exp_m1(q * f64::ln_1p(u)) / q
    }
}

fn power_exp_dev(q: f64, y: f64) -> Result<f64> {
    if q == 1.0 {
        return Ok(y);
    }
    if q == -1.0 {
        if y >= 1.0 {
            return Err(Error::OutOfRange(format!(
                "exponent {y:.6e} at or above the range limit 1 of the q=-1 pair"
            )));
        }
        return Ok(y / (1.0 - y));
    }
    if q.abs() < 1e-8 {
        return Ok(f64::exp_m1(y));
    }
    let z = q * y;
    if z <= -1.0 {
        return Err(Error::OutOfRange(format!(
            "exponent {y:.6e} outside the range of the q={q} pair"
        )));
    }
    Ok(f64::exp_m1(f64::ln_1p(z) / q))
}

/// Koenigs iteration in deviation form: `u_n = f_dev(u_{n-1})`, limit of
/// `r_n = u_n / t^n`. The rescaling is tracked through logarithms so small
/// slopes cannot underflow `t^n` (at `t = 0.05`, `t^300` is far below the
/// smallest positive double).
fn koenigs_dev(f: &RepresentingFunction, u0: f64, tol: f64) -> Result<f64> {
    if u0 == 0.0 {
        return Ok(0.0);
    }
    let t = f.tprime();
    debug_assert!(t > 0.0 && t < 1.0);
    let ln_t = t.ln();
    let mut u = u0;
    let mut r_prev = u0;
    let mut r_last = u0;
    for n in 1..=KOENIGS_MAX_ITER {
        u = f.eval_dev(u)?;
        if u == 0.0 {
            // The orbit hit the fixed point exactly in floating point; the
            // previous rescaled iterate is the converged value.
            return Ok(r_last);
        }
        // One product, not an accumulated sum: repeated `-= ln_t` rounds at
        // every step and the error lands multiplied by |log| after the exp.
        let ln_scale = -(n as f64) * ln_t;
        let r = u.signum() * f64::exp(u.abs().ln() + ln_scale);
        if !r.is_finite() {
            return Err(Error::Numerical(format!(
                "Koenigs iteration overflowed for {} at deviation {u0:.6e}",
                f.label()
            )));
        }
        if (r - r_last).abs() < tol * r.abs().max(1.0) {
            return Ok(r);
        }
        r_prev = r_last;
        r_last = r;
    }
    Err(Error::NoConvergence(format!(
        "Koenigs iteration did not stabilize within {KOENIGS_MAX_ITER} steps for {} \
         at deviation {u0:.6e}; last two iterates {r_prev:.16e}, {r_last:.16e}",
        f.label()
    )))
}

/// Koenigs limit `log_I(x)` of a non-trivial mean, with successive-iterate
/// stopping at relative tolerance `tol` and a 300-step cap.
pub fn koenigs_log(f: &RepresentingFunction, x: f64, tol: f64) -> Result<f64> {
    if f.is_left_trivial() || f.is_right_trivial() {
        return Err(Error::InvalidMean(format!(
            "Koenigs limit needs 0 < f'(1) < 1, got slope {} for {}",
            f.tprime(),
            f.label()
        )));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::OutOfRange(format!(
            "Koenigs limit is defined on (0,inf), got {x}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    koenigs_dev(f, x - 1.0, tol)
}

/// The rescaled iterate `(f^{on}(x) - 1)/f'(1)^n` at a fixed depth `n`, with
/// no stopping rule. Diagnostic companion to [`koenigs_log`] for convergence
/// studies.
pub fn koenigs_iterate(f: &RepresentingFunction, x: f64, n: usize) -> Result<f64> {
    if f.is_left_trivial() || f.is_right_trivial() {
        return Err(Error::InvalidMean(format!(
            "Koenigs iterate needs 0 < f'(1) < 1, got slope {}",
            f.tprime()
        )));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::OutOfRange(format!(
            "Koenigs iterate is defined on (0,inf), got {x}"
        )));
    }
    let t = f.tprime();
    let ln_t = t.ln();
    let mut u = x - 1.0;
    if u == 0.0 {
        return Ok(0.0);
    }
    for _ in 0..n {
        u = f.eval_dev(u)?;
        if u == 0.0 {
            return Ok(0.0);
        }
    }
    let r = u.signum() * f64::exp(u.abs().ln() - (n as f64) * ln_t);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Numerical(format!(
            "rescaled iterate overflowed at n = {n} for x = {x:.6e}"
        )))
    }
}

/// Shared post-construction validation: normalization at 1, unit slope,
/// envelope `1 - 1/x <= log(x) <= x - 1` (with slack scaled by
/// `max(1, x, 1/x)` since the bound magnitudes grow like `x` above 1 and
/// like `1/x` below it), and the inverse round trip.
fn validate_pair(pair: &LogPair) -> Result<()> {
    let at_one = pair.log_dev(0.0)?;
    if at_one != 0.0 {
        return Err(Error::Numerical(format!(
            "{}: log(1) = {at_one:.3e}, expected exactly 0",
            pair.label
        )));
    }
    let h = SLOPE_STEP;
    let slope = (pair.log_dev(h)? - pair.log_dev(-h)?) / (2.0 * h);
    if (slope - 1.0).abs() > SLOPE_TOL {
        return Err(Error::Numerical(format!(
            "{}: slope of log at 1 is {slope:.9}, expected 1",
            pair.label
        )));
    }
    for x in canonical_grid() {
        let lg = pair.log(x)?;
        let slack = 1e-10 * x.max(1.0 / x).max(1.0);
        let lower = 1.0 - 1.0 / x;
        let upper = x - 1.0;
        if lg < lower - slack || lg > upper + slack {
            return Err(Error::Numerical(format!(
                "{}: log({x:.6e}) = {lg:.12e} escapes the envelope [{lower:.6e}, {upper:.6e}]",
                pair.label
            )));
        }
        let back = pair.exp(lg)?;
        if (back - x).abs() > 1e-10 * x.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "{}: exp(log({x:.6e})) = {back:.12e}, round trip off by {:.3e}",
                pair.label,
                (back - x).abs()
            )));
        }
    }
    Ok(())
}

/// Closed-form pair of the power family: `log = (x^q - 1)/q`,
/// `exp = (qy + 1)^{1/q}` (natural log/exp at `q = 0`). Valid for the full
/// parameter range: `t0 = 1`.
pub fn logpair_power(q: f64) -> Result<LogPair> {
    if !(q.is_finite() && (-1.0..=1.0).contains(&q)) {
        return Err(Error::InvalidInput(format!(
            "power pair needs q in [-1,1], got {q}"
        )));
    }
    let pair = LogPair {
        kind: PairKind::Power { q },
        t0: 1.0,
        label: format!("logpair:power:q={q}"),
    };
    validate_pair(&pair)?;
    Ok(pair)
}

/// Numeric pair recovered from a mean by the Koenigs iteration, memoized on
/// the canonical grid (fresh runs off-grid). Semigroup members are validated
/// means up to `t0 = f'(1)`.
pub fn logpair_from_f(f: &RepresentingFunction, grid_tol: f64) -> Result<LogPair> {
    if f.is_left_trivial() || f.is_right_trivial() {
        return Err(Error::InvalidMean(format!(
            "a log pair needs 0 < f'(1) < 1, got slope {} for {}",
            f.tprime(),
            f.label()
        )));
    }
    if !(grid_tol.is_finite() && grid_tol > 0.0 && grid_tol <= 1e-3) {
        return Err(Error::InvalidInput(format!(
            "grid tolerance must lie in (0, 1e-3], got {grid_tol}"
        )));
    }
    let mut memo = Vec::with_capacity(crate::repfn::GRID_SIZE);
    for x in canonical_grid() {
        let u = x - 1.0;
        memo.push((u, koenigs_dev(f, u, grid_tol)?));
    }
    memo.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pair = LogPair {
        kind: PairKind::Koenigs {
            base: f.clone(),
            tol: grid_tol,
            memo,
        },
        t0: f.tprime(),
        label: format!("logpair:koenigs:base={}", f.label()),
    };
    validate_pair(&pair)?;
    Ok(pair)
}

/// Affine pair `log = (f - 1)/f'(1)`. Normalized and increasing, but it does
/// not solve the functional equation unless the mean is already affine, so it
/// carries no semigroup validity claim (`t0 = 0`).
pub fn logpair_affine_from_f(f: &RepresentingFunction) -> Result<LogPair> {
    if f.is_left_trivial() || f.is_right_trivial() {
        return Err(Error::InvalidMean(format!(
            "a log pair needs 0 < f'(1) < 1, got slope {} for {}",
            f.tprime(),
            f.label()
        )));
    }
    let pair = LogPair {
        kind: PairKind::Affine { base: f.clone() },
        t0: 0.0,
        label: format!("logpair:affine:base={}", f.label()),
    };
    validate_pair(&pair)?;
    Ok(pair)
}

/// Member `f_t = exp_I(t log_I)` of the pair's one-parameter family.
///
/// For `t` above the validated range `t0`, construction proceeds (real-axis
/// evaluation stays well defined) but the result is flagged unvalidated, a
/// warning is logged, and the envelope check is skipped.
pub fn semigroup_member(pair: &Arc<LogPair>, t: f64) -> Result<RepresentingFunction> {
    if !(t.is_finite() && t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "semigroup parameter must lie in (0,1], got {t}"
        )));
    }
    let beyond = t > pair.t0() + 1e-12;
    if beyond {
        log::warn!(
            "semigroup member t = {t} exceeds the validated range t0 = {} of {}; \
             the result is not guaranteed to be an operator mean",
            pair.t0(),
            pair.label()
        );
    }
    RepresentingFunction::semigroup(Arc::clone(pair), t, beyond)
}

/// Max residual of the functional equation `log(f(x)) = f'(1) log(x)` over a
/// grid. Near zero exactly when `lp` is the pair belonging to `f`.
pub fn funceq_residual(f: &RepresentingFunction, lp: &LogPair, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty residual grid".into()));
    }
    let t = f.tprime();
    let mut worst: f64 = 0.0;
    for &x in grid {
        let lhs = lp.log(f.eval(x)?)?;
        let rhs = t * lp.log(x)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Result of the Loewner positive-semidefiniteness test.
#[derive(Clone, Debug)]
pub struct LoewnerReport {
    pub is_psd: bool,
    pub min_eig: f64,
}

/// Builds the Loewner matrix `L_ij = (phi(x_i) - phi(x_j))/(x_i - x_j)`
/// (diagonal: five-point central difference) and reports its smallest
/// eigenvalue with verdict threshold `-1e-10`. PSD on every point set is
/// necessary for `phi` to be matrix monotone of that order.
pub fn loewner_psd_check<F>(phi: F, points: &[f64]) -> Result<LoewnerReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let k = points.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    for &x in points {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InvalidInput(format!(
                "Loewner points must be positive, got {x}"
            )));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            if (points[i] - points[j]).abs() <= 1e-10 * points[i].abs().max(points[j].abs()) {
                return Err(Error::InvalidInput(format!(
                    "Loewner points must be distinct, got {} and {}",
                    points[i], points[j]
                )));
            }
        }
    }
    let values: Vec<f64> = points.iter().map(|&x| phi(x)).collect::<Result<_>>()?;
    let mut mat = DMatrix::<Complex64>::zeros(k, k);
    // Five-point stencil step balancing truncation (h^4) against rounding.
    let h_rel = f64::EPSILON.powf(0.2);
    for i in 0..k {
        for j in 0..k {
            let entry = if i == j {
                let x = points[i];
                let h = h_rel * x;
                (phi(x - 2.0 * h)? - 8.0 * phi(x - h)? + 8.0 * phi(x + h)? - phi(x + 2.0 * h)?)
                    / (12.0 * h)
            } else {
                (values[i] - values[j]) / (points[i] - points[j])
            };
            if !entry.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite Loewner entry at ({i},{j})"
                )));
            }
            mat[(i, j)] = Complex64::new(entry, 0.0);
        }
    }
    let eig = eigh(&HermMatrix::symmetrized(mat))?;
    let min_eig = eig.values[0];
    Ok(LoewnerReport {
        is_psd: min_eig >= LOEWNER_TOL,
        min_eig,
    })
}

/// Outcome of the membership probe for the lambda-extension class.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    /// Slope of the probe map at 1 (`-w1/w2` or `-w2/w1` depending on branch).
    pub slope_at_one: f64,
    /// First composition depth `n` at which every sample set was PSD.
    pub passes_at: Option<usize>,
    /// `min_eigs[n-1][set]`: smallest Loewner eigenvalue per depth and set.
    pub min_eigs: Vec<Vec<f64>>,
}

/// Numerical necessary-condition probe: builds the auxiliary map
///
/// * `h(x) = x g^{-1}(1/x)` when `g'(1) > 1/2`,
/// * `h(x) = x / (g*)^{-1}(x)` with `g*(x) = x/g(x)` when `g'(1) < 1/2`,
///
/// then checks the even compositions `h^{o2n}`, `n = 1..n_max`, for Loewner
/// PSD on each supplied sample set. Passing is evidence (PSD is necessary,
/// not sufficient); failing at every depth is a refutation of membership at
/// the sampled orders. Slopes `g'(1)` of exactly 0, 1/2, or 1 are excluded.
pub fn lambda_membership_probe(
    g: &RepresentingFunction,
    n_max: usize,
    sample_sets: &[Vec<f64>],
) -> Result<ProbeReport> {
    let gp = g.tprime();
    for excluded in [0.0, 0.5, 1.0] {
        if (gp - excluded).abs() < 1e-9 {
            return Err(Error::InvalidInput(format!(
                "membership probe excludes slope g'(1) = {excluded}; got {gp}"
            )));
        }
    }
    if n_max == 0 || sample_sets.is_empty() {
        return Err(Error::InvalidInput(
            "probe needs n_max >= 1 and at least one sample set".into(),
        ));
    }

    let g_own = g.clone();
    let h: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync> = if gp > 0.5 {
        Arc::new(move |x: f64| {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::OutOfRange(format!("probe map needs x > 0, got {x}")));
            }
            let z = 1.0 / x;
            let inv = scalar_invert(|v| g_own.eval(v), z, inverse_envelope_hint(z, gp))?;
            Ok(x * inv)
        })
    } else {
        let conj_slope = 1.0 - gp;
        Arc::new(move |x: f64| {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::OutOfRange(format!("probe map needs x > 0, got {x}")));
            }
            let star = |v: f64| Ok(v / g_own.eval(v)?);
            let inv = scalar_invert(star, x, inverse_envelope_hint(x, conj_slope))?;
            Ok(x / inv)
        })
    };

    // The two branches give slope -w1/w2 and -w2/w1 at 1 (w2 = g'(1)).
    let expected_slope = if gp > 0.5 {
        -(1.0 - gp) / gp
    } else {
        -gp / (1.0 - gp)
    };
    let fd = SLOPE_STEP;
    let slope = (h(1.0 + fd)? - h(1.0 - fd)?) / (2.0 * fd);
    if (slope - expected_slope).abs() > SLOPE_TOL {
        return Err(Error::Numerical(format!(
            "probe map slope at 1 is {slope:.9}, expected {expected_slope:.9}"
        )));
    }

    let h2n = |n: usize, x: f64| -> Result<f64> {
        let mut v = x;
        for _ in 0..2 * n {
            v = h(v)?;
        }
        Ok(v)
    };

    let mut min_eigs = Vec::new();
    let mut passes_at = None;
    for n in 1..=n_max {
        let mut row = Vec::with_capacity(sample_sets.len());
        let mut all = true;
        for set in sample_sets {
            let report = loewner_psd_check(|x| h2n(n, x), set)?;
            all &= report.is_psd;
            row.push(report.min_eig);
        }
        min_eigs.push(row);
        if all {
            passes_at = Some(n);
            break;
        }
    }
    Ok(ProbeReport {
        slope_at_one: slope,
        passes_at,
        min_eigs,
    })
}
