//! Representing functions of two-variable operator means.
//!
//! A mean `M(A, B) = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}` is determined by
//! its representing function `f`, an operator monotone function on `(0, inf)`
//! with `f(1) = 1`. The slope `t = f'(1)` fixes the weight of the mean, and
//! every representing function is squeezed between the weighted harmonic and
//! arithmetic functions with the same slope (the envelope), which this module
//! validates on construction.
//!
//! Evaluation is done in *deviation form*: `eval_dev(u) = f(1 + u) - 1`
//! computed without forming `f(x)` and subtracting. Fixed-point iterations
//! downstream contract toward 1, and the quantities that drive their stopping
//! rules and limits are exactly these deviations; evaluating them directly
//! keeps relative accuracy at machine level where naive evaluation would lose
//! all significant digits.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logpair::LogPair;

/// Number of points in the validation grid.
pub const GRID_SIZE: usize = 64;
/// Grid span: four decades on each side of the fixed point 1.
pub const GRID_MIN: f64 = 1e-4;
pub const GRID_MAX: f64 = 1e4;

/// Tolerance for `f(1) = 1` at construction.
const FIXED_POINT_TOL: f64 = 1e-14;
/// Tolerance for the finite-difference check of the declared slope at 1.
const SLOPE_TOL: f64 = 1e-6;
/// Step for that finite difference.
const SLOPE_STEP: f64 = 1e-5;
/// Relative tolerance for the envelope inequality on the grid.
const ENVELOPE_TOL: f64 = 1e-12;
/// Relative slack allowed when checking grid monotonicity.
const MONOTONE_SLACK: f64 = 1e-13;
/// Bracket expansion limits for scalar inversion.
const INVERT_MIN: f64 = 1e-12;
const INVERT_MAX: f64 = 1e12;

/// The 64-point log-spaced grid on `[1e-4, 1e4]` used by every validator and
/// residual check in the crate. Deterministic, so memo tables keyed on these
/// abscissas get exact hits.
pub fn canonical_grid() -> Vec<f64> {
    (0..GRID_SIZE)
        .map(|i| {
            let e = -4.0 + 8.0 * (i as f64) / ((GRID_SIZE - 1) as f64);
            10f64.powf(e)
        })
        .collect()
}

type ScalarFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// `f(x) = ((1-t) + t x^q)^{1/q}`, the power family (`q = 0` means `x^t`).
    Power { t: f64, q: f64 },
    /// `f(x) = sum_i nu_i ((1-s_i) + s_i/x)^{-1}`, a mixture of weighted
    /// harmonic means: the integral representation with a discrete measure.
    Mixture { atoms: Vec<(f64, f64)> },
    /// `f_t = exp_I(t log_I)` for a log/exp pair.
    Semigroup { pair: Arc<LogPair>, t: f64 },
    /// User-supplied scalar function with declared slope; optional companion
    /// evaluating `f(1+u) - 1` accurately.
    Custom { f: ScalarFn, f_dev: Option<ScalarFn> },
}

/// A validated representing function.
#[derive(Clone)]
pub struct RepresentingFunction {
    kind: Kind,
    tprime: f64,
    label: String,
    /// True when construction bypassed the envelope guarantee (semigroup
    /// members above the validated parameter, or unchecked customs).
    unvalidated: bool,
}

impl fmt::Debug for RepresentingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepresentingFunction")
            .field("label", &self.label)
            .field("tprime", &self.tprime)
            .finish()
    }
}

impl RepresentingFunction {
    /// Power family `((1-t) + t x^q)^{1/q}` for `t in (0,1)`, `q in [-1,1]`.
    /// `q = 0` (or `|q| < 1e-8`) is the limit `x^t`.
    pub fn power_family(t: f64, q: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(Error::InvalidMean(format!(
                "power family needs t strictly inside (0,1), got {t}"
            )));
        }
        if !(q.is_finite() && (-1.0..=1.0).contains(&q)) {
            return Err(Error::InvalidMean(format!(
                "power family needs q in [-1,1] (operator monotonicity fails outside), got {q}"
            )));
        }
        let rf = Self {
            kind: Kind::Power { t, q },
            tprime: t,
            label: format!("power:t={t},q={q}"),
            unvalidated: false,
        };
        rf.validate()?;
        Ok(rf)
    }

    /// Mixture `sum_i nu_i ((1-s_i) + s_i/x)^{-1}` with `s_i in [0,1]`,
    /// `nu_i > 0`, `sum nu_i = 1`. Slope is `sum s_i nu_i`.
    pub fn harmonic_mixture(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMean("mixture needs at least one atom".into()));
        }
        let mut total = 0.0;
        let mut tprime = 0.0;
        for &(s, nu) in atoms {
            if !(s.is_finite() && (0.0..=1.0).contains(&s)) {
                return Err(Error::InvalidMean(format!(
                    "mixture atom location must lie in [0,1], got {s}"
                )));
            }
            if !(nu.is_finite() && nu > 0.0) {
                return Err(Error::InvalidMean(format!(
                    "mixture atom weight must be positive, got {nu}"
                )));
            }
            total += nu;
            tprime += s * nu;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMean(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        let label = atoms
            .iter()
            .map(|(s, nu)| format!("({s},{nu})"))
            .collect::<Vec<_>>()
            .join(";");
        let rf = Self {
            kind: Kind::Mixture {
                atoms: atoms.to_vec(),
            },
            tprime: tprime.clamp(0.0, 1.0),
            label: format!("mixture:{label}"),
            unvalidated: false,
        };
        rf.validate()?;
        Ok(rf)
    }

    /// User-supplied function with a declared slope at 1; fully validated
    /// (fixed point, slope, grid monotonicity, envelope).
    pub fn custom<F>(label: &str, f: F, tprime: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        if !(tprime.is_finite() && (0.0..=1.0).contains(&tprime)) {
            return Err(Error::InvalidMean(format!(
                "declared slope must lie in [0,1], got {tprime}"
            )));
        }
        let rf = Self {
            kind: Kind::Custom {
                f: Arc::new(f),
                f_dev: None,
            },
            tprime,
            label: label.to_string(),
            unvalidated: false,
        };
        rf.validate()?;
        Ok(rf)
    }

    /// User-supplied function wrapped with **no validation**. For diagnostics
    /// only (e.g. feeding a deliberately broken candidate to the property
    /// suite); everything downstream trusts representing functions, so do not
    /// use unchecked values in real computations.
    pub fn custom_unchecked<F>(label: &str, f: F, tprime: f64) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            kind: Kind::Custom {
                f: Arc::new(f),
                f_dev: None,
            },
            tprime,
            label: label.to_string(),
            unvalidated: true,
        }
    }

    /// Member `f_t = exp_I(t log_I)` of the one-parameter family of a pair.
    /// Crate-internal; use [`crate::logpair::semigroup_member`].
    pub(crate) fn semigroup(pair: Arc<LogPair>, t: f64, beyond_validated: bool) -> Result<Self> {
        let label = format!("semigroup:base={},t={t}", pair.label());
        let rf = Self {
            kind: Kind::Semigroup { pair, t },
            tprime: t,
            label,
            unvalidated: beyond_validated,
        };
        rf.validate()?;
        Ok(rf)
    }

    /// Slope `f'(1)`, the weight of the mean.
    pub fn tprime(&self) -> f64 {
        self.tprime
    }

    /// Human-readable descriptor (also the CLI syntax for constructible kinds).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when the envelope guarantee was skipped at construction.
    pub fn is_unvalidated(&self) -> bool {
        self.unvalidated
    }

    /// `f'(1) = 0`: the mean ignores its second argument.
    pub fn is_left_trivial(&self) -> bool {
        self.tprime.abs() <= 1e-9
    }

    /// `f'(1) = 1`: the mean returns its second argument. Deliberately an
    /// equality test, not `>=`: unchecked diagnostic functions can carry
    /// slopes outside [0,1] and must not be mistaken for the right-trivial
    /// mean.
    pub fn is_right_trivial(&self) -> bool {
        (self.tprime - 1.0).abs() <= 1e-9
    }

    /// `f(x)` for `x > 0`.
    ///
    /// Near the fixed point the value comes from the deviation form, which
    /// avoids cancellation in `f(x) - 1`. Once the result sits below 1/2 the
    /// reconstruction `1 + dev` would cap it at absolute rounding, so the
    /// closed-form kinds switch to direct formulas that stay
    /// relative-accurate all the way down (a pair's logarithm amplifies any
    /// slack here by up to `1/f(x)^2`).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::OutOfRange(format!(
                "representing functions are defined on (0,inf), got {x}"
            )));
        }
        let dev = self.eval_dev(x - 1.0)?;
        if dev > -0.5 {
            return Ok(1.0 + dev);
        }
        match &self.kind {
            Kind::Power { t, q } => Ok(power_val(*t, *q, x)),
            Kind::Mixture { atoms } => Ok(atoms
                .iter()
                .map(|&(s, nu)| nu * x / ((1.0 - s) * x + s))
                .sum()),
            _ => Ok(1.0 + dev),
        }
    }

    /// Deviation form `f(1 + u) - 1` for `u > -1`, the accuracy-critical
    /// primitive: computed from stable per-kind formulas, never by cancelling
    /// `f(x) - 1`.
    pub fn eval_dev(&self, u: f64) -> Result<f64> {
        if !(u.is_finite() && u > -1.0) {
            return Err(Error::OutOfRange(format!(
                "deviation argument must be finite and exceed -1, got {u}"
            )));
        }
        let v = match &self.kind {
            Kind::Power { t, q } => power_dev(*t, *q, u),
            Kind::Mixture { atoms } => atoms
                .iter()
                .map(|&(s, nu)| nu * s * u / (1.0 + (1.0 - s) * u))
                .sum(),
            Kind::Semigroup { pair, t } => pair.exp_dev(t * pair.log_dev(u)?)?,
            Kind::Custom { f, f_dev } => match f_dev {
                Some(dev) => dev(u)?,
                None => f(1.0 + u)? - 1.0,
            },
        };
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "{} produced a non-finite value at x = {}",
                self.label,
                1.0 + u
            )));
        }
        Ok(v)
    }

    /// Transpose `x f(1/x)`: swaps the roles of the two mean arguments.
    /// Closed-form kinds stay closed-form (`t -> 1-t`, atoms `s -> 1-s`).
    pub fn transpose(&self) -> Result<Self> {
        match &self.kind {
            Kind::Power { t, q } => Self::power_family(1.0 - t, *q),
            Kind::Mixture { atoms } => {
                let flipped: Vec<(f64, f64)> =
                    atoms.iter().map(|&(s, nu)| (1.0 - s, nu)).collect();
                Self::harmonic_mixture(&flipped)
            }
            _ => {
                let inner = self.clone();
                let inner_dev = self.clone();
                let label = format!("transpose({})", self.label);
                let tprime = 1.0 - self.tprime;
                let rf = Self {
                    kind: Kind::Custom {
                        f: Arc::new(move |x: f64| Ok(x * inner.eval(1.0 / x)?)),
                        // x f(1/x) - 1 = u + (1+u) (f(1/(1+u)) - 1), with the
                        // inner deviation at exactly -u/(1+u).
                        f_dev: Some(Arc::new(move |u: f64| {
                            let w = inner_dev.eval_dev(-u / (1.0 + u))?;
                            Ok(u + (1.0 + u) * w)
                        })),
                    },
                    tprime,
                    label,
                    unvalidated: self.unvalidated,
                };
                if rf.unvalidated {
                    Ok(rf)
                } else {
                    rf.validate()?;
                    Ok(rf)
                }
            }
        }
    }

    /// Shared validation: fixed point at 1, slope, positivity, monotonicity,
    /// and (unless flagged) the harmonic/arithmetic envelope on the grid.
    fn validate(&self) -> Result<()> {
        let at_one = self.eval_dev(0.0)?;
        if at_one.abs() > FIXED_POINT_TOL {
            return Err(Error::InvalidMean(format!(
                "{}: f(1) - 1 = {at_one:.3e}, expected 0 within {FIXED_POINT_TOL:.0e}",
                self.label
            )));
        }
        if !(self.tprime.is_finite() && (0.0..=1.0).contains(&self.tprime)) {
            return Err(Error::InvalidMean(format!(
                "{}: slope at 1 must lie in [0,1], got {}",
                self.label, self.tprime
            )));
        }
        let h = SLOPE_STEP;
        let slope = (self.eval_dev(h)? - self.eval_dev(-h)?) / (2.0 * h);
        if (slope - self.tprime).abs() > SLOPE_TOL {
            return Err(Error::InvalidMean(format!(
                "{}: finite-difference slope at 1 is {slope:.9}, declared {}",
                self.label, self.tprime
            )));
        }

        let t = self.tprime;
        let mut prev: Option<f64> = None;
        for x in canonical_grid() {
            let fx = self.eval(x)?;
            if fx <= 0.0 {
                return Err(Error::InvalidMean(format!(
                    "{}: non-positive value {fx:.6e} at x = {x:.6e}",
                    self.label
                )));
            }
            if let Some(p) = prev {
                if fx < p - MONOTONE_SLACK * p.abs().max(1.0) {
                    return Err(Error::InvalidMean(format!(
                        "{}: not nondecreasing near x = {x:.6e} ({p:.12e} then {fx:.12e})",
                        self.label
                    )));
                }
            }
            prev = Some(fx);
            if !self.unvalidated {
                let upper = (1.0 - t) + t * x;
                let lower = 1.0 / ((1.0 - t) + t / x);
                if fx > upper + ENVELOPE_TOL * upper.abs().max(1.0)
                    || fx < lower - ENVELOPE_TOL * lower.abs().max(1.0)
                {
                    return Err(Error::InvalidMean(format!(
                        "{}: value {fx:.12e} at x = {x:.6e} escapes the envelope \
                         [{lower:.12e}, {upper:.12e}] for slope {t}",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Deviation form of the power family, stable across the whole range:
/// `q = 1` and `q = -1` are exact, small `q` routes through the `x^t` limit,
/// and the general case is an expm1/log1p chain.
/// `((1-t) + t x^q)^{1/q}` straight from `x`, used when the value is small
/// enough that reconstructing it as `1 + dev` would lose relative accuracy.
fn power_val(t: f64, q: f64, x: f64) -> f64 {
    if q == 1.0 {
        (1.0 - t) + t * x
    } else if q == -1.0 {
        x / ((1.0 - t) * x + t)
    } else if q.abs() < 1e-8 {
        (t * x.ln()).exp()
    } else {
        (f64::ln_1p(t * f64::exp_m1(q * x.ln())) / q).exp()
    }
}

fn power_dev(t: f64, q: f64, u: f64) -> f64 {
    if q == 1.0 {
        t * u
    } else if q == -1.0 {
        t * u / (1.0 + (1.0 - t) * u)
    } else if q.abs() < 1e-8 {
        f64::exp_m1(t * f64::ln_1p(u))
    } else {
        let w = f64::exp_m1(q * f64::ln_1p(u));
        f64::exp_m1(f64::ln_1p(t * w) / q)
    }
}

/// Conjugate `g*(x) = x / g(x)` as a plain scalar function.
pub fn conjugate(g: &RepresentingFunction) -> impl Fn(f64) -> Result<f64> + Send + Sync + 'static {
    let g = g.clone();
    move |x: f64| {
        let v = g.eval(x)?;
        if v <= 0.0 {
            return Err(Error::Numerical(format!(
                "conjugate undefined where the function vanishes (x = {x})"
            )));
        }
        Ok(x / v)
    }
}

/// Solves `phi(x) = y` for strictly increasing `phi` on `(0, inf)`.
///
/// The bracket starts from `bracket_hint` (or the point 1) and expands
/// geometrically; leaving `[1e-12, 1e12]` without enclosing `y` is a range
/// error. Inside the bracket a regula-falsi iteration with Illinois damping
/// finds `x` with `|phi(x) - y| <= 1e-13 max(1, |y|)`.
pub fn scalar_invert<F>(phi: F, y: f64, bracket_hint: Option<(f64, f64)>) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !y.is_finite() {
        return Err(Error::InvalidInput(format!("inversion target {y} is not finite")));
    }
    let (mut lo, mut hi) = bracket_hint.unwrap_or((1.0, 1.0));
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "bracket hint must be positive, got ({lo}, {hi})"
        )));
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    lo = lo.clamp(INVERT_MIN, INVERT_MAX);
    hi = hi.clamp(INVERT_MIN, INVERT_MAX);

    let mut flo = phi(lo)?;
    while flo > y {
        if lo <= INVERT_MIN {
            return Err(Error::OutOfRange(format!(
                "no argument down to {INVERT_MIN:.0e} reaches below target {y:.6e}"
            )));
        }
        lo = (lo * 0.25).max(INVERT_MIN);
        flo = phi(lo)?;
    }
    let mut fhi = if hi > lo { phi(hi)? } else { flo };
    while fhi < y {
        if hi >= INVERT_MAX {
            return Err(Error::OutOfRange(format!(
                "no argument up to {INVERT_MAX:.0e} reaches above target {y:.6e}"
            )));
        }
        hi = (hi * 4.0).min(INVERT_MAX);
        fhi = phi(hi)?;
    }

    let tol_y = 1e-13 * y.abs().max(1.0);
    illinois(&phi, y, lo, hi, flo, fhi, tol_y)
}

/// Regula falsi with Illinois damping on a bracketing interval.
/// `f(a) <= y <= f(b)` must hold on entry.
///
/// The iteration runs until the bracket collapses to floating-point width
/// (or the residual hits zero exactly), so the returned abscissa is accurate
/// to roundoff regardless of how flat or steep `phi` is near the root.
/// Stopping on a `y`-residual alone would return poor abscissas near flat
/// stretches (targets close to a bounded function's supremum) and could
/// never finish when the target tolerance sits below the forward-evaluation
/// noise of `phi`. `tol_y` only classifies the outcome on the (practically
/// unreachable) iteration-cap path.
pub(crate) fn illinois<F>(
    phi: &F,
    y: f64,
    mut a: f64,
    mut b: f64,
    fa_raw: f64,
    fb_raw: f64,
    tol_y: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut fa = fa_raw - y;
    let mut fb = fb_raw - y;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa > 0.0 || fb < 0.0 {
        return Err(Error::Numerical(format!(
            "lost bracket while inverting: f({a:.6e})-y = {fa:.3e}, f({b:.6e})-y = {fb:.3e}"
        )));
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..240 {
        let mut m = b - fb * (b - a) / (fb - fa);
        if !m.is_finite() || m <= a || m >= b {
            m = 0.5 * (a + b);
            if m <= a || m >= b {
                return Ok(best.0);
            }
        }
        let fm = phi(m)? - y;
        if fm.abs() < best.1.abs() {
            best = (m, fm);
        }
        if fm == 0.0 {
            return Ok(m);
        }
        if fm < 0.0 {
            a = m;
            fa = fm;
            fb *= 0.5;
        } else {
            b = m;
            fb = fm;
            fa *= 0.5;
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(best.0);
        }
    }
    if best.1.abs() <= tol_y {
        Ok(best.0)
    } else {
        Err(Error::Numerical(format!(
            "inversion stalled: best residual {:.3e} above tolerance {tol_y:.3e}",
            best.1.abs()
        )))
    }
}

/// Bracket for `f^{-1}(z)` from the envelope of a slope-`t` representing
/// function: the inverse lies between the inverses of the arithmetic and
/// harmonic envelope functions.
pub(crate) fn inverse_envelope_hint(z: f64, t: f64) -> Option<(f64, f64)> {
    if !(z.is_finite() && z > 0.0) || t <= 0.0 || t > 1.0 {
        return None;
    }
    // Arithmetic envelope (1-t) + t x = z  =>  x = (z - (1-t))/t.
    let from_upper = ((z - (1.0 - t)) / t).clamp(INVERT_MIN, INVERT_MAX);
    // Harmonic envelope x/((1-t)x + t) = z  =>  x = z t / (1 - z(1-t)).
    let denom = 1.0 - z * (1.0 - t);
    let from_lower = if denom > 0.0 {
        (z * t / denom).clamp(INVERT_MIN, INVERT_MAX)
    } else {
        INVERT_MAX
    };
    let lo = from_upper.min(from_lower);
    let hi = from_upper.max(from_lower);
    Some((lo, hi))
}

/// The two-variable mean induced by `f` with weights `(w1, w2)`: the unique
/// solution `g` of the scalar fixed-point reduction, evaluated by inverting
///
/// `g^{-1}(x) = x f^{-1}((1 - w1 f(1/x)) / w2)`.
#[derive(Clone, Debug)]
pub struct InducedTwoMean {
    f: RepresentingFunction,
    w1: f64,
    w2: f64,
}

impl InducedTwoMean {
    /// Slope of the induced function at 1.
    pub fn tprime(&self) -> f64 {
        self.w2
    }

    pub fn base(&self) -> &RepresentingFunction {
        &self.f
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.w1, self.w2)
    }

    /// The inverse function `g^{-1}`, available in closed form up to one
    /// scalar inversion of `f`.
    pub fn g_inv(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::OutOfRange(format!(
                "induced mean inverse is defined on (0,inf), got {x}"
            )));
        }
        let target = (1.0 - self.w1 * self.f.eval(1.0 / x)?) / self.w2;
        if target <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "induced mean inverse leaves the cone at x = {x:.6e} \
                 (inner target {target:.6e})"
            )));
        }
        let hint = inverse_envelope_hint(target, self.f.tprime());
        let inner = scalar_invert(|v| self.f.eval(v), target, hint).map_err(|e| {
            Error::OutOfRange(format!("induced mean inverse failed at x = {x:.6e}: {e}"))
        })?;
        Ok(x * inner)
    }

    /// `g(x)`, computed by inverting `g_inv`. The envelope of `g` (slope `w2`)
    /// seeds the bracket, so the search is local.
    ///
    /// `g_inv` is only defined on an interval around 1; bracket endpoints that
    /// fall outside it are treated as conceptually below/above every target
    /// (`g_inv` is increasing), so the search tightens back into the domain
    /// instead of failing at an unevaluable endpoint.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::OutOfRange(format!(
                "induced mean is defined on (0,inf), got {x}"
            )));
        }
        if x == 1.0 {
            return Ok(1.0);
        }
        let t = self.w2;
        let mut lo = (1.0 / ((1.0 - t) + t / x)).clamp(INVERT_MIN, INVERT_MAX);
        let mut hi = ((1.0 - t) + t * x).clamp(INVERT_MIN, INVERT_MAX);

        // Ok(None) = out of g_inv's domain; the side is inferred from the
        // position relative to 1, which the domain always contains.
        let probe = |v: f64| -> Result<Option<f64>> {
            match self.g_inv(v) {
                Ok(val) => Ok(Some(val)),
                Err(Error::OutOfRange(_)) => Ok(None),
                Err(e) => Err(e),
            }
        };

        let tol_y = 1e-13 * x.abs().max(1.0);
        let mut flo = probe(lo)?;
        if matches!(flo, Some(v) if (v - x).abs() <= tol_y) {
            return Ok(lo);
        }
        if matches!(flo, Some(v) if v > x) || (flo.is_none() && lo >= 1.0) {
            return Err(Error::Numerical(format!(
                "induced mean bracket failed at x = {x:.6e}: lower envelope point \
                 does not sit below the target"
            )));
        }
        let mut fhi = probe(hi)?;
        if matches!(fhi, Some(v) if (v - x).abs() <= tol_y) {
            return Ok(hi);
        }
        while matches!(fhi, Some(v) if v < x) || (fhi.is_none() && hi < 1.0) {
            if hi >= INVERT_MAX {
                return Err(Error::OutOfRange(format!(
                    "induced mean bracket exhausted at x = {x:.6e}"
                )));
            }
            hi = (hi * 4.0).min(INVERT_MAX);
            fhi = probe(hi)?;
            if matches!(fhi, Some(v) if (v - x).abs() <= tol_y) {
                return Ok(hi);
            }
        }

        let mut best: Option<(f64, f64)> = None;
        for _ in 0..200 {
            let m = match (flo, fhi) {
                (Some(a), Some(b)) if b > a => {
                    // Secant step, clipped to the interior; fall back to the
                    // midpoint when it degenerates.
                    let s = lo + (x - a) * (hi - lo) / (b - a);
                    if s.is_finite() && s > lo && s < hi {
                        s
                    } else {
                        0.5 * (lo + hi)
                    }
                }
                _ => 0.5 * (lo + hi),
            };
            let fm = probe(m)?;
            match fm {
                Some(v) => {
                    if best.is_none_or(|(_, r)| (v - x).abs() < r.abs()) {
                        best = Some((m, v - x));
                    }
                    if (v - x).abs() <= tol_y {
                        return Ok(m);
                    }
                    if v < x {
                        lo = m;
                        flo = Some(v);
                    } else {
                        hi = m;
                        fhi = Some(v);
                    }
                }
                None if m < 1.0 => {
                    lo = m;
                    flo = None;
                }
                None => {
                    hi = m;
                    fhi = None;
                }
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(1e-300) {
                break;
            }
        }
        match best {
            Some((m, r)) if r.abs() <= tol_y => Ok(m),
            _ => Err(Error::Numerical(format!(
                "induced mean evaluation stalled at x = {x:.6e}"
            ))),
        }
    }
}

/// Builds the induced two-variable mean, checking that `f` is usable
/// (non-trivial) and that the construction reproduces slope `w2` at 1.
pub fn induced2_repfn(f: &RepresentingFunction, w1: f64, w2: f64) -> Result<InducedTwoMean> {
    if !(w1.is_finite() && w2.is_finite() && w1 > 0.0 && w2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "weights must be positive, got ({w1}, {w2})"
        )));
    }
    if (w1 + w2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "weights must sum to 1, got {w1} + {w2} = {}",
            w1 + w2
        )));
    }
    if f.is_left_trivial() || f.is_right_trivial() {
        return Err(Error::InvalidMean(format!(
            "induced construction needs a non-trivial strictly increasing f, \
             got {} with slope {}",
            f.label(),
            f.tprime()
        )));
    }
    let g = InducedTwoMean {
        f: f.clone(),
        w1,
        w2,
    };
    let h = SLOPE_STEP;
    let slope = (g.eval(1.0 + h)? - g.eval(1.0 - h)?) / (2.0 * h);
    if (slope - w2).abs() > SLOPE_TOL {
        return Err(Error::Numerical(format!(
            "induced mean of {} has slope {slope:.9} at 1, expected w2 = {w2}",
            f.label()
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_family_arithmetic_case() {
        let f = RepresentingFunction::power_family(0.5, 1.0).unwrap();
        assert_relative_eq!(f.eval(3.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(f.tprime(), 0.5);
    }

    #[test]
    fn power_family_geometric_case() {
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        assert_relative_eq!(f.eval(4.0).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn power_family_harmonic_case() {
        let f = RepresentingFunction::power_family(0.5, -1.0).unwrap();
        assert_relative_eq!(f.eval(2.0).unwrap(), 4.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn power_family_rejects_bad_parameters() {
        assert!(RepresentingFunction::power_family(0.0, 0.5).is_err());
        assert!(RepresentingFunction::power_family(1.0, 0.5).is_err());
        assert!(RepresentingFunction::power_family(0.5, 1.5).is_err());
    }

    #[test]
    fn deviation_form_matches_direct_evaluation() {
        let f = RepresentingFunction::power_family(0.3, 0.7).unwrap();
        for x in [0.25, 0.9, 1.1, 7.0] {
            let direct = f.eval(x).unwrap() - 1.0;
            let dev = f.eval_dev(x - 1.0).unwrap();
            assert_relative_eq!(direct, dev, max_relative = 1e-12);
        }
    }

    #[test]
    fn deviation_form_keeps_relative_accuracy_near_one() {
        // f(1+u) - 1 ~ t u for tiny u; naive evaluation would return garbage.
        let f = RepresentingFunction::power_family(0.37, 0.25).unwrap();
        let u = 1e-13;
        let dev = f.eval_dev(u).unwrap();
        assert_relative_eq!(dev, 0.37 * u, max_relative = 1e-6);
    }

    #[test]
    fn mixture_of_trivial_atoms_is_arithmetic() {
        let f = RepresentingFunction::harmonic_mixture(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_relative_eq!(f.eval(3.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(f.tprime(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn mixture_single_atoms_are_the_trivial_means() {
        let left = RepresentingFunction::harmonic_mixture(&[(0.0, 1.0)]).unwrap();
        assert_relative_eq!(left.eval(7.0).unwrap(), 1.0, max_relative = 1e-15);
        assert!(left.is_left_trivial());
        let right = RepresentingFunction::harmonic_mixture(&[(1.0, 1.0)]).unwrap();
        assert_relative_eq!(right.eval(7.0).unwrap(), 7.0, max_relative = 1e-15);
        assert!(right.is_right_trivial());
    }

    #[test]
    fn mixture_rejects_unnormalized_weights() {
        assert!(RepresentingFunction::harmonic_mixture(&[(0.5, 0.7)]).is_err());
    }

    #[test]
    fn custom_envelope_violation_is_rejected() {
        // x^2 has slope 2 at 1; even declaring a legal slope fails validation.
        let err = RepresentingFunction::custom("square", |x| Ok(x * x), 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidMean(_)));
    }

    #[test]
    fn transpose_of_weighted_arithmetic_flips_weight() {
        let f = RepresentingFunction::power_family(0.3, 1.0).unwrap();
        let ft = f.transpose().unwrap();
        // x (0.7 + 0.3/x) = 0.3 + 0.7 x.
        assert_relative_eq!(ft.eval(2.0).unwrap(), 1.7, max_relative = 1e-14);
        assert_relative_eq!(ft.tprime(), 0.7, max_relative = 1e-14);
    }

    #[test]
    fn transpose_fixes_symmetric_means() {
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let ft = f.transpose().unwrap();
        for x in [0.3, 2.0, 9.0] {
            assert_relative_eq!(ft.eval(x).unwrap(), f.eval(x).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn transpose_is_an_involution() {
        let f = RepresentingFunction::power_family(0.25, -0.5).unwrap();
        let back = f.transpose().unwrap().transpose().unwrap();
        for x in canonical_grid() {
            assert_relative_eq!(back.eval(x).unwrap(), f.eval(x).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn conjugate_of_arithmetic_is_harmonic() {
        let f = RepresentingFunction::power_family(0.5, 1.0).unwrap();
        let star = conjugate(&f);
        assert_relative_eq!(star(3.0).unwrap(), 1.5, max_relative = 1e-15);
        let geo = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let self_conj = conjugate(&geo);
        assert_relative_eq!(self_conj(4.0).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn scalar_invert_square() {
        let x = scalar_invert(|v| Ok(v * v), 9.0, None).unwrap();
        assert_relative_eq!(x, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn scalar_invert_log_at_zero() {
        let x = scalar_invert(|v: f64| Ok(v.ln()), 0.0, None).unwrap();
        assert_relative_eq!(x, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn scalar_invert_affine() {
        let x = scalar_invert(|v| Ok((1.0 + v) / 2.0), 2.0, None).unwrap();
        assert_relative_eq!(x, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn scalar_invert_range_error_beyond_expansion() {
        let err = scalar_invert(Ok, 1e13, None).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
    }

    #[test]
    fn induced_by_arithmetic_is_arithmetic() {
        let f = RepresentingFunction::power_family(0.5, 1.0).unwrap();
        let g = induced2_repfn(&f, 0.5, 0.5).unwrap();
        assert_relative_eq!(g.eval(3.0).unwrap(), 2.0, max_relative = 1e-12);
        // Closed form of the inverse: g^{-1}(x) = 2x - 1.
        assert_relative_eq!(g.g_inv(2.0).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn induced_by_root_mean_matches_scalar_fixed_point() {
        // For f = sqrt(x) at equal weights, the fixed point of
        // x = (sqrt(x) + sqrt(4x))/2 over (1, 4) is 2.25.
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let g = induced2_repfn(&f, 0.5, 0.5).unwrap();
        assert_relative_eq!(g.eval(4.0).unwrap(), 2.25, max_relative = 1e-11);
    }

    #[test]
    fn induced_by_harmonic_at_equal_weights_is_geometric() {
        // The fixed-point equation x = (h(x/a) a + h(x/b) b)/2 with h harmonic
        // reduces to g^{-1}(x) = x^2, i.e. the induced mean is geometric, not
        // harmonic: on (1, 2) the fixed point is sqrt(2), and the harmonic
        // mean 4/3 is not fixed by the map.
        let f = RepresentingFunction::power_family(0.5, -1.0).unwrap();
        let g = induced2_repfn(&f, 0.5, 0.5).unwrap();
        assert_relative_eq!(g.eval(4.0).unwrap(), 2.0, max_relative = 1e-11);
        assert_relative_eq!(g.eval(2.0).unwrap(), std::f64::consts::SQRT_2, max_relative = 1e-11);
        assert_relative_eq!(g.g_inv(2.0).unwrap(), 4.0, max_relative = 1e-11);
    }

    #[test]
    fn induced_rejects_trivial_base() {
        let left = RepresentingFunction::harmonic_mixture(&[(0.0, 1.0)]).unwrap();
        assert!(induced2_repfn(&left, 0.5, 0.5).is_err());
        let right = RepresentingFunction::harmonic_mixture(&[(1.0, 1.0)]).unwrap();
        assert!(induced2_repfn(&right, 0.5, 0.5).is_err());
    }

    #[test]
    fn induced_inverse_reports_range_errors_outside_its_domain() {
        // For f arithmetic at equal weights, g_inv(x) = 2x - 1 only makes
        // sense for x > 1/2; below that the inner target leaves the cone.
        let f = RepresentingFunction::power_family(0.5, 1.0).unwrap();
        let g = induced2_repfn(&f, 0.5, 0.5).unwrap();
        let err = g.g_inv(0.2).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
        // Evaluation still works there: the bracket walks back into the domain.
        assert_relative_eq!(g.eval(0.2).unwrap(), 0.6, max_relative = 1e-11);
    }

    #[test]
    fn envelope_hint_brackets_the_inverse() {
        let f = RepresentingFunction::power_family(0.4, 0.5).unwrap();
        for z in [0.7, 1.0, 1.8, 4.0] {
            let (lo, hi) = inverse_envelope_hint(z, 0.4).unwrap();
            let x = scalar_invert(|v| f.eval(v), z, Some((lo, hi))).unwrap();
            assert!(x >= lo * 0.999 && x <= hi * 1.001, "x={x} not in [{lo},{hi}]");
            assert_relative_eq!(f.eval(x).unwrap(), z, max_relative = 1e-12);
        }
    }
}
