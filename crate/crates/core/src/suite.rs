//! Randomized property table for multivariable means.
//!
//! Runs the defining inequalities and invariances of weighted means
//! (idempotency, permutation and repetition invariance, monotonicity,
//! ordering, congruence, joint concavity, nonexpansiveness, self-reduction,
//! and the arithmetic-harmonic sandwich) against seeded random instances,
//! and reports one row per property with the count of failures and the worst
//! observed defect. Failures are reported, never raised: the table is the
//! product, and a deliberately broken "mean" should produce red rows, not an
//! abort.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::error::Result;
use crate::hpd::{weighted_sum, PdMatrix};
use crate::logpair::LogPair;
use crate::repfn::RepresentingFunction;
use crate::sampling::{instance_rng, random_invertible, random_pd, random_psd_bump, random_weights};
use crate::solver::{induced_solve, lambda_extension, MeanProblem};
use crate::thompson::{d_inf, order_defect};

/// What the suite is exercising.
#[derive(Clone, Debug)]
pub enum SuiteSubject {
    /// The induced mean of a representing function (Picard solves).
    Induced(RepresentingFunction),
    /// The shrinking-schedule limit of a log pair.
    Lambda(Arc<LogPair>),
}

/// Sampler and tolerance knobs for a suite run.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Random instances per property row.
    pub instances: usize,
    /// Matrix dimension.
    pub dim: usize,
    /// Tuple length.
    pub k: usize,
    /// Log-eigenvalue spread of sampled matrices.
    pub spread: f64,
    /// Pass threshold per check; `None` picks 1e-8 for induced subjects and
    /// `4 * tol_lambda` for schedule subjects (whose two compared sides each
    /// carry an O(tol_lambda) solver bias).
    pub row_tol: Option<f64>,
    /// Inner Picard tolerance for induced solves.
    pub solver_tol: f64,
    /// Schedule tolerance for lambda solves.
    pub tol_lambda: f64,
    /// Iteration budget per Picard solve.
    pub max_iter: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            instances: 20,
            dim: 4,
            k: 3,
            spread: 0.5,
            row_tol: None,
            solver_tol: 1e-11,
            tol_lambda: 1e-6,
            max_iter: 200_000,
        }
    }
}

/// One property's outcome. `instances == 0` means the property does not
/// apply to the subject (e.g. self-reduction for schedule subjects) and the
/// row passes vacuously.
#[derive(Clone, Debug)]
pub struct PropertyRow {
    pub property: String,
    pub instances: usize,
    pub failures: usize,
    /// Largest defect seen across instances (distance for equality checks,
    /// scaled negative eigenvalue for order checks, infinity when a solve
    /// errored out).
    pub worst: f64,
}

impl PropertyRow {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Renders the table as aligned text, one row per property plus a verdict.
pub fn table_to_text(rows: &[PropertyRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.property.len())
        .max()
        .unwrap_or(8)
        .max("property".len());
    let mut out = format!(
        "{:<width$}  {:>9}  {:>8}  {:>12}  verdict\n",
        "property", "instances", "failures", "worst"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>9}  {:>8}  {:>12.3e}  {}\n",
            r.property,
            r.instances,
            r.failures,
            r.worst,
            if r.passed() { "pass" } else { "FAIL" }
        ));
    }
    let verdict = if rows.iter().all(|r| r.passed()) {
        "all properties passed"
    } else {
        "FAILURES PRESENT"
    };
    out.push_str(verdict);
    out.push('\n');
    out
}

struct Ctx<'a> {
    subject: &'a SuiteSubject,
    cfg: &'a SamplerConfig,
    tol: f64,
}

impl Ctx<'_> {
    fn solve(&self, p: &MeanProblem) -> Result<PdMatrix> {
        match self.subject {
            SuiteSubject::Induced(f) => {
                Ok(induced_solve(f, p, self.cfg.solver_tol, self.cfg.max_iter)?.0)
            }
            SuiteSubject::Lambda(lp) => {
                let t_start = lp.t0().min(0.5);
                Ok(lambda_extension(
                    lp,
                    p,
                    t_start,
                    0.5,
                    self.cfg.tol_lambda,
                    self.cfg.tol_lambda,
                    200,
                )?
                .0)
            }
        }
    }

    fn sample_problem(&self, rng: &mut ChaCha12Rng) -> Result<MeanProblem> {
        let mats: Vec<PdMatrix> = (0..self.cfg.k)
            .map(|_| random_pd(rng, self.cfg.dim, self.cfg.spread))
            .collect::<Result<_>>()?;
        let w = random_weights(rng, self.cfg.k);
        MeanProblem::new(w, mats)
    }
}

/// Runs every property against `instances` fresh random instances each and
/// returns the table. Rows use independent, per-instance random streams, so
/// the table is identical however the work is scheduled.
pub fn property_suite(subject: &SuiteSubject, cfg: &SamplerConfig) -> Result<Vec<PropertyRow>> {
    let tol = cfg.row_tol.unwrap_or(match subject {
        SuiteSubject::Induced(_) => 1e-8,
        SuiteSubject::Lambda(_) => 4.0 * cfg.tol_lambda,
    });
    let ctx = Ctx { subject, cfg, tol };
    let checks: Vec<(&str, CheckFn)> = vec![
        ("idempotency", check_idempotency),
        ("permutation-invariance", check_permutation),
        ("monotonicity", check_monotonicity),
        ("mean-ordering", check_ordering),
        ("congruence-invariance", check_congruence),
        ("joint-concavity", check_concavity),
        ("nonexpansiveness", check_nonexpansive),
        ("repetition-invariance", check_repetition),
        ("self-reduction", check_self_reduction),
        ("agh-bounds", check_agh),
    ];
    let mut rows = Vec::with_capacity(checks.len());
    for (row_idx, (name, check)) in checks.iter().enumerate() {
        let mut instances = 0usize;
        let mut failures = 0usize;
        let mut worst = 0f64;
        for i in 0..cfg.instances {
            let mut rng = instance_rng(cfg.seed, (row_idx as u64) << 32 | i as u64);
            match check(&ctx, &mut rng) {
                Ok(None) => break, // property does not apply to this subject
                Ok(Some(defect)) => {
                    instances += 1;
                    worst = worst.max(defect);
                    // NaN defects must count as failures, not slip through.
                    if defect.is_nan() || defect > ctx.tol {
                        failures += 1;
                    }
                }
                Err(_) => {
                    instances += 1;
                    failures += 1;
                    worst = f64::INFINITY;
                }
            }
        }
        rows.push(PropertyRow {
            property: (*name).to_string(),
            instances,
            failures,
            worst,
        });
    }
    Ok(rows)
}

/// A check returns `Ok(None)` when inapplicable, otherwise the defect
/// (0 = identity holds exactly; pass iff defect <= row tolerance).
type CheckFn = fn(&Ctx, &mut ChaCha12Rng) -> Result<Option<f64>>;

fn check_idempotency(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let a = random_pd(rng, ctx.cfg.dim, ctx.cfg.spread)?;
    let w = random_weights(rng, ctx.cfg.k);
    let p = MeanProblem::new(w, vec![a.clone(); ctx.cfg.k])?;
    let m = ctx.solve(&p)?;
    Ok(Some(d_inf(&m, &a)?.value))
}

fn check_permutation(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let p = ctx.sample_problem(rng)?;
    let mut idx: Vec<usize> = (0..ctx.cfg.k).collect();
    idx.shuffle(rng);
    let w_perm: Vec<f64> = idx.iter().map(|&i| p.weights()[i]).collect();
    let m_perm: Vec<PdMatrix> = idx.iter().map(|&i| p.matrices()[i].clone()).collect();
    let p_perm = MeanProblem::new(w_perm, m_perm)?;
    let x = ctx.solve(&p)?;
    let y = ctx.solve(&p_perm)?;
    Ok(Some(d_inf(&x, &y)?.value))
}

fn check_monotonicity(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let p = ctx.sample_problem(rng)?;
    let bumped: Vec<PdMatrix> = p
        .matrices()
        .iter()
        .map(|a| {
            let bump = random_psd_bump(rng, ctx.cfg.dim, 0.5 * ctx.cfg.spread);
            PdMatrix::from_matrix(a.matrix() + bump.as_matrix())
        })
        .collect::<Result<_>>()?;
    let p_up = MeanProblem::new(p.weights().to_vec(), bumped)?;
    let x = ctx.solve(&p)?;
    let y = ctx.solve(&p_up)?;
    Ok(Some(order_defect(&x, &y)?))
}

/// Ordering between two means: members of the same family at different
/// parameters are pointwise ordered, so their multivariable versions must be
/// too. For induced subjects the partners are the arithmetic- and
/// harmonic-type functions with the same slope (the tightest such envelope);
/// for schedule subjects, two semigroup members of the pair.
fn check_ordering(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let p = ctx.sample_problem(rng)?;
    match ctx.subject {
        SuiteSubject::Induced(f) => {
            let t = f.tprime();
            if !(1e-9..=1.0 - 1e-9).contains(&t) {
                return Ok(None); // trivial slopes have no two-sided partners
            }
            let low = RepresentingFunction::power_family(t, -1.0)?;
            let high = RepresentingFunction::power_family(t, 1.0)?;
            let x = ctx.solve(&p)?;
            let x_low = induced_solve(&low, &p, ctx.cfg.solver_tol, ctx.cfg.max_iter)?.0;
            let x_high = induced_solve(&high, &p, ctx.cfg.solver_tol, ctx.cfg.max_iter)?.0;
            let d1 = order_defect(&x_low, &x)?;
            let d2 = order_defect(&x, &x_high)?;
            Ok(Some(d1.max(d2)))
        }
        SuiteSubject::Lambda(lp) => {
            let t_hi = lp.t0().min(0.5);
            let t_lo = 0.5 * t_hi;
            let f_lo = crate::logpair::semigroup_member(lp, t_lo)?;
            let f_hi = crate::logpair::semigroup_member(lp, t_hi)?;
            let x_lo = induced_solve(&f_lo, &p, ctx.cfg.solver_tol, ctx.cfg.max_iter)?.0;
            let x_hi = induced_solve(&f_hi, &p, ctx.cfg.solver_tol, ctx.cfg.max_iter)?.0;
            Ok(Some(order_defect(&x_lo, &x_hi)?))
        }
    }
}

fn check_congruence(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let p = ctx.sample_problem(rng)?;
    let c = random_invertible(rng, ctx.cfg.dim, 0.5)?;
    let conj: Vec<PdMatrix> = p
        .matrices()
        .iter()
        .map(|a| a.congruence(&c))
        .collect::<Result<_>>()?;
    let p_conj = MeanProblem::new(p.weights().to_vec(), conj)?;
    let x = ctx.solve(&p)?;
    let y = ctx.solve(&p_conj)?;
    Ok(Some(d_inf(&x.congruence(&c)?, &y)?.value))
}

fn check_concavity(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let pa = ctx.sample_problem(rng)?;
    let mats_b: Vec<PdMatrix> = (0..ctx.cfg.k)
        .map(|_| random_pd(rng, ctx.cfg.dim, ctx.cfg.spread))
        .collect::<Result<_>>()?;
    let pb = MeanProblem::new(pa.weights().to_vec(), mats_b)?;
    let u: f64 = rng.random_range(0.2..0.8);
    let mixed: Vec<PdMatrix> = pa
        .matrices()
        .iter()
        .zip(pb.matrices())
        .map(|(a, b)| weighted_sum(&[1.0 - u, u], &[a.clone(), b.clone()]))
        .collect::<Result<_>>()?;
    let p_mixed = MeanProblem::new(pa.weights().to_vec(), mixed)?;
    let xa = ctx.solve(&pa)?;
    let xb = ctx.solve(&pb)?;
    let x_mixed = ctx.solve(&p_mixed)?;
    let lhs = weighted_sum(&[1.0 - u, u], &[xa, xb])?;
    Ok(Some(order_defect(&lhs, &x_mixed)?))
}

fn check_nonexpansive(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let pa = ctx.sample_problem(rng)?;
    let mats_b: Vec<PdMatrix> = (0..ctx.cfg.k)
        .map(|_| random_pd(rng, ctx.cfg.dim, ctx.cfg.spread))
        .collect::<Result<_>>()?;
    let pb = MeanProblem::new(pa.weights().to_vec(), mats_b)?;
    let mut bound = 0f64;
    for (a, b) in pa.matrices().iter().zip(pb.matrices()) {
        bound = bound.max(d_inf(a, b)?.value);
    }
    let xa = ctx.solve(&pa)?;
    let xb = ctx.solve(&pb)?;
    let d = d_inf(&xa, &xb)?.value;
    Ok(Some((d - bound).max(0.0)))
}

fn check_repetition(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let p = ctx.sample_problem(rng)?;
    let mut w2 = Vec::with_capacity(2 * ctx.cfg.k);
    let mut m2 = Vec::with_capacity(2 * ctx.cfg.k);
    for (w, m) in p.weights().iter().zip(p.matrices()) {
        w2.push(w / 2.0);
        w2.push(w / 2.0);
        m2.push(m.clone());
        m2.push(m.clone());
    }
    let p2 = MeanProblem::new(w2, m2)?;
    let x = ctx.solve(&p)?;
    let y = ctx.solve(&p2)?;
    Ok(Some(d_inf(&x, &y)?.value))
}

/// `M(w; A_1, ..., A_{k-1}, X) = X` exactly when `X` is the mean of the
/// first `k-1` entries under renormalized weights.
fn check_self_reduction(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    if !matches!(ctx.subject, SuiteSubject::Induced(_)) {
        return Ok(None);
    }
    if ctx.cfg.k < 2 {
        return Ok(None);
    }
    let p = ctx.sample_problem(rng)?;
    let k = ctx.cfg.k;
    let head_total: f64 = p.weights()[..k - 1].iter().sum();
    let w_hat: Vec<f64> = p.weights()[..k - 1].iter().map(|w| w / head_total).collect();
    let (p_hat, _) = MeanProblem::normalized(w_hat, p.matrices()[..k - 1].to_vec())?;
    let x_hat = ctx.solve(&p_hat)?;
    let mut mats = p.matrices()[..k - 1].to_vec();
    mats.push(x_hat.clone());
    let p_full = MeanProblem::new(p.weights().to_vec(), mats)?;
    let x = ctx.solve(&p_full)?;
    Ok(Some(d_inf(&x, &x_hat)?.value))
}

fn check_agh(ctx: &Ctx, rng: &mut ChaCha12Rng) -> Result<Option<f64>> {
    let p = ctx.sample_problem(rng)?;
    let x = ctx.solve(&p)?;
    let low = p.harmonic()?;
    let high = p.arithmetic()?;
    let d1 = order_defect(&low, &x)?;
    let d2 = order_defect(&x, &high)?;
    Ok(Some(d1.max(d2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logpair::logpair_power;

    fn small_cfg(instances: usize) -> SamplerConfig {
        SamplerConfig {
            instances,
            dim: 3,
            k: 3,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn power_mean_passes_all_rows() {
        let f = RepresentingFunction::power_family(0.5, 0.0).unwrap();
        let rows = property_suite(&SuiteSubject::Induced(f), &small_cfg(5)).unwrap();
        assert_eq!(rows.len(), 10);
        for row in &rows {
            assert!(
                row.passed(),
                "{} failed: worst {:.3e}",
                row.property,
                row.worst
            );
        }
        assert!(rows.iter().all(|r| r.property != "self-reduction" || r.instances > 0));
    }

    #[test]
    fn broken_square_fails_monotonicity() {
        // x^2 fixes 1 but is not operator monotone and not a contraction
        // generator; its "induced mean" misbehaves and the table must show
        // red rows rather than error out.
        let f = RepresentingFunction::custom_unchecked("square", |x| Ok(x * x), 2.0);
        let cfg = SamplerConfig {
            instances: 3,
            dim: 3,
            k: 2,
            max_iter: 300,
            ..SamplerConfig::default()
        };
        let rows = property_suite(&SuiteSubject::Induced(f), &cfg).unwrap();
        let mono = rows.iter().find(|r| r.property == "monotonicity").unwrap();
        assert!(mono.failures > 0);
    }

    #[test]
    fn single_matrix_rows_pass_trivially() {
        let f = RepresentingFunction::power_family(0.3, 0.5).unwrap();
        let cfg = SamplerConfig {
            instances: 2,
            dim: 2,
            k: 1,
            ..SamplerConfig::default()
        };
        let rows = property_suite(&SuiteSubject::Induced(f), &cfg).unwrap();
        for row in &rows {
            assert!(row.passed(), "{} failed", row.property);
        }
        let red = rows.iter().find(|r| r.property == "self-reduction").unwrap();
        assert_eq!(red.instances, 0);
    }

    #[test]
    fn lambda_subject_smoke() {
        let lp = Arc::new(logpair_power(0.0).unwrap());
        let cfg = SamplerConfig {
            instances: 2,
            dim: 3,
            k: 2,
            spread: 0.02,
            tol_lambda: 1e-6,
            ..SamplerConfig::default()
        };
        let rows = property_suite(&SuiteSubject::Lambda(lp), &cfg).unwrap();
        for row in &rows {
            assert!(
                row.passed(),
                "{} failed: worst {:.3e}",
                row.property,
                row.worst
            );
        }
        let red = rows.iter().find(|r| r.property == "self-reduction").unwrap();
        assert_eq!(red.instances, 0);
    }

    #[test]
    fn table_rendering_mentions_verdict() {
        let rows = vec![PropertyRow {
            property: "idempotency".into(),
            instances: 3,
            failures: 0,
            worst: 1e-12,
        }];
        let text = table_to_text(&rows);
        assert!(text.contains("idempotency"));
        assert!(text.contains("all properties passed"));
    }
}
