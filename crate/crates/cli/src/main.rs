//! Command-line front end: parse matrix files and mean descriptors, dispatch
//! the solvers, and emit matrices, convergence reports, and property tables.
//!
//! Exit codes: 0 success, 2 validation error (bad files, descriptors,
//! weights), 3 solver non-convergence. On a stalled schedule the partial
//! report and last iterate are still written before exiting, since they are
//! the debugging artifact.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use conemeans::descriptor::{parse_logpair, parse_mean};
use conemeans::error::Error;
use conemeans::io::{format_f64, format_matrix, read_pd_file, write_matrix_file};
use conemeans::logpair::{koenigs_log, KOENIGS_DEFAULT_TOL};
use conemeans::solver::{
    classical_karcher, induced_solve, karcher_residual, lambda_extension, mean_eval, power_mean,
    MeanProblem, SolveReport,
};
use conemeans::suite::{property_suite, table_to_text, SamplerConfig, SuiteSubject};
use conemeans::thompson::rho_affine;
use conemeans::hpd::PdMatrix;

#[derive(Parser)]
#[command(
    name = "conemeans",
    version,
    about = "Operator means on the positive-definite cone: two-variable and \
             induced means, power and Karcher means, Koenigs logarithms, and \
             Thompson-metric diagnostics."
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct SolverOpts {
    /// Fixed-point tolerance in Thompson distance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration cap (Picard steps, or schedule levels for lambda/karcher).
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Write the result matrix here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-step Thompson distances as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct WeightOpt {
    /// Comma-separated positive weights, one per input matrix. Normalized to
    /// sum to 1 (with a warning if they do not already). Default: uniform.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Subcommand)]
enum Verb {
    /// Two-variable mean M(A, B) for a mean descriptor.
    Mean2 {
        /// Mean descriptor, e.g. power:t=0.5,q=0.
        #[arg(long)]
        mean: String,
        /// Exactly two matrix files.
        #[arg(num_args = 2, required = true)]
        inputs: Vec<PathBuf>,
        /// Write the result matrix here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induced mean: solve X = sum_i w_i M(X, A_i) by Picard iteration.
    Induced {
        /// Mean descriptor, e.g. mixture:(0.2,0.5);(0.8,0.5).
        #[arg(long)]
        mean: String,
        #[command(flatten)]
        weights: WeightOpt,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Matrix power mean: the induced mean of the weighted geometric mean.
    Power {
        /// Exponent in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[command(flatten)]
        weights: WeightOpt,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Shrinking-weight schedule toward the generalized Karcher mean of a
    /// log pair.
    Lambda {
        /// Log-pair descriptor, e.g. logpair:power:q=0 or
        /// logpair:koenigs:base=power:t=0.5,q=0.
        #[arg(long)]
        logpair: String,
        #[command(flatten)]
        weights: WeightOpt,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// First schedule weight (default: min(0.5, t0 of the pair)).
        #[arg(long)]
        t_start: Option<f64>,
        /// Geometric shrink factor per level, in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
        /// Stopping tolerance between consecutive schedule levels.
        #[arg(long, default_value_t = 1e-8)]
        tol_lambda: f64,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Karcher (Riemannian barycenter) mean of the inputs.
    Karcher {
        #[command(flatten)]
        weights: WeightOpt,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Stopping tolerance between consecutive schedule levels.
        #[arg(long, default_value_t = 1e-8)]
        tol_lambda: f64,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Koenigs logarithm of a mean's representing function at a point.
    Koenigs {
        /// Mean descriptor.
        #[arg(long)]
        mean: String,
        /// Evaluation point in (0, inf).
        #[arg(long)]
        x: f64,
    },
    /// Karcher-equation residual of a candidate solution: first input is the
    /// candidate X, the rest are the problem matrices.
    Residual {
        /// Log-pair descriptor supplying the logarithm.
        #[arg(long)]
        logpair: String,
        #[command(flatten)]
        weights: WeightOpt,
        /// Candidate matrix followed by at least one problem matrix.
        #[arg(num_args = 2.., required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Property table over seeded random instances for a mean (induced
    /// solves) or a log pair (lambda schedules).
    Props {
        /// Mean descriptor (runs the induced-mean suite).
        #[arg(long, conflicts_with = "logpair")]
        mean: Option<String>,
        /// Log-pair descriptor (runs the lambda-extension suite).
        #[arg(long)]
        logpair: Option<String>,
        /// Sampler seed.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Random instances per property row.
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Lambda stopping tolerance (lambda suite only; its cost scales
        /// like 1/tol_lambda, so tighten with care).
        #[arg(long, default_value_t = 1e-4)]
        tol_lambda: f64,
        /// Write the table here as well as stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thompson-contraction coefficient of the affine map a*A + b*X on a
    /// radius-r ball around A.
    Contraction {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. } | Error::Numerical(_) | Error::SolverStalled { .. } => 3,
        _ => 2,
    }
}

fn read_inputs(paths: &[PathBuf]) -> Result<Vec<PdMatrix>, Error> {
    paths.iter().map(read_pd_file).collect()
}

fn parse_weights(list: &Option<String>, k: usize) -> Result<Vec<f64>, Error> {
    let Some(list) = list else {
        return Ok(vec![1.0 / k as f64; k]);
    };
    let weights: Vec<f64> = list
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("weight '{tok}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    if weights.len() != k {
        return Err(Error::InvalidInput(format!(
            "got {} weights for {k} matrices",
            weights.len()
        )));
    }
    Ok(weights)
}

fn build_problem(
    weights: &Option<String>,
    matrices: Vec<PdMatrix>,
) -> Result<MeanProblem, Error> {
    let w = parse_weights(weights, matrices.len())?;
    let (problem, total) = MeanProblem::normalized(w, matrices)?;
    if (total - 1.0).abs() > 1e-12 {
        eprintln!("warning: weights sum to {total}; normalizing");
    }
    Ok(problem)
}

/// Writes the solve artifacts: matrix to `--out` (stdout otherwise), report
/// key-values to stdout, step distances to `--csv` when asked.
fn emit(x: &PdMatrix, report: &SolveReport, opts: &SolverOpts) -> Result<(), Error> {
    match &opts.out {
        Some(path) => write_matrix_file(path, x.matrix())?,
        None => print!("{}", format_matrix(x.matrix())),
    }
    print!("{}", report.to_kv());
    if let Some(path) = &opts.csv {
        std::fs::write(path, report.steps_csv())?;
    }
    Ok(())
}

/// Runs a solve and emits its artifacts; a stalled schedule still gets its
/// partial report and last iterate written before the error propagates.
fn solve_and_emit<F>(solve: F, opts: &SolverOpts) -> Result<(), Error>
where
    F: FnOnce() -> Result<(PdMatrix, SolveReport), Error>,
{
    match solve() {
        Ok((x, report)) => emit(&x, &report, opts),
        Err(Error::SolverStalled {
            message,
            report,
            last_iterate,
        }) => {
            emit(&last_iterate, &report, opts)?;
            Err(Error::SolverStalled {
                message,
                report,
                last_iterate,
            })
        }
        Err(e) => Err(e),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.verb {
        Verb::Mean2 { mean, inputs, out } => {
            let f = parse_mean(&mean)?;
            let mats = read_inputs(&inputs)?;
            let x = mean_eval(&f, &mats[0], &mats[1])?;
            match out {
                Some(path) => write_matrix_file(path, x.matrix())?,
                None => print!("{}", format_matrix(x.matrix())),
            }
            Ok(())
        }
        Verb::Induced {
            mean,
            weights,
            inputs,
            solver,
        } => {
            let f = parse_mean(&mean)?;
            let p = build_problem(&weights.weights, read_inputs(&inputs)?)?;
            solve_and_emit(|| induced_solve(&f, &p, solver.tol, solver.max_iter), &solver)
        }
        Verb::Power {
            s,
            weights,
            inputs,
            solver,
        } => {
            let p = build_problem(&weights.weights, read_inputs(&inputs)?)?;
            solve_and_emit(|| power_mean(s, &p, solver.tol, solver.max_iter), &solver)
        }
        Verb::Lambda {
            logpair,
            weights,
            inputs,
            t_start,
            shrink,
            tol_lambda,
            solver,
        } => {
            let lp = Arc::new(parse_logpair(&logpair)?);
            let p = build_problem(&weights.weights, read_inputs(&inputs)?)?;
            let t0 = t_start.unwrap_or_else(|| lp.t0().min(0.5));
            solve_and_emit(
                || {
                    lambda_extension(
                        &lp,
                        &p,
                        t0,
                        shrink,
                        tol_lambda,
                        solver.tol,
                        solver.max_iter,
                    )
                },
                &solver,
            )
        }
        Verb::Karcher {
            weights,
            inputs,
            tol_lambda,
            solver,
        } => {
            let p = build_problem(&weights.weights, read_inputs(&inputs)?)?;
            solve_and_emit(|| classical_karcher(&p, tol_lambda, solver.max_iter), &solver)
        }
        Verb::Koenigs { mean, x } => {
            let f = parse_mean(&mean)?;
            let v = koenigs_log(&f, x, KOENIGS_DEFAULT_TOL)?;
            println!("{v:.7}");
            Ok(())
        }
        Verb::Residual {
            logpair,
            weights,
            inputs,
        } => {
            let lp = parse_logpair(&logpair)?;
            let mats = read_inputs(&inputs)?;
            let mut iter = mats.into_iter();
            let x = iter.next().expect("clap enforces two inputs");
            let p = build_problem(&weights.weights, iter.collect())?;
            println!("{}", format_f64(karcher_residual(&lp, &x, &p)?));
            Ok(())
        }
        Verb::Props {
            mean,
            logpair,
            seed,
            instances,
            tol_lambda,
            out,
        } => {
            let subject = match (mean, logpair) {
                (Some(desc), None) => SuiteSubject::Induced(parse_mean(&desc)?),
                (None, Some(desc)) => SuiteSubject::Lambda(Arc::new(parse_logpair(&desc)?)),
                _ => {
                    return Err(Error::InvalidInput(
                        "props needs exactly one of --mean or --logpair".into(),
                    ))
                }
            };
            let cfg = SamplerConfig {
                seed,
                instances,
                tol_lambda,
                ..SamplerConfig::default()
            };
            let table = table_to_text(&property_suite(&subject, &cfg)?);
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(&path, table)?;
            }
            Ok(())
        }
        Verb::Contraction { r, a, b } => {
            let est = rho_affine(r, a, b)?;
            println!("rho={}", format_f64(est.rho));
            Ok(())
        }
    }
}
