//! Operator means on the cone of positive-definite matrices.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`hpd`]: Hermitian/positive-definite matrices with cached spectral
//!    decompositions and spectral function calculus.
//! 2. [`thompson`]: the Thompson (sup-log) metric, the partial order, and the
//!    contraction estimates that make fixed-point arguments quantitative.
//! 3. [`repfn`]: representing functions of two-variable operator means, their
//!    envelope/transpose/conjugate calculus, and the reduction of two-variable
//!    weighted fixed-point equations back to scalar functions.
//! 4. [`logpair`]: logarithm/exponential pairs built from a representing
//!    function (closed-form power pairs, iteration-limit pairs, affine pairs)
//!    and the one-parameter mean families they generate.
//! 5. [`solver`]: multi-variable means as fixed points: the induced mean, the
//!    power-mean family, the lambda extension driven by a shrinking parameter
//!    schedule, and the Karcher-equation residual.
//! 6. [`suite`]: randomized property checks (idempotency, monotonicity,
//!    concavity, nonexpansiveness, ...) runnable against any mean here.
//!
//! Supporting modules: [`io`] (text matrix files), [`sampling`] (seeded random
//! instances), [`descriptor`] (string descriptors for means and pairs used by
//! the command-line tool).

pub mod descriptor;
pub mod error;
pub mod hpd;
pub mod io;
pub mod logpair;
pub mod repfn;
pub mod sampling;
pub mod solver;
pub mod suite;
pub mod thompson;

pub use error::{Error, Result};
pub use hpd::{eigh, EigenDecomposition, HermMatrix, PdMatrix};
pub use logpair::{LogPair, PairProvenance};
pub use repfn::RepresentingFunction;
pub use solver::{MeanProblem, SolveReport};
pub use thompson::ThompsonDistance;
