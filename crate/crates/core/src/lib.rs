//! Fixed-point solver for `(b, theta)`-enriched contractions in 2-normed
//! spaces.
//!
//! The pieces, bottom-up:
//!
//! * [`space`]: 2-norm evaluators, witness sets, balls, and an axiom checker.
//! * [`mapping`]: the self-map expression tree (reflection, scalar affine,
//!   two-set piecewise, averaging, iteration).
//! * [`analyzer`]: estimates and certifies the enrichment coefficient, and
//!   searches for the `b` giving the smallest contraction factor.
//! * [`solver`]: Krasnoselskij iteration with a priori / a posteriori bounds,
//!   plus Picard, local-ball, and N-th iterate variants.
//! * [`scenario`], [`runner`], [`output`]: scenario files, orchestration,
//!   and the CSV / report writers behind the `enriched` command line tool.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyzer;
pub mod error;
pub mod mapping;
mod numeric;
pub mod output;
pub mod runner;
pub mod scenario;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
