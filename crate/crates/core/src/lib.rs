//! Sharp deviation bounds for weighted sums of Dirichlet random variables,
//! with the machinery they rest on and the bandit algorithms they certify:
//!
//! - [`kinf`]: the minimal KL divergence `K_inf`, its dual maximizer,
//!   curvature, two-sided extension, and brute-force oracles;
//! - [`dirichlet`]: gamma-normalization sampling, Monte-Carlo crossing
//!   probabilities, the Bayesian bootstrap, and the exact density of a
//!   weighted Dirichlet sum through its contour-integral representation;
//! - [`tail`]: the two-sided Gaussian sandwich bounds, the change-of-measure
//!   upper bound, and Dirichlet-process posterior deviation thresholds;
//! - [`bandit`]: multinomial Thompson sampling, its rounded extension to
//!   bounded rewards, and regret traces against the asymptotic lower line.
//!
//! All operations are deterministic given explicit seeds; see [`rng`].

// Validation uses negated comparisons (`!(x > 0.0)`) on purpose: they
// reject NaN, which the suggested rewrites would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod dirichlet;
pub mod error;
pub mod kinf;
pub mod quad;
pub mod rng;
pub mod support;
pub mod tail;

pub use error::{Error, Result};
pub use support::{FiniteDist, WeightedSupport};
