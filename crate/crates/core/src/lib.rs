//! Nearest-neighbor entropy-rate estimation for finite-alphabet sources
//! under a one-parameter family of weak sequence metrics.
//!
//! Given `n + 1` independent sequences drawn from a stationary source,
//! the statistic `r(k)` averages, over sample points, the k-th largest
//! metric depth `alpha = -log rho` to the other points; the estimator
//! `eta(k) = k (r(k) - r(k+1))` targets the inverse entropy `1/h`. The
//! metric's mismatch response `lambda` is the tuning parameter: with the
//! beta family at `beta = 1/|A|` the estimator is unbiased for uniform
//! i.i.d. sources.
//!
//! Modules:
//! - [`seq`]: alphabets, sequences, samples, first-mismatch position.
//! - [`metric`]: the `lambda` family and the `alpha`/`rho` kernels.
//! - [`source`]: seeded Bernoulli/Markov generators with exact entropy.
//! - [`neighbors`]: k-th largest `alpha` per point (naive and trie forms).
//! - [`estimator`]: `r`, `eta`, and closed-form oracles/bounds.
//! - [`rng`]: the counter-based deterministic generator behind sampling.

pub mod error;
pub mod estimator;
pub mod metric;
pub mod neighbors;
pub mod rng;
pub mod seq;
pub mod source;

pub use error::{Error, Result};
pub use estimator::{
    closed_form_applicable, eta_estimator, expected_r_symmetric, harmonic, mcdiarmid_tail,
    r_statistic, truncation_depth, variance_bound, EstimateReport,
};
pub use metric::{alpha, beta_lambda_inverse, rho, LambdaFamily};
pub use neighbors::{kmax_alpha_naive, kmax_alpha_trie, NeighborResult};
pub use seq::{first_mismatch_index, Alphabet, Sample, SymbolSequence};
pub use source::{stationary_distribution, BernoulliSource, MarkovSource, Source};
