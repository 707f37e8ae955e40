//! Dirichlet parameter vectors, gamma-normalization sampling, Monte-Carlo
//! crossing-probability estimates, and the Bayesian-bootstrap posterior mean.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::support::{check_paired, FiniteDist, WeightedSupport};

mod density;

pub use density::{density_normalization_check, weighted_sum_density};

/// Samples per independent stream in parallel Monte-Carlo loops. The chunked
/// reduction makes estimates independent of thread scheduling.
const MC_CHUNK: u64 = 1 << 16;

/// A positive Dirichlet parameter vector `alpha` with its derived total
/// `alpha_bar` and normalized law `p_bar`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidInput(
                "alpha needs at least two entries".into(),
            ));
        }
        for (j, &a) in alpha.iter().enumerate() {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "alpha[{j}] = {a} must be positive and finite"
                )));
            }
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total concentration `alpha_bar = sum_j alpha_j`.
    pub fn alpha_bar(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// The normalized law `p_bar(l) = alpha_l / alpha_bar`.
    pub fn p_bar(&self) -> FiniteDist {
        let total = self.alpha_bar();
        FiniteDist::new(self.alpha.iter().map(|a| a / total).collect())
            .expect("normalized alpha is a distribution")
    }

    /// The shift `alpha^+ = (alpha_0, ..., alpha_{m-1}, alpha_m + 1)`.
    pub fn plus(&self) -> Self {
        let mut alpha = self.alpha.clone();
        *alpha.last_mut().unwrap() += 1.0;
        Self { alpha }
    }

    /// The shift `alpha^- = (alpha_0 + 1, alpha_1, ..., alpha_m)`.
    pub fn minus(&self) -> Self {
        let mut alpha = self.alpha.clone();
        alpha[0] += 1.0;
        Self { alpha }
    }
}

/// A Monte-Carlo probability estimate with its binomial standard error and
/// the seed that reproduces it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub(crate) fn gamma_set(alpha: &[f64]) -> Vec<Gamma<f64>> {
    alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("positive shape"))
        .collect()
}

/// Draws one Dirichlet vector as normalized independent Gamma(alpha_j, 1)
/// variates. A zero total (possible only by underflow of every component)
/// triggers a redraw from the same stream.
pub(crate) fn draw_dirichlet_into<R: Rng + ?Sized>(
    gammas: &[Gamma<f64>],
    rng: &mut R,
    out: &mut [f64],
) {
    loop {
        let mut total = 0.0;
        for (w, g) in out.iter_mut().zip(gammas) {
            let y = g.sample(rng);
            *w = y;
            total += y;
        }
        if total > 0.0 {
            for w in out.iter_mut() {
                *w /= total;
            }
            return;
        }
    }
}

/// One draw from `Dir(alpha)`: components are nonnegative and sum to one
/// within floating tolerance.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &DirichletParams, rng: &mut R) -> Vec<f64> {
    let gammas = gamma_set(params.alpha());
    let mut out = vec![0.0; params.len()];
    draw_dirichlet_into(&gammas, rng, &mut out);
    out
}

/// Estimates `P_{w ~ Dir(alpha)}(w f >= mu)` from `n` draws.
///
/// The draws are split into fixed-size chunks, each served by its own
/// stream keyed `(seed, chunk index)`, so the estimate is bit-reproducible
/// across thread counts.
pub fn mc_crossing_prob(
    params: &DirichletParams,
    f: &WeightedSupport,
    mu: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_paired(&params.p_bar(), f)?;
    if n == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let gammas = gamma_set(params.alpha());
    let values = f.values();
    let chunks = n.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream(seed, chunk);
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(n);
            let mut w = vec![0.0; values.len()];
            let mut count = 0u64;
            for _ in lo..hi {
                draw_dirichlet_into(&gammas, &mut rng, &mut w);
                let z: f64 = w.iter().zip(values).map(|(wi, vi)| wi * vi).sum();
                if z >= mu {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let estimate = hits as f64 / n as f64;
    let std_error = (estimate * (1.0 - estimate) / n as f64).sqrt();
    Ok(McEstimate {
        estimate,
        std_error,
        n_samples: n,
        seed,
    })
}

/// One Bayesian-bootstrap draw of the posterior mean: the observed values
/// get unit weights, and two virtual observations at 0 and 1 get weight
/// `gamma` each, so the weight vector is `Dir(gamma, 1, ..., 1, gamma)`.
pub fn sample_bootstrap_mean<R: Rng + ?Sized>(
    g_values: &[f64],
    gamma: f64,
    rng: &mut R,
) -> Result<f64> {
    if g_values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    for (i, &g) in g_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::Domain(format!("g[{i}] = {g} outside [0, 1]")));
        }
    }
    let endpoint = Gamma::new(gamma, 1.0).expect("positive shape");
    let unit = Gamma::new(1.0, 1.0).expect("positive shape");
    loop {
        let w_zero = endpoint.sample(rng);
        let mut total = w_zero;
        let mut weighted = 0.0;
        for &g in g_values {
            let w = unit.sample(rng);
            total += w;
            weighted += w * g;
        }
        let w_one = endpoint.sample(rng);
        total += w_one;
        weighted += w_one;
        if total > 0.0 {
            return Ok(weighted / total);
        }
    }
}
