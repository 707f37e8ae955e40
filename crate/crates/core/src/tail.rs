//! Closed-form deviation bounds for weighted Dirichlet sums: the Gaussian
//! two-sided sandwich with its admissibility constant, the change-of-measure
//! upper bound, and Hoeffding/Bernstein thresholds for the Dirichlet-process
//! posterior mean.

use crate::dirichlet::DirichletParams;
use crate::error::{Error, Result};
use crate::kinf::{a_transform, kinf_star, solve_kinf};
use crate::support::{FiniteDist, WeightedSupport};

/// The absolute constant `(2/pi) (8 + 49 sqrt(6) / 9)^2` in the
/// admissibility condition `alpha_min >= c0 / epsilon^2`.
pub fn c0_constant() -> f64 {
    let base = 8.0 + 49.0 * 6.0f64.sqrt() / 9.0;
    2.0 / std::f64::consts::PI * base * base
}

/// Standard normal upper tail `P(zeta >= x)`, evaluated through the scaled
/// complementary error function so the far tail keeps full relative accuracy.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// True iff `min(alpha_0, alpha_m) >= c0 / epsilon^2`.
pub fn check_epsilon_condition(params: &DirichletParams, epsilon: f64) -> Result<bool> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let alpha = params.alpha();
    let alpha_min = alpha[0].min(*alpha.last().unwrap());
    Ok(alpha_min >= c0_constant() / (epsilon * epsilon))
}

/// A two-sided bound evaluation at one deviation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub mu: f64,
    pub epsilon: f64,
    /// `(1 - eps) P(zeta >= sqrt(alpha_bar - 1) A(p_plus, mu, f))`, clamped to [0, 1].
    pub lower: f64,
    /// `(1 + eps) P(zeta >= sqrt(alpha_bar - 1) A(p_minus, mu, f))`, clamped to [0, 1].
    pub upper: f64,
    /// `exp(-alpha_bar K_inf(p_bar, mu, f))`; needs no admissibility condition.
    pub chernoff: f64,
    /// Whether `min(alpha_0, alpha_m) >= c0 / eps^2 + 1` holds.
    pub condition_met: bool,
    /// `K_inf_star` of the top-shifted measure `p_plus`.
    pub kinf_plus: f64,
    /// `K_inf_star` of the bottom-shifted measure `p_minus`.
    pub kinf_minus: f64,
}

/// The shifted empirical measures of the two-sided bound: `p_plus` removes
/// one unit from the top endpoint, `p_minus` from the bottom, both
/// normalized by `alpha_bar - 1`.
fn shifted_measures(params: &DirichletParams) -> Result<(FiniteDist, FiniteDist)> {
    let alpha = params.alpha();
    let m = alpha.len() - 1;
    if alpha[0] < 1.0 || alpha[m] < 1.0 {
        return Err(Error::InvalidShift(format!(
            "two-sided shift needs alpha_0, alpha_m >= 1, got ({}, {})",
            alpha[0], alpha[m]
        )));
    }
    let mut plus = alpha.to_vec();
    plus[m] -= 1.0;
    let mut minus = alpha.to_vec();
    minus[0] -= 1.0;
    Ok((
        FiniteDist::from_weights(&plus)?,
        FiniteDist::from_weights(&minus)?,
    ))
}

/// Evaluates the two-sided Gaussian bound for `P_{w ~ Dir(alpha)}(w f >= mu)`,
/// valid for any `mu` in `(0, b)` when `min(alpha_0, alpha_m) >= c0 / eps^2 + 1`.
/// Inadmissible inputs still produce numbers, with `condition_met` false.
pub fn sandwich_bounds(
    params: &DirichletParams,
    f: &WeightedSupport,
    mu: f64,
    epsilon: f64,
) -> Result<BoundReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let (p_plus, p_minus) = shifted_measures(params)?;
    let shifted_total = params.alpha_bar() - 1.0;
    let a_plus = a_transform(&p_plus, f, mu)?;
    let a_minus = a_transform(&p_minus, f, mu)?;
    let lower = ((1.0 - epsilon) * gaussian_tail(shifted_total.sqrt() * a_plus)).clamp(0.0, 1.0);
    let upper = ((1.0 + epsilon) * gaussian_tail(shifted_total.sqrt() * a_minus)).clamp(0.0, 1.0);
    let alpha = params.alpha();
    let alpha_min = alpha[0].min(*alpha.last().unwrap());
    let condition_met = alpha_min >= c0_constant() / (epsilon * epsilon) + 1.0;
    Ok(BoundReport {
        mu,
        epsilon,
        lower,
        upper,
        chernoff: chernoff_upper(params, f, mu)?,
        condition_met,
        kinf_plus: kinf_star(&p_plus, f, mu)?,
        kinf_minus: kinf_star(&p_minus, f, mu)?,
    })
}

/// Lower bound `(1 - eps) P(zeta >= sqrt(alpha_bar) A(p_bar, mu, f))`,
/// certifying the crossing probability under `Dir(alpha^+)` (one extra unit
/// on the top endpoint).
pub fn gaussian_lower_bound(
    params: &DirichletParams,
    f: &WeightedSupport,
    mu: f64,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let a = a_transform(&params.p_bar(), f, mu)?;
    Ok(((1.0 - epsilon) * gaussian_tail(params.alpha_bar().sqrt() * a)).clamp(0.0, 1.0))
}

/// Upper bound `(1 + eps) P(zeta >= sqrt(alpha_bar) A(p_bar, mu, f))` clamped
/// to 1, certifying the crossing probability under `Dir(alpha^-)` (one extra
/// unit on the bottom endpoint).
pub fn gaussian_upper_bound(
    params: &DirichletParams,
    f: &WeightedSupport,
    mu: f64,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let a = a_transform(&params.p_bar(), f, mu)?;
    Ok(((1.0 + epsilon) * gaussian_tail(params.alpha_bar().sqrt() * a)).clamp(0.0, 1.0))
}

/// Change-of-measure bound `P(w f >= mu) <= exp(-alpha_bar K_inf(p_bar, mu, f))`,
/// valid for all positive `alpha` without any shift or size condition.
pub fn chernoff_upper(params: &DirichletParams, f: &WeightedSupport, mu: f64) -> Result<f64> {
    let sol = solve_kinf(&params.p_bar(), f, mu)?;
    Ok((-params.alpha_bar() * sol.value).exp())
}

/// A Dirichlet-process posterior deviation threshold together with the
/// admissibility of the base-measure weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpThreshold {
    pub threshold: f64,
    /// Whether `gamma >= c0 / epsilon^2 + 1` holds, as the propositions require.
    pub gamma_admissible: bool,
}

fn dp_validate(n: u64, gamma: f64, epsilon: f64, delta: f64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(gamma >= c0_constant() / (epsilon * epsilon) + 1.0)
}

/// Hoeffding-type threshold: with probability at least `1 - delta` the
/// posterior mean exceeds the empirical mean by at most
/// `sqrt(log((1+eps)/delta) / (2 (n + 2 gamma - 1))) + gamma / (n + 2 gamma - 1)`.
pub fn dp_hoeffding_threshold(n: u64, gamma: f64, epsilon: f64, delta: f64) -> Result<DpThreshold> {
    let gamma_admissible = dp_validate(n, gamma, epsilon, delta)?;
    let effective = n as f64 + 2.0 * gamma - 1.0;
    let log_term = ((1.0 + epsilon) / delta).ln();
    Ok(DpThreshold {
        threshold: (log_term / (2.0 * effective)).sqrt() + gamma / effective,
        gamma_admissible,
    })
}

/// Bernstein-type threshold
/// `sqrt(4 Var log((1+eps)/delta) / (n + 2 gamma - 1)) + (4 log((1+eps)/delta) + 5 gamma) / (n + 2 gamma - 1)`.
pub fn dp_bernstein_threshold(
    n: u64,
    gamma: f64,
    epsilon: f64,
    delta: f64,
    empirical_variance: f64,
) -> Result<DpThreshold> {
    let gamma_admissible = dp_validate(n, gamma, epsilon, delta)?;
    if !(0.0..=0.25).contains(&empirical_variance) {
        return Err(Error::Domain(format!(
            "empirical variance {empirical_variance} outside [0, 1/4]"
        )));
    }
    let effective = n as f64 + 2.0 * gamma - 1.0;
    let log_term = ((1.0 + epsilon) / delta).ln();
    Ok(DpThreshold {
        threshold: (4.0 * empirical_variance * log_term / effective).sqrt()
            + (4.0 * log_term + 5.0 * gamma) / effective,
        gamma_admissible,
    })
}
