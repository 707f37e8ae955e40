//! Minimal Kullback-Leibler divergence to the half-space of distributions
//! with mean at least `mu`, computed through its concave dual
//!
//! ```text
//! K_inf(p, mu, f) = sup { E_p[log(1 - lambda (f(X) - mu))] : 0 <= lambda < 1/(b - mu) }
//! ```
//!
//! together with the dual maximizer `lambda_star`, the curvature `sigma_sq`,
//! the two-sided extension `kinf_star`, and the signed transform
//! `A = sgn(mu - pf) sqrt(2 kinf_star)`. Brute-force primal oracles for small
//! supports live at the bottom of the module.

use crate::error::{Error, Result};
use crate::support::{check_paired, FiniteDist, WeightedSupport};

/// Relative clip keeping the dual iterate strictly inside its domain.
const LAMBDA_CLIP: f64 = 1e-12;
/// Bracket-width stopping tolerance for the dual solve.
const LAMBDA_TOL: f64 = 1e-12;
/// Derivative magnitude stopping tolerance for the dual solve.
const DERIV_TOL: f64 = 1e-14;

/// Output of [`solve_kinf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinfSolution {
    /// `K_inf(p, mu, f)` in nats; finite and nonnegative for `mu < b`.
    pub value: f64,
    /// Dual maximizer in `[0, 1/(b - mu))`; equals `dK_inf/dmu` at interior optima.
    pub lambda_star: f64,
    /// Curvature `E_p[((f(X) - mu)/(1 - lambda_star (f(X) - mu)))^2]`.
    pub sigma_sq: f64,
    /// Set when the supremum was taken at the clipped right endpoint, which
    /// can happen only when `p` puts no mass on `f = b`.
    pub at_boundary: bool,
}

/// The pushforward law of `p` under `f`: equal support values aggregated,
/// zero-mass categories dropped. `K_inf` depends on `p` through this only.
struct Pushforward {
    vals: Vec<f64>,
    probs: Vec<f64>,
    mean: f64,
}

impl Pushforward {
    fn new(p: &FiniteDist, f: &WeightedSupport) -> Self {
        let mut pairs: Vec<(f64, f64)> = p
            .probs()
            .iter()
            .zip(f.values())
            .filter(|(&pj, _)| pj > 0.0)
            .map(|(&pj, &vj)| (vj, pj))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vals = Vec::with_capacity(pairs.len());
        let mut probs = Vec::with_capacity(pairs.len());
        for (v, pj) in pairs {
            if vals.last() == Some(&v) {
                *probs.last_mut().unwrap() += pj;
            } else {
                vals.push(v);
                probs.push(pj);
            }
        }
        let mean = vals.iter().zip(&probs).map(|(v, p)| v * p).sum();
        Self { vals, probs, mean }
    }

    /// Dual objective `phi(lambda) = E[log(1 - lambda (f - mu))]`.
    fn objective(&self, mu: f64, lambda: f64) -> f64 {
        self.vals
            .iter()
            .zip(&self.probs)
            .map(|(&v, &p)| p * (-lambda * (v - mu)).ln_1p())
            .sum()
    }

    /// `G(lambda) = E[(f - mu)/(1 - lambda (f - mu))] = -phi'(lambda)`,
    /// together with `G'(lambda) = E[((f - mu)/(1 - lambda (f - mu)))^2]`.
    fn constraint_stats(&self, mu: f64, lambda: f64) -> (f64, f64) {
        let mut g = 0.0;
        let mut g_prime = 0.0;
        for (&v, &p) in self.vals.iter().zip(&self.probs) {
            let r = (v - mu) / (1.0 - lambda * (v - mu));
            g += p * r;
            g_prime += p * r * r;
        }
        (g, g_prime)
    }
}

/// Evaluates the dual objective `E_p[log(1 - lambda (f(X) - mu))]`.
///
/// Concave in `lambda`. Returns `-inf` if a log argument is nonpositive,
/// which cannot happen for `lambda` strictly inside `[0, 1/(b - mu))`.
pub fn dual_objective(p: &FiniteDist, f: &WeightedSupport, mu: f64, lambda: f64) -> Result<f64> {
    check_paired(p, f)?;
    let b = f.upper_bound();
    if !(mu > 0.0 && mu < b) {
        return Err(Error::Domain(format!("mu = {mu} outside (0, {b})")));
    }
    if !(lambda >= 0.0) || lambda * (b - mu) >= 1.0 {
        return Err(Error::Domain(format!(
            "lambda = {lambda} outside [0, {})",
            1.0 / (b - mu)
        )));
    }
    let mut total = 0.0;
    for (&pj, &vj) in p.probs().iter().zip(f.values()) {
        if pj == 0.0 {
            continue;
        }
        let arg = -lambda * (vj - mu);
        if arg <= -1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += pj * arg.ln_1p();
    }
    Ok(total)
}

/// Computes `K_inf(p, mu, f)` by a bisection-safeguarded Newton search for
/// the root of `G(lambda) = E[(f - mu)/(1 - lambda (f - mu))]` on
/// `[0, (1 - 1e-12)/(b - mu)]`.
///
/// Returns the zero solution when `mu <= pf`. When `p` has no mass at
/// `f = b` the root may not exist; the clipped-endpoint supremum is then
/// returned with `at_boundary` set.
pub fn solve_kinf(p: &FiniteDist, f: &WeightedSupport, mu: f64) -> Result<KinfSolution> {
    check_paired(p, f)?;
    let b = f.upper_bound();
    if !(mu > 0.0 && mu < b) {
        return Err(Error::Domain(format!("mu = {mu} outside (0, {b})")));
    }
    let push = Pushforward::new(p, f);
    if mu <= push.mean {
        let (_, sigma_sq) = push.constraint_stats(mu, 0.0);
        return Ok(KinfSolution {
            value: 0.0,
            lambda_star: 0.0,
            sigma_sq,
            at_boundary: false,
        });
    }

    let lambda_max = (1.0 - LAMBDA_CLIP) / (b - mu);
    let (g_hi, gp_hi) = push.constraint_stats(mu, lambda_max);
    if g_hi <= 0.0 {
        // No interior root: the dual supremum sits at the right endpoint.
        let value = push.objective(mu, lambda_max).max(0.0);
        return Ok(KinfSolution {
            value,
            lambda_star: lambda_max,
            sigma_sq: gp_hi,
            at_boundary: true,
        });
    }

    // Bracket [lo, hi] with G(lo) < 0 < G(hi); G is strictly increasing.
    let mut lo = 0.0;
    let mut hi = lambda_max;
    let (g0, gp0) = push.constraint_stats(mu, 0.0);
    let mut lambda = (-g0 / gp0).clamp(0.0, lambda_max);
    let scale = b.max(1.0);
    let mut best = (lambda, f64::INFINITY);
    for _ in 0..200 {
        let (g, gp) = push.constraint_stats(mu, lambda);
        if g.abs() < best.1 {
            best = (lambda, g.abs());
        }
        if g < 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if g.abs() <= DERIV_TOL * scale {
            break;
        }
        if hi - lo <= LAMBDA_TOL * hi.max(1.0) {
            break;
        }
        let newton = lambda - g / gp;
        lambda = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let lambda_star = best.0;
    let (_, sigma_sq) = push.constraint_stats(mu, lambda_star);
    let value = push.objective(mu, lambda_star).max(0.0);
    Ok(KinfSolution {
        value,
        lambda_star,
        sigma_sq,
        at_boundary: false,
    })
}

/// The two-sided transportation cost: `K_inf(p, mu, f)` for `mu >= pf`, and
/// `K_inf(p, b - mu, b - f)` on the reversed support for `mu < pf`.
pub fn kinf_star(p: &FiniteDist, f: &WeightedSupport, mu: f64) -> Result<f64> {
    check_paired(p, f)?;
    let pf = p.mean(f);
    if mu >= pf {
        Ok(solve_kinf(p, f, mu)?.value)
    } else {
        let b = f.upper_bound();
        Ok(solve_kinf(&p.reversed(), &f.complement(), b - mu)?.value)
    }
}

/// The signed square-root transform `A(p, mu, f) = sgn(mu - pf) sqrt(2 kinf_star)`,
/// a strictly increasing bijection from `(0, b)` onto an interval of the line.
pub fn a_transform(p: &FiniteDist, f: &WeightedSupport, mu: f64) -> Result<f64> {
    check_paired(p, f)?;
    if !p.spans_two_values(f) {
        return Err(Error::Degenerate(
            "a_transform needs positive mass on two distinct support values".into(),
        ));
    }
    let pf = p.mean(f);
    let k = kinf_star(p, f, mu)?;
    let magnitude = (2.0 * k).sqrt();
    Ok(if mu >= pf { magnitude } else { -magnitude })
}

/// Closed-form `K_inf` for the two-point support `{0, 1}`: the Bernoulli
/// divergence `kl(p1, mu)` when `mu > p1`, else zero. Test oracle for
/// [`solve_kinf`].
pub fn two_point_oracle(p1: f64, mu: f64) -> Result<f64> {
    if !(p1 > 0.0 && p1 < 1.0) {
        return Err(Error::Domain(format!("p1 = {p1} outside (0, 1)")));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Domain(format!("mu = {mu} outside (0, 1)")));
    }
    if mu <= p1 {
        return Ok(0.0);
    }
    Ok(p1 * (p1 / mu).ln() + (1.0 - p1) * ((1.0 - p1) / (1.0 - mu)).ln())
}

/// Exact minimizer of `KL(p, q)` over simplex grid points `q` (step
/// `resolution`) satisfying `q f >= mu`. Independent primal oracle for
/// [`solve_kinf`]; upper-bounds the true `K_inf` and converges to it as the
/// resolution shrinks.
///
/// The interior coordinates are enumerated exhaustively; for each interior
/// assignment the split of the remaining mass between the two endpoint
/// categories is a one-dimensional convex problem whose grid minimizer lies
/// at one of four candidate points.
pub fn grid_oracle(p: &FiniteDist, f: &WeightedSupport, mu: f64, resolution: f64) -> Result<f64> {
    check_paired(p, f)?;
    let m = f.m();
    if m > 3 {
        return Err(Error::InvalidInput(format!(
            "grid oracle supports m <= 3, got m = {m}"
        )));
    }
    if !(resolution > 0.0 && resolution <= 1e-2) {
        return Err(Error::Domain(format!(
            "resolution = {resolution} outside (0, 1e-2]"
        )));
    }
    let b = f.upper_bound();
    if !(mu > 0.0 && mu < b) {
        return Err(Error::Domain(format!("mu = {mu} outside (0, {b})")));
    }
    let n = (1.0 / resolution).round() as i64;
    let probs = p.probs();
    let vals = f.values();

    let mut best = f64::INFINITY;
    let mut scan = |interior: &[i64]| {
        let used: i64 = interior.iter().sum();
        let rem = n - used;
        if rem < 0 {
            return;
        }
        let mut inner_kl = 0.0;
        let mut wsum = 0.0;
        for (idx, &k) in interior.iter().enumerate() {
            let j = idx + 1;
            wsum += k as f64 * vals[j];
            if probs[j] > 0.0 {
                if k == 0 {
                    return;
                }
                inner_kl += probs[j] * (probs[j] * n as f64 / k as f64).ln();
            }
        }
        // Mean constraint on the top coordinate: k_m b >= n mu - wsum.
        let x = (n as f64 * mu - wsum) / b;
        let k_lo = ((x - 1e-9).ceil() as i64).max(if probs[m] > 0.0 { 1 } else { 0 });
        let k_hi = rem - if probs[0] > 0.0 { 1 } else { 0 };
        if k_lo > k_hi {
            return;
        }
        let end_kl = |k_m: i64| -> f64 {
            let mut kl = 0.0;
            if probs[m] > 0.0 {
                kl += probs[m] * (probs[m] * n as f64 / k_m as f64).ln();
            }
            if probs[0] > 0.0 {
                kl += probs[0] * (probs[0] * n as f64 / (rem - k_m) as f64).ln();
            }
            kl
        };
        let weight = probs[0] + probs[m];
        let unconstrained = if weight > 0.0 {
            rem as f64 * probs[m] / weight
        } else {
            k_lo as f64
        };
        let lo_near = (unconstrained.floor() as i64).clamp(k_lo, k_hi);
        let hi_near = (unconstrained.ceil() as i64).clamp(k_lo, k_hi);
        for k_m in [k_lo, lo_near, hi_near, k_hi] {
            let total = inner_kl + end_kl(k_m);
            if total < best {
                best = total;
            }
        }
    };

    match m {
        1 => scan(&[]),
        2 => {
            for k1 in 0..=n {
                scan(&[k1]);
            }
        }
        3 => {
            for k1 in 0..=n {
                for k2 in 0..=(n - k1) {
                    scan(&[k1, k2]);
                }
            }
        }
        _ => unreachable!(),
    }

    if best.is_infinite() {
        return Err(Error::InfeasibleGrid(format!(
            "no grid point with step {resolution} satisfies the mean constraint mu = {mu}"
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(p1: f64) -> (FiniteDist, WeightedSupport) {
        (
            FiniteDist::new(vec![1.0 - p1, p1]).unwrap(),
            WeightedSupport::new(vec![0.0, 1.0]).unwrap(),
        )
    }

    #[test]
    fn dual_objective_examples() {
        let (p, f) = two_point(0.5);
        assert_eq!(dual_objective(&p, &f, 0.75, 0.0).unwrap(), 0.0);
        let v = dual_objective(&p, &f, 0.75, 4.0 / 3.0).unwrap();
        assert!((v - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15);

        let point = FiniteDist::new(vec![1.0, 0.0]).unwrap();
        let f01 = WeightedSupport::new(vec![0.0, 1.0]).unwrap();
        let v = dual_objective(&point, &f01, 0.5, 1.0).unwrap();
        assert!((v - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn dual_objective_domain_errors() {
        let (p, f) = two_point(0.5);
        assert!(matches!(
            dual_objective(&p, &f, 1.5, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            dual_objective(&p, &f, 0.75, 4.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            dual_objective(&p, &f, 0.75, -0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn solve_two_point_closed_form() {
        let (p, f) = two_point(0.5);
        let sol = solve_kinf(&p, &f, 0.75).unwrap();
        assert!((sol.value - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((sol.lambda_star - 4.0 / 3.0).abs() < 1e-9);
        assert!((sol.sigma_sq - 0.140625).abs() < 1e-9);
        assert!(!sol.at_boundary);
    }

    #[test]
    fn solve_below_mean_is_zero() {
        let p = FiniteDist::new(vec![0.3, 0.7]).unwrap();
        let f = WeightedSupport::new(vec![0.0, 1.0]).unwrap();
        let sol = solve_kinf(&p, &f, 0.5).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.lambda_star, 0.0);
        assert!(sol.sigma_sq > 0.0);
    }

    #[test]
    fn solve_three_point_matches_grid() {
        let third = 1.0 / 3.0;
        let p = FiniteDist::new(vec![third, third, third]).unwrap();
        let f = WeightedSupport::new(vec![0.0, 0.5, 1.0]).unwrap();
        let sol = solve_kinf(&p, &f, 0.75).unwrap();
        assert!((sol.value - 0.2100).abs() < 1e-3);
        assert!((sol.lambda_star - 1.907).abs() < 2e-3);
        let grid = grid_oracle(&p, &f, 0.75, 1e-3).unwrap();
        assert!((sol.value - grid).abs() < 2e-3);
    }

    #[test]
    fn solve_boundary_when_top_mass_vanishes() {
        let p = FiniteDist::new(vec![0.5, 0.5, 0.0]).unwrap();
        let f = WeightedSupport::new(vec![0.0, 0.5, 1.0]).unwrap();
        let sol = solve_kinf(&p, &f, 0.6).unwrap();
        assert!(sol.at_boundary);
        // Closed form at the endpoint: E[log((b - f)/(b - mu))].
        let expect = 0.5 * (1.0f64 / 0.4).ln() + 0.5 * (0.5f64 / 0.4).ln();
        assert!((sol.value - expect).abs() < 1e-9);
        let grid = grid_oracle(&p, &f, 0.6, 1e-3).unwrap();
        assert!((sol.value - grid).abs() < 3e-3);
    }

    #[test]
    fn solve_handles_tied_support_values() {
        // Repeated f values aggregate to the two-point pushforward.
        let p = FiniteDist::new(vec![0.25, 0.25, 0.5]).unwrap();
        let f = WeightedSupport::new(vec![0.0, 0.0, 1.0]).unwrap();
        let sol = solve_kinf(&p, &f, 0.75).unwrap();
        assert!((sol.value - two_point_oracle(0.5, 0.75).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn solve_domain_error() {
        let (p, f) = two_point(0.5);
        assert!(matches!(solve_kinf(&p, &f, 0.0), Err(Error::Domain(_))));
        assert!(matches!(solve_kinf(&p, &f, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn kinf_star_two_point_symmetry() {
        let (p, f) = two_point(0.5);
        let hi = kinf_star(&p, &f, 0.75).unwrap();
        let lo = kinf_star(&p, &f, 0.25).unwrap();
        assert!((hi - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((hi - lo).abs() < 1e-12);
        assert_eq!(kinf_star(&p, &f, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn a_transform_signs() {
        let (p, f) = two_point(0.5);
        assert_eq!(a_transform(&p, &f, 0.5).unwrap(), 0.0);
        let plus = a_transform(&p, &f, 0.75).unwrap();
        let minus = a_transform(&p, &f, 0.25).unwrap();
        assert!((plus - (2.0 * 0.5 * (4.0f64 / 3.0).ln()).sqrt()).abs() < 1e-12);
        assert!((plus - 0.536359).abs() < 2e-6);
        assert!((plus + minus).abs() < 1e-12);

        let degenerate = FiniteDist::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            a_transform(&degenerate, &f, 0.5),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn two_point_oracle_values() {
        assert!((two_point_oracle(0.5, 0.75).unwrap() - 0.143841).abs() < 1e-6);
        assert_eq!(two_point_oracle(0.5, 0.5).unwrap(), 0.0);
        let expect = 0.4 * (0.8f64).ln() + 0.6 * (1.2f64).ln();
        let got = two_point_oracle(0.4, 0.5).unwrap();
        assert!((got - expect).abs() < 1e-15);
        assert!((got - 0.020136).abs() < 1e-6);
        assert!(two_point_oracle(0.0, 0.5).is_err());
        assert!(two_point_oracle(0.5, 1.0).is_err());
    }

    #[test]
    fn grid_oracle_examples() {
        let (p, f) = two_point(0.5);
        let v = grid_oracle(&p, &f, 0.75, 1e-4).unwrap();
        assert!((v - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-4);
        assert_eq!(grid_oracle(&p, &f, 0.4, 1e-2).unwrap(), 0.0);
    }

    #[test]
    fn grid_oracle_rejects_bad_inputs() {
        let (p, f) = two_point(0.5);
        assert!(matches!(
            grid_oracle(&p, &f, 0.75, 0.5),
            Err(Error::Domain(_))
        ));
        // mu deep inside the last grid cell: only the pure-top corner is
        // feasible and it has infinite divergence from an interior p.
        assert!(matches!(
            grid_oracle(&p, &f, 0.9999, 1e-2),
            Err(Error::InfeasibleGrid(_))
        ));
    }

    #[test]
    fn grid_oracle_upper_bounds_dual() {
        let p = FiniteDist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let f = WeightedSupport::new(vec![0.0, 0.4, 1.0]).unwrap();
        for mu in [0.5, 0.6, 0.7, 0.8] {
            let dual = solve_kinf(&p, &f, mu).unwrap().value;
            let primal = grid_oracle(&p, &f, mu, 1e-3).unwrap();
            assert!(primal >= dual - 1e-9, "grid below dual at mu = {mu}");
            assert!((primal - dual).abs() < 3e-3, "gap too large at mu = {mu}");
        }
    }
}
