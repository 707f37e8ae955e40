//! Multinomial Thompson sampling on a reward grid, its rounded extension to
//! bounded rewards, the doubling-trick variant for unknown horizons, and the
//! asymptotic regret lower-bound line they are measured against.

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinf::solve_kinf;
use crate::rng::stream;
use crate::support::{FiniteDist, WeightedSupport};
use crate::tail::c0_constant;

/// Prior scale for the endpoint categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    /// Endpoints `4 c0 + 1` (about 1160), interior `1/(m-2)`: endpoint mass
    /// meeting the two-sided bound's admissibility condition at
    /// `epsilon = 1/2`, which is what the regret analysis of this sampler
    /// rests on.
    Concentrated,
    /// Endpoints 1, interior `1/(m-2)`: the same shape at practical scale.
    Light,
}

/// A prior vector plus a flag marking the `m <= 2` fallback, where the
/// interior weight `1/(m-2)` is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    pub alpha: Vec<f64>,
    pub small_m_fallback: bool,
}

/// The Dirichlet prior on a grid of size `m`: endpoint categories carry the
/// kind's endpoint mass, interior categories `1/(m-2)`. For `m = 2` the
/// single interior weight is 1; for `m = 1` there is no interior.
pub fn mts_prior(m: usize, kind: PriorKind) -> Prior {
    assert!(m >= 1);
    let endpoint = match kind {
        PriorKind::Concentrated => 4.0 * c0_constant() + 1.0,
        PriorKind::Light => 1.0,
    };
    let (interior, fallback) = if m >= 3 {
        (1.0 / (m as f64 - 2.0), false)
    } else {
        (1.0, m == 2)
    };
    let mut alpha = vec![interior; m + 1];
    alpha[0] = endpoint;
    alpha[m] = endpoint;
    Prior {
        alpha,
        small_m_fallback: fallback || m == 1,
    }
}

/// One arm of the bandit instance.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmSpec {
    /// Law on the grid `{0, 1/m, ..., 1}`.
    Multinomial(FiniteDist),
    /// Reward distribution on `[0, 1]` with an analytically known mean.
    Bounded(BoundedArm),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundedArm {
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    Beta { alpha: f64, beta: f64 },
    PiecewiseUniform { breaks: Vec<f64>, weights: Vec<f64> },
}

impl ArmSpec {
    pub fn mean(&self) -> f64 {
        match self {
            ArmSpec::Multinomial(dist) => {
                let m = dist.len() - 1;
                dist.probs()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p * i as f64 / m as f64)
                    .sum()
            }
            ArmSpec::Bounded(arm) => arm.mean(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ArmSpec::Multinomial(dist) => {
                if dist.len() < 2 {
                    return Err(Error::InvalidInput("multinomial arm needs m >= 1".into()));
                }
                Ok(())
            }
            ArmSpec::Bounded(arm) => arm.validate(),
        }
    }
}

impl BoundedArm {
    pub fn mean(&self) -> f64 {
        match self {
            BoundedArm::Discrete { values, probs } => {
                values.iter().zip(probs).map(|(v, p)| v * p).sum()
            }
            BoundedArm::Beta { alpha, beta } => alpha / (alpha + beta),
            BoundedArm::PiecewiseUniform { breaks, weights } => breaks
                .windows(2)
                .zip(weights)
                .map(|(w, p)| p * 0.5 * (w[0] + w[1]))
                .sum(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            BoundedArm::Discrete { values, probs } => {
                if values.len() != probs.len() || values.is_empty() {
                    return Err(Error::InvalidInput(
                        "discrete arm needs matching nonempty values/probs".into(),
                    ));
                }
                if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    return Err(Error::InvalidInput(
                        "discrete arm values outside [0, 1]".into(),
                    ));
                }
                let sum: f64 = probs.iter().sum();
                if probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidInput(
                        "discrete arm probs must sum to 1".into(),
                    ));
                }
                Ok(())
            }
            BoundedArm::Beta { alpha, beta } => {
                if *alpha > 0.0 && *beta > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidInput("beta arm needs positive shapes".into()))
                }
            }
            BoundedArm::PiecewiseUniform { breaks, weights } => {
                if breaks.len() != weights.len() + 1 || weights.is_empty() {
                    return Err(Error::InvalidInput(
                        "piecewise arm needs breaks = weights + 1".into(),
                    ));
                }
                if breaks.windows(2).any(|w| w[1] <= w[0])
                    || breaks[0] < 0.0
                    || *breaks.last().unwrap() > 1.0
                {
                    return Err(Error::InvalidInput(
                        "piecewise arm breaks must increase within [0, 1]".into(),
                    ));
                }
                let sum: f64 = weights.iter().sum();
                if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidInput(
                        "piecewise weights must sum to 1".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            BoundedArm::Discrete { values, probs } => values[sample_categorical(probs, rng)],
            BoundedArm::Beta { alpha, beta } => BetaDist::new(*alpha, *beta)
                .expect("validated shapes")
                .sample(rng),
            BoundedArm::PiecewiseUniform { breaks, weights } => {
                let k = sample_categorical(weights, rng);
                let u: f64 = rng.random();
                breaks[k] + u * (breaks[k + 1] - breaks[k])
            }
        }
    }
}

/// Inverse-CDF draw from a probability vector; consumes one uniform.
fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Per-arm Dirichlet posteriors over a common reward grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorState {
    prior: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    pulls: Vec<u64>,
}

impl PosteriorState {
    pub fn new(num_arms: usize, prior: &Prior) -> Self {
        Self {
            prior: prior.alpha.clone(),
            alpha: vec![prior.alpha.clone(); num_arms],
            pulls: vec![0; num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.alpha.len()
    }

    /// Grid size `m`.
    pub fn grid_m(&self) -> usize {
        self.prior.len() - 1
    }

    pub fn alpha(&self, arm: usize) -> &[f64] {
        &self.alpha[arm]
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    /// Adds one observation of `category` to `arm`.
    pub fn update(&mut self, arm: usize, category: usize) -> Result<()> {
        if arm >= self.alpha.len() {
            return Err(Error::InvalidInput(format!("arm index {arm} out of range")));
        }
        if category > self.grid_m() {
            return Err(Error::InvalidInput(format!(
                "category {category} out of range for m = {}",
                self.grid_m()
            )));
        }
        self.alpha[arm][category] += 1.0;
        self.pulls[arm] += 1;
        Ok(())
    }
}

/// One Thompson round: draws a posterior sample per arm and returns the arm
/// with the largest sampled mean, ties to the lowest index. The sample mean
/// is computed from unnormalized gamma draws, which is equivalent to drawing
/// the Dirichlet weight vector itself.
pub fn mts_step<R: Rng + ?Sized>(state: &PosteriorState, rng: &mut R) -> usize {
    let m = state.grid_m() as f64;
    let mut best_arm = 0;
    let mut best_mean = f64::NEG_INFINITY;
    for (arm, alpha) in state.alpha.iter().enumerate() {
        let mut total = 0.0;
        let mut weighted = 0.0;
        for (i, &a) in alpha.iter().enumerate() {
            let y = Gamma::new(a, 1.0).expect("positive shape").sample(rng);
            total += y;
            weighted += y * i as f64;
        }
        let mean = if total > 0.0 {
            weighted / (m * total)
        } else {
            0.0
        };
        if mean > best_mean {
            best_mean = mean;
            best_arm = arm;
        }
    }
    best_arm
}

/// Unbiased rounding of `y` onto the grid `{0, 1/m, ..., 1}`: category
/// `floor(m y)` plus a Bernoulli carry with the fractional part as bias, so
/// the rounded value has expectation exactly `y`.
///
/// Fractional parts within 1e-9 of 0 or 1 are snapped and consume no
/// randomness; this removes binary-representation noise on grid points.
pub fn randomized_round<R: Rng + ?Sized>(y: f64, m: usize, rng: &mut R) -> Result<usize> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("reward {y} outside [0, 1]")));
    }
    let scaled = y * m as f64;
    let mut base = scaled.floor();
    let mut frac = scaled - base;
    if frac > 1.0 - 1e-9 {
        base += 1.0;
        frac = 0.0;
    }
    let mut category = base as usize;
    if category >= m {
        return Ok(m);
    }
    if frac > 1e-9 && rng.random::<f64>() < frac {
        category += 1;
    }
    Ok(category)
}

/// Pseudo-regret trace of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub horizon: u64,
    /// Arm chosen at each round.
    pub arms_chosen: Vec<u32>,
    /// Cumulative pseudo-regret after each round, from declared arm means.
    pub cum_regret: Vec<f64>,
    /// Final pull counts per arm.
    pub pulls: Vec<u64>,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub t: u64,
    pub cum_regret: f64,
    /// `sum_a Delta_a log(t) / K_inf(nu_a, mu_star)` when computable for the
    /// arm family.
    pub lower_line: Option<f64>,
}

/// Log-spaced checkpoint times up to and including `horizon`.
pub fn checkpoint_times(horizon: u64) -> Vec<u64> {
    let mut ts = vec![];
    let mut k = 0u32;
    loop {
        let t = 10f64.powf(k as f64 / 8.0).round() as u64;
        if t >= horizon {
            break;
        }
        ts.push(t.max(1));
        k += 1;
    }
    ts.push(horizon);
    ts.dedup();
    ts
}

/// The regret lower-bound coefficient `sum_{a: Delta_a > 0} Delta_a / K_inf(nu_a, mu_star)`.
///
/// Computable for multinomial and discrete arms; arms optimal or matching
/// the best mean contribute zero. An optimal mean at the top of the range
/// makes every `K_inf` infinite, contributing zero as well.
pub fn lower_bound_coefficient(arms: &[ArmSpec]) -> Result<f64> {
    if arms.is_empty() {
        return Err(Error::InvalidInput("need at least one arm".into()));
    }
    let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
    let mu_star = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut coeff = 0.0;
    for (arm, &mean) in arms.iter().zip(&means) {
        let gap = mu_star - mean;
        if gap <= 0.0 {
            continue;
        }
        if mu_star >= 1.0 {
            continue;
        }
        let (dist, support) = arm_law(arm)?;
        let kinf = solve_kinf(&dist, &support, mu_star)?.value;
        coeff += gap / kinf;
    }
    Ok(coeff)
}

/// The lower-bound line value `coefficient * log T`.
pub fn asymptotic_lower_line(arms: &[ArmSpec], horizon: f64) -> Result<f64> {
    Ok(lower_bound_coefficient(arms)? * horizon.ln())
}

/// Finite-support law of an arm on `[0, 1]` with both endpoints present.
fn arm_law(arm: &ArmSpec) -> Result<(FiniteDist, WeightedSupport)> {
    match arm {
        ArmSpec::Multinomial(dist) => {
            let m = dist.len() - 1;
            Ok((dist.clone(), WeightedSupport::unit_grid(m)))
        }
        ArmSpec::Bounded(BoundedArm::Discrete { values, probs }) => {
            let mut pairs: Vec<(f64, f64)> =
                values.iter().copied().zip(probs.iter().copied()).collect();
            pairs.push((0.0, 0.0));
            pairs.push((1.0, 0.0));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut vals = vec![];
            let mut ps: Vec<f64> = vec![];
            for (v, p) in pairs {
                if vals.last() == Some(&v) {
                    *ps.last_mut().unwrap() += p;
                } else {
                    vals.push(v);
                    ps.push(p);
                }
            }
            Ok((FiniteDist::new(ps)?, WeightedSupport::new(vals)?))
        }
        ArmSpec::Bounded(_) => Err(Error::InvalidInput(
            "lower-bound line needs a finite-support arm law".into(),
        )),
    }
}

/// Result of one simulation run: the trace plus the final posterior, so
/// callers can cross-check counts, and bookkeeping for the doubling variant.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub trace: RegretTrace,
    pub posterior: PosteriorState,
    /// Posterior rebuilds performed (doubling variant only).
    pub rebuilds: u32,
    /// Grid size in use at the end of the run.
    pub grid_m: usize,
    /// Post-hoc check of the instance-dependent grid condition
    /// `m > max_a (2 + K_inf) / ((1 - mu_star) K_inf)`; present when every
    /// suboptimal arm has a computable finite-support law.
    pub grid_condition_met: Option<bool>,
}

/// Evaluates the grid-size condition for the rounded algorithm on this
/// instance, if the arm laws allow it.
fn grid_condition(arms: &[ArmSpec], grid_m: usize) -> Option<bool> {
    let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
    let mu_star = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if mu_star >= 1.0 {
        return None;
    }
    let mut threshold = 0.0f64;
    for (arm, &mean) in arms.iter().zip(&means) {
        if mu_star - mean <= 0.0 {
            continue;
        }
        let (dist, support) = arm_law(arm).ok()?;
        let kinf = solve_kinf(&dist, &support, mu_star).ok()?.value;
        if kinf <= 0.0 {
            return None;
        }
        threshold = threshold.max((2.0 + kinf) / ((1.0 - mu_star) * kinf));
    }
    Some(grid_m as f64 > threshold)
}

struct TraceBuilder {
    horizon: u64,
    arms_chosen: Vec<u32>,
    cum_regret: Vec<f64>,
    regret: f64,
    checkpoints: Vec<u64>,
    next_checkpoint: usize,
    recorded: Vec<Checkpoint>,
    lower_coeff: Option<f64>,
}

impl TraceBuilder {
    fn new(horizon: u64, lower_coeff: Option<f64>) -> Self {
        let checkpoints = checkpoint_times(horizon);
        Self {
            horizon,
            arms_chosen: Vec::with_capacity(horizon as usize),
            cum_regret: Vec::with_capacity(horizon as usize),
            regret: 0.0,
            checkpoints,
            next_checkpoint: 0,
            recorded: vec![],
            lower_coeff,
        }
    }

    fn record(&mut self, t: u64, arm: usize, gap: f64) {
        self.regret += gap;
        self.arms_chosen.push(arm as u32);
        self.cum_regret.push(self.regret);
        while self.next_checkpoint < self.checkpoints.len()
            && self.checkpoints[self.next_checkpoint] == t
        {
            self.recorded.push(Checkpoint {
                t,
                cum_regret: self.regret,
                lower_line: self.lower_coeff.map(|c| c * (t as f64).ln()),
            });
            self.next_checkpoint += 1;
        }
    }

    fn finish(self, pulls: Vec<u64>) -> RegretTrace {
        RegretTrace {
            horizon: self.horizon,
            arms_chosen: self.arms_chosen,
            cum_regret: self.cum_regret,
            pulls,
            checkpoints: self.recorded,
        }
    }
}

fn multinomial_dists(arms: &[ArmSpec]) -> Result<Vec<&FiniteDist>> {
    if arms.is_empty() {
        return Err(Error::InvalidInput("need at least one arm".into()));
    }
    let mut dists = Vec::with_capacity(arms.len());
    for arm in arms {
        arm.validate()?;
        match arm {
            ArmSpec::Multinomial(d) => dists.push(d),
            ArmSpec::Bounded(_) => {
                return Err(Error::InvalidInput(
                    "this runner takes multinomial arms only".into(),
                ))
            }
        }
    }
    let len = dists[0].len();
    if dists.iter().any(|d| d.len() != len) {
        return Err(Error::InvalidInput(
            "arms must share one reward grid".into(),
        ));
    }
    Ok(dists)
}

/// Runs Thompson sampling on multinomial arms for `horizon` rounds.
pub fn run_mts<R: Rng + ?Sized>(
    arms: &[ArmSpec],
    horizon: u64,
    prior: PriorKind,
    rng: &mut R,
) -> Result<SimRun> {
    let dists = multinomial_dists(arms)?;
    let m = dists[0].len() - 1;
    let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
    let mu_star = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut state = PosteriorState::new(arms.len(), &mts_prior(m, prior));
    let mut builder = TraceBuilder::new(horizon, lower_bound_coefficient(arms).ok());
    for t in 1..=horizon {
        let arm = mts_step(&state, rng);
        let category = sample_categorical(dists[arm].probs(), rng);
        state.update(arm, category)?;
        builder.record(t, arm, mu_star - means[arm]);
    }
    let pulls = state.pulls().to_vec();
    Ok(SimRun {
        trace: builder.finish(pulls),
        posterior: state,
        rebuilds: 0,
        grid_m: m,
        grid_condition_met: grid_condition(arms, m),
    })
}

fn bounded_arms(arms: &[ArmSpec]) -> Result<Vec<&BoundedArm>> {
    if arms.is_empty() {
        return Err(Error::InvalidInput("need at least one arm".into()));
    }
    let mut out = Vec::with_capacity(arms.len());
    for arm in arms {
        arm.validate()?;
        match arm {
            ArmSpec::Bounded(b) => out.push(b),
            ArmSpec::Multinomial(_) => {
                return Err(Error::InvalidInput(
                    "this runner takes bounded arms only".into(),
                ))
            }
        }
    }
    Ok(out)
}

/// Rounded Thompson sampling: bounded rewards are rounded onto the grid
/// `{0, 1/m, ..., 1}` without bias before the posterior update. Regret is
/// accounted against the true (unrounded) arm means.
pub fn run_rmts<R: Rng + ?Sized>(
    arms: &[ArmSpec],
    horizon: u64,
    grid_m: usize,
    prior: PriorKind,
    rng: &mut R,
) -> Result<SimRun> {
    if grid_m == 0 {
        return Err(Error::InvalidInput("grid size must be at least 1".into()));
    }
    let bounded = bounded_arms(arms)?;
    let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
    let mu_star = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut state = PosteriorState::new(arms.len(), &mts_prior(grid_m, prior));
    let mut builder = TraceBuilder::new(horizon, lower_bound_coefficient(arms).ok());
    for t in 1..=horizon {
        let arm = mts_step(&state, rng);
        let reward = bounded[arm].sample(rng);
        let category = randomized_round(reward, grid_m, rng)?;
        state.update(arm, category)?;
        builder.record(t, arm, mu_star - means[arm]);
    }
    let pulls = state.pulls().to_vec();
    Ok(SimRun {
        trace: builder.finish(pulls),
        posterior: state,
        rebuilds: 0,
        grid_m,
        grid_condition_met: grid_condition(arms, grid_m),
    })
}

/// Horizon-free variant: the grid starts at size 1 and grows by one at every
/// power-of-two round, with the stored raw rewards re-rounded onto the new
/// grid through fresh draws. Total re-rounding work is at most `2 T` draws.
pub fn run_rmts_doubling<R: Rng + ?Sized>(
    arms: &[ArmSpec],
    horizon: u64,
    prior: PriorKind,
    rng: &mut R,
) -> Result<SimRun> {
    let bounded = bounded_arms(arms)?;
    let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
    let mu_star = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut grid_m = 1usize;
    let mut state = PosteriorState::new(arms.len(), &mts_prior(grid_m, prior));
    let mut history: Vec<(usize, f64)> = Vec::with_capacity(horizon as usize);
    let mut rebuilds = 0u32;
    let mut builder = TraceBuilder::new(horizon, lower_bound_coefficient(arms).ok());
    for t in 1..=horizon {
        let arm = mts_step(&state, rng);
        let reward = bounded[arm].sample(rng);
        let category = randomized_round(reward, grid_m, rng)?;
        state.update(arm, category)?;
        history.push((arm, reward));
        builder.record(t, arm, mu_star - means[arm]);
        if t >= 2 && t.is_power_of_two() {
            grid_m += 1;
            state = PosteriorState::new(arms.len(), &mts_prior(grid_m, prior));
            for &(past_arm, past_reward) in &history {
                let category = randomized_round(past_reward, grid_m, rng)?;
                state.update(past_arm, category)?;
            }
            rebuilds += 1;
        }
    }
    let pulls = state.pulls().to_vec();
    Ok(SimRun {
        trace: builder.finish(pulls),
        posterior: state,
        rebuilds,
        grid_m,
        grid_condition_met: grid_condition(arms, grid_m),
    })
}

/// A bandit experiment to replicate across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditExperiment {
    pub arms: Vec<ArmSpec>,
    pub horizon: u64,
    pub prior: PriorKind,
    pub algo: BanditAlgo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BanditAlgo {
    Mts,
    Rmts { grid_m: usize },
    RmtsDoubling,
}

impl BanditExperiment {
    pub fn run_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SimRun> {
        match self.algo {
            BanditAlgo::Mts => run_mts(&self.arms, self.horizon, self.prior, rng),
            BanditAlgo::Rmts { grid_m } => {
                run_rmts(&self.arms, self.horizon, grid_m, self.prior, rng)
            }
            BanditAlgo::RmtsDoubling => {
                run_rmts_doubling(&self.arms, self.horizon, self.prior, rng)
            }
        }
    }
}

/// Runs `replications` independent copies on streams keyed `(seed, rep)`.
pub fn run_replications(
    experiment: &BanditExperiment,
    seed: u64,
    replications: u32,
) -> Result<Vec<SimRun>> {
    (0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(seed, rep as u64);
            experiment.run_one(&mut rng)
        })
        .collect()
}

/// Mean and standard error of cumulative regret at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub t: u64,
    pub mean_regret: f64,
    pub std_error: f64,
    pub lower_line: Option<f64>,
}

pub fn aggregate(runs: &[SimRun]) -> Vec<AggregatePoint> {
    if runs.is_empty() {
        return vec![];
    }
    let count = runs[0].trace.checkpoints.len();
    let n = runs.len() as f64;
    (0..count)
        .map(|i| {
            let values: Vec<f64> = runs
                .iter()
                .map(|r| r.trace.checkpoints[i].cum_regret)
                .collect();
            let mean = values.iter().sum::<f64>() / n;
            let var =
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
            AggregatePoint {
                t: runs[0].trace.checkpoints[i].t,
                mean_regret: mean,
                std_error: (var / n).sqrt(),
                lower_line: runs[0].trace.checkpoints[i].lower_line,
            }
        })
        .collect()
}
