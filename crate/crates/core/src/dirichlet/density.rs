//! Exact density of the weighted sum `Z = w f`, `w ~ Dir(alpha)`, through
//! the integral representation
//!
//! ```text
//! p_Z(u) = (alpha_bar - 1) / (2 pi) * int_R prod_j (1 + i (f(j) - u) s)^(-alpha_j) ds .
//! ```
//!
//! For concentrated parameters the line of integration is shifted to
//! `R + i lambda_star`, where `lambda_star` is the unique saddle of the
//! log-integrand. Factoring the peak modulus out analytically leaves the
//! well-scaled integrand `prod_j (1 + i e_j t)^(-alpha_j)` with
//! `e_j = (f(j) - u) / (1 - lambda_star (f(j) - u))`, whose peak value is 1,
//! times the explicit factor `exp(-alpha_bar K_inf_star(p_bar, u, f))`.
//! For diffuse parameters (`alpha_bar < 4`) the decay is slow and the saddle
//! is flat, so the integral is evaluated directly on the real axis.

use num_complex::Complex64;

use crate::dirichlet::DirichletParams;
use crate::error::{Error, Result};
use crate::quad::adaptive_complex;
use crate::support::{check_paired, WeightedSupport};

/// Total concentration below which the real-axis form is used.
const SADDLE_MIN_ALPHA_BAR: f64 = 4.0;
/// Modulus truncation threshold relative to the peak.
const MODULUS_CUTOFF: f64 = 1e-12;
/// Relative accuracy target for the line integral.
const REL_TOL: f64 = 1e-9;
/// Largest allowed imaginary residue relative to the real part.
const IMAG_TOL: f64 = 1e-8;

/// Log-integrand data: the factor slopes `e_j` with their exponents.
struct LineIntegrand {
    slopes: Vec<f64>,
    alphas: Vec<f64>,
}

impl LineIntegrand {
    fn eval(&self, t: f64) -> Complex64 {
        let mut log_mod = 0.0;
        let mut phase = 0.0;
        for (&e, &a) in self.slopes.iter().zip(&self.alphas) {
            let et = e * t;
            log_mod -= 0.5 * a * (et * et).ln_1p();
            phase -= a * et.atan();
        }
        Complex64::from_polar(log_mod.exp(), phase)
    }

    fn modulus(&self, t: f64) -> f64 {
        let mut log_mod = 0.0;
        for (&e, &a) in self.slopes.iter().zip(&self.alphas) {
            let et = e * t;
            log_mod -= 0.5 * a * (et * et).ln_1p();
        }
        log_mod.exp()
    }

    /// Local algebraic decay exponent `sum_j alpha_j (e_j t)^2 / (1 + (e_j t)^2)`,
    /// nondecreasing in `|t|` and tending to `alpha_bar`. For `t >= T` the
    /// modulus is dominated by `modulus(T) (t/T)^(-exponent(T))`, which gives
    /// a rigorous tail bound once the exponent exceeds one.
    fn decay_exponent(&self, t: f64) -> f64 {
        self.slopes
            .iter()
            .zip(&self.alphas)
            .map(|(&e, &a)| {
                let q = (e * t) * (e * t);
                a * q / (1.0 + q)
            })
            .sum()
    }

    /// Curvature of the log-modulus at the origin; sets the peak width.
    fn curvature(&self) -> f64 {
        self.slopes
            .iter()
            .zip(&self.alphas)
            .map(|(&e, &a)| a * e * e)
            .sum()
    }
}

/// Finds the truncation point: modulus below `MODULUS_CUTOFF` and a tail
/// bound below `tail_floor`. Doubles from the peak width outward.
fn truncation_point(g: &LineIntegrand, width: f64, tail_floor: f64) -> Result<f64> {
    let mut t = 8.0 * width;
    for _ in 0..200 {
        let modulus = g.modulus(t);
        if modulus < MODULUS_CUTOFF {
            let exponent = g.decay_exponent(t);
            if exponent > 1.0 {
                let tail = modulus * t / (exponent - 1.0);
                if tail < tail_floor {
                    return Ok(t);
                }
            }
        }
        t *= 2.0;
    }
    Err(Error::NonConvergence(
        "integrand truncation never triggered; parameters are ill-conditioned".into(),
    ))
}

/// Integrates the line integrand over `[-T, T]` with panels seeded around
/// the central peak.
fn line_integral(g: &LineIntegrand, width: f64, scale: f64) -> Result<Complex64> {
    let trunc = truncation_point(g, width, 1e-10 * scale)?;
    let mut breaks = vec![-trunc, trunc];
    for k in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let t = k * width;
        if t < trunc {
            breaks.push(t);
            breaks.push(-t);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut f = |t: f64| g.eval(t);
    let out = adaptive_complex(&mut f, &breaks, REL_TOL, 1e-12 * scale, 4096)?;
    Ok(out.value)
}

/// Solves the saddle equation `E_{p_bar}[(f(X) - u) / (1 - lambda (f(X) - u))] = 0`
/// on the strip `(-1/u, 1/(b-u))`. The root is positive for `u` above the
/// mean and negative below it; positive mass at both endpoints of the
/// support keeps it interior.
fn saddle_lambda(probs: &[f64], values: &[f64], u: f64, b: f64) -> f64 {
    let stats = |lambda: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut gp = 0.0;
        for (&p, &v) in probs.iter().zip(values) {
            let r = (v - u) / (1.0 - lambda * (v - u));
            g += p * r;
            gp += p * r * r;
        }
        (g, gp)
    };
    let mean: f64 = probs.iter().zip(values).map(|(p, v)| p * v).sum();
    if u == mean {
        return 0.0;
    }
    let clip = 1.0 - 1e-12;
    let (mut lo, mut hi) = if u > mean {
        (0.0, clip / (b - u))
    } else {
        (-clip / u, 0.0)
    };
    // G is strictly increasing with G(lo) < 0 < G(hi).
    let (g0, gp0) = stats(if u > mean { lo } else { hi });
    let mut lambda = (-g0 / gp0).clamp(lo, hi);
    for _ in 0..200 {
        let (g, gp) = stats(lambda);
        if g < 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if g.abs() <= 1e-14 * b.max(1.0) || hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let newton = lambda - g / gp;
        lambda = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    lambda
}

fn validate(params: &DirichletParams, f: &WeightedSupport, u: f64) -> Result<()> {
    check_paired(&params.p_bar(), f)?;
    if params.alpha_bar() <= 1.0 {
        return Err(Error::Domain(format!(
            "alpha_bar = {} must exceed 1",
            params.alpha_bar()
        )));
    }
    if !params.p_bar().spans_two_values(f) {
        return Err(Error::Degenerate(
            "weighted sum is degenerate: one distinct support value".into(),
        ));
    }
    let b = f.upper_bound();
    if !(0.0..b).contains(&u) {
        return Err(Error::Domain(format!("u = {u} outside [0, {b})")));
    }
    Ok(())
}

/// Density of `Z = w f` at `u`, for `w ~ Dir(alpha)` with `alpha_bar > 1`.
pub fn weighted_sum_density(params: &DirichletParams, f: &WeightedSupport, u: f64) -> Result<f64> {
    validate(params, f, u)?;
    let alpha = params.alpha();
    let values = f.values();
    let b = f.upper_bound();
    let alpha_bar = params.alpha_bar();
    let prefactor = (alpha_bar - 1.0) / (2.0 * std::f64::consts::PI);

    if u == 0.0 {
        // No saddle exists at the left endpoint. The factors with f(j) = 0
        // do not decay, so the limit is zero exactly when the remaining
        // exponents sum above one, and the density is unbounded otherwise.
        let decaying: f64 = alpha
            .iter()
            .zip(values)
            .filter(|(_, &v)| v > 0.0)
            .map(|(&a, _)| a)
            .sum();
        if decaying > 1.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(
            "density is unbounded at u = 0 for these parameters".into(),
        ));
    }

    if alpha_bar < SADDLE_MIN_ALPHA_BAR {
        // Real-axis form: modulus peaks at the origin with value 1.
        let g = LineIntegrand {
            slopes: values.iter().map(|&v| v - u).collect(),
            alphas: alpha.to_vec(),
        };
        let width = 1.0 / g.curvature().sqrt();
        let integral = line_integral(&g, width, 2.5 * width)?;
        if integral.im.abs() > IMAG_TOL * integral.re.abs() {
            return Err(Error::NonConvergence(format!(
                "imaginary residue {:.3e} exceeds tolerance",
                integral.im
            )));
        }
        return Ok((prefactor * integral.re).max(0.0));
    }

    let p_bar = params.p_bar();
    let lambda = saddle_lambda(p_bar.probs(), values, u, b);
    // Dual value at the saddle equals K_inf_star(p_bar, u, f).
    let kinf_star: f64 = p_bar
        .probs()
        .iter()
        .zip(values)
        .map(|(&p, &v)| p * (-lambda * (v - u)).ln_1p())
        .sum();
    let g = LineIntegrand {
        slopes: values
            .iter()
            .map(|&v| (v - u) / (1.0 - lambda * (v - u)))
            .collect(),
        alphas: alpha.to_vec(),
    };
    let width = 1.0 / g.curvature().sqrt();
    let scale = width * (2.0 * std::f64::consts::PI).sqrt();
    let integral = line_integral(&g, width, scale)?;
    if integral.im.abs() > IMAG_TOL * integral.re.abs() {
        return Err(Error::NonConvergence(format!(
            "imaginary residue {:.3e} exceeds tolerance",
            integral.im
        )));
    }
    Ok((prefactor * (-alpha_bar * kinf_star).exp() * integral.re).max(0.0))
}

/// Integrates the density over `(0, b)`; the return value should be 1 up to
/// quadrature error. Panels are seeded around the mean of `Z`, whose exact
/// standard deviation is `sqrt(Var_p(f) / (alpha_bar + 1))`.
pub fn density_normalization_check(params: &DirichletParams, f: &WeightedSupport) -> Result<f64> {
    validate(params, f, 0.0)?;
    let b = f.upper_bound();
    let p_bar = params.p_bar();
    let mean = p_bar.mean(f);
    let second: f64 = p_bar
        .probs()
        .iter()
        .zip(f.values())
        .map(|(&p, &v)| p * v * v)
        .sum();
    let sd = ((second - mean * mean).max(0.0) / (params.alpha_bar() + 1.0)).sqrt();

    let mut breaks = vec![0.0, b];
    for k in 1..=6 {
        let d = k as f64 * sd;
        for t in [mean - d, mean + d] {
            if t > 0.0 && t < b {
                breaks.push(t);
            }
        }
    }
    for q in [0.25, 0.5, 0.75] {
        breaks.push(q * b);
    }
    breaks.push(mean.clamp(f64::MIN_POSITIVE, b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut failure: Option<Error> = None;
    let mut integrand = |u: f64| match weighted_sum_density(params, f, u) {
        Ok(v) => Complex64::new(v, 0.0),
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let out = adaptive_complex(&mut integrand, &breaks, 1e-9, 1e-10, 2000)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(out.value.re)
}
