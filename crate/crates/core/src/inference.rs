//! Maximum-likelihood estimation of the EGD(3, λ) rate and delta-method
//! intervals for the reliability R.
//!
//! The likelihood of independent strength and stress samples factorizes, so
//! each rate is fitted on its own sample and the information matrix is
//! diagonal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distribution::{EgdModel, Rate, Sample};
use crate::error::{Error, Result};
use crate::normal;
use crate::quadrature::Quadrature;
use crate::reliability::{r_closed_form, r_gradient, ParamPair};
use crate::sum::neumaier;

/// ℓ(λ) = 2n log λ − n log(1+λ) − λΣx + Σ log(1 + λx²/2)
pub fn log_likelihood(lambda: Rate, data: &Sample) -> f64 {
    let l = lambda.get();
    let n = data.len() as f64;
    let shape = neumaier(data.values().iter().map(|&x| (0.5 * l * x * x).ln_1p()));
    2.0 * n * l.ln() - n * l.ln_1p() - l * data.sum() + shape
}

/// dℓ/dλ = 2n/λ − n/(1+λ) − Σx + Σ x²/(2(1 + λx²/2))
pub fn score(lambda: Rate, data: &Sample) -> f64 {
    let l = lambda.get();
    let n = data.len() as f64;
    let shape = neumaier(data.values().iter().map(|&x| {
        let x2 = x * x;
        x2 / (2.0 + l * x2)
    }));
    2.0 * n / l - n / (1.0 + l) - data.sum() + shape
}

/// −d²ℓ/dλ² = 2n/λ² − n/(1+λ)² + Σ x⁴/(4(1 + λx²/2)²). Always positive.
pub fn neg_hessian(lambda: Rate, data: &Sample) -> f64 {
    let l = lambda.get();
    let n = data.len() as f64;
    let shape = neumaier(data.values().iter().map(|&x| {
        let r = x * x / (2.0 + l * x * x);
        r * r
    }));
    2.0 * n / (l * l) - n / ((1.0 + l) * (1.0 + l)) + shape
}

/// Positive root of x̄λ² + (x̄ − 1)λ − 3 = 0, i.e. the rate whose mean equals
/// `mean`.
pub fn moment_estimate(mean: f64) -> f64 {
    let b = mean - 1.0;
    let disc = (b * b + 12.0 * mean).sqrt();
    if b >= 0.0 {
        6.0 / (b + disc)
    } else {
        (disc - b) / (2.0 * mean)
    }
}

/// Per-observation expected information at `lambda`, computed by quadrature
/// and scaled by `n`.
pub fn expected_information(lambda: Rate, n: usize) -> Result<f64> {
    let model = EgdModel::new(lambda);
    let l = lambda.get();
    let mut upper = 60.0 / l;
    while model.sf(upper) > 1e-16 {
        upper *= 1.25;
    }
    let quad = Quadrature::with_tolerances(1e-10 / (l * l), 1e-12);
    let shape = quad.integrate(
        |x| {
            let r = x * x / (2.0 + l * x * x);
            r * r * model.pdf(x)
        },
        0.0,
        upper,
    )?;
    let per_obs = 2.0 / (l * l) - 1.0 / ((1.0 + l) * (1.0 + l)) + shape.value;
    Ok(n as f64 * per_obs)
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Stop when |score| ≤ `score_tol` · max(1, n).
    pub score_tol: f64,
    /// Stop when |Δλ| ≤ `step_tol` · λ.
    pub step_tol: f64,
    /// Starting value; the moment estimate when `None`.
    pub start: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            max_halvings: 30,
            score_tol: 1e-10,
            step_tol: 1e-12,
            start: None,
        }
    }
}

/// State of the Newton iteration when it gave up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub last_lambda: f64,
    pub last_score: f64,
    pub iterations: usize,
}

impl fmt::Display for FitDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "last λ = {}, score = {:e} after {} iterations",
            self.last_lambda, self.last_score, self.iterations
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub lambda_hat: Rate,
    pub n: usize,
    pub loglik: f64,
    pub score_at_mle: f64,
    /// −d²ℓ/dλ² at the estimate.
    pub observed_info: f64,
    pub std_err: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Fits λ by damped Newton iteration from the moment estimate.
pub fn fit_mle(data: &Sample) -> Result<FitResult> {
    fit_mle_with(data, &FitOptions::default())
}

pub fn fit_mle_with(data: &Sample, opts: &FitOptions) -> Result<FitResult> {
    data.require_inferable()?;
    let n = data.len();
    let scale = (n as f64).max(1.0);
    let start = opts.start.unwrap_or_else(|| moment_estimate(data.mean()));
    let mut lambda = Rate::new(start)?;
    let mut ll = log_likelihood(lambda, data);
    let mut s = score(lambda, data);

    let fail = |lambda: Rate, s: f64, it: usize| {
        Error::NoConvergence(FitDiagnostics {
            last_lambda: lambda.get(),
            last_score: s,
            iterations: it,
        })
    };

    let mut iterations = 0;
    loop {
        if s.abs() <= opts.score_tol * scale {
            break;
        }
        if iterations == opts.max_iterations {
            return Err(fail(lambda, s, iterations));
        }
        iterations += 1;

        let h = neg_hessian(lambda, data);
        let full = s / h;
        let mut step = full;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            if let Ok(next) = Rate::new(lambda.get() + step) {
                let next_ll = log_likelihood(next, data);
                // allow rounding-level decreases near the optimum
                if next_ll >= ll - 1e-13 * ll.abs().max(1.0) {
                    accepted = Some((next, next_ll));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            return Err(fail(lambda, s, iterations));
        };
        let moved = (next.get() - lambda.get()).abs();
        lambda = next;
        ll = next_ll;
        s = score(lambda, data);
        if moved <= opts.step_tol * lambda.get() {
            break;
        }
    }

    // a tiny step is only accepted as convergence when the estimate is stationary
    if s.abs() > 1e-8 * scale {
        return Err(fail(lambda, s, iterations));
    }
    let observed_info = neg_hessian(lambda, data);
    Ok(FitResult {
        lambda_hat: lambda,
        n,
        loglik: ll,
        score_at_mle: s,
        observed_info,
        std_err: observed_info.sqrt().recip(),
        iterations,
        converged: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityEstimate {
    pub lambda1_hat: f64,
    pub lambda2_hat: f64,
    pub r_hat: f64,
    /// Delta-method asymptotic variance of `r_hat`.
    pub avar: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
}

impl ReliabilityEstimate {
    /// Plug-in estimate of R with a delta-method interval, from independent
    /// strength and stress fits. Endpoints are not clipped to [0, 1].
    pub fn from_fits(strength: &FitResult, stress: &FitResult, level: f64) -> Result<Self> {
        let z = normal::two_sided_critical(level)?;
        let params = ParamPair::from_rates(strength.lambda_hat, stress.lambda_hat);
        let r_hat = r_closed_form(&params);
        let g = r_gradient(&params);
        let avar = g.d1 * g.d1 / strength.observed_info + g.d2 * g.d2 / stress.observed_info;
        let half = z * avar.sqrt();
        Ok(Self {
            lambda1_hat: strength.lambda_hat.get(),
            lambda2_hat: stress.lambda_hat.get(),
            r_hat,
            avar,
            ci_low: r_hat - half,
            ci_high: r_hat + half,
            level,
        })
    }
}

/// Fitted strength and stress models together with the estimate of R.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityAnalysis {
    pub strength: FitResult,
    pub stress: FitResult,
    pub estimate: ReliabilityEstimate,
}

pub fn estimate_r(strength: &Sample, stress: &Sample, level: f64) -> Result<ReliabilityAnalysis> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let label = |which: &'static str| {
        move |e: Error| Error::SampleFit {
            which,
            source: Box::new(e),
        }
    };
    let strength_fit = fit_mle(strength).map_err(label("strength"))?;
    let stress_fit = fit_mle(stress).map_err(label("stress"))?;
    let estimate = ReliabilityEstimate::from_fits(&strength_fit, &stress_fit, level)?;
    Ok(ReliabilityAnalysis {
        strength: strength_fit,
        stress: stress_fit,
        estimate,
    })
}
