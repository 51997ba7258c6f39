//! The Tauberian theorem as a finite-range check: compare the Abel–Laplace
//! mean f(t) with u(x) at a large probe, gated on the slow-decrease verdict.

use crate::error::{Error, Result};

use super::means::{abel_laplace_mean, MeanValue};
use super::sampled::SampledFunction;
use super::slowdec::{slow_decrease_estimate, SlowDecreaseReport, SlowDecreaseVerdict, DEFAULT_LAMBDAS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauberOutcome {
    /// Hypothesis plausible and u(x) tracks f(t) within tolerance.
    Converges { limit: f64 },
    /// The slow-decrease estimate rejects the hypothesis; no conclusion on u.
    HypothesisViolated,
    /// Hypothesis plausible but u(x) and f(t) are still apart.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauberDemo {
    pub abel: MeanValue,
    pub x: f64,
    pub u_at_x: f64,
    pub slow_decrease: SlowDecreaseReport,
    pub outcome: TauberOutcome,
}

/// Abel mean at `t`, u at `x`, slow decrease over the decade below `x`.
pub fn tauber_demo(u: &SampledFunction, t: f64, x: f64, tol: f64) -> Result<TauberDemo> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let abel = abel_laplace_mean(u, t)?;
    let u_at_x = u.eval(x)?;
    let lambda_max = DEFAULT_LAMBDAS.iter().copied().fold(1.0, f64::max);
    let slow_decrease = slow_decrease_estimate(u, &DEFAULT_LAMBDAS, x / lambda_max)?;
    let outcome = match slow_decrease.verdict {
        SlowDecreaseVerdict::Violated => TauberOutcome::HypothesisViolated,
        SlowDecreaseVerdict::Plausible if (abel.value - u_at_x).abs() <= tol + abel.err => {
            TauberOutcome::Converges { limit: abel.value }
        }
        SlowDecreaseVerdict::Plausible => TauberOutcome::Inconclusive,
    };
    Ok(TauberDemo {
        abel,
        x,
        u_at_x,
        slow_decrease,
        outcome,
    })
}
