//! Finite-range estimates of the slow-decrease property.
//!
//! liminf/limsup as x → ∞ cannot be computed; every estimate here takes the
//! extreme over the top decade [x_max/10, x_max] instead and is reported as
//! heuristic.

use crate::error::{Error, Result};

use super::sampled::SampledFunction;

/// Largest top-decade/previous-decade ratio of |inf-form| read as shrinking in x.
pub const MAX_DECADE_RATIO: f64 = 0.75;

/// Smallest log-log slope of |inf-form| against λ − 1 read as shrinking.
pub const MIN_SHRINK_SLOPE: f64 = 0.5;

/// λ grid used when the caller has no preference.
pub const DEFAULT_LAMBDAS: [f64; 6] = [1.5, 1.2, 1.1, 1.05, 1.02, 1.01];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowDecreaseConfig {
    /// Geometric sample points of x in the top decade.
    pub samples: usize,
    /// Estimates at or above −tol count as nonnegative.
    pub tol: f64,
}

impl Default for SlowDecreaseConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            tol: 1e-3,
        }
    }
}

/// The four equivalent forms, each estimated over the top decade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowDecreaseRow {
    pub lambda: f64,
    /// min_x (u(λx) − u(x)); the definition asks for ≥ 0 in the limit.
    pub plain: f64,
    /// min_x inf_{x≤s≤λx} (u(s) − u(x)).
    pub inf_form: f64,
    /// max_x (u(x) − u(λx)); the limit should be ≤ 0.
    pub sup_form: f64,
    /// max_x sup_{x≤s≤λx} (u(x) − u(s)).
    pub limsup_form: f64,
    /// The forms relate as they must: inf ≤ plain, sup = −plain,
    /// limsup = −inf.
    pub consistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlowDecreaseVerdict {
    /// Estimates are nonnegative or shrink toward 0 as λ → 1⁺.
    Plausible,
    /// Estimates stay bounded away from 0 as λ → 1⁺.
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlowDecreaseReport {
    pub x_max: f64,
    pub rows: Vec<SlowDecreaseRow>,
    /// Inf-form at the λ nearest 1 over the decade below, [x_max/100, x_max/10].
    pub previous_decade_inf: f64,
    pub verdict: SlowDecreaseVerdict,
    /// Always true: finite-range proxies for asymptotic quantifiers.
    pub heuristic: bool,
}

impl SlowDecreaseReport {
    pub fn all_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.consistent)
    }

    /// Row with the λ closest to 1.
    pub fn finest(&self) -> &SlowDecreaseRow {
        self.rows
            .iter()
            .min_by(|a, b| a.lambda.total_cmp(&b.lambda))
            .expect("report has at least one row")
    }
}

pub fn slow_decrease_estimate(u: &SampledFunction, lambdas: &[f64], x_max: f64) -> Result<SlowDecreaseReport> {
    slow_decrease_estimate_with(u, lambdas, x_max, SlowDecreaseConfig::default())
}

pub fn slow_decrease_estimate_with(
    u: &SampledFunction,
    lambdas: &[f64],
    x_max: f64,
    config: SlowDecreaseConfig,
) -> Result<SlowDecreaseReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("λ grid is empty".into()));
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l > 1.0)) {
        return Err(Error::InvalidArgument(format!("every λ must exceed 1, got {bad}")));
    }
    if !(x_max > 0.0) || config.samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need x_max > 0 and at least 2 samples, got x_max = {x_max}, samples = {}",
            config.samples
        )));
    }
    let lambda_min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let rows = lambdas
        .iter()
        .map(|&lambda| decade_row(u, lambda, x_max, config.samples))
        .collect::<Result<Vec<_>>>()?;
    let previous_decade_inf = decade_row(u, lambda_min, x_max / 10.0, config.samples)?.inf_form;
    let verdict = judge(&rows, previous_decade_inf, config.tol);
    Ok(SlowDecreaseReport {
        x_max,
        rows,
        previous_decade_inf,
        verdict,
        heuristic: true,
    })
}

/// The four forms at one λ, extremes over geometric samples of [x_max/10, x_max].
fn decade_row(u: &SampledFunction, lambda: f64, x_max: f64, samples: usize) -> Result<SlowDecreaseRow> {
    let lo = x_max / 10.0;
    let ratio = 10f64.powf(1.0 / (samples - 1) as f64);
    let (mut plain, mut inf_form) = (f64::INFINITY, f64::INFINITY);
    for i in 0..samples {
        let x = lo * ratio.powi(i as i32);
        let ux = u.eval(x)?;
        let end = lambda * x;
        plain = plain.min(u.eval(end)? - ux);
        inf_form = inf_form.min(u.window_inf(x, end)? - ux);
    }
    let sup_form = -plain;
    let limsup_form = -inf_form;
    let slack = 1e-12 * (1.0 + plain.abs());
    Ok(SlowDecreaseRow {
        lambda,
        plain,
        inf_form,
        sup_form,
        limsup_form,
        consistent: inf_form <= plain + slack && limsup_form >= sup_form - slack,
    })
}

/// Plausible if the inf-form at the λ nearest 1 is ≥ −tol, or if it
/// shrinks in either limit: by at least [`MAX_DECADE_RATIO`] against the
/// decade below (x → ∞), or with λ − 1 at a log-log slope of at least
/// [`MIN_SHRINK_SLOPE`] over the finer half of the grid (λ → 1⁺). A
/// bounded-away defect such as sin x shrinks in neither.
fn judge(rows: &[SlowDecreaseRow], previous_decade_inf: f64, tol: f64) -> SlowDecreaseVerdict {
    let mut sorted: Vec<&SlowDecreaseRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let finest = sorted[0].inf_form;
    if finest >= -tol {
        return SlowDecreaseVerdict::Plausible;
    }
    if previous_decade_inf < 0.0 && finest.abs() <= MAX_DECADE_RATIO * previous_decade_inf.abs() {
        return SlowDecreaseVerdict::Plausible;
    }
    let half = &sorted[..sorted.len().div_ceil(2).max(2).min(sorted.len())];
    if half.len() < 2 {
        return SlowDecreaseVerdict::Violated;
    }
    let pts: Vec<(f64, f64)> = half
        .iter()
        .map(|r| ((r.lambda - 1.0).ln(), (-r.inf_form).max(tol).ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    if sxx > 0.0 && sxy / sxx >= MIN_SHRINK_SLOPE {
        SlowDecreaseVerdict::Plausible
    } else {
        SlowDecreaseVerdict::Violated
    }
}
