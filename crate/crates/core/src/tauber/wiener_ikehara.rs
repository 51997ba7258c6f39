//! Diagnostics for the real-axis Wiener–Ikehara setting: α ≥ 0 with
//! g(s) = ∫_0^∞ α(x) e^{−sx} dx, g(s) − A/(s−μ) → ℓ as s → μ⁺, and
//! φ(x) = e^{−μx} α(x) slowly decreasing; conclusion φ(x) → A.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extrapolate::richardson;

use super::means::laplace_transform;
use super::sampled::SampledFunction;
use super::slowdec::{
    slow_decrease_estimate_with, SlowDecreaseConfig, SlowDecreaseReport, SlowDecreaseVerdict, DEFAULT_LAMBDAS,
};

/// An externally supplied g(s).
pub type TransformFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub struct WienerIkeharaProblem {
    alpha: SampledFunction,
    mu: f64,
    a: f64,
    ell: f64,
    phi: SampledFunction,
    transform: Option<TransformFn>,
}

impl fmt::Debug for WienerIkeharaProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WienerIkeharaProblem")
            .field("alpha", &self.alpha)
            .field("mu", &self.mu)
            .field("a", &self.a)
            .field("ell", &self.ell)
            .field("external_transform", &self.transform.is_some())
            .finish()
    }
}

impl WienerIkeharaProblem {
    pub fn new(alpha: SampledFunction, mu: f64, a: f64, ell: f64) -> Result<Self> {
        if !(mu >= 0.0) {
            return Err(Error::InvalidArgument(format!("μ must be >= 0, got {mu}")));
        }
        if alpha.closed_form().is_none() && alpha.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument("α must be nonnegative".into()));
        }
        let phi = alpha.weighted(mu);
        Ok(Self {
            alpha,
            mu,
            a,
            ell,
            phi,
            transform: None,
        })
    }

    /// Uses `g` instead of integrating α (e.g. when α grows past its table).
    pub fn with_transform(mut self, g: TransformFn) -> Self {
        self.transform = Some(g);
        self
    }

    pub fn alpha(&self) -> &SampledFunction {
        &self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn residue(&self) -> f64 {
        self.a
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// φ(x) = e^{−μx} α(x).
    pub fn phi(&self) -> &SampledFunction {
        &self.phi
    }

    pub fn transform(&self, s: f64) -> Result<f64> {
        match &self.transform {
            Some(g) => g(s),
            None => Ok(laplace_transform(&self.alpha, s)?.value),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WienerIkeharaConfig {
    /// Pass/fail threshold for every check.
    pub tol: f64,
    pub lambdas: Vec<f64>,
    pub slow_decrease: SlowDecreaseConfig,
}

impl Default for WienerIkeharaConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            slow_decrease: SlowDecreaseConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSample {
    pub s: f64,
    pub g: f64,
    /// g(s) − A/(s − μ).
    pub pole_subtracted: f64,
}

#[derive(Debug, Clone)]
pub struct WienerIkeharaReport {
    pub transform: Vec<TransformSample>,
    /// (s − μ)·g(s) extrapolated to s = μ.
    pub residue_estimate: f64,
    /// g(s) − A/(s − μ) extrapolated to s = μ.
    pub ell_estimate: f64,
    pub slow_decrease: SlowDecreaseReport,
    /// (x, φ(x)) on the x grid.
    pub conclusion: Vec<(f64, f64)>,
    pub residue_ok: bool,
    pub ell_ok: bool,
    pub hypothesis_ok: bool,
    pub conclusion_ok: bool,
}

impl WienerIkeharaReport {
    pub fn passed(&self) -> bool {
        self.residue_ok && self.ell_ok && self.hypothesis_ok && self.conclusion_ok
    }
}

pub fn wiener_ikehara_verify(
    problem: &WienerIkeharaProblem,
    s_grid: &[f64],
    x_grid: &[f64],
) -> Result<WienerIkeharaReport> {
    wiener_ikehara_verify_with(problem, s_grid, x_grid, &WienerIkeharaConfig::default())
}

pub fn wiener_ikehara_verify_with(
    problem: &WienerIkeharaProblem,
    s_grid: &[f64],
    x_grid: &[f64],
    config: &WienerIkeharaConfig,
) -> Result<WienerIkeharaReport> {
    let mu = problem.mu;
    if s_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::InvalidArgument("s and x grids must be nonempty".into()));
    }
    if let Some(&bad) = s_grid.iter().find(|&&s| !(s > mu)) {
        return Err(Error::InvalidArgument(format!("every s must exceed μ = {mu}, got {bad}")));
    }
    let transform = s_grid
        .iter()
        .map(|&s| {
            let g = problem.transform(s)?;
            Ok(TransformSample {
                s,
                g,
                pole_subtracted: g - problem.a / (s - mu),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let hs: Vec<f64> = transform.iter().map(|t| t.s - mu).collect();
    let scaled: Vec<f64> = transform.iter().map(|t| (t.s - mu) * t.g).collect();
    let subtracted: Vec<f64> = transform.iter().map(|t| t.pole_subtracted).collect();
    let residue_estimate = richardson(&hs, &scaled)?.value;
    let ell_estimate = richardson(&hs, &subtracted)?.value;

    let x_max = x_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slow_decrease = slow_decrease_estimate_with(&problem.phi, &config.lambdas, x_max, config.slow_decrease)?;
    let conclusion = x_grid
        .iter()
        .map(|&x| Ok((x, problem.phi.eval(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let last_phi = conclusion
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|&(_, v)| v)
        .unwrap();

    Ok(WienerIkeharaReport {
        residue_ok: (residue_estimate - problem.a).abs() <= config.tol,
        ell_ok: (ell_estimate - problem.ell).abs() <= config.tol,
        hypothesis_ok: slow_decrease.verdict == SlowDecreaseVerdict::Plausible,
        conclusion_ok: (last_phi - problem.a).abs() <= config.tol,
        transform,
        residue_estimate,
        ell_estimate,
        slow_decrease,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tauber::sampled::ClosedForm;

    #[test]
    fn synthetic_simple_pole() {
        let alpha = SampledFunction::closed(ClosedForm::custom("2(1+e^-x)", |x| 2.0 * (1.0 + (-x).exp()))).weighted(-1.0);
        let problem = WienerIkeharaProblem::new(alpha, 1.0, 2.0, 2.0).unwrap();
        let s_grid = [1.1, 1.01, 1.001];
        for &s in &s_grid {
            let g = problem.transform(s).unwrap();
            let exact = 2.0 / (s - 1.0) + 2.0 / s;
            assert!((g - exact).abs() < 1e-8 * exact, "s = {s}: {g} vs {exact}");
        }
        let report = wiener_ikehara_verify(&problem, &s_grid, &[5.0, 10.0, 20.0]).unwrap();
        assert!((report.residue_estimate - 2.0).abs() < 1e-4);
        assert!((report.ell_estimate - 2.0).abs() < 1e-3);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn no_pole_regime() {
        let alpha = SampledFunction::closed(ClosedForm::custom("e^-x", |x| (-x).exp()));
        let problem = WienerIkeharaProblem::new(alpha, 0.0, 0.0, 1.0).unwrap();
        for s in [0.5, 1.0, 3.0] {
            assert!((problem.transform(s).unwrap() - 1.0 / (1.0 + s)).abs() < 1e-10);
        }
        let report = wiener_ikehara_verify(&problem, &[0.1, 0.01, 0.001], &[10.0, 20.0]).unwrap();
        assert!(report.residue_estimate.abs() < 1e-6);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let alpha = SampledFunction::closed(ClosedForm::Constant(1.0));
        assert!(WienerIkeharaProblem::new(alpha.clone(), -1.0, 1.0, 0.0).is_err());
        let p = WienerIkeharaProblem::new(alpha, 1.0, 1.0, 0.0).unwrap();
        assert!(wiener_ikehara_verify(&p, &[0.5], &[1.0]).is_err());
        let neg = SampledFunction::step(vec![0.0], vec![-1.0], crate::tauber::TailModel::Zero).unwrap();
        assert!(WienerIkeharaProblem::new(neg, 0.0, 0.0, 0.0).is_err());
    }
}
