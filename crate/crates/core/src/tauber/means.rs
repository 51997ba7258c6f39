//! Cesàro and Abel–Laplace means, and the cut-off truncation identity.

use crate::error::{Error, Result};
use crate::quad::{self, QuadResult, Tolerance};

use super::sampled::SampledFunction;

/// Agreement required between the two paths of [`truncated_mean`].
pub const TRUNCATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    /// x for Cesàro means, t for Abel–Laplace means.
    pub parameter: f64,
    pub value: f64,
    pub err: f64,
}

/// The cut-off function k: 0 below 1/e, 1/x from 1/e on. Bounded by e.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CutoffKernel;

impl CutoffKernel {
    pub const THRESHOLD: f64 = 0.367_879_441_171_442_33; // 1/e

    pub fn eval(&self, x: f64) -> f64 {
        if x < Self::THRESHOLD {
            0.0
        } else {
            1.0 / x
        }
    }

    /// e^{−tx}·k(e^{−tx}): 1 on [0, 1/t] and 0 beyond.
    pub fn weight(&self, t: f64, x: f64) -> f64 {
        let e = (-t * x).exp();
        e * self.eval(e)
    }
}

/// σ(x) = (1/x) ∫_0^x u(s) ds, with σ(0) = 0.
pub fn cesaro_mean(u: &SampledFunction, x: f64) -> Result<MeanValue> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("Cesàro mean needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(MeanValue { parameter: 0.0, value: 0.0, err: 0.0 });
    }
    let r = u.integrate_exp(0.0, 0.0, x)?;
    Ok(MeanValue {
        parameter: x,
        value: r.value / x,
        err: r.err / x,
    })
}

/// ∫_0^∞ u(x) e^{−sx} dx (no leading factor).
pub fn laplace_transform(u: &SampledFunction, s: f64) -> Result<QuadResult> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("Laplace transform needs s > 0, got {s}")));
    }
    u.integrate_exp(s, 0.0, f64::INFINITY)
}

/// f(t) = t ∫_0^∞ u(x) e^{−tx} dx.
pub fn abel_laplace_mean(u: &SampledFunction, t: f64) -> Result<MeanValue> {
    let r = laplace_transform(u, t)?;
    Ok(MeanValue {
        parameter: t,
        value: t * r.value,
        err: t * r.err,
    })
}

/// T(t) = t ∫_0^∞ u(x) e^{−tx} k(e^{−tx}) dx, evaluated twice: by
/// quadrature through the cut-off kernel, and as t ∫_0^{1/t} u. Returns the
/// second; fails if the two disagree beyond [`TRUNCATION_TOL`].
pub fn truncated_mean(u: &SampledFunction, t: f64) -> Result<MeanValue> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("truncated mean needs t > 0, got {t}")));
    }
    let direct = u.integrate_exp(0.0, 0.0, 1.0 / t)?;
    let truncated = MeanValue {
        parameter: t,
        value: t * direct.value,
        err: t * direct.err,
    };
    let through_kernel = kernel_path(u, t)?;
    let tol = TRUNCATION_TOL.max(truncated.err + through_kernel.err);
    if (through_kernel.value - truncated.value).abs() > tol {
        return Err(Error::Consistency {
            what: "cut-off kernel path vs truncated integral",
            a: through_kernel.value,
            b: truncated.value,
            tol,
        });
    }
    Ok(truncated)
}

/// The kernel side of [`truncated_mean`]: quadrature of u(x)·e^{−tx}k(e^{−tx})
/// over doubling panels. The quadrature is given the grid of u and the point
/// where e^{−tx} crosses the kernel's threshold.
pub fn kernel_path(u: &SampledFunction, t: f64) -> Result<MeanValue> {
    let kernel = CutoffKernel;
    let integrand = |x: f64| {
        let w = kernel.weight(t, x);
        if w == 0.0 {
            0.0
        } else {
            u.eval(x).unwrap_or(f64::NAN) * w
        }
    };
    let tol = Tolerance::new(TRUNCATION_TOL * 1e-2 / t, 1e-12);
    let cut = -CutoffKernel::THRESHOLD.ln() / t;
    let mut lo = 0.0;
    let mut width = 2.0 / t;
    let (mut value, mut err) = (0.0, 0.0);
    let mut quiet = 0;
    for _ in 0..64 {
        let hi = lo + width;
        let mut breaks = vec![lo];
        if u.closed_form().is_none() {
            breaks.extend(u.grid().iter().copied().filter(|&g| g > lo && g < hi));
        }
        if cut > lo && cut < hi {
            breaks.push(cut);
            breaks.sort_by(f64::total_cmp);
        }
        breaks.push(hi);
        let panel = quad::integrate_with_breaks(integrand, &breaks, tol)?;
        if panel.value.is_nan() {
            return Err(Error::Support {
                x: 1.0 / t,
                end: u.support_end(),
            });
        }
        value += panel.value;
        err += panel.err;
        if panel.abs_value == 0.0 {
            quiet += 1;
            if quiet == 2 {
                return Ok(MeanValue {
                    parameter: t,
                    value: t * value,
                    err: t * err,
                });
            }
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::Divergence("cut-off kernel integrand did not vanish".into()))
}
