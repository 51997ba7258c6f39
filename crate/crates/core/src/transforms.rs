//! g(s) = ∫_0^∞ ψ(eˣ) e^{−sx} dx = ∫_1^∞ v^{−s−1} ψ(v) dv by three routes,
//! and the pole-subtracted limit g(s) − 1/(s−1) → −(1+γ).
//!
//! g carries no leading s factor: g(s) = (1/s) Σ Λ(n) n^{−s} = −ζ′(s)/(s ζ(s)).
//! The Abel–Laplace mean of α(x) = ψ(eˣ) at parameter s is s·g(s).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::extrapolate::{first_order_fit, linear_rate_constant, richardson, Extrapolation, FirstOrderFit};
use crate::format::sig15;
use crate::psi::PsiTable;
use crate::quad::QuadResult;
use crate::sieve::{simple_sieve, MangoldtSieve};
use crate::sum::{CompensatedSum, UNIT_ROUNDOFF};
use crate::tauber::SampledFunction;
use crate::zeta::{
    euler_gamma, zeta, zeta_prime, zeta_prime_remainder, zeta_remainder, zeta_series, BoundedValue, Method,
};

/// Proven upper bound: ψ(x) < 1.03883·x for every x > 0.
pub const CHEBYSHEV_UPPER: f64 = 1.03883;
/// Largest N the strict Dirichlet route will sieve to.
pub const DIRICHLET_MAX_N: u64 = 1_000_000_000;
/// Tail width targeted by the default Mellin cut-off.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Spread allowed between routes in [`cross_check`].
pub const DEFAULT_SPREAD_TOL: f64 = 1e-6;
pub const DEFAULT_CROSS_CHECK_GRID: [f64; 4] = [1.1, 1.5, 2.0, 3.0];

const TERM_ROUNDING: f64 = 8.0 * UNIT_ROUNDOFF;
/// Relative accuracy (in units of u) below which ζ and ζ′ are rounding-limited.
const RATIO_RELATIVE_FLOOR: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    Dirichlet,
    Mellin,
    ZetaRatio,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Dirichlet => "dirichlet",
            Route::Mellin => "mellin",
            Route::ZetaRatio => "zeta_ratio",
        })
    }
}

/// A route value cut off at `cutoff`, with its tail estimated from ψ(v) ≈ v.
///
/// `value.err` covers the distance from the estimate to both ends of the tail
/// bracket; the upper end uses the measured max of ψ(x)/x, so the bound is
/// empirical. `cap_bound` is set when the cut-off was limited by the table
/// rather than by the requested tail width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: BoundedValue,
    pub cutoff: f64,
    pub cap_bound: bool,
    pub empirical: bool,
}

/// g(s) by several routes.
#[derive(Debug, Clone, PartialEq)]
pub struct GValue {
    pub s: f64,
    pub routes: BTreeMap<Route, BoundedValue>,
}

impl GValue {
    /// Largest pairwise |route_i − route_j|.
    pub fn max_spread(&self) -> f64 {
        let v: Vec<f64> = self.routes.values().map(|b| b.value).collect();
        let mut spread = 0.0f64;
        for i in 0..v.len() {
            for j in 0..i {
                spread = spread.max((v[i] - v[j]).abs());
            }
        }
        spread
    }

    pub fn summed_err(&self) -> f64 {
        self.routes.values().map(|b| b.err).sum()
    }

    /// Every pair agrees within its summed error.
    pub fn routes_agree(&self) -> bool {
        let v: Vec<&BoundedValue> = self.routes.values().collect();
        (0..v.len()).all(|i| (0..i).all(|j| v[i].agrees_with(v[j])))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_nan() || s <= 1.0 || s.is_infinite() {
        return Err(Error::Domain(format!("s must be a finite number > 1, got {s}")));
    }
    Ok(())
}

/// g by the Dirichlet series (1/s) Σ_{n≤N} Λ(n) n^{−s}, with N large enough
/// that the tail, at most `CHEBYSHEV_UPPER·N^{1−s}/((s−1)s)`, is within `tol`.
pub fn g_dirichlet(s: f64, tol: f64) -> Result<BoundedValue> {
    check_s(s)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let tail = |n: f64| CHEBYSHEV_UPPER * n.powf(1.0 - s) / ((s - 1.0) * s);
    let required = (CHEBYSHEV_UPPER / (0.5 * tol * s * (s - 1.0))).powf(1.0 / (s - 1.0));
    if !(required <= DIRICHLET_MAX_N as f64) {
        return Err(Error::Convergence {
            tol,
            detail: format!(
                "Dirichlet tail at s = {s} needs N ≈ {required:.3e} terms, above the cap {DIRICHLET_MAX_N}"
            ),
        });
    }
    let n = (required.ceil() as u64).max(2);
    let sieve = MangoldtSieve::new(n)?;
    let parts = sieve.map_blocks(2, n + 1, |blk| {
        let mut acc = CompensatedSum::new();
        for (m, lam) in blk.prime_powers() {
            acc.add(lam * (m as f64).powf(-s));
        }
        acc
    })?;
    let mut acc = CompensatedSum::new();
    let mut abs = 0.0;
    let mut inner_round = 0.0;
    for p in &parts {
        acc.add(p.value());
        abs += p.abs_sum();
        inner_round += p.rounding_bound();
    }
    let value = acc.value() / s;
    let err = tail(n as f64) + (inner_round + acc.rounding_bound() + TERM_ROUNDING * abs) / s + UNIT_ROUNDOFF * value;
    if err > tol {
        return Err(Error::Convergence {
            tol,
            detail: format!("Dirichlet sum at s = {s} with N = {n} has error {err:e}"),
        });
    }
    Ok(BoundedValue::new(value, err, Method::Dirichlet))
}

/// Λ(n) for the prime powers tabulated in a [`PsiTable`].
struct TableLambda {
    higher: HashMap<u32, u32>,
}

impl TableLambda {
    fn new(limit: u64) -> Self {
        let mut higher = HashMap::new();
        for p in simple_sieve(crate::sieve::isqrt(limit)) {
            let mut k = 2;
            let mut pk = p * p;
            while pk <= limit {
                higher.insert(pk as u32, k);
                pk *= p;
                k += 1;
            }
        }
        Self { higher }
    }

    fn get(&self, n: u32) -> f64 {
        let k = self.higher.get(&n).copied().unwrap_or(1);
        (n as f64).ln() / k as f64
    }
}

/// The tail estimate and bracket of ∫_X^∞ v^{−s−1} ψ(v) dv.
fn mellin_tail(s: f64, x: f64, psi_x: f64, c_emp: f64) -> (f64, f64) {
    let estimate = x.powf(1.0 - s) / (s - 1.0);
    let lower = psi_x * x.powf(-s) / s;
    let upper = c_emp * estimate;
    let err = (estimate - lower).abs().max((upper - estimate).abs());
    (estimate, err)
}

/// Cut-off X with estimated tail width at most `tail_tol`, capped at `cap`.
fn cutoff_for(s: f64, tail_tol: f64, cap: f64) -> (f64, bool) {
    // Tail bracket width ≈ X^{1−s}/(s(s−1)).
    let x = (1.0 / (tail_tol * s * (s - 1.0))).powf(1.0 / (s - 1.0));
    if x.is_finite() && x <= cap {
        (x.max(2.0).min(cap), false)
    } else {
        (cap, true)
    }
}

/// The Dirichlet sum over the table's prime powers up to `n_max`, plus the
/// tail estimated from ψ(v) ≈ v.
pub fn g_dirichlet_capped(s: f64, table: &PsiTable, n_max: u64) -> Result<Truncated> {
    check_s(s)?;
    crate::error::check_range("n_max", n_max as f64, 2.0, table.limit() as f64)?;
    let lambda = TableLambda::new(n_max);
    let k = table.jumps_upto(n_max as f64);
    let mut acc = CompensatedSum::new();
    for &n in &table.jumps()[..k] {
        acc.add(lambda.get(n) * (n as f64).powf(-s));
    }
    let x = n_max as f64;
    let psi_x = table.psi(x)?.psi;
    let c_emp = table.chebyshev_constant(x)?.value.max(1.0);
    // Σ_{n>N} Λ(n) n^{−s} = −ψ(N) N^{−s} + s ∫_N^∞ ψ(v) v^{−s−1} dv
    let boundary = psi_x * x.powf(-s);
    let (integral, integral_err) = mellin_tail(s, x, psi_x, c_emp);
    let tail = (s * integral - boundary) / s;
    let value = acc.value() / s + tail;
    let err = integral_err + (acc.rounding_bound() + TERM_ROUNDING * acc.abs_sum()) / s + TERM_ROUNDING * (boundary / s + integral);
    Ok(Truncated {
        value: BoundedValue::new(value, err, Method::Dirichlet),
        cutoff: x,
        cap_bound: false,
        empirical: true,
    })
}

/// The exact step-function integral ∫_1^X v^{−s−1} ψ(v) dv.
fn mellin_partial(s: f64, table: &PsiTable, x: f64) -> (f64, f64) {
    let jumps = table.jumps();
    let psi = table.psi_values();
    let k = table.jumps_upto(x);
    let mut acc = CompensatedSum::new();
    let mut weighted_err = 0.0;
    for i in 0..k {
        let a = jumps[i] as f64;
        let b = if i + 1 < k { jumps[i + 1] as f64 } else { x };
        if b <= a {
            continue;
        }
        // (a^{−s} − b^{−s})/s without cancellation
        let piece = a.powf(-s) * -(-s * (b / a).ln()).exp_m1() / s;
        acc.add(psi[i] * piece);
        weighted_err += crate::psi::psi_error_bound(i + 1, psi[i]) * piece;
    }
    let err = acc.rounding_bound() + TERM_ROUNDING * acc.abs_sum() + weighted_err;
    (acc.value(), err)
}

/// g by the Mellin form: the step integral over [1, X] plus the estimated tail.
pub fn g_mellin(s: f64, table: &PsiTable, x: f64) -> Result<BoundedValue> {
    check_s(s)?;
    crate::error::check_range("X", x, 1.0, table.limit() as f64)?;
    let (partial, partial_err) = mellin_partial(s, table, x);
    if table.jumps().is_empty() {
        return Ok(BoundedValue::new(0.0, 0.0, Method::Mellin));
    }
    let psi_x = table.psi(x)?.psi;
    let c_emp = table.chebyshev_constant(x.max(2.0))?.value.max(1.0);
    let (tail, tail_err) = mellin_tail(s, x, psi_x, c_emp);
    let value = partial + tail;
    Ok(BoundedValue::new(
        value,
        partial_err + tail_err + TERM_ROUNDING * tail + UNIT_ROUNDOFF * value,
        Method::Mellin,
    ))
}

/// [`g_mellin`] at X = min(limit, X with tail width ≤ `tail_tol`).
pub fn g_mellin_auto(s: f64, table: &PsiTable, tail_tol: f64) -> Result<Truncated> {
    check_s(s)?;
    let (x, cap_bound) = cutoff_for(s, tail_tol, table.limit() as f64);
    Ok(Truncated {
        value: g_mellin(s, table, x)?,
        cutoff: x,
        cap_bound,
        empirical: true,
    })
}

/// g = −ζ′(s)/(s ζ(s)).
pub fn g_zeta_ratio(s: f64, tol: f64) -> Result<BoundedValue> {
    check_s(s)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    // Size the two tolerances from rough values so each contributes tol/4.
    let pole = 1.0 / (s - 1.0);
    let z0 = zeta(s, 1e-6 * pole.max(1.0))?.value;
    let dz0 = zeta_prime(s, 1e-6 * (pole * pole).max(1.0))?.value.abs();
    let floor = RATIO_RELATIVE_FLOOR * UNIT_ROUNDOFF;
    let dz = zeta_prime(s, (0.25 * tol * s * z0).max(floor * dz0))?;
    let z = zeta_series(s, (0.25 * tol * s * z0 * z0 / dz0.max(f64::MIN_POSITIVE)).max(floor * z0))?;
    let value = -dz.value / (s * z.value);
    let err = (dz.err + value.abs() * s * z.err) / (s * (z.value - z.err)) + 4.0 * UNIT_ROUNDOFF * value.abs();
    if err > tol {
        return Err(Error::Convergence {
            tol,
            detail: format!("ratio at s = {s} has propagated error {err:e}"),
        });
    }
    Ok(BoundedValue::new(value, err, Method::ZetaRatio))
}

/// All three routes at `s`: Dirichlet and Mellin from `table` (cut off at
/// the table limit and the default tail width), ratio at `tol` relative to
/// max(1, 1/(s−1)), the size of g near the pole.
pub fn g_all_routes(s: f64, table: &PsiTable, tol: f64) -> Result<GValue> {
    let mut routes = BTreeMap::new();
    let mellin = g_mellin_auto(s, table, DEFAULT_TAIL_TOL)?;
    routes.insert(Route::Mellin, mellin.value);
    routes.insert(Route::Dirichlet, g_dirichlet_capped(s, table, mellin.cutoff.floor() as u64)?.value);
    routes.insert(Route::ZetaRatio, g_zeta_ratio(s, tol * (1.0 / (s - 1.0)).max(1.0))?);
    Ok(GValue { s, routes })
}

/// One row of [`cross_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckRow {
    pub g: GValue,
    pub cutoff: f64,
    pub cap_bound: bool,
    pub spread: f64,
    pub summed_err: f64,
    pub ok: bool,
}

/// Three-route agreement: each row passes if the routes agree within their
/// summed error and the spread is at most `spread_tol`.
pub fn cross_check(s_grid: &[f64], table: &PsiTable, tol: f64, spread_tol: f64) -> Result<Vec<CrossCheckRow>> {
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    s_grid
        .iter()
        .map(|&s| {
            check_s(s)?;
            let (cutoff, cap_bound) = cutoff_for(s, DEFAULT_TAIL_TOL, table.limit() as f64);
            let g = g_all_routes(s, table, tol)?;
            let spread = g.max_spread();
            let summed_err = g.summed_err();
            let ok = g.routes_agree() && spread <= spread_tol;
            Ok(CrossCheckRow {
                g,
                cutoff,
                cap_bound,
                spread,
                summed_err,
                ok,
            })
        })
        .collect()
}

/// Both sides of ∫_1^X v^{−s−1} ψ(v) dv = ∫_0^{ln X} ψ(eˣ) e^{−sx} dx: the
/// exact Mellin step sum and the engine's integral of the pushed-forward
/// step function.
pub fn change_of_variables_check(s: f64, table: &PsiTable, x: f64) -> Result<(BoundedValue, QuadResult)> {
    check_s(s)?;
    crate::error::check_range("X", x, 1.0, table.limit() as f64)?;
    let (partial, err) = mellin_partial(s, table, x);
    let alpha = SampledFunction::psi_of_exp(table)?;
    let laplace = alpha.integrate_exp(s, 0.0, x.ln())?;
    Ok((BoundedValue::new(partial, err, Method::Mellin), laplace))
}

/// One sample of h(s) = g(s) − 1/(s−1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleLimitRecord {
    pub s: f64,
    pub h: f64,
    /// −(1 + γ).
    pub target: f64,
    pub abs_err_bound: f64,
    /// |h − (g_ratio(s) − 1/(s−1))|: distance to plain subtraction.
    pub route_spread: f64,
}

pub const POLE_LIMIT_TOL: f64 = 1e-13;

/// h(s) = g(s) − 1/(s−1) without forming 1/(s−1).
///
/// With ε = s − 1, R = ζ(s) − 1/ε and R′ = ζ′(s) + 1/ε²,
/// `h(s) = −(1 + s·R + ε·R′) / (s·(1 + ε·R))`.
pub fn pole_limit(s: f64) -> Result<BoundedValue> {
    check_s(s)?;
    let eps = s - 1.0;
    let r = zeta_remainder(s, POLE_LIMIT_TOL)?;
    let dr = zeta_prime_remainder(s, POLE_LIMIT_TOL)?;
    let num = 1.0 + s * r.value + eps * dr.value;
    let den = s * (1.0 + eps * r.value);
    let h = -num / den;
    let d_num = s * r.err + eps * dr.err + 4.0 * UNIT_ROUNDOFF * (1.0 + (s * r.value).abs() + (eps * dr.value).abs());
    let d_den = s * eps * r.err + 4.0 * UNIT_ROUNDOFF * den.abs();
    let err = (d_num + h.abs() * d_den) / (den.abs() - d_den) + 2.0 * UNIT_ROUNDOFF * h.abs();
    Ok(BoundedValue::new(h, err, Method::EulerMaclaurin))
}

/// h(s) by subtracting 1/(s−1) from the ratio route; loses digits near s = 1.
pub fn pole_limit_naive(s: f64) -> Result<f64> {
    Ok(g_zeta_ratio(s, 1e-9)?.value - 1.0 / (s - 1.0))
}

pub fn pole_limit_scan(s_values: &[f64]) -> Result<Vec<PoleLimitRecord>> {
    if s_values.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    let target = -(1.0 + euler_gamma());
    s_values
        .iter()
        .map(|&s| {
            let h = pole_limit(s)?;
            let naive = pole_limit_naive(s)?;
            Ok(PoleLimitRecord {
                s,
                h: h.value,
                target,
                abs_err_bound: h.err,
                route_spread: (h.value - naive).abs(),
            })
        })
        .collect()
}

/// Extrapolated limit and first-order constant of a pole-limit scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleLimitFit {
    pub limit: Extrapolation,
    /// max |h + 1 + γ| / (s − 1) over the scan.
    pub k_max: f64,
    /// h + 1 + γ ≈ k·(s−1) + k2·(s−1)², when the scan has two or more points.
    pub fit: Option<FirstOrderFit>,
}

pub fn pole_limit_fit(records: &[PoleLimitRecord]) -> Result<PoleLimitFit> {
    let hs: Vec<f64> = records.iter().map(|r| r.s - 1.0).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.h).collect();
    let target = records.first().map_or(-(1.0 + euler_gamma()), |r| r.target);
    Ok(PoleLimitFit {
        limit: richardson(&hs, &ys)?,
        k_max: linear_rate_constant(&hs, &ys, target),
        fit: first_order_fit(&hs, &ys, target).ok(),
    })
}

/// Writes records as CSV with header `s,h,target,abs_err_bound,route_spread`.
pub fn write_pole_limit_csv<W: Write>(records: &[PoleLimitRecord], mut w: W) -> Result<()> {
    writeln!(w, "s,h,target,abs_err_bound,route_spread")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            sig15(r.s),
            sig15(r.h),
            sig15(r.target),
            sig15(r.abs_err_bound),
            sig15(r.route_spread)
        )?;
    }
    Ok(())
}
