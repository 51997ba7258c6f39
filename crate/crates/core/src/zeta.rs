//! ζ(s), ζ′(s) and the pole-subtracted remainders for real s > 1.
//!
//! Three evaluators with error bounds: the Dirichlet series with an
//! integral-comparison tail, the truncated Euler product, and
//! Euler–Maclaurin with the pole folded into `(e^y − 1)/y`.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{check_range, Error, Result};
use crate::extrapolate::richardson;
use crate::sieve::{sieve_primes, MAX_SIEVE_LIMIT};
use crate::sum::{CompensatedSum, UNIT_ROUNDOFF};

/// How a [`BoundedValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    EulerProduct,
    EulerMaclaurin,
    Dirichlet,
    Mellin,
    ZetaRatio,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Series => "series",
            Method::EulerProduct => "euler_product",
            Method::EulerMaclaurin => "euler_maclaurin",
            Method::Dirichlet => "dirichlet",
            Method::Mellin => "mellin",
            Method::ZetaRatio => "zeta_ratio",
        })
    }
}

/// A value with a bound on its total (truncation + rounding) error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedValue {
    pub value: f64,
    pub err: f64,
    pub method: Method,
}

impl BoundedValue {
    pub fn new(value: f64, err: f64, method: Method) -> Self {
        debug_assert!(err >= 0.0 && err.is_finite(), "bad error bound {err}");
        Self { value, err, method }
    }

    /// `|self − other| ≤ err₁ + err₂`.
    pub fn agrees_with(&self, other: &BoundedValue) -> bool {
        (self.value - other.value).abs() <= self.err + other.err
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.err
    }
}

/// Euler's constant, obtained by extrapolating [`zeta_remainder`] to s = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerGamma {
    pub gamma: f64,
    /// Richardson error estimate.
    pub err: f64,
}

impl EulerGamma {
    pub const OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];

    pub fn compute() -> Result<Self> {
        let ys = Self::OFFSETS
            .iter()
            .map(|&h| Ok(zeta_remainder(1.0 + h, 1e-13)?.value))
            .collect::<Result<Vec<_>>>()?;
        let e = richardson(&Self::OFFSETS, &ys)?;
        Ok(Self {
            gamma: e.value,
            err: e.err_estimate,
        })
    }
}

/// γ from [`EulerGamma::compute`], computed once.
pub fn euler_gamma() -> f64 {
    static GAMMA: OnceLock<f64> = OnceLock::new();
    *GAMMA.get_or_init(|| EulerGamma::compute().expect("remainder is defined near 1").gamma)
}

const SERIES_MAX_TERMS: u64 = 200_000_000;
const EM_MAX_TERMS: u64 = 1 << 24;
/// Bernoulli corrections B₂..B₈.
const EM_ORDER: usize = 4;
const BERNOULLI_OVER_FACTORIAL: [f64; EM_ORDER] = [
    1.0 / 12.0,        // B2/2!
    -1.0 / 720.0,      // B4/4!
    1.0 / 30240.0,     // B6/6!
    -1.0 / 1209600.0,  // B8/8!
];
/// Upper bound for 2ζ(2m+1)/(2π)^{2m+1} at m = 4, the sup of the periodic
/// Bernoulli function P₉.
const PERIODIC_BOUND: f64 = 2.0 * 1.002_01 / 15_302_473.0;
/// Per-term relative rounding allowance (powf, ln, products).
const TERM_ROUNDING: f64 = 8.0 * UNIT_ROUNDOFF;

fn check_s(s: f64) -> Result<()> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!("s must exceed 1, got {s}")));
    }
    if s.is_infinite() {
        return Err(Error::Domain("s must be finite".into()));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

/// ζ(s) = Σ n^{−s} summed directly up to N with the tail bracketed by
/// `∫_N^∞ x^{−s} − N^{−s}/2 ≤ Σ_{n>N} n^{−s} ≤ ∫_{N+1/2}^∞ x^{−s}`.
pub fn zeta_series(s: f64, tol: f64) -> Result<BoundedValue> {
    check_s(s)?;
    check_tol(tol)?;
    let width = |n: f64| {
        let upper = (n + 0.5).powf(1.0 - s) / (s - 1.0);
        let lower = n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s);
        (lower, upper)
    };
    // The bracket width is about s(s+1)/12·N^{−s−1}.
    let guess = ((s * (s + 1.0) / (12.0 * tol)).powf(1.0 / (s + 1.0))).ceil().max(16.0);
    let mut n = guess.min(SERIES_MAX_TERMS as f64) as u64;
    loop {
        let (lower, upper) = width(n as f64);
        let half = 0.5 * (upper - lower);
        let tail_round = TERM_ROUNDING * upper;
        if half + tail_round <= tol || n >= SERIES_MAX_TERMS {
            let mut acc = CompensatedSum::new();
            for k in 1..=n {
                acc.add((k as f64).powf(-s));
            }
            let tail = 0.5 * (upper + lower);
            let value = acc.value() + tail;
            let err = half + tail_round + acc.rounding_bound() + TERM_ROUNDING * acc.abs_sum() + UNIT_ROUNDOFF * value;
            if err <= tol {
                return Ok(BoundedValue::new(value, err, Method::Series));
            }
            if n >= SERIES_MAX_TERMS {
                return Err(Error::Convergence {
                    tol,
                    detail: format!("series for s = {s} needs more than {SERIES_MAX_TERMS} terms"),
                });
            }
        }
        n = (2 * n).min(SERIES_MAX_TERMS);
    }
}

/// Π_{p ≤ P} (1 − p^{−s})^{−1}. The omitted factors lie in
/// `[1, exp(P^{1−s} / ((s−1)(1 − P^{−s})))]`, so the error is one-sided.
pub fn zeta_euler_product(s: f64, prime_limit: u64) -> Result<BoundedValue> {
    check_s(s)?;
    check_range("prime_limit", prime_limit as f64, 2.0, MAX_SIEVE_LIMIT as f64)?;
    let primes = sieve_primes(prime_limit)?;
    let mut log = CompensatedSum::new();
    for &p in &primes.primes {
        log.add(-(-(p as f64).powf(-s)).ln_1p());
    }
    let value = log.value().exp();
    let p = prime_limit as f64;
    let omitted = p.powf(1.0 - s) / ((s - 1.0) * (1.0 - p.powf(-s)));
    let truncation = value * omitted.exp_m1();
    // exp of a sum carrying relative error δ is off by ≈ |Σ|δ relatively.
    let rounding = value * (log.rounding_bound() + TERM_ROUNDING * log.abs_sum() + 2.0 * UNIT_ROUNDOFF);
    Ok(BoundedValue::new(value, truncation + rounding, Method::EulerProduct))
}

/// Euler–Maclaurin terms for one s and N.
struct EmParts {
    z: f64,
    z_err: f64,
    dz: f64,
    dz_err: f64,
    rem: f64,
    rem_err: f64,
    rem_trunc: f64,
    drem: f64,
    drem_err: f64,
    drem_trunc: f64,
}

fn em_base_terms(s: f64) -> u64 {
    ((10.0 / (s - 1.0 + 0.1)).ceil() as u64).max(20)
}

/// (e^y − 1)/y and its derivative.
fn expm1_ratio(y: f64) -> (f64, f64) {
    if y.abs() < 1e-300 {
        return (1.0, 0.5);
    }
    let e = y.exp_m1() / y;
    let de = if y.abs() < 1.0 {
        // Σ_{k≥1} k y^{k−1}/(k+1)!
        let mut term = 0.5f64;
        let mut sum = 0.0f64;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) || k < 3.0 {
            sum += term;
            term *= y * (k + 1.0) / (k * (k + 2.0));
            k += 1.0;
        }
        sum
    } else {
        (y * y.exp() - y.exp_m1()) / (y * y)
    };
    (e, de)
}

fn em_parts(s: f64, n: u64) -> EmParts {
    let big_n = n as f64;
    let l = big_n.ln();
    let mut sum = CompensatedSum::new();
    let mut dsum = CompensatedSum::new();
    for k in 1..n {
        let x = k as f64;
        let t = x.powf(-s);
        sum.add(t);
        if k > 1 {
            dsum.add(-x.ln() * t);
        }
    }
    let y = (1.0 - s) * l;
    let (e, de) = expm1_ratio(y);
    let n_s = big_n.powf(-s);

    let mut rem = sum;
    let mut drem = dsum;
    // Unfolded sums for ζ and ζ′ themselves: every term has one sign.
    let mut z = sum;
    let mut dz = dsum;
    let pole_n = big_n.powf(1.0 - s) / (s - 1.0);
    let dpole_n = pole_n * (l + 1.0 / (s - 1.0));
    z.add(pole_n);
    dz.add(-dpole_n);
    z.add(0.5 * n_s);
    dz.add(-0.5 * l * n_s);
    rem.add(-l * e);
    drem.add(l * l * de);
    rem.add(0.5 * n_s);
    drem.add(-0.5 * l * n_s);

    // T_k = B_{2k}/(2k)!·(s)_{2k−1}·N^{−s−2k+1}, dT_k/ds = T_k·(Σ 1/(s+i) − ln N)
    let mut corr = 0.0;
    let mut dcorr = 0.0;
    let mut corr_abs = 0.0;
    let mut dcorr_abs = 0.0;
    for (k, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let order = 2 * k + 1;
        let (poch, h) = rising_and_harmonic(s, order);
        let p = big_n.powf(-s - order as f64);
        let t = c * poch * p;
        let dt = t * (h - l);
        corr += t;
        dcorr += dt;
        corr_abs += t.abs();
        dcorr_abs += dt.abs();
    }
    rem.add(corr);
    drem.add(dcorr);
    z.add(corr);
    dz.add(dcorr);

    // |R| ≤ sup|P₉|·∫_N^∞ |f⁽⁹⁾| = sup|P₉|·(s)₈·N^{−s−8}
    let m2 = 2 * EM_ORDER;
    let (poch, h) = rising_and_harmonic(s, m2 + 1);
    let a = s + (m2 + 1) as f64;
    let na = big_n.powf(1.0 - a);
    let trunc = PERIODIC_BOUND * poch * na / (a - 1.0);
    let dtrunc = PERIODIC_BOUND * poch * (h * na / (a - 1.0) + na * (l / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0))));

    let rem_round = rem.rounding_bound()
        + TERM_ROUNDING * (sum.abs_sum() + (l * e).abs() + 0.5 * n_s + corr_abs)
        + 4.0 * UNIT_ROUNDOFF * (l * e).abs() * (1.0 + y.abs());
    let drem_round = drem.rounding_bound()
        + TERM_ROUNDING * (dsum.abs_sum() + (l * l * de).abs() + 0.5 * l * n_s + dcorr_abs)
        + 16.0 * UNIT_ROUNDOFF * (l * l * de).abs() * (1.0 + y.abs());
    let z_round = z.rounding_bound() + TERM_ROUNDING * (sum.abs_sum() + pole_n + 0.5 * n_s + corr_abs);
    let dz_round = dz.rounding_bound() + TERM_ROUNDING * (dsum.abs_sum() + 2.0 * dpole_n + 0.5 * l * n_s + dcorr_abs);
    EmParts {
        z: z.value(),
        z_err: trunc + z_round,
        dz: dz.value(),
        dz_err: dtrunc + dz_round,
        rem: rem.value(),
        rem_err: trunc + rem_round,
        rem_trunc: trunc,
        drem: drem.value(),
        drem_err: dtrunc + drem_round,
        drem_trunc: dtrunc,
    }
}

/// (s)_j = s(s+1)…(s+j−1) and Σ_{i<j} 1/(s+i).
fn rising_and_harmonic(s: f64, j: usize) -> (f64, f64) {
    let mut p = 1.0;
    let mut h = 0.0;
    for i in 0..j {
        p *= s + i as f64;
        h += 1.0 / (s + i as f64);
    }
    (p, h)
}

/// `pick` returns (value, total error, truncation error).
fn em_until(s: f64, tol: f64, pick: impl Fn(&EmParts) -> (f64, f64, f64)) -> Result<BoundedValue> {
    check_s(s)?;
    check_tol(tol)?;
    let mut n = em_base_terms(s);
    loop {
        let parts = em_parts(s, n);
        let (value, err, trunc) = pick(&parts);
        if err <= tol {
            return Ok(BoundedValue::new(value, err, Method::EulerMaclaurin));
        }
        // More terms only add rounding once truncation is negligible.
        if trunc < 0.5 * tol {
            return Err(Error::Convergence {
                tol,
                detail: format!("rounding error {err:e} at s = {s} exceeds the tolerance"),
            });
        }
        if n >= EM_MAX_TERMS {
            return Err(Error::Convergence {
                tol,
                detail: format!("Euler-Maclaurin at s = {s} reached N = {n} with error {err:e}"),
            });
        }
        n *= 2;
    }
}

/// ζ(s) − 1/(s−1), free of cancellation arbitrarily close to s = 1.
pub fn zeta_remainder(s: f64, tol: f64) -> Result<BoundedValue> {
    em_until(s, tol, |p| (p.rem, p.rem_err, p.rem_trunc))
}

/// ζ′(s) + 1/(s−1)², the derivative of [`zeta_remainder`].
pub fn zeta_prime_remainder(s: f64, tol: f64) -> Result<BoundedValue> {
    em_until(s, tol, |p| (p.drem, p.drem_err, p.drem_trunc))
}

/// ζ(s) by Euler–Maclaurin.
pub fn zeta(s: f64, tol: f64) -> Result<BoundedValue> {
    em_until(s, tol, |p| (p.z, p.z_err, p.rem_trunc))
}

/// ζ′(s) by Euler–Maclaurin.
pub fn zeta_prime(s: f64, tol: f64) -> Result<BoundedValue> {
    em_until(s, tol, |p| (p.dz, p.dz_err, p.drem_trunc))
}

/// Whether `1/(s−1) ≤ ζ(s) ≤ 1 + 1/(s−1)` holds within the evaluator's error.
pub fn zeta_bounds_check(s: f64) -> bool {
    let pole = 1.0 / (s - 1.0);
    let Ok(z) = zeta(s, 1e-10 * pole.max(1.0)) else {
        return false;
    };
    z.value + z.err >= pole && z.value - z.err <= 1.0 + pole
}
