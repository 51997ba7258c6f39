//! The Chebyshev function ψ(x) = Σ_{p^k ≤ x} ln p and friends.
//!
//! A [`PsiTable`] keeps every jump of ψ up to its limit (prime powers stored
//! as `u32`, cumulative sums as `f64`), so ψ can be evaluated exactly at any
//! real argument and step-function integrals against ψ need no quadrature.
//! Sums are accumulated with compensated summation; the rounding bound is a
//! closed function of the term count and the (all-positive) sum, so it is not
//! stored per jump.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{check_range, Error, Result};
use crate::format::sig15;
use crate::sieve::{MangoldtSieve, MAX_SIEVE_LIMIT};
use crate::sum::{summation_bound, CompensatedSum, UNIT_ROUNDOFF};
use crate::tauber::SampledFunction;

/// Default upper limit for ψ computations.
pub const DEFAULT_PSI_LIMIT: u64 = 100_000_000;

/// Integers up to this value are all checkpoints in the default grid.
pub const DENSE_GRID_END: u64 = 10_000;

/// Ratio of the geometric part of the default grid.
pub const GEOMETRIC_GRID_RATIO: f64 = 1.001;

/// Segments processed per parallel batch while building tables.
const BATCH_SEGMENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiCheckpoint {
    pub x: f64,
    pub psi: f64,
    /// Bound on |computed ψ − true ψ| from rounding.
    pub err: f64,
}

/// Where a [`PsiTable`] places its reporting checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiGrid {
    /// Every integer up to 10⁴, then a geometric grid of ratio 1.001.
    Default,
    Custom(Vec<f64>),
}

/// Bound on the error of a ψ value built from `terms` logarithms summing to
/// `psi`: each logarithm is within 2 ulp (≤ 4u relative) and the compensated
/// sum adds `(2u + 2nu²)·ψ`.
pub fn psi_error_bound(terms: usize, psi: f64) -> f64 {
    4.0 * UNIT_ROUNDOFF * psi + summation_bound(terms as u64, psi)
}

/// ψ with every jump up to `limit`.
#[derive(Debug, Clone)]
pub struct PsiTable {
    limit: u64,
    jumps: Vec<u32>,
    psi: Vec<f64>,
    checkpoints: Vec<PsiCheckpoint>,
}

impl PsiTable {
    /// Sieves up to `limit` and builds the table on the default grid.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_grid(limit, PsiGrid::Default)
    }

    pub fn build_with_grid(limit: u64, grid: PsiGrid) -> Result<Self> {
        check_range("limit", limit as f64, 2.0, MAX_SIEVE_LIMIT as f64)?;
        let sieve = MangoldtSieve::new(limit)?;
        let segments = sieve.segments(2, limit + 1);
        let mut jumps = Vec::new();
        let mut psi = Vec::new();
        let mut acc = CompensatedSum::new();
        for batch in segments.chunks(BATCH_SEGMENTS) {
            let parts = batch
                .par_iter()
                .map(|&(a, b)| {
                    sieve
                        .block(a, b)
                        .map(|blk| blk.prime_powers().collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            for (n, lam) in parts.into_iter().flatten() {
                acc.add(lam);
                jumps.push(n as u32);
                psi.push(acc.value());
            }
        }
        Self::assemble(limit, jumps, psi, grid)
    }

    /// Table from an explicit ascending list of `(n, Λ(n))` jumps.
    pub fn from_prime_powers<I>(limit: u64, powers: I, grid: PsiGrid) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        check_range("limit", limit as f64, 1.0, MAX_SIEVE_LIMIT as f64)?;
        let mut jumps = Vec::new();
        let mut psi = Vec::new();
        let mut acc = CompensatedSum::new();
        for (n, lam) in powers {
            if n > limit || jumps.last().is_some_and(|&last| n <= last as u64) || lam < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "jumps must be ascending, nonnegative and <= {limit}; got ({n}, {lam})"
                )));
            }
            acc.add(lam);
            jumps.push(n as u32);
            psi.push(acc.value());
        }
        Self::assemble(limit, jumps, psi, grid)
    }

    fn assemble(limit: u64, jumps: Vec<u32>, psi: Vec<f64>, grid: PsiGrid) -> Result<Self> {
        let mut table = PsiTable {
            limit,
            jumps,
            psi,
            checkpoints: Vec::new(),
        };
        let xs = match grid {
            PsiGrid::Default => default_grid(limit),
            PsiGrid::Custom(xs) => {
                if xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidArgument("checkpoint grid must be strictly increasing".into()));
                }
                xs
            }
        };
        table.checkpoints = xs
            .into_iter()
            .map(|x| table.psi(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(table)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Prime powers up to the limit, ascending.
    pub fn jumps(&self) -> &[u32] {
        &self.jumps
    }

    /// `psi_values()[i]` is ψ(jumps()[i]).
    pub fn psi_values(&self) -> &[f64] {
        &self.psi
    }

    pub fn checkpoints(&self) -> &[PsiCheckpoint] {
        &self.checkpoints
    }

    fn check_x(&self, x: f64) -> Result<()> {
        check_range("x", x, 1.0, self.limit as f64)
    }

    /// Number of jumps at or below `x`.
    pub fn jumps_upto(&self, x: f64) -> usize {
        self.jumps.partition_point(|&n| n as f64 <= x)
    }

    /// ψ(x), right-continuous: a jump at x is included.
    pub fn psi(&self, x: f64) -> Result<PsiCheckpoint> {
        self.check_x(x)?;
        let k = self.jumps_upto(x);
        let psi = if k == 0 { 0.0 } else { self.psi[k - 1] };
        Ok(PsiCheckpoint {
            x,
            psi,
            err: psi_error_bound(k, psi),
        })
    }

    /// ψ at `x` without range checks; callers guarantee `1 <= x <= limit`.
    pub(crate) fn psi_unchecked(&self, x: f64) -> f64 {
        let k = self.jumps_upto(x);
        if k == 0 {
            0.0
        } else {
            self.psi[k - 1]
        }
    }

    /// Left limit ψ(x⁻).
    pub fn psi_left(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let k = self.jumps.partition_point(|&n| (n as f64) < x);
        Ok(if k == 0 { 0.0 } else { self.psi[k - 1] })
    }

    /// Largest ψ(x)/x over jump points up to `limit`.
    pub fn chebyshev_constant(&self, limit: f64) -> Result<ChebyshevConstant> {
        check_range("limit", limit, 2.0, self.limit as f64)?;
        let k = self.jumps_upto(limit);
        let (mut value, mut argmax) = (f64::NEG_INFINITY, 0u64);
        for (&n, &psi) in self.jumps[..k].iter().zip(&self.psi[..k]) {
            let ratio = psi / n as f64;
            if ratio > value {
                value = ratio;
                argmax = n as u64;
            }
        }
        Ok(ChebyshevConstant { value, argmax })
    }

    /// sup of |ψ(x)/x − 1| over x ∈ [lo, hi], with a location where it is
    /// attained (as a one-sided limit at a jump, possibly).
    ///
    /// Between jumps ψ(x)/x is decreasing, so the extremes sit at the
    /// interval ends and on either side of each jump.
    pub fn max_relative_error(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        self.check_x(lo)?;
        self.check_x(hi)?;
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        let mut best = (0.0f64, lo);
        let mut consider = |v: f64, x: f64| {
            let e = (v / x - 1.0).abs();
            if e > best.0 {
                best = (e, x);
            }
        };
        consider(self.psi_unchecked(lo), lo);
        consider(self.psi_unchecked(hi), hi);
        let start = self.jumps.partition_point(|&n| (n as f64) <= lo);
        let end = self.jumps_upto(hi);
        for k in start..end {
            let x = self.jumps[k] as f64;
            consider(self.psi[k], x);
            consider(if k == 0 { 0.0 } else { self.psi[k - 1] }, x);
        }
        Ok(best)
    }

    /// |ψ(λx) − ψ(x) − (λ−1)x| / (λx), the normalized increment defect.
    pub fn increment_ratio(&self, x: f64, lambda: f64) -> Result<f64> {
        if lambda < 1.0 {
            return Err(Error::InvalidArgument(format!("lambda must be >= 1, got {lambda}")));
        }
        let y = lambda * x;
        let dpsi = self.psi(y)?.psi - self.psi(x)?.psi;
        Ok((dpsi - (y - x)).abs() / y)
    }

    /// Writes the checkpoints as CSV with header `x,psi,psi_over_x,err`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,psi,psi_over_x,err")?;
        for c in &self.checkpoints {
            writeln!(
                w,
                "{},{},{},{}",
                sig15(c.x),
                sig15(c.psi),
                sig15(c.psi / c.x),
                sig15(c.err)
            )?;
        }
        Ok(())
    }
}

fn default_grid(limit: u64) -> Vec<f64> {
    let mut xs: Vec<f64> = (1..=limit.min(DENSE_GRID_END)).map(|n| n as f64).collect();
    let end = limit as f64;
    let mut x = DENSE_GRID_END as f64;
    if limit > DENSE_GRID_END {
        loop {
            x *= GEOMETRIC_GRID_RATIO;
            if x >= end {
                break;
            }
            xs.push(x);
        }
        xs.push(end);
    }
    xs
}

/// The empirical Chebyshev constant: max ψ(x)/x over jumps ≤ limit.
///
/// This certifies ψ(x) ≤ value·x on [1, limit] only; it is a measurement,
/// not an admissible constant for all x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevConstant {
    pub value: f64,
    pub argmax: u64,
}

/// ψ(x) by streaming the sieve up to ⌊x⌋ (no table is kept).
pub fn psi(x: f64) -> Result<PsiCheckpoint> {
    check_range("x", x, 1.0, DEFAULT_PSI_LIMIT as f64)?;
    let n = x.floor() as u64;
    if n < 2 {
        return Ok(PsiCheckpoint { x, psi: 0.0, err: 0.0 });
    }
    let sieve = MangoldtSieve::new(n)?;
    let parts = sieve.map_blocks(2, n + 1, |blk| blk.prime_powers().map(|(_, l)| l).collect::<Vec<_>>())?;
    let acc: CompensatedSum = parts.into_iter().flatten().collect();
    let psi = acc.value();
    Ok(PsiCheckpoint {
        x,
        psi,
        err: psi_error_bound(acc.terms() as usize, psi),
    })
}

/// π(x), the number of primes ≤ x.
pub fn prime_pi(x: f64) -> Result<u64> {
    check_range("x", x, 0.0, MAX_SIEVE_LIMIT as f64)?;
    let n = x.floor() as u64;
    if n < 2 {
        return Ok(0);
    }
    let sieve = MangoldtSieve::new(n)?;
    let counts = sieve
        .segments(2, n + 1)
        .into_par_iter()
        .map(|(a, b)| sieve.count_primes_in(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(counts.into_iter().sum())
}

/// max ψ(x)/x over prime powers x ≤ `limit`, by a streaming scan.
pub fn chebyshev_constant(limit: f64) -> Result<ChebyshevConstant> {
    check_range("limit", limit, 2.0, MAX_SIEVE_LIMIT as f64)?;
    let n = limit.floor() as u64;
    let sieve = MangoldtSieve::new(n)?;
    let parts = sieve.map_blocks(2, n + 1, |blk| blk.prime_powers().collect::<Vec<_>>())?;
    let mut acc = CompensatedSum::new();
    let mut best = ChebyshevConstant {
        value: f64::NEG_INFINITY,
        argmax: 0,
    };
    for (n, lam) in parts.into_iter().flatten() {
        acc.add(lam);
        let ratio = acc.value() / n as f64;
        if ratio > best.value {
            best = ChebyshevConstant { value: ratio, argmax: n };
        }
    }
    Ok(best)
}

/// `inf_values[i][j]` = inf over s ∈ [xs[j], lambdas[i]·xs[j]] of u(s) − u(xs[j]).
#[derive(Debug, Clone, PartialEq)]
pub struct SlowDecreaseProfile {
    pub lambdas: Vec<f64>,
    pub xs: Vec<f64>,
    pub inf_values: Vec<Vec<f64>>,
}

impl SlowDecreaseProfile {
    /// Smallest profile value for each λ.
    pub fn worst_per_lambda(&self) -> Vec<f64> {
        self.inf_values
            .iter()
            .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
            .collect()
    }
}

/// Window infima of u over [x, λx] relative to u(x).
///
/// Exact for step, piecewise-linear and ψ-backed functions; grid-sampled for
/// other closed forms.
pub fn slow_decrease_profile(
    u: &SampledFunction,
    lambdas: &[f64],
    xs: &[f64],
) -> Result<SlowDecreaseProfile> {
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l > 1.0)) {
        return Err(Error::InvalidArgument(format!("every lambda must exceed 1, got {bad}")));
    }
    let inf_values = lambdas
        .iter()
        .map(|&lambda| {
            xs.iter()
                .map(|&x| {
                    let start = u.eval(x)?;
                    Ok(u.window_inf(x, lambda * x)? - start)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SlowDecreaseProfile {
        lambdas: lambdas.to_vec(),
        xs: xs.to_vec(),
        inf_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tauber::{ClosedForm, SampledFunction};
    use std::sync::Arc;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    #[test]
    fn psi_small_values() {
        assert_eq!(psi(1.5).unwrap().psi, 0.0);
        let expected = 3.0 * ln(2.0) + 2.0 * ln(3.0) + ln(5.0) + ln(7.0);
        assert!((psi(10.0).unwrap().psi - expected).abs() < 1e-12);
        assert!((psi(10.0).unwrap().psi - 7.832_014_18).abs() < 1e-7);
        assert_eq!(psi(2.0).unwrap().psi, ln(2.0));
        assert!(psi(0.5).is_err());
        assert!(psi(2e8).is_err());
    }

    #[test]
    fn prime_counts() {
        assert_eq!(prime_pi(1.0).unwrap(), 0);
        assert_eq!(prime_pi(10.0).unwrap(), 4);
        assert_eq!(prime_pi(100.0).unwrap(), 25);
        assert_eq!(prime_pi(1e6).unwrap(), 78_498);
    }

    #[test]
    fn chebyshev_constant_small_limits() {
        let c = chebyshev_constant(2.0).unwrap();
        assert!((c.value - ln(2.0) / 2.0).abs() < 1e-15);
        assert_eq!(c.argmax, 2);
        let c = chebyshev_constant(4.0).unwrap();
        assert!((c.value - (2.0 * ln(2.0) + ln(3.0)) / 4.0).abs() < 1e-15);
        assert!((c.value - 0.6212).abs() < 1e-4);
        assert_eq!(c.argmax, 4);
        assert!(chebyshev_constant(1.0).is_err());
    }

    #[test]
    fn table_matches_streaming() {
        let table = PsiTable::build(20_000).unwrap();
        for x in [1.0, 2.0, 10.0, 113.0, 9_999.5, 20_000.0] {
            assert_eq!(table.psi(x).unwrap().psi, psi(x).unwrap().psi);
        }
        let c = table.chebyshev_constant(20_000.0).unwrap();
        assert_eq!(c, chebyshev_constant(20_000.0).unwrap());
        assert_eq!(c.argmax, 113);
    }

    #[test]
    fn right_continuity_and_left_limits() {
        let table = PsiTable::build(100).unwrap();
        assert!((table.psi(8.0).unwrap().psi - table.psi_left(8.0).unwrap() - ln(2.0)).abs() < 1e-14);
        assert_eq!(table.psi(7.9).unwrap().psi, table.psi_left(8.0).unwrap());
        assert_eq!(table.psi(6.0).unwrap().psi, table.psi_left(6.0).unwrap());
        assert!(table.psi(101.0).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let table = PsiTable::build(20_000).unwrap();
        let cps = table.checkpoints();
        assert_eq!(cps[0].x, 1.0);
        assert_eq!(cps[9_999].x, 10_000.0);
        assert_eq!(cps.last().unwrap().x, 20_000.0);
        let n_geo = cps.len() - 10_000;
        let expected = (2.0f64.ln() / GEOMETRIC_GRID_RATIO.ln()).ceil() as usize;
        assert!(n_geo.abs_diff(expected) <= 1);
        assert!(cps.windows(2).all(|w| w[0].x < w[1].x && w[0].psi <= w[1].psi));
    }

    #[test]
    fn csv_header_and_rows() {
        let table = PsiTable::build_with_grid(100, PsiGrid::Custom(vec![2.0, 10.0])).unwrap();
        let mut out = Vec::new();
        table.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "x,psi,psi_over_x,err");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("10,7.83201418"));
    }

    #[test]
    fn from_prime_powers_validates() {
        let bad = PsiTable::from_prime_powers(10, [(3, 1.0), (2, 1.0)], PsiGrid::Default);
        assert!(bad.is_err());
        let empty = PsiTable::from_prime_powers(10, [], PsiGrid::Default).unwrap();
        assert_eq!(empty.psi(10.0).unwrap().psi, 0.0);
    }

    #[test]
    fn profile_of_constant_and_sine() {
        let c = SampledFunction::closed(ClosedForm::Constant(3.0));
        let p = slow_decrease_profile(&c, &[1.1, 2.0], &[1.0, 50.0]).unwrap();
        assert!(p.inf_values.iter().flatten().all(|&v| v == 0.0));

        let sine = SampledFunction::closed(ClosedForm::Sine);
        let p = slow_decrease_profile(&sine, &[1.5], &[100.0]).unwrap();
        // Dense-grid oracle over [100, 150].
        let oracle = (0..=500_000)
            .map(|i| (100.0 + 50.0 * i as f64 / 500_000.0).sin())
            .fold(f64::INFINITY, f64::min)
            - 100f64.sin();
        assert!((p.inf_values[0][0] - oracle).abs() < 1e-8);
        assert!((p.inf_values[0][0] - (-1.0 - 100f64.sin())).abs() < 1e-8);

        assert!(slow_decrease_profile(&sine, &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn profile_of_psi_over_x_obeys_chebyshev_bound() {
        let table = Arc::new(PsiTable::build(200_000).unwrap());
        let c = table.chebyshev_constant(200_000.0).unwrap().value;
        let u = SampledFunction::closed(ClosedForm::PsiOverX(table));
        let lambdas = [1.5, 1.1, 1.01];
        let xs: Vec<f64> = (0..40).map(|i| 1000.0 * 1.1f64.powi(i)).collect();
        let p = slow_decrease_profile(&u, &lambdas, &xs).unwrap();
        for (i, &l) in lambdas.iter().enumerate() {
            for &v in &p.inf_values[i] {
                assert!(v <= 0.0);
                assert!(v >= -c * (1.0 - 1.0 / l));
            }
        }
    }
}
