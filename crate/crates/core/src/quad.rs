//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Used only where no exact piecewise integral exists: closed-form test
//! functions and the cut-off-kernel path of the truncated mean. Known
//! breakpoints of the integrand should be passed in so that the adaptive
//! refinement only has to hunt for unknown ones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Maximum number of subintervals held by one adaptive run.
pub const MAX_INTERVALS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadResult {
    pub value: f64,
    pub err: f64,
    /// ∫|f|, used by callers to judge tail panels.
    pub abs_value: f64,
}

/// The fixed 15-point Kronrod rule on `[a, b]`, with the 7-point Gauss
/// difference as an error estimate.
pub fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> QuadResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    QuadResult {
        value: kronrod * half,
        err: ((kronrod - gauss) * half).abs(),
        abs_value: abs * half.abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    res: QuadResult,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.res.err == other.res.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.res.err.total_cmp(&other.res.err)
    }
}

/// ∫ f over `[breaks[0], breaks[last]]`, splitting first at every break.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Ok(QuadResult::default());
    }
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidArgument("quadrature breakpoints must be ascending".into()));
        }
        if w[1] == w[0] {
            continue;
        }
        let res = kronrod15(&f, w[0], w[1]);
        total += res.value;
        total_err += res.err;
        heap.push(Piece { a: w[0], b: w[1], res });
    }
    while total_err > tol.target(total) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Convergence {
                tol: tol.target(total),
                detail: format!("adaptive quadrature stalled at error estimate {total_err:e}"),
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; keep its estimate.
            heap.push(worst);
            break;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        total += left.value + right.value - worst.res.value;
        total_err += left.err + right.err - worst.res.err;
        heap.push(Piece { a: worst.a, b: mid, res: left });
        heap.push(Piece { a: mid, b: worst.b, res: right });
    }
    // Re-sum to shed drift from the incremental updates.
    let pieces = heap.into_vec();
    let value = pieces.iter().map(|p| p.res.value).sum();
    let err = pieces.iter().map(|p| p.res.err).sum::<f64>().max(0.0);
    let abs_value = pieces.iter().map(|p| p.res.abs_value).sum();
    Ok(QuadResult { value, err, abs_value })
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// ∫_a^∞ f by doubling panels `[a, a+w], [a+w, a+2w], [a+3w, ...]` until a
/// panel's absolute mass is negligible against the running total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    initial_width: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    let mut acc = QuadResult::default();
    let mut lo = a;
    let mut width = initial_width;
    let mut quiet_panels = 0;
    for _ in 0..200 {
        let hi = lo + width;
        let panel = integrate(&f, lo, hi, tol)?;
        acc.value += panel.value;
        acc.err += panel.err;
        acc.abs_value += panel.abs_value;
        let negligible = acc.abs_value > 0.0 && panel.abs_value <= tol.target(acc.value) * 1e-2;
        let vanished = panel.abs_value == 0.0 && width >= 64.0 * initial_width;
        if negligible || vanished {
            quiet_panels += 1;
            if quiet_panels >= 2 {
                return Ok(acc);
            }
        } else {
            quiet_panels = 0;
        }
        lo = hi;
        width *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::Divergence(format!(
        "integrand mass does not decay on [{a}, ∞): last panel ended at {lo:e}"
    )))
}
