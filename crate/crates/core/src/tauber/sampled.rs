//! The engine's view of a real function u on [0, ∞).
//!
//! Tabulated functions (step or piecewise linear) and ψ-backed functions are
//! integrated exactly against e^{−rx}; only the remaining closed forms go
//! through adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::psi::PsiTable;
use crate::quad::{self, kronrod15, QuadResult, Tolerance};
use crate::sum::{summation_bound, CompensatedSum, UNIT_ROUNDOFF};

/// Stable identifiers of the built-in closed forms.
pub const REGISTRY_IDS: [&str; 6] = [
    "constant",
    "one_minus_exp",
    "sine",
    "increasing_log",
    "psi_over_x",
    "exp_weighted_psi",
];

/// Quadrature tolerance used for closed forms.
pub const CLOSED_FORM_TOL: Tolerance = Tolerance::new(1e-13, 1e-10);

/// Samples per window when minimizing a general closed form.
const WINDOW_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Step,
    PiecewiseLinear,
    ClosedForm,
}

/// Behaviour past the last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    Zero,
    ConstantLastValue,
    Unsupported,
}

#[derive(Clone)]
pub enum ClosedForm {
    Constant(f64),
    /// 1 − e^{−x}
    OneMinusExp,
    Sine,
    /// ln(1 + x)
    IncreasingLog,
    /// ψ(x)/x
    PsiOverX(Arc<PsiTable>),
    /// e^{−x} ψ(e^x)
    ExpWeightedPsi(Arc<PsiTable>),
    Custom {
        label: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    /// e^{−rate·x} · inner(x)
    Weighted {
        inner: Arc<SampledFunction>,
        rate: f64,
    },
    /// inner(x) + shift
    Offset {
        inner: Arc<SampledFunction>,
        shift: f64,
    },
}

impl ClosedForm {
    pub fn id(&self) -> &str {
        match self {
            ClosedForm::Constant(_) => "constant",
            ClosedForm::OneMinusExp => "one_minus_exp",
            ClosedForm::Sine => "sine",
            ClosedForm::IncreasingLog => "increasing_log",
            ClosedForm::PsiOverX(_) => "psi_over_x",
            ClosedForm::ExpWeightedPsi(_) => "exp_weighted_psi",
            ClosedForm::Custom { label, .. } => label,
            ClosedForm::Weighted { .. } => "weighted",
            ClosedForm::Offset { .. } => "offset",
        }
    }

    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ClosedForm::Custom {
            label: label.into(),
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Constant(c) => write!(f, "Constant({c})"),
            ClosedForm::PsiOverX(t) | ClosedForm::ExpWeightedPsi(t) => {
                write!(f, "{}(limit = {})", self.id(), t.limit())
            }
            ClosedForm::Weighted { inner, rate } => write!(f, "Weighted({inner:?}, rate = {rate})"),
            ClosedForm::Offset { inner, shift } => write!(f, "Offset({inner:?}, shift = {shift})"),
            _ => f.write_str(self.id()),
        }
    }
}

/// A function on [0, ∞) given by samples or by a closed form.
///
/// Step functions are right-continuous: `values[i]` holds on
/// `[grid[i], grid[i+1])`. The last grid point ends the tabulated support and
/// the tail model takes over beyond it. Below `grid[0]` the function is 0.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    kind: Kind,
    grid: Vec<f64>,
    values: Vec<f64>,
    closed_form: Option<ClosedForm>,
    tail: TailModel,
}

impl SampledFunction {
    pub fn step(grid: Vec<f64>, values: Vec<f64>, tail: TailModel) -> Result<Self> {
        Self::tabulated(Kind::Step, grid, values, tail)
    }

    pub fn piecewise_linear(grid: Vec<f64>, values: Vec<f64>, tail: TailModel) -> Result<Self> {
        Self::tabulated(Kind::PiecewiseLinear, grid, values, tail)
    }

    fn tabulated(kind: Kind, grid: Vec<f64>, values: Vec<f64>, tail: TailModel) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "grid ({}) and values ({}) must be nonempty and of equal length",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("grid must be nonnegative and strictly increasing".into()));
        }
        if values.iter().chain(&grid).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid and values must be finite".into()));
        }
        Ok(Self {
            kind,
            grid,
            values,
            closed_form: None,
            tail,
        })
    }

    pub fn closed(form: ClosedForm) -> Self {
        let tail = match &form {
            ClosedForm::PsiOverX(_) | ClosedForm::ExpWeightedPsi(_) => TailModel::ConstantLastValue,
            ClosedForm::Weighted { inner, .. } | ClosedForm::Offset { inner, .. } => inner.tail,
            _ => TailModel::Unsupported,
        };
        Self {
            kind: Kind::ClosedForm,
            grid: Vec::new(),
            values: Vec::new(),
            closed_form: Some(form),
            tail,
        }
    }

    /// α(x) = ψ(e^x) as a step function in x, jumps at ln n for prime powers n.
    pub fn psi_of_exp(table: &PsiTable) -> Result<Self> {
        let mut grid = Vec::with_capacity(table.jumps().len() + 2);
        let mut values = Vec::with_capacity(grid.capacity());
        grid.push(0.0);
        values.push(0.0);
        for (&n, &psi) in table.jumps().iter().zip(table.psi_values()) {
            grid.push((n as f64).ln());
            values.push(psi);
        }
        let end = (table.limit() as f64).ln();
        if end > *grid.last().unwrap() {
            grid.push(end);
            values.push(*values.last().unwrap());
        }
        Self::step(grid, values, TailModel::Unsupported)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn tail_model(&self) -> TailModel {
        self.tail
    }

    /// Where tabulated (or table-backed) data ends; ∞ for analytic forms.
    pub fn support_end(&self) -> f64 {
        match &self.closed_form {
            None => *self.grid.last().unwrap(),
            Some(ClosedForm::PsiOverX(t)) => t.limit() as f64,
            Some(ClosedForm::ExpWeightedPsi(t)) => (t.limit() as f64).ln(),
            Some(ClosedForm::Weighted { inner, .. }) | Some(ClosedForm::Offset { inner, .. }) => {
                inner.support_end()
            }
            Some(_) => f64::INFINITY,
        }
    }

    /// True if evaluation at `x` is defined under the tail model.
    pub fn supports(&self, x: f64) -> bool {
        x >= 0.0 && (x <= self.support_end() || self.tail != TailModel::Unsupported)
    }

    fn tail_value(&self) -> f64 {
        match self.tail {
            TailModel::Zero => 0.0,
            _ => *self.values.last().unwrap(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.supports(x) {
            return Err(Error::Support {
                x,
                end: self.support_end(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        match &self.closed_form {
            None => {
                let end = *self.grid.last().unwrap();
                if x > end {
                    return self.tail_value();
                }
                let k = self.grid.partition_point(|&g| g <= x);
                if k == 0 {
                    return 0.0;
                }
                let i = k - 1;
                match self.kind {
                    Kind::PiecewiseLinear if i + 1 < self.grid.len() => {
                        let (g0, g1) = (self.grid[i], self.grid[i + 1]);
                        let w = (x - g0) / (g1 - g0);
                        self.values[i] + w * (self.values[i + 1] - self.values[i])
                    }
                    _ => self.values[i],
                }
            }
            Some(form) => match form {
                ClosedForm::Constant(c) => *c,
                ClosedForm::OneMinusExp => -(-x).exp_m1(),
                ClosedForm::Sine => x.sin(),
                ClosedForm::IncreasingLog => x.ln_1p(),
                ClosedForm::PsiOverX(t) => psi_over_x(t, x),
                ClosedForm::ExpWeightedPsi(t) => psi_over_x(t, x.exp()),
                ClosedForm::Custom { f, .. } => f(x),
                ClosedForm::Weighted { inner, rate } => (-rate * x).exp() * inner.eval_unchecked(x),
                ClosedForm::Offset { inner, shift } => inner.eval_unchecked(x) + shift,
            },
        }
    }

    /// Left limit u(x⁻); equal to u(x) wherever u is continuous.
    pub fn eval_left(&self, x: f64) -> Result<f64> {
        if !self.supports(x) {
            return Err(Error::Support {
                x,
                end: self.support_end(),
            });
        }
        Ok(self.eval_left_unchecked(x))
    }

    fn eval_left_unchecked(&self, x: f64) -> f64 {
        match &self.closed_form {
            None if self.kind == Kind::Step => {
                let end = *self.grid.last().unwrap();
                if x > end {
                    return self.tail_value();
                }
                let k = self.grid.partition_point(|&g| g < x);
                if k == 0 {
                    0.0
                } else {
                    self.values[k - 1]
                }
            }
            Some(ClosedForm::PsiOverX(t)) => psi_over_x_left(t, x),
            Some(ClosedForm::ExpWeightedPsi(t)) => psi_over_x_left(t, x.exp()),
            Some(ClosedForm::Weighted { inner, rate }) => (-rate * x).exp() * inner.eval_left_unchecked(x),
            Some(ClosedForm::Offset { inner, shift }) => inner.eval_left_unchecked(x) + shift,
            _ => self.eval_unchecked(x),
        }
    }

    /// u + c.
    pub fn offset(&self, shift: f64) -> Self {
        match (&self.closed_form, self.tail) {
            (None, TailModel::ConstantLastValue | TailModel::Unsupported) => Self {
                values: self.values.iter().map(|v| v + shift).collect(),
                ..self.clone()
            },
            _ => Self::closed(ClosedForm::Offset {
                inner: Arc::new(self.clone()),
                shift,
            }),
        }
    }

    /// x ↦ e^{−rate·x} u(x).
    pub fn weighted(&self, rate: f64) -> Self {
        if rate == 0.0 {
            return self.clone();
        }
        if let Some(ClosedForm::Weighted { inner, rate: r }) = &self.closed_form {
            return inner.weighted(r + rate);
        }
        Self::closed(ClosedForm::Weighted {
            inner: Arc::new(self.clone()),
            rate,
        })
    }

    /// Whether u is nondecreasing everywhere (known analytically).
    pub fn is_known_nondecreasing(&self) -> bool {
        match &self.closed_form {
            Some(ClosedForm::Constant(_) | ClosedForm::OneMinusExp | ClosedForm::IncreasingLog) => true,
            Some(ClosedForm::Offset { inner, .. }) => inner.is_known_nondecreasing(),
            None => {
                self.values.windows(2).all(|w| w[0] <= w[1])
                    && self.values.first().map_or(true, |&v| v >= 0.0 || self.grid[0] == 0.0)
                    && (self.tail != TailModel::Zero || *self.values.last().unwrap() <= 0.0)
            }
            _ => false,
        }
    }

    /// Visits every candidate extreme value on `[a, b]` for functions that
    /// are monotone between known breakpoints. Returns false otherwise.
    fn visit_piece_extremes(&self, a: f64, b: f64, visit: &mut dyn FnMut(f64)) -> bool {
        match &self.closed_form {
            None => {
                let end = *self.grid.last().unwrap();
                visit(self.eval_unchecked(a));
                visit(self.eval_unchecked(b));
                let start = self.grid.partition_point(|&g| g <= a);
                for &g in self.grid[start..].iter().take_while(|&&g| g <= b) {
                    visit(self.eval_unchecked(g));
                    visit(self.eval_left_unchecked(g));
                }
                if b > end {
                    visit(self.tail_value());
                }
                true
            }
            Some(ClosedForm::PsiOverX(t)) => {
                visit_psi_over_x(t, a, b, visit);
                true
            }
            Some(ClosedForm::ExpWeightedPsi(t)) => {
                visit_psi_over_x(t, a.exp(), b.exp(), visit);
                true
            }
            Some(ClosedForm::Weighted { inner, rate }) => {
                let piecewise_constant_inner = match &inner.closed_form {
                    None => inner.kind == Kind::Step,
                    Some(ClosedForm::Constant(_)) => true,
                    _ => false,
                };
                if !piecewise_constant_inner {
                    return false;
                }
                visit((-rate * a).exp() * inner.eval_unchecked(a));
                visit((-rate * b).exp() * inner.eval_unchecked(b));
                if inner.closed_form.is_none() {
                    let start = inner.grid.partition_point(|&g| g <= a);
                    for &g in inner.grid[start..].iter().take_while(|&&g| g <= b) {
                        let w = (-rate * g).exp();
                        visit(w * inner.eval_unchecked(g));
                        visit(w * inner.eval_left_unchecked(g));
                    }
                }
                true
            }
            Some(ClosedForm::Offset { inner, shift }) => {
                inner.visit_piece_extremes(a, b, &mut |v| visit(v + shift))
            }
            Some(ClosedForm::Constant(c)) => {
                visit(*c);
                true
            }
            Some(ClosedForm::OneMinusExp | ClosedForm::IncreasingLog) => {
                visit(self.eval_unchecked(a));
                visit(self.eval_unchecked(b));
                true
            }
            Some(ClosedForm::Sine | ClosedForm::Custom { .. }) => false,
        }
    }

    fn check_window(&self, a: f64, b: f64) -> Result<()> {
        if !(a <= b) {
            return Err(Error::InvalidArgument(format!("empty window [{a}, {b}]")));
        }
        for x in [a, b] {
            if !self.supports(x) {
                return Err(Error::Support {
                    x,
                    end: self.support_end(),
                });
            }
        }
        Ok(())
    }

    /// inf of u over `[a, b]`.
    pub fn window_inf(&self, a: f64, b: f64) -> Result<f64> {
        self.check_window(a, b)?;
        let mut best = f64::INFINITY;
        if self.visit_piece_extremes(a, b, &mut |v| best = best.min(v)) {
            return Ok(best);
        }
        Ok(sampled_min(&|x| self.eval_unchecked(x), a, b))
    }

    /// sup of u over `[a, b]`.
    pub fn window_sup(&self, a: f64, b: f64) -> Result<f64> {
        self.check_window(a, b)?;
        let mut best = f64::NEG_INFINITY;
        if self.visit_piece_extremes(a, b, &mut |v| best = best.max(v)) {
            return Ok(best);
        }
        Ok(-sampled_min(&|x| -self.eval_unchecked(x), a, b))
    }

    /// ∫_a^b u(x) e^{−rate·x} dx; `b` may be +∞.
    pub fn integrate_exp(&self, rate: f64, a: f64, b: f64) -> Result<QuadResult> {
        if !(0.0 <= a && a <= b) || rate.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "integration needs 0 <= a <= b, got [{a}, {b}] at rate {rate}"
            )));
        }
        if a == b {
            return Ok(QuadResult::default());
        }
        match &self.closed_form {
            None => self.integrate_tabulated(rate, a, b),
            Some(form) => match form {
                ClosedForm::Constant(c) => {
                    let e = exp_mass(rate, a, b)?;
                    Ok(exact(c * e, c.abs() * e))
                }
                ClosedForm::PsiOverX(t) => integrate_psi_over_x(t, rate, a, b),
                ClosedForm::ExpWeightedPsi(t) => integrate_exp_weighted_psi(t, rate, a, b),
                ClosedForm::Weighted { inner, rate: mu } => inner.integrate_exp(rate + mu, a, b),
                ClosedForm::Offset { inner, shift } => {
                    let base = inner.integrate_exp(rate, a, b)?;
                    let e = exp_mass(rate, a, b)?;
                    Ok(QuadResult {
                        value: base.value + shift * e,
                        err: base.err + 2.0 * UNIT_ROUNDOFF * (base.value.abs() + (shift * e).abs()),
                        abs_value: base.abs_value + shift.abs() * e,
                    })
                }
                _ => self.integrate_by_quadrature(rate, a, b),
            },
        }
    }

    fn integrate_by_quadrature(&self, rate: f64, a: f64, b: f64) -> Result<QuadResult> {
        let f = |x: f64| self.eval_unchecked(x) * (-rate * x).exp();
        if b.is_finite() {
            return quad::integrate_with_breaks(f, &unit_scale_breaks(a, b), CLOSED_FORM_TOL);
        }
        if !(rate > 0.0) {
            return Err(Error::Divergence(format!(
                "∫ u over [{a}, ∞) with rate {rate} has no decaying kernel"
            )));
        }
        let m = a + 1.0 / rate;
        let head = quad::integrate_with_breaks(f, &unit_scale_breaks(a, m), CLOSED_FORM_TOL)?;
        // y = rate·x puts the kernel's decay length at 1.
        let g = |y: f64| self.eval_unchecked(y / rate) * (-y).exp();
        let r = quad::integrate_to_infinity(g, rate * m, 1.0, CLOSED_FORM_TOL)?;
        Ok(QuadResult {
            value: head.value + r.value / rate,
            err: head.err + r.err / rate,
            abs_value: head.abs_value + r.abs_value / rate,
        })
    }

    fn integrate_tabulated(&self, rate: f64, a: f64, b: f64) -> Result<QuadResult> {
        let grid = &self.grid;
        let end = *grid.last().unwrap();
        let mut acc = CompensatedSum::new();
        let start = grid.partition_point(|&g| g <= a).saturating_sub(1);
        for i in start..grid.len() - 1 {
            let (p, q) = (grid[i], grid[i + 1]);
            let lo = p.max(a);
            let hi = q.min(b);
            if lo >= hi {
                if p >= b {
                    break;
                }
                continue;
            }
            let term = match self.kind {
                Kind::Step => self.values[i] * exp_mass(rate, lo, hi)?,
                _ => {
                    let slope = (self.values[i + 1] - self.values[i]) / (q - p);
                    let v_lo = self.values[i] + slope * (lo - p);
                    let (m0, m1) = exp_moments(rate, hi - lo);
                    (-rate * lo).exp() * (v_lo * m0 + slope * m1)
                }
            };
            acc.add(term);
        }
        if b > end {
            match self.tail {
                TailModel::Zero => {}
                TailModel::ConstantLastValue => {
                    let v = self.tail_value();
                    if v != 0.0 {
                        acc.add(v * exp_mass(rate, end.max(a), b)?);
                    }
                }
                TailModel::Unsupported if b.is_infinite() => {
                    return Err(Error::Divergence(format!(
                        "tail beyond x = {end} is unsupported; the integral to ∞ cannot be closed"
                    )))
                }
                TailModel::Unsupported => return Err(Error::Support { x: b, end }),
            }
        }
        Ok(from_sum(&acc))
    }
}

fn exact(value: f64, abs_value: f64) -> QuadResult {
    QuadResult {
        value,
        err: 4.0 * UNIT_ROUNDOFF * abs_value,
        abs_value,
    }
}

fn from_sum(acc: &CompensatedSum) -> QuadResult {
    // Each term carries a few roundings of its own besides the summation.
    QuadResult {
        value: acc.value(),
        err: summation_bound(acc.terms(), acc.abs_sum()) + 8.0 * UNIT_ROUNDOFF * acc.abs_sum(),
        abs_value: acc.abs_sum(),
    }
}

/// ∫_a^b e^{−rate·x} dx.
pub(crate) fn exp_mass(rate: f64, a: f64, b: f64) -> Result<f64> {
    if b.is_infinite() {
        if rate > 0.0 {
            return Ok((-rate * a).exp() / rate);
        }
        return Err(Error::Divergence(format!("∫_{a}^∞ e^(-{rate} x) dx diverges")));
    }
    if rate == 0.0 {
        return Ok(b - a);
    }
    Ok((-rate * a).exp() * -(-rate * (b - a)).exp_m1() / rate)
}

/// (∫_0^Δ e^{−ry} dy, ∫_0^Δ y e^{−ry} dy), accurate for small rΔ.
fn exp_moments(rate: f64, delta: f64) -> (f64, f64) {
    let z = rate * delta;
    if z.abs() < 0.1 {
        // Power series in z of both moments, scaled by Δ and Δ².
        let (mut m0, mut m1) = (0.0, 0.0);
        let mut term = 1.0; // (−z)^k / k!
        for k in 0..20 {
            m0 += term / (k as f64 + 1.0);
            m1 += term / (k as f64 + 2.0);
            term *= -z / (k as f64 + 1.0);
        }
        (m0 * delta, m1 * delta * delta)
    } else {
        let e = (-z).exp();
        let m0 = -(-z).exp_m1() / rate;
        let m1 = (1.0 - e * (1.0 + z)) / (rate * rate);
        (m0, m1)
    }
}

fn psi_over_x(t: &PsiTable, v: f64) -> f64 {
    let end = t.limit() as f64;
    let v_eval = v.min(end);
    if v_eval < 1.0 {
        return 0.0;
    }
    t.psi_unchecked(v_eval) / v_eval
}

fn psi_over_x_left(t: &PsiTable, v: f64) -> f64 {
    let end = t.limit() as f64;
    if v > end {
        return psi_over_x(t, end);
    }
    if v < 1.0 {
        return 0.0;
    }
    let k = t.jumps().partition_point(|&n| (n as f64) < v);
    if k == 0 {
        0.0
    } else {
        t.psi_values()[k - 1] / v
    }
}

fn visit_psi_over_x(t: &PsiTable, a: f64, b: f64, visit: &mut dyn FnMut(f64)) {
    visit(psi_over_x(t, a));
    visit(psi_over_x(t, b));
    let end = t.limit() as f64;
    let jumps = t.jumps();
    let psi = t.psi_values();
    let start = jumps.partition_point(|&n| (n as f64) <= a);
    let stop = t.jumps_upto(b.min(end));
    for k in start..stop {
        let n = jumps[k] as f64;
        visit(psi[k] / n);
        visit(if k == 0 { 0.0 } else { psi[k - 1] / n });
    }
}

/// ∫_a^b (ψ(v)/v) e^{−rate·v} dv, exact per piece for rate 0 and by a
/// 15-point rule in ln v otherwise.
fn integrate_psi_over_x(t: &PsiTable, rate: f64, a: f64, b: f64) -> Result<QuadResult> {
    let end = t.limit() as f64;
    let jumps = t.jumps();
    let psi = t.psi_values();
    let mut acc = CompensatedSum::new();
    let mut quad_err = 0.0;
    let mut k = t.jumps_upto(a);
    let mut lo = a.max(1.0);
    let hi_total = b.min(end);
    while lo < hi_total {
        let next = if k < jumps.len() { (jumps[k] as f64).min(hi_total) } else { hi_total };
        let level = if k == 0 { 0.0 } else { psi[k - 1] };
        if level != 0.0 && next > lo {
            if rate == 0.0 {
                acc.add(level * (next / lo).ln());
            } else {
                let r = kronrod15(&|w: f64| (-rate * w.exp()).exp(), lo.ln(), next.ln());
                acc.add(level * r.value);
                quad_err += level * r.err;
            }
        }
        lo = next;
        k += 1;
    }
    if b > end {
        let v = psi_over_x(t, end);
        acc.add(v * exp_mass(rate, end.max(a), b)?);
    }
    let mut r = from_sum(&acc);
    r.err += quad_err;
    Ok(r)
}

/// ∫_a^b e^{−x} ψ(e^x) e^{−rate·x} dx, exact per piece.
fn integrate_exp_weighted_psi(t: &PsiTable, rate: f64, a: f64, b: f64) -> Result<QuadResult> {
    let end = (t.limit() as f64).ln();
    let jumps = t.jumps();
    let psi = t.psi_values();
    let mut acc = CompensatedSum::new();
    let mut k = t.jumps_upto(a.exp());
    let mut lo = a;
    let hi_total = b.min(end);
    while lo < hi_total {
        let next = if k < jumps.len() {
            (jumps[k] as f64).ln().min(hi_total)
        } else {
            hi_total
        };
        let level = if k == 0 { 0.0 } else { psi[k - 1] };
        if level != 0.0 && next > lo {
            acc.add(level * exp_mass(1.0 + rate, lo, next)?);
        }
        lo = next;
        k += 1;
    }
    if b > end {
        let v = psi_over_x(t, t.limit() as f64);
        acc.add(v * exp_mass(rate, end.max(a), b)?);
    }
    Ok(from_sum(&acc))
}

/// a, a+1, a+3, a+7, … up to b, so features of unit width near `a` are
/// not stepped over by the first Kronrod panel.
fn unit_scale_breaks(a: f64, b: f64) -> Vec<f64> {
    let mut breaks = vec![a];
    let mut w = 1.0;
    while a + w < b {
        breaks.push(a + w);
        w = 2.0 * w + 1.0;
    }
    breaks.push(b);
    breaks
}

/// Minimum of f on [a, b] from a uniform scan refined by golden-section
/// search around the best samples.
fn sampled_min(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return f(a);
    }
    let n = WINDOW_SAMPLES;
    let h = (b - a) / n as f64;
    let samples: Vec<f64> = (0..=n).map(|i| f(a + h * i as f64)).collect();
    let mut best = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mut local: Vec<usize> = (0..=n)
        .filter(|&i| {
            let left = if i == 0 { f64::INFINITY } else { samples[i - 1] };
            let right = if i == n { f64::INFINITY } else { samples[i + 1] };
            samples[i] <= left && samples[i] <= right
        })
        .collect();
    local.sort_by(|&i, &j| samples[i].total_cmp(&samples[j]));
    for &i in local.iter().take(8) {
        let lo = (a + h * (i as f64 - 1.0)).max(a);
        let hi = (a + h * (i as f64 + 1.0)).min(b);
        best = best.min(golden_min(f, lo, hi));
    }
    best
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// Builds a registry function. `psi` is required for the ψ-backed ids.
pub fn registry(id: &str, psi: Option<Arc<PsiTable>>) -> Result<SampledFunction> {
    let need_psi = || {
        psi.clone().ok_or_else(|| {
            Error::InvalidArgument(format!("registry function `{id}` needs a ψ table"))
        })
    };
    let form = match id {
        "constant" => ClosedForm::Constant(1.0),
        "one_minus_exp" => ClosedForm::OneMinusExp,
        "sine" => ClosedForm::Sine,
        "increasing_log" => ClosedForm::IncreasingLog,
        "psi_over_x" => ClosedForm::PsiOverX(need_psi()?),
        "exp_weighted_psi" => ClosedForm::ExpWeightedPsi(need_psi()?),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown registry id `{other}`; valid ids: {}",
                REGISTRY_IDS.join(", ")
            )))
        }
    };
    Ok(SampledFunction::closed(form))
}
