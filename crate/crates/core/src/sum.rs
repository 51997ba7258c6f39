//! Compensated summation with a running rounding-error bound.
//!
//! Sums of a few million logarithms lose several digits with naive
//! accumulation; the Neumaier variant of Kahan summation keeps the error at
//! `(2u + O(n u^2)) * sum |x_i|`, which this accumulator tracks explicitly.

/// Unit roundoff of binary64.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Neumaier (improved Kahan–Babuška) accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    terms: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += value.abs();
        self.terms += 1;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Sum of the magnitudes of all terms added so far.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// Bound on the summation rounding error alone (terms taken as exact).
    pub fn rounding_bound(&self) -> f64 {
        summation_bound(self.terms, self.abs_sum)
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Error bound of compensated summation of `terms` values whose magnitudes
/// sum to `abs_sum`.
#[inline]
pub fn summation_bound(terms: u64, abs_sum: f64) -> f64 {
    let u = UNIT_ROUNDOFF;
    (2.0 * u + 2.0 * terms as f64 * u * u) * abs_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let acc: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
        assert_eq!(acc.terms(), 4);
    }

    #[test]
    fn beats_naive_summation() {
        let terms: Vec<f64> = (1..=1_000_000).map(|n| 1.0 / (n as f64)).collect();
        let naive: f64 = terms.iter().sum();
        let acc: CompensatedSum = terms.iter().copied().collect();
        // Reverse-order naive summation is a much better reference than
        // forward order; the compensated result should be at least as close.
        let reference: f64 = {
            let mut acc = CompensatedSum::new();
            acc.extend(terms.iter().rev().copied());
            acc.value()
        };
        assert!((acc.value() - reference).abs() <= (naive - reference).abs());
        assert!((acc.value() - reference).abs() <= 2.0 * acc.rounding_bound());
    }
}
