//! Richardson (polynomial) extrapolation to h → 0 and first-order rate fits.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// |P_n(0) − P_{n−1}(0)|: change from dropping the coarsest point.
    pub err_estimate: f64,
}

/// Extrapolates samples y(h) to h = 0 with the interpolating polynomial
/// (Neville's scheme). Points are used finest-last in the order given.
pub fn richardson(hs: &[f64], ys: &[f64]) -> Result<Extrapolation> {
    if hs.len() != ys.len() || hs.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "extrapolation needs matching nonempty samples, got {} and {}",
            hs.len(),
            ys.len()
        )));
    }
    let n = hs.len();
    for i in 0..n {
        for j in 0..i {
            if hs[i] == hs[j] {
                return Err(Error::InvalidArgument(format!("duplicate abscissa {}", hs[i])));
            }
        }
    }
    // Level k of the tableau: p[i] interpolates points i..=i+k at 0.
    let mut p = ys.to_vec();
    let mut previous = p[n - 1];
    for k in 1..n {
        previous = p[n - k];
        for i in 0..n - k {
            let (hi, hk) = (hs[i], hs[i + k]);
            p[i] = (hk * p[i] - hi * p[i + 1]) / (hk - hi);
        }
    }
    let value = p[0];
    // `previous` is the level n−2 value built from points 1..n (coarsest dropped).
    let err_estimate = if n > 1 { (value - previous).abs() } else { f64::INFINITY };
    Ok(Extrapolation { value, err_estimate })
}

/// Smallest K with |y_i − target| ≤ K·h_i at every sample.
pub fn linear_rate_constant(hs: &[f64], ys: &[f64], target: f64) -> f64 {
    hs.iter()
        .zip(ys)
        .map(|(&h, &y)| (y - target).abs() / h)
        .fold(0.0, f64::max)
}

/// Least-squares fit of y − target ≈ k·h + k2·h² through the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderFit {
    pub k: f64,
    pub k2: f64,
}

pub fn first_order_fit(hs: &[f64], ys: &[f64], target: f64) -> Result<FirstOrderFit> {
    if hs.len() != ys.len() || hs.len() < 2 {
        return Err(Error::InvalidArgument("a first-order fit needs at least two samples".into()));
    }
    // Dividing by h turns this into a straight-line fit of (y − target)/h
    // against h, which keeps small h from being swamped.
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.to_vec();
    let zs: Vec<f64> = hs.iter().zip(ys).map(|(&h, &y)| (y - target) / h).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let mz = zs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("first-order fit needs distinct abscissae".into()));
    }
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let k2 = sxz / sxx;
    Ok(FirstOrderFit { k: mz - k2 * mx, k2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let hs = [0.1, 0.01, 0.001, 1e-4];
        let ys: Vec<f64> = hs.iter().map(|h| 3.0 - 2.0 * h + 5.0 * h * h - h * h * h).collect();
        let e = richardson(&hs, &ys).unwrap();
        assert!((e.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn removes_leading_error_terms() {
        // (1 + h)^{1/h} → e.
        let hs = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let ys: Vec<f64> = hs.iter().map(|&h: &f64| ((1.0 + h).ln() / h).exp()).collect();
        let e = richardson(&hs, &ys).unwrap();
        assert!((e.value - std::f64::consts::E).abs() < 1e-9);
        assert!(e.err_estimate < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(richardson(&[], &[]).is_err());
        assert!(richardson(&[0.1, 0.1], &[1.0, 2.0]).is_err());
        assert!(richardson(&[0.1], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn first_order() {
        let hs = [0.1, 0.01, 0.001];
        let ys: Vec<f64> = hs.iter().map(|h| 2.0 + 3.0 * h - 4.0 * h * h).collect();
        let f = first_order_fit(&hs, &ys, 2.0).unwrap();
        assert!((f.k - 3.0).abs() < 1e-10 && (f.k2 + 4.0).abs() < 1e-8);
        assert!(first_order_fit(&[0.1], &[1.0], 0.0).is_err());
    }

    #[test]
    fn rate_constant() {
        let k = linear_rate_constant(&[0.1, 0.01], &[1.2, 1.01], 1.0);
        assert!((k - 2.0).abs() < 1e-12);
    }
}
