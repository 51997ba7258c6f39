//! Independent oracles. Nothing here calls into the library.
#![allow(dead_code)]

/// Λ(n) by trial division, as (is_prime_power, ln p).
pub fn lambda_trial(n: u64) -> (bool, f64) {
    if n < 2 {
        return (false, 0.0);
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { (true, (p as f64).ln()) } else { (false, 0.0) };
        }
        p += 1;
    }
    (true, (n as f64).ln())
}

pub fn is_prime_trial(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// Kahan–Babuška sum in the order given.
pub fn kb_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// γ ≈ H_n − ln n − 1/(2n), accurate to 1/(12n²).
pub fn gamma_harmonic(n: u64) -> (f64, f64) {
    let h = kb_sum((1..=n).rev().map(|k| 1.0 / k as f64));
    let nf = n as f64;
    (h - nf.ln() - 0.5 / nf, 1.0 / (12.0 * nf * nf))
}

/// Σ_{n≤N} n^{−s} plus the midpoint of the integral-test tail bracket, and
/// the bracket half-width.
pub fn zeta_direct(s: f64, n: u64) -> (f64, f64) {
    let head = kb_sum((1..=n).rev().map(|k| (k as f64).powf(-s)));
    let nf = n as f64;
    let lo = (nf + 1.0).powf(1.0 - s) / (s - 1.0);
    let hi = nf.powf(1.0 - s) / (s - 1.0);
    (head + 0.5 * (lo + hi), 0.5 * (hi - lo))
}

/// −Σ_{n≤N} ln n · n^{−s} with the tail ∫_N^∞ ln x · x^{−s} dx bracketing
/// (the summand decreases for n ≥ e^{1/s}).
pub fn zeta_prime_direct(s: f64, n: u64) -> (f64, f64) {
    let head = kb_sum((2..=n).rev().map(|k| (k as f64).ln() * (k as f64).powf(-s)));
    let tail_int = |a: f64| a.powf(1.0 - s) * (a.ln() / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
    let nf = n as f64;
    let (lo, hi) = (tail_int(nf + 1.0), tail_int(nf));
    (-(head + 0.5 * (lo + hi)), 0.5 * (hi - lo))
}

/// (1/s) Σ_{n≤N} Λ(n) n^{−s} by trial division.
pub fn g_direct(s: f64, n: u64) -> f64 {
    kb_sum((2..=n).map(|k| {
        let (flag, l) = lambda_trial(k);
        if flag {
            l * (k as f64).powf(-s)
        } else {
            0.0
        }
    })) / s
}

/// Dense uniform-grid minimum of f on [a, b].
pub fn dense_min(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    (0..=n).map(|i| f(a + (b - a) * i as f64 / n as f64)).fold(f64::INFINITY, f64::min)
}
