//! Acceptance gate. Each test writes one PASS/FAIL line straight to stderr
//! (bypassing output capture) and then asserts.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tauberlab::extrapolate::{first_order_fit, richardson};
use tauberlab::psi::{psi, slow_decrease_profile, PsiTable};
use tauberlab::sieve::mangoldt_block;
use tauberlab::tauber::*;
use tauberlab::transforms::*;
use tauberlab::zeta::*;

const TABLE_LIMIT: u64 = 100_000_000;

fn table() -> Arc<PsiTable> {
    static T: OnceLock<Arc<PsiTable>> = OnceLock::new();
    T.get_or_init(|| Arc::new(PsiTable::build(TABLE_LIMIT).unwrap())).clone()
}

fn gamma_oracle() -> (f64, f64) {
    static G: OnceLock<(f64, f64)> = OnceLock::new();
    *G.get_or_init(|| gamma_harmonic(1_000_000))
}

fn report(n: u32, name: &str, ok: bool, detail: String) {
    let line = format!(
        "acceptance criterion {n:>2} [{}] {name}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(ok, "criterion {n} failed: {detail}");
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

#[test]
fn c01_mangoldt_matches_trial_division() {
    let start = Instant::now();
    let b = mangoldt_block(2, 1_000_001).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut bad = 0usize;
    let mut first_bad = None;
    for (i, &v) in b.lam().iter().enumerate() {
        let n = b.lo() + i as u64;
        let (flag, l) = lambda_trial(n);
        let ulps = 2.0 * f64::EPSILON * l.abs().max(f64::MIN_POSITIVE);
        if b.prime_power_flags()[i] != flag || (v - l).abs() > ulps {
            bad += 1;
            first_bad.get_or_insert(n);
        }
    }
    let ok = bad == 0 && elapsed < 10.0;
    report(
        1,
        "Λ(n) for n ≤ 10^6 vs trial division",
        ok,
        format!("{bad} mismatches (first {first_bad:?}), sieve {elapsed:.3}s (< 10s)"),
    );
}

#[test]
fn c02_psi_small_and_reordered() {
    let hand = kb_sum([3.0 * 2f64.ln(), 2.0 * 3f64.ln(), 5f64.ln(), 7f64.ln()]);
    let p10 = psi(10.0).unwrap().psi;
    let quoted = 7.832013907;

    // Per prime, descending: ln p times the number of powers p^k ≤ N.
    let n = 1_000_000u64;
    let primes: Vec<u64> = (2..=n).filter(|&k| is_prime_trial(k)).collect();
    let oracle = kb_sum(primes.iter().rev().map(|&p| {
        let mut k = 0u32;
        let mut q = p;
        while q <= n {
            k += 1;
            q = match q.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
        k as f64 * (p as f64).ln()
    }));
    let streamed = psi(n as f64).unwrap().psi;
    let tabled = table().psi(n as f64).unwrap().psi;
    let d10 = (p10 - hand).abs();
    let d6 = (streamed - oracle).abs().max((tabled - oracle).abs());
    report(
        2,
        "ψ(10) and ψ(10^6) vs independent summation",
        d10 <= 1e-9 && d6 <= 1e-6,
        format!(
            "|ψ(10) − hand| = {d10:.1e} (quoted literal differs by {:.2e}), |ψ(10^6) − reordered| = {d6:.1e}",
            (hand - quoted).abs()
        ),
    );
}

#[test]
fn c03_psi_over_x_tends_to_one() {
    let start = Instant::now();
    let streamed = psi(1e8).unwrap().psi;
    let elapsed = start.elapsed().as_secs_f64();
    let t = table();
    let rel = (streamed / 1e8 - 1.0).abs();
    let (e4, at4) = t.max_relative_error(1e3, 1e4).unwrap();
    let (e8, at8) = t.max_relative_error(1e7, 1e8).unwrap();
    let ok = rel < 1e-3 && e8 < e4 && elapsed < 60.0;
    report(
        3,
        "ψ(x)/x → 1 on a 10^8 sieve",
        ok,
        format!(
            "|ψ(10^8)/10^8 − 1| = {rel:.3e}, decade max {e4:.3e} at {at4} vs {e8:.3e} at {at8}, sieve {elapsed:.2}s (< 60s)"
        ),
    );
}

#[test]
fn c04_empirical_chebyshev_constant() {
    let c = table().chebyshev_constant(TABLE_LIMIT as f64).unwrap();
    report(
        4,
        "empirical Chebyshev constant",
        c.value > 1.0 && c.value < 1.05,
        format!("C_emp = {:.10} at x = {}", c.value, c.argmax),
    );
}

#[test]
fn c05_zeta_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let failures: Vec<f64> = (0..1000)
        .map(|_| 100.0 - 99.0 * rng.gen_range(0.0..1.0))
        .filter(|&s| !zeta_bounds_check(s))
        .collect();
    let z2 = zeta_series(2.0, 1e-11).unwrap();
    let d = (z2.value - PI * PI / 6.0).abs();
    report(
        5,
        "1/(s−1) ≤ ζ(s) ≤ 1/(s−1) + 1 and ζ(2)",
        failures.is_empty() && d <= 1e-10,
        format!("{} bound failures in 1000 samples {:?}, |ζ(2) − π²/6| = {d:.1e}", failures.len(), failures.first()),
    );
}

#[test]
fn c06_pole_remainder_and_gamma() {
    let (gamma, gamma_err) = gamma_oracle();
    let eps = log_grid(1e-6, 1e-1, 2);
    let ys: Vec<f64> = eps.iter().map(|&e| zeta_remainder(1.0 + e, 1e-13).unwrap().value).collect();
    let fit = first_order_fit(&eps, &ys, gamma).unwrap();
    let eps_max = eps.iter().copied().fold(0.0, f64::max);
    let k = fit.k.abs() + fit.k2.abs() * eps_max;
    let worst = eps
        .iter()
        .zip(&ys)
        .map(|(&e, &y)| ((y - gamma).abs() - gamma_err) / (k * e))
        .fold(0.0, f64::max);
    let g = EulerGamma::compute().unwrap();
    let dg = (g.gamma - gamma).abs();
    report(
        6,
        "R(s) − γ = O(s − 1) and γ by extrapolation",
        worst <= 1.0 && k < 1.0 && dg <= 1e-8,
        format!("fitted K = {k:.6}, max |R − γ|/(K(s−1)) = {worst:.4}, |γ_extrap − γ_oracle| = {dg:.1e}"),
    );
}

#[test]
fn c07_three_route_cross_check() {
    let t = table();
    let start = Instant::now();
    let rows = cross_check(&DEFAULT_CROSS_CHECK_GRID, &t, 1e-12, DEFAULT_SPREAD_TOL).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let summary: Vec<String> = rows
        .iter()
        .map(|r| format!("s={} spread {:.1e} (err {:.1e})", r.g.s, r.spread, r.summed_err))
        .collect();
    let ok = rows.iter().all(|r| r.ok && r.spread <= 1e-6 && r.spread <= r.summed_err) && elapsed < 30.0;
    report(
        7,
        "g(s) three-route agreement",
        ok,
        format!("{}; {elapsed:.2}s (< 30s)", summary.join(", ")),
    );
}

#[test]
fn c08_pole_limit() {
    let (gamma, gamma_err) = gamma_oracle();
    let target = -(1.0 + gamma);
    let s_values = [1.1, 1.01, 1.001, 1.0001];
    let scan = pole_limit_scan(&s_values).unwrap();
    let eps: Vec<f64> = scan.iter().map(|r| r.s - 1.0).collect();
    let hs: Vec<f64> = scan.iter().map(|r| r.h).collect();
    let fit = first_order_fit(&eps, &hs, target).unwrap();
    let k = fit.k.abs() + fit.k2.abs() * eps.iter().copied().fold(0.0, f64::max);
    let worst = scan
        .iter()
        .map(|r| ((r.h - target).abs() - gamma_err - r.abs_err_bound) / (k * (r.s - 1.0)))
        .fold(0.0, f64::max);
    let limit = richardson(&eps, &hs).unwrap();
    let d = (limit.value - target).abs();
    report(
        8,
        "g(s) − 1/(s−1) → −(1+γ)",
        worst <= 1.0 && d <= 1e-6,
        format!(
            "fitted K = {k:.4}, max |h + 1 + γ|/(K(s−1)) = {worst:.4}, extrapolated {:.12} (off by {d:.1e})",
            limit.value
        ),
    );
}

#[test]
fn c09_truncation_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..100 {
        let len = rng.gen_range(1..40);
        let mut grid = vec![0.0f64];
        for _ in 1..len {
            let next = grid.last().unwrap() + rng.gen_range(0.05..2.0);
            grid.push(next);
        }
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let t = rng.gen_range(0.02..5.0);
        // t ∫_0^{1/t} u summed piece by piece; the last value continues as the tail.
        let end = 1.0 / t;
        let oracle = t * kb_sum((0..len).map(|i| {
            let a = grid[i].min(end);
            let b = if i + 1 < len { grid[i + 1].min(end) } else { end };
            values[i] * (b - a).max(0.0)
        }));
        let u = SampledFunction::step(grid, values, TailModel::ConstantLastValue).unwrap();
        match (truncated_mean(&u, t), kernel_path(&u, t)) {
            (Ok(direct), Ok(kernel)) => {
                worst = worst.max((direct.value - kernel.value).abs());
                worst_oracle = worst_oracle.max((direct.value - oracle).abs());
            }
            _ => errors += 1,
        }
    }
    report(
        9,
        "truncation identity on random step functions",
        errors == 0 && worst <= 1e-9 && worst_oracle <= 1e-9,
        format!("100 cases, {errors} errors, max path gap {worst:.1e}, max gap to piecewise sum {worst_oracle:.1e}"),
    );
}

#[test]
fn c10_tauberian_theorem() {
    let one = registry("one_minus_exp", None).unwrap();
    let f = abel_laplace_mean(&one, 1e-4).unwrap().value;
    let u = one.eval(1e4).unwrap();
    let demo = tauber_demo(&one, 1e-4, 1e4, 1e-3).unwrap();
    let converges = matches!(demo.outcome, TauberOutcome::Converges { .. });

    let sine = registry("sine", None).unwrap();
    let sine_demo = tauber_demo(&sine, 1e-3, 1e4, 1e-3).unwrap();
    let fs = sine_demo.abel.value;
    let ok = (f - 1.0).abs() <= 1e-3
        && (u - 1.0).abs() <= 1e-3
        && converges
        && sine_demo.slow_decrease.verdict == SlowDecreaseVerdict::Violated
        && sine_demo.outcome == TauberOutcome::HypothesisViolated
        && fs.abs() <= 1e-3;
    report(
        10,
        "Tauberian theorem on 1 − e^{−x} and sin x",
        ok,
        format!(
            "1 − e^-x: f(1e-4) = {f:.8}, u(1e4) = {u:.8}, {:?}; sin: f(1e-3) = {fs:.2e}, slow decrease {:?}, {:?}",
            demo.outcome, sine_demo.slow_decrease.verdict, sine_demo.outcome
        ),
    );
}

#[test]
fn c11_wiener_ikehara_synthetic() {
    let alpha = SampledFunction::closed(ClosedForm::custom("2e^x(1+e^-x)", |x| 2.0 * (1.0 + (-x).exp()))).weighted(-1.0);
    let problem = WienerIkeharaProblem::new(alpha, 1.0, 2.0, 2.0).unwrap();
    let r = wiener_ikehara_verify(&problem, &[1.1, 1.01, 1.001], &[5.0, 10.0, 20.0]).unwrap();
    let phi20 = problem.phi().eval(20.0).unwrap();
    let dres = (r.residue_estimate - 2.0).abs();
    let dphi = (phi20 - 2.0).abs();
    report(
        11,
        "Wiener–Ikehara on a synthetic simple pole",
        dres <= 1e-4 && dphi <= 1e-3,
        format!("residue {:.8} (off {dres:.1e}), φ(20) = {phi20:.10} (off {dphi:.1e})", r.residue_estimate),
    );
}

#[test]
fn c12_psi_over_x_slow_decrease() {
    let t = table();
    let c = t.chebyshev_constant(TABLE_LIMIT as f64).unwrap().value;
    let u = registry("psi_over_x", Some(t.clone())).unwrap();
    let lambdas = [1.01, 1.02, 1.05, 1.1, 1.2, 1.5];
    let xs = log_grid(1e4, 1e7, 40);
    let profile = slow_decrease_profile(&u, &lambdas, &xs).unwrap();
    let worst = profile.worst_per_lambda();
    let margin = lambdas
        .iter()
        .zip(&worst)
        .map(|(&l, &w)| w + c * (1.0 - 1.0 / l))
        .fold(f64::INFINITY, f64::min);
    let inc = t.increment_ratio(1e7, 2.0).unwrap();
    let per_lambda: Vec<String> = lambdas.iter().zip(&worst).map(|(l, w)| format!("λ={l}: {w:.2e}")).collect();
    report(
        12,
        "slow decrease of ψ(x)/x",
        margin >= 0.0 && inc < 1e-2,
        format!(
            "worst inf {} against −C_emp(1 − 1/λ), min margin {margin:.2e}; |ψ(2x)−ψ(x)−x|/x at 10^7 = {inc:.2e}",
            per_lambda.join(", ")
        ),
    );
}
