mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use tauberlab::extrapolate::{first_order_fit, richardson};
use tauberlab::format::sig15;
use tauberlab::psi::{slow_decrease_profile, PsiTable, DEFAULT_PSI_LIMIT};
use tauberlab::sieve::{BlockCache, MangoldtSieve};
use tauberlab::tauber::{
    cesaro_mean, registry, tauber_demo, TauberOutcome, DEFAULT_LAMBDAS, REGISTRY_IDS,
};
use tauberlab::transforms::{
    cross_check, g_all_routes, pole_limit_scan, Route, DEFAULT_CROSS_CHECK_GRID, DEFAULT_SPREAD_TOL,
};
use tauberlab::zeta::{euler_gamma, zeta, zeta_prime, zeta_remainder};

use output::Table;

const DEFAULT_POLE_GRID: [f64; 4] = [1.1, 1.01, 1.001, 1.0001];
const DEFAULT_ZETA_GRID: [f64; 5] = [1.01, 1.1, 1.5, 2.0, 3.0];
const TAUBER_PROBE: f64 = 1e4;

/// Numerical experiments around ψ(x) ~ x and its Tauberian proof.
#[derive(Debug, Parser)]
#[command(name = "tauberlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Sieve bound.
    #[arg(long, global = true, default_value_t = DEFAULT_PSI_LIMIT)]
    limit: u64,

    /// Single s value; overrides --s-grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<f64>,

    /// Comma-separated s values.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    s_grid: Option<Vec<f64>>,

    /// Comma-separated λ values for slow-decrease scans.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    lambda_grid: Option<Vec<f64>>,

    /// Comma-separated x values for slow-decrease scans.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    x_grid: Option<Vec<f64>>,

    /// Tolerance; its meaning depends on the command.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prime powers n ≤ limit with Λ(n). Blocks are cached under $TAUBER_CACHE_DIR when set.
    Sieve,
    /// ψ table on the default checkpoint grid.
    Psi,
    /// ψ(x)/x at decade points 10³…limit.
    PntTable,
    /// ζ, ζ′ and ζ(s) − 1/(s−1) with error bounds. --tol is relative to the pole size.
    Zeta,
    /// g(s) by the Dirichlet, Mellin and ζ-ratio routes.
    G,
    /// h(s) = g(s) − 1/(s−1) near the pole, extrapolated to s = 1. --tol bounds the deviation from −(1+γ).
    PoleLimit,
    /// Three-route agreement of g(s). --tol is the allowed spread.
    CrossCheck,
    /// Slow-decrease profile and doubling increments of ψ(x)/x.
    SlowdecPsi,
    /// Abelian and Tauberian sides for a registry function.
    TauberDemo {
        /// Registry id.
        name: String,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Runtime(anyhow::Error),
}

impl From<tauberlab::Error> for Failure {
    fn from(e: tauberlab::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if cli.limit < 1000 {
        return Err(Failure::Usage(format!("--limit must be at least 1000, got {}", cli.limit)));
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
    }
    match &cli.command {
        Command::Sieve => cmd_sieve(cli),
        Command::Psi => cmd_psi(cli),
        Command::PntTable => cmd_pnt_table(cli),
        Command::Zeta => cmd_zeta(cli),
        Command::G => cmd_g(cli),
        Command::PoleLimit => cmd_pole_limit(cli),
        Command::CrossCheck => cmd_cross_check(cli),
        Command::SlowdecPsi => cmd_slowdec_psi(cli),
        Command::TauberDemo { name } => cmd_tauber_demo(cli, name),
    }
}

fn s_values(cli: &Cli, default: &[f64]) -> std::result::Result<Vec<f64>, Failure> {
    let grid = match (cli.s, &cli.s_grid) {
        (Some(s), _) => vec![s],
        (None, Some(g)) => g.clone(),
        (None, None) => default.to_vec(),
    };
    if grid.is_empty() {
        return Err(Failure::Usage("s grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|s| !(**s > 1.0 && s.is_finite())) {
        return Err(Failure::Usage(format!("every s must be a finite value > 1, got {bad}")));
    }
    Ok(grid)
}

fn lambda_values(cli: &Cli) -> std::result::Result<Vec<f64>, Failure> {
    let grid = cli.lambda_grid.clone().unwrap_or_else(|| {
        let mut v = DEFAULT_LAMBDAS.to_vec();
        v.sort_by(f64::total_cmp);
        v
    });
    if grid.is_empty() {
        return Err(Failure::Usage("λ grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|l| !(**l > 1.0 && l.is_finite())) {
        return Err(Failure::Usage(format!("every λ must be a finite value > 1, got {bad}")));
    }
    Ok(grid)
}

fn build_table(cli: &Cli) -> std::result::Result<Arc<PsiTable>, Failure> {
    Ok(Arc::new(PsiTable::build(cli.limit)?))
}

fn cmd_sieve(cli: &Cli) -> Outcome {
    let sieve = MangoldtSieve::new(cli.limit)?;
    let cache = BlockCache::from_env();
    let mut table = Table::new(cli, &["n", "lambda"])?;
    for (lo, hi) in sieve.segments(2, cli.limit + 1) {
        let block = match &cache {
            Some(c) => c.load_or_compute(&sieve, lo, hi)?,
            None => sieve.block(lo, hi)?,
        };
        for (n, lam) in block.prime_powers() {
            table.row([n.to_string(), sig15(lam)])?;
        }
    }
    table.finish()
}

fn cmd_psi(cli: &Cli) -> Outcome {
    let t = build_table(cli)?;
    let mut table = Table::new(cli, &["x", "psi", "psi_over_x", "err"])?;
    for c in t.checkpoints() {
        table.row([sig15(c.x), sig15(c.psi), sig15(c.psi / c.x), sig15(c.err)])?;
    }
    table.finish()
}

fn cmd_pnt_table(cli: &Cli) -> Outcome {
    let t = build_table(cli)?;
    let mut xs = Vec::new();
    let mut x = 1000u64;
    while x <= cli.limit {
        xs.push(x);
        x = match x.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    if xs.last() != Some(&cli.limit) {
        xs.push(cli.limit);
    }
    let mut table = Table::new(cli, &["x", "psi", "psi_over_x", "rel_err"])?;
    for x in xs {
        let c = t.psi(x as f64)?;
        let ratio = c.psi / c.x;
        table.row([sig15(c.x), sig15(c.psi), sig15(ratio), sig15((ratio - 1.0).abs())])?;
    }
    table.finish()
}

fn cmd_zeta(cli: &Cli) -> Outcome {
    let grid = s_values(cli, &DEFAULT_ZETA_GRID)?;
    let tol = cli.tol.unwrap_or(1e-12);
    let mut table = Table::new(
        cli,
        &["s", "zeta", "zeta_err", "zeta_prime", "zeta_prime_err", "remainder", "remainder_err"],
    )?;
    for s in grid {
        let pole = 1.0 / (s - 1.0);
        let z = zeta(s, tol * pole.max(1.0))?;
        let dz = zeta_prime(s, tol * (pole * pole).max(1.0))?;
        let r = zeta_remainder(s, tol)?;
        table.row([
            sig15(s),
            sig15(z.value),
            sig15(z.err),
            sig15(dz.value),
            sig15(dz.err),
            sig15(r.value),
            sig15(r.err),
        ])?;
    }
    table.finish()
}

fn cmd_g(cli: &Cli) -> Outcome {
    let grid = s_values(cli, &DEFAULT_CROSS_CHECK_GRID)?;
    let t = build_table(cli)?;
    let tol = cli.tol.unwrap_or(1e-12);
    let mut table = Table::new(cli, &["s", "route", "value", "err"])?;
    for s in grid {
        let g = g_all_routes(s, &t, tol)?;
        for (route, v) in &g.routes {
            table.row([sig15(s), route.to_string(), sig15(v.value), sig15(v.err)])?;
        }
    }
    table.finish()
}

fn cmd_pole_limit(cli: &Cli) -> Outcome {
    let grid = s_values(cli, &DEFAULT_POLE_GRID)?;
    let tol = cli.tol.unwrap_or(1e-6);
    let records = pole_limit_scan(&grid)?;
    let mut table = Table::new(cli, &["s", "h", "target", "abs_err_bound", "route_spread"])?;
    for r in &records {
        table.row([sig15(r.s), sig15(r.h), sig15(r.target), sig15(r.abs_err_bound), sig15(r.route_spread)])?;
    }
    table.finish()?;

    if records.len() < 2 {
        eprintln!("single point: h({}) = {}, no extrapolation", sig15(records[0].s), sig15(records[0].h));
        return Ok(());
    }
    let target = -(1.0 + euler_gamma());
    let eps: Vec<f64> = records.iter().map(|r| r.s - 1.0).collect();
    let hs: Vec<f64> = records.iter().map(|r| r.h).collect();
    let limit = richardson(&eps, &hs)?;
    let fit = first_order_fit(&eps, &hs, target)?;
    let deviation = (limit.value - target).abs();
    eprintln!(
        "extrapolated limit {} (estimate err {}), target −(1+γ) = {}, deviation {}, K = {}",
        sig15(limit.value),
        sig15(limit.err_estimate),
        sig15(target),
        sig15(deviation),
        sig15(fit.k)
    );
    if deviation > tol {
        return Err(Failure::Check(format!("extrapolated limit off by {} > {}", sig15(deviation), sig15(tol))));
    }
    Ok(())
}

fn cmd_cross_check(cli: &Cli) -> Outcome {
    let grid = s_values(cli, &DEFAULT_CROSS_CHECK_GRID)?;
    let spread_tol = cli.tol.unwrap_or(DEFAULT_SPREAD_TOL);
    let t = build_table(cli)?;
    let rows = cross_check(&grid, &t, 1e-12, spread_tol)?;
    let mut table = Table::new(
        cli,
        &["s", "g_dirichlet", "g_mellin", "g_zeta_ratio", "spread", "summed_err", "cutoff", "cap_bound", "ok"],
    )?;
    for r in &rows {
        let route = |k: Route| r.g.routes.get(&k).map_or(f64::NAN, |v| v.value);
        table.row([
            sig15(r.g.s),
            sig15(route(Route::Dirichlet)),
            sig15(route(Route::Mellin)),
            sig15(route(Route::ZetaRatio)),
            sig15(r.spread),
            sig15(r.summed_err),
            sig15(r.cutoff),
            r.cap_bound.to_string(),
            r.ok.to_string(),
        ])?;
        if r.cap_bound {
            eprintln!(
                "warning: s = {}: truncation capped at the sieve limit {}; errors are empirical",
                sig15(r.g.s),
                cli.limit
            );
        }
    }
    table.finish()?;
    let bad: Vec<String> = rows.iter().filter(|r| !r.ok).map(|r| sig15(r.g.s)).collect();
    if !bad.is_empty() {
        return Err(Failure::Check(format!("routes disagree at s = {}", bad.join(", "))));
    }
    Ok(())
}

fn cmd_slowdec_psi(cli: &Cli) -> Outcome {
    let lambdas = lambda_values(cli)?;
    let t = build_table(cli)?;
    let limit = cli.limit as f64;
    let xs = match &cli.x_grid {
        Some(xs) if xs.is_empty() => return Err(Failure::Usage("x grid is empty".into())),
        Some(xs) => xs.clone(),
        None => {
            let mut xs = Vec::new();
            let mut x = 1e4;
            while x <= limit {
                xs.push(x);
                x *= 10.0;
            }
            xs
        }
    };
    if let Some(bad) = xs.iter().find(|x| !(**x >= 1.0)) {
        return Err(Failure::Usage(format!("every x must be ≥ 1, got {bad}")));
    }
    let c = t.chebyshev_constant(limit)?;
    eprintln!("C_emp = {} at x = {}", sig15(c.value), c.argmax);
    let u = registry("psi_over_x", Some(t.clone()))?;
    let mut table = Table::new(cli, &["lambda", "x", "profile", "bound", "increment_ratio", "ok"])?;
    let mut violations = Vec::new();
    for &lambda in &lambdas {
        let fitting: Vec<f64> = xs.iter().copied().filter(|&x| lambda * x <= limit).collect();
        if fitting.is_empty() {
            continue;
        }
        let profile = slow_decrease_profile(&u, &[lambda], &fitting)?;
        let bound = -c.value * (1.0 - 1.0 / lambda);
        for (&x, &p) in fitting.iter().zip(&profile.inf_values[0]) {
            let inc = t.increment_ratio(x, lambda)?;
            let ok = p >= bound;
            if !ok {
                violations.push(format!("λ = {}, x = {}", sig15(lambda), sig15(x)));
            }
            table.row([sig15(lambda), sig15(x), sig15(p), sig15(bound), sig15(inc), ok.to_string()])?;
        }
    }
    table.finish()?;
    if !violations.is_empty() {
        return Err(Failure::Check(format!("profile below bound at {}", violations.join("; "))));
    }
    Ok(())
}

fn cmd_tauber_demo(cli: &Cli, name: &str) -> Outcome {
    if !REGISTRY_IDS.contains(&name) {
        return Err(Failure::Usage(format!(
            "unknown function `{name}`; valid ids: {}",
            REGISTRY_IDS.join(", ")
        )));
    }
    let tol = cli.tol.unwrap_or(1e-3);
    let psi = if name.contains("psi") { Some(build_table(cli)?) } else { None };
    // ψ-backed functions are probed as far out as the sieve allows.
    let x_probe = match name {
        "psi_over_x" => 10f64.powi((cli.limit as f64 / 1.5).log10().floor() as i32),
        "exp_weighted_psi" => (cli.limit as f64 / 1.5).ln().floor(),
        _ => TAUBER_PROBE,
    };
    let t_probe = 1.0 / x_probe;
    let x_grid: Vec<f64> = (0..4).map(|i| x_probe * 10f64.powi(i - 3)).collect();
    let u = registry(name, psi)?;
    let demo = tauber_demo(&u, t_probe, x_probe, tol)?;

    let mut table = Table::new(cli, &["quantity", "parameter", "value", "err"])?;
    for &x in &x_grid {
        let t = 1.0 / x;
        let f = tauberlab::tauber::abel_laplace_mean(&u, t)?;
        table.row(["abel_mean".into(), sig15(t), sig15(f.value), sig15(f.err)])?;
    }
    for &x in &x_grid {
        let s = cesaro_mean(&u, x)?;
        table.row(["cesaro_mean".into(), sig15(x), sig15(s.value), sig15(s.err)])?;
    }
    for &x in &x_grid {
        table.row(["u".into(), sig15(x), sig15(u.eval(x)?), "0".into()])?;
    }
    for row in &demo.slow_decrease.rows {
        table.row(["slow_decrease_inf".into(), sig15(row.lambda), sig15(row.inf_form), "0".into()])?;
    }
    table.finish()?;

    match demo.outcome {
        TauberOutcome::Converges { limit } => {
            eprintln!("verdict: converges, limit {}", sig15(limit));
            Ok(())
        }
        TauberOutcome::HypothesisViolated => {
            eprintln!("verdict: hypothesis-violated (slow decrease fails; no conclusion on u)");
            Ok(())
        }
        TauberOutcome::Inconclusive => Err(Failure::Check(format!(
            "inconclusive: f({}) = {} but u({}) = {}",
            sig15(t_probe),
            sig15(demo.abel.value),
            sig15(x_probe),
            sig15(demo.u_at_x)
        ))),
    }
}
