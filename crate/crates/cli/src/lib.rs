//! Command implementations behind the `pslab` binary.
//!
//! Every command produces a [`Table`]; rendering to CSV or JSON is separate so
//! that both formats carry the same numeric strings.

pub mod config;
pub mod output;
pub mod verify;

use anyhow::{ensure, Context, Result};
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pslab::exp_sums::{self, BilinearSumSpec};
use pslab::ps::{self, IteratedSpec, PsFamilySpec};
use pslab::sieve::{self, SieveConfig};
use pslab::RationalExponent;

pub use config::{Command, Format, RunConfig};
pub use output::{fmt_ratio, fmt_real, Table};

/// Largest `X` accepted by the counting commands.
pub const MAX_COUNT_X: u64 = 1_000_000_000;
/// Largest `X` for the brute-force oracle columns.
pub const MAX_ORACLE_X: u64 = 20_000_000;
/// Largest number of random specs in an exponential-sum report.
pub const MAX_REPORT_COUNT: u64 = 10_000;

/// `10^2, 10^3, …` below `x`, then `x` itself.
pub fn x_ladder(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 100u64;
    while p < x {
        out.push(p);
        p = p.saturating_mul(10);
    }
    out.push(x);
    out
}

pub fn parse_exponent_list(s: &str) -> Result<Vec<RationalExponent>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<RationalExponent>()
                .with_context(|| format!("bad exponent {t:?}"))
        })
        .collect()
}

/// Primes up to `x` via a plain sieve, for the oracle columns.
fn oracle_primes(x: u64) -> Vec<bool> {
    sieve::simple_sieve(x)
}

/// Sequence values `floor(n^c) <= x`. The float value decides unless it lies
/// within `1e−9` of an integer, in which case `k^q <= n^p` is compared in
/// big integers.
fn oracle_sequence(x: u64, c: RationalExponent) -> Vec<u64> {
    let (p, q) = (c.numerator(), c.denominator());
    let floor_pow = |n: u64| -> u64 {
        let v = (n as f64).powf(p as f64 / q as f64);
        let k = v.round();
        if (v - k).abs() > 1e-9 * v.max(1.0) {
            return v.floor() as u64;
        }
        let k = k as u64;
        let np = BigUint::from(n).pow(p);
        if BigUint::from(k).pow(q) <= np {
            k
        } else {
            k - 1
        }
    };
    (1..).map(floor_pow).take_while(|&v| v <= x).collect()
}

fn oracle_intersection_count(x: u64, cs: &[RationalExponent]) -> Result<u64> {
    ensure!(x <= MAX_ORACLE_X, "oracle cap {MAX_ORACLE_X} exceeded");
    let primes = oracle_primes(x);
    let mut hits = vec![0u8; x as usize + 1];
    for &c in cs {
        let mut seen = vec![false; x as usize + 1];
        for v in oracle_sequence(x, c) {
            seen[v as usize] = true;
        }
        for (h, s) in hits.iter_mut().zip(seen) {
            *h += s as u8;
        }
    }
    Ok((0..=x as usize).filter(|&m| primes[m] && hits[m] as usize == cs.len()).count() as u64)
}

fn oracle_iterated_count(x: u64, c1: RationalExponent, c2: RationalExponent) -> Result<u64> {
    ensure!(x <= MAX_ORACLE_X, "oracle cap {MAX_ORACLE_X} exceeded");
    let primes = oracle_primes(x);
    let reach = (x as f64 + 1.0).powf(c2.recip().to_f64()).ceil() as u64 + 1;
    let inner = oracle_sequence(reach, c1);
    let outer = oracle_sequence(x, c2);
    let mut seen = vec![false; x as usize + 1];
    // floor(k^c2) for k in the inner sequence; outer[i] = floor((i+1)^c2)
    for k in inner {
        match outer.get(k as usize - 1) {
            Some(&v) => seen[v as usize] = true,
            None => break,
        }
    }
    Ok((0..=x as usize).filter(|&m| primes[m] && seen[m]).count() as u64)
}

fn count_columns(oracle: bool) -> Vec<&'static str> {
    let mut cols = vec!["X", "exact_count", "main_term", "ratio"];
    if oracle {
        cols.extend(["oracle_count", "oracle_match"]);
    }
    cols
}

pub fn cmd_ps_count(cfg: &RunConfig) -> Result<Table> {
    let x = cfg.get_u64("X")?.unwrap_or(1_000_000);
    ensure!((2..=MAX_COUNT_X).contains(&x), "X = {x} must lie in [2, {MAX_COUNT_X}]");
    let cs = parse_exponent_list(cfg.get("c").unwrap_or("3/2"))?;
    let spec = PsFamilySpec::new(cs.clone())?;
    let object = if cs.len() == 1 {
        "single-sequence-prime-count"
    } else {
        "intersection-prime-count"
    };
    let mut table = Table::new(object, &count_columns(cfg.oracle()));
    let sieve_cfg = SieveConfig::default();
    for xi in x_ladder(x) {
        let exact = ps::intersection_prime_count(xi, &spec, &sieve_cfg)?;
        let main = if cs.len() == 1 {
            ps::single_main_term(xi as f64, cs[0])
        } else {
            ps::intersection_main_term(xi as f64, &spec)?
        };
        let mut row = vec![xi.to_string(), exact.to_string(), fmt_real(main), fmt_ratio(exact as f64 / main)];
        if cfg.oracle() {
            let o = oracle_intersection_count(xi, &cs)?;
            row.push(o.to_string());
            row.push(((o == exact) as u8).to_string());
        }
        table.push(row);
    }
    Ok(table)
}

pub fn cmd_iterated_count(cfg: &RunConfig) -> Result<Table> {
    let x = cfg.get_u64("X")?.unwrap_or(1_000_000);
    ensure!((3..=MAX_COUNT_X).contains(&x), "X = {x} must lie in [3, {MAX_COUNT_X}]");
    let c1: RationalExponent = cfg.get("c1").unwrap_or("101/100").parse()?;
    let c2: RationalExponent = cfg.get("c2").unwrap_or("101/100").parse()?;
    let spec = IteratedSpec::new(c1, c2)?;
    let mut table = Table::new("iterated-prime-count", &count_columns(cfg.oracle()));
    let sieve_cfg = SieveConfig::default();
    for xi in x_ladder(x) {
        let exact = ps::iterated_prime_count(xi, &spec, &sieve_cfg)?;
        let main = ps::iterated_main_term(xi as f64, &spec)?;
        let mut row = vec![xi.to_string(), exact.to_string(), fmt_real(main), fmt_ratio(exact as f64 / main)];
        if cfg.oracle() {
            let o = oracle_iterated_count(xi, c1, c2)?;
            row.push(o.to_string());
            row.push(((o == exact) as u8).to_string());
        }
        table.push(row);
    }
    Ok(table)
}

fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn cmd_region(cfg: &RunConfig) -> Result<Table> {
    let res = cfg.get_u64("resolution")?.unwrap_or(200);
    ensure!((2..=2000).contains(&res), "resolution = {res} must lie in [2, 2000]");
    let mut table = Table::new("iterated-admissible-region", &["c1", "c2", "admissible"]);
    for p in ps::region_grid(res)? {
        table.push(vec![
            fmt_real(ratio_f64(&p.c1)),
            fmt_real(ratio_f64(&p.c2)),
            (p.admissible as u8).to_string(),
        ]);
    }
    Ok(table)
}

pub fn cmd_expsum_report(cfg: &RunConfig) -> Result<Table> {
    let count = cfg.get_u64("count")?.unwrap_or(100);
    ensure!((1..=MAX_REPORT_COUNT).contains(&count), "count = {count} must lie in [1, {MAX_REPORT_COUNT}]");
    let max_side = cfg.get_f64("max-side")?.unwrap_or(256.0);
    ensure!(max_side > 2.0, "max-side must exceed 2");
    let depth = cfg.get_u64("depth")?.unwrap_or(6) as usize;
    let eps = cfg.get_f64("eps")?.unwrap_or(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let specs: Vec<BilinearSumSpec> = (0..count).map(|_| BilinearSumSpec::random(&mut rng, max_side)).collect();
    let report = exp_sums::empirical_ratio_report(&specs, depth, eps)?;
    let mut table = Table::new(
        "bilinear-sum-empirical-ratio",
        &[
            "index",
            "M",
            "N",
            "abs_S",
            "trivial_bound",
            "delta",
            "bound",
            "kappa",
            "lambda",
            "ratio",
            "degenerate_delta",
        ],
    );
    for (i, r) in report.rows.iter().enumerate() {
        let (k, l) = (r.pair.kappa_f64(), r.pair.lambda_f64());
        table.push(vec![
            i.to_string(),
            fmt_real(r.m),
            fmt_real(r.n),
            fmt_real(r.abs_s),
            fmt_real(r.trivial_bound),
            fmt_real(r.delta),
            fmt_real(r.bound),
            fmt_real(k),
            fmt_real(l),
            fmt_ratio(r.ratio),
            (r.degenerate_delta as u8).to_string(),
        ]);
    }
    Ok(table)
}

/// Runs the configured command on a pool of `cfg.threads()` workers.
/// Returns the table and whether every verification check passed.
pub fn run(cfg: &RunConfig) -> Result<(Table, bool)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads())
        .build()
        .context("building the worker pool")?;
    pool.install(|| match cfg.command {
        Command::PsCount => cmd_ps_count(cfg).map(|t| (t, true)),
        Command::IteratedCount => cmd_iterated_count(cfg).map(|t| (t, true)),
        Command::Region => cmd_region(cfg).map(|t| (t, true)),
        Command::ExpsumReport => cmd_expsum_report(cfg).map(|t| (t, true)),
        Command::Verify => {
            let suite: verify::Suite = cfg.get("suite").unwrap_or("all").parse()?;
            let t = verify::run_suite(suite, cfg.seed())?;
            let ok = verify::all_passed(&t);
            Ok((t, ok))
        }
    })
}

/// Renders in the configured format.
pub fn render(cfg: &RunConfig, table: &Table) -> Result<String> {
    match cfg.format() {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => table.to_json(cfg.command.name(), &cfg.semantic_params()),
    }
}
