use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use pslab_cli::config::{load_config_file, Command, RunConfig};

/// Piatetski-Shapiro prime counts, exponential sums and verification suites.
///
/// Values come from built-in defaults, then the --config file, then flags.
#[derive(Parser, Debug)]
#[command(name = "pslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Flat key=value file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Upper bound X of the counting range [default: 1000000].
    #[arg(long = "X", global = true)]
    x: Option<String>,
    /// Comma-separated exponents p/q in (1, 2) [default: 3/2].
    #[arg(long, global = true)]
    c: Option<String>,
    /// Inner exponent of the iterated sequence [default: 101/100].
    #[arg(long, global = true)]
    c1: Option<String>,
    /// Outer exponent of the iterated sequence [default: 101/100].
    #[arg(long, global = true)]
    c2: Option<String>,
    /// Grid resolution for `region`, in [2, 2000] [default: 200].
    #[arg(long, global = true)]
    resolution: Option<String>,
    /// Output format: csv or json [default: csv].
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file [default: stdout].
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads [default: available parallelism].
    #[arg(long, global = true, env = "PSLAB_THREADS")]
    threads: Option<String>,
    /// Random seed [default: 1].
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Also run brute-force oracles and report agreement.
    #[arg(long, global = true)]
    oracle: bool,
    /// Suite for `verify`: identities, lattice, kolesnik, exppairs, weylvdc, all [default: all].
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Number of random specs for `expsum-report`, at most 10000 [default: 100].
    #[arg(long, global = true)]
    count: Option<String>,
    /// Largest M and N for `expsum-report` [default: 256].
    #[arg(long = "max-side", global = true)]
    max_side: Option<String>,
    /// Exponent-pair search depth for `expsum-report` [default: 6].
    #[arg(long, global = true)]
    depth: Option<String>,
    /// ε in the bilinear bound for `expsum-report` [default: 0].
    #[arg(long, global = true)]
    eps: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Primes in one or several Piatetski-Shapiro sequences against the main term.
    PsCount,
    /// Primes in the iterated sequence floor(floor(n^c1)^c2) against the main term.
    IteratedCount,
    /// Admissibility grid over (c1, c2).
    Region,
    /// Property suites; exit code 1 if any check fails.
    Verify,
    /// Brute-force bilinear sums against the optimized exponent-pair bound.
    ExpsumReport,
}

impl Cli {
    fn flags(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let opts = [
            ("X", &self.x),
            ("c", &self.c),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("resolution", &self.resolution),
            ("format", &self.format),
            ("out", &self.out),
            ("threads", &self.threads),
            ("seed", &self.seed),
            ("suite", &self.suite),
            ("count", &self.count),
            ("max-side", &self.max_side),
            ("depth", &self.depth),
            ("eps", &self.eps),
        ];
        for (k, v) in opts {
            if let Some(v) = v {
                m.insert(k.to_string(), v.clone());
            }
        }
        if self.oracle {
            m.insert("oracle".into(), "true".into());
        }
        m
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::PsCount => Command::PsCount,
        Cmd::IteratedCount => Command::IteratedCount,
        Cmd::Region => Command::Region,
        Cmd::Verify => Command::Verify,
        Cmd::ExpsumReport => Command::ExpsumReport,
    };
    let file = match &cli.config {
        Some(p) => load_config_file(p)?,
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::new(command, file, cli.flags())?;
    let (table, ok) = pslab_cli::run(&cfg)?;
    let text = pslab_cli::render(&cfg, &table)?;
    match cfg.out() {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {path}"))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if !ok {
        for row in &table.rows {
            if row[2] != "1" {
                eprintln!("FAILED {}::{} (metric {})", row[0], row[1], row[3]);
            }
        }
    }
    Ok(ok)
}
