//! Run configuration: a flat `key=value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    PsCount,
    IteratedCount,
    Region,
    Verify,
    ExpsumReport,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PsCount => "ps-count",
            Command::IteratedCount => "iterated-count",
            Command::Region => "region",
            Command::Verify => "verify",
            Command::ExpsumReport => "expsum-report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => bail!("unknown format {s:?} (expected csv or json)"),
        }
    }
}

/// Keys accepted in config files and as flags.
pub const KNOWN_KEYS: &[&str] = &[
    "X",
    "c",
    "c1",
    "c2",
    "resolution",
    "format",
    "out",
    "threads",
    "seed",
    "oracle",
    "suite",
    "count",
    "max-side",
    "depth",
    "eps",
];

/// Keys that describe where and how a run executes rather than what it
/// computes; they are left out of the emitted metadata.
const PLUMBING_KEYS: &[&str] = &["out", "threads", "format"];

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped and a
/// leading `--` on keys is tolerated.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, got {line:?}", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if !KNOWN_KEYS.contains(&k) {
            bail!("line {}: unknown key {k:?}", i + 1);
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config_text(&text).with_context(|| format!("parsing {}", path.display()))
}

impl RunConfig {
    /// File values first, then flag values on top.
    pub fn new(command: Command, file: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Result<Self> {
        let mut params = file;
        params.extend(flags);
        let cfg = Self { command, params };
        if cfg.threads() == 0 {
            bail!("threads must be at least 1");
        }
        cfg.get_u64("threads")?;
        cfg.get_u64("seed")?;
        if let Some(f) = cfg.get("format") {
            f.parse::<Format>()?;
        }
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                // accept 1e7-style literals when they are exact integers
                v.parse::<u64>().or_else(|_| {
                    let f: f64 = v.parse().map_err(|_| anyhow!("{key} = {v:?} is not an integer"))?;
                    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
                        Ok(f as u64)
                    } else {
                        Err(anyhow!("{key} = {v:?} is not an integer"))
                    }
                })
            })
            .transpose()
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| v.parse::<f64>().map_err(|_| anyhow!("{key} = {v:?} is not a number")))
            .transpose()
    }

    pub fn format(&self) -> Format {
        self.get("format").and_then(|f| f.parse().ok()).unwrap_or(Format::Csv)
    }

    pub fn threads(&self) -> usize {
        self.get_u64("threads")
            .ok()
            .flatten()
            .map_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()), |t| t as usize)
    }

    pub fn seed(&self) -> u64 {
        self.get_u64("seed").ok().flatten().unwrap_or(DEFAULT_SEED)
    }

    pub fn oracle(&self) -> bool {
        matches!(self.get("oracle"), Some("1" | "true" | "yes"))
    }

    pub fn out(&self) -> Option<&str> {
        self.get("out")
    }

    /// Parameters that determine the output, for metadata.
    pub fn semantic_params(&self) -> BTreeMap<String, String> {
        self.params
            .iter()
            .filter(|(k, _)| !PLUMBING_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let file = parse_config_text("# comment\nX = 1000\n--c=3/2\n\nseed=7\n").unwrap();
        assert_eq!(file["X"], "1000");
        assert_eq!(file["c"], "3/2");
        let flags = BTreeMap::from([("X".to_string(), "500".to_string())]);
        let cfg = RunConfig::new(Command::PsCount, file, flags).unwrap();
        assert_eq!(cfg.get_u64("X").unwrap(), Some(500));
        assert_eq!(cfg.seed(), 7);
        assert_eq!(cfg.format(), Format::Csv);
        assert!(!cfg.oracle());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("colour=blue").is_err());
        let bad = BTreeMap::from([("threads".to_string(), "0".to_string())]);
        assert!(RunConfig::new(Command::Region, BTreeMap::new(), bad).is_err());
        let bad = BTreeMap::from([("format".to_string(), "xml".to_string())]);
        assert!(RunConfig::new(Command::Region, BTreeMap::new(), bad).is_err());
    }

    #[test]
    fn scientific_integers() {
        let flags = BTreeMap::from([("X".to_string(), "1e7".to_string())]);
        let cfg = RunConfig::new(Command::PsCount, BTreeMap::new(), flags).unwrap();
        assert_eq!(cfg.get_u64("X").unwrap(), Some(10_000_000));
    }
}
