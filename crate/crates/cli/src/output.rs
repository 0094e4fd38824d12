//! Tables and their CSV / JSON renderings.

use std::collections::BTreeMap;

use anyhow::Result;
use serde_json::{json, Map, Number, Value};

/// A named table of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub object: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(object: &str, columns: &[&str]) -> Self {
        Self {
            object: object.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// A `# object: …` line, the header row, then one line per row; LF
    /// line endings throughout.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# object: {}\n", self.object);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// `{meta: {command, object, params, version}, rows: [{column: value}]}`.
    /// Cells that parse as numbers are emitted as JSON numbers with the same
    /// value as the CSV text.
    pub fn to_json(&self, command: &str, params: &BTreeMap<String, String>) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), cell_value(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "meta": {
                "command": command,
                "object": self.object,
                "params": params,
                "version": env!("CARGO_PKG_VERSION"),
            },
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}

fn cell_value(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        return Value::Number(i.into());
    }
    if let Ok(u) = s.parse::<u64>() {
        return Value::Number(u.into());
    }
    match s.parse::<f64>().ok().and_then(Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(s.to_string()),
    }
}

/// `x` with `digits` significant digits, positional notation for moderate
/// magnitudes and scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // round first, then read the exponent off the rounded value
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Reals are printed with 15 significant digits.
pub fn fmt_real(x: f64) -> String {
    fmt_sig(x, 15)
}

/// Ratios are printed with 6 significant digits.
pub fn fmt_ratio(x: f64) -> String {
    fmt_sig(x, 6)
}
