//! Output assembly. JSON floats are rounded to 12 significant digits and
//! table floats to 6, so identical runs give identical bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;

/// Reproducibility header attached to every report.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub d: Option<u32>,
    pub k: Option<u32>,
    pub radius: Option<u32>,
    pub config_hash: String,
}

impl Meta {
    /// `key` holds every setting that can change the numbers, and nothing
    /// else (no worker count, output path or format).
    pub fn new(
        command: &'static str,
        d: Option<u32>,
        k: Option<u32>,
        radius: Option<u32>,
        key: &Value,
    ) -> Meta {
        let canonical = serde_json::to_string(&(command, key)).expect("serializable");
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Meta {
            tool: "hypersaw",
            version: env!("CARGO_PKG_VERSION"),
            command,
            d,
            k,
            radius,
            config_hash,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(String),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn show(&self) -> String {
        match self {
            Cell::Int(s) | Cell::Text(s) => s.clone(),
            Cell::Float(x) => display(*x, 6),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => display(*x, 12),
            other => other.show(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<&BigUint> for Cell {
    fn from(v: &BigUint) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Table {
        Table {
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn human(&self, out: &mut String) {
        let shown: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::show).collect())
            .collect();
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                shown
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.headers[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        if !self.title.is_empty() {
            let _ = writeln!(out, "{}", self.title);
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(&self.headers));
        let _ = writeln!(
            out,
            "{}",
            widths
                .iter()
                .map(|w| "-".repeat(*w))
                .collect::<Vec<_>>()
                .join("  ")
        );
        for r in &shown {
            let _ = writeln!(out, "{}", line(r));
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "{}", self.headers.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
    }
}

/// A finished report in all three shapes.
pub struct Document {
    pub meta: Meta,
    /// JSON body; `meta` is added under its own key.
    pub json: Value,
    /// Machine-readable rows.
    pub csv: Table,
    /// Human-readable tables, in order.
    pub human: Vec<Table>,
    /// Lines shown under the tables.
    pub notes: Vec<String>,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Json => {
                let mut body = match self.json.clone() {
                    Value::Object(m) => m,
                    other => Map::from_iter([("result".to_string(), other)]),
                };
                body.insert(
                    "meta".into(),
                    serde_json::to_value(&self.meta).expect("serializable"),
                );
                let v = round_floats(Value::Object(body));
                out = serde_json::to_string_pretty(&v).expect("serializable");
                out.push('\n');
            }
            Format::Csv => {
                let m = &self.meta;
                let _ = writeln!(
                    out,
                    "# {} {} {} d={} k={} radius={} config={}",
                    m.tool,
                    m.version,
                    m.command,
                    opt(m.d),
                    opt(m.k),
                    opt(m.radius),
                    m.config_hash
                );
                self.csv.csv(&mut out);
            }
            Format::Table => {
                let m = &self.meta;
                let _ = writeln!(
                    out,
                    "{} {} | {} | d={} k={} radius={} | config {}",
                    m.tool,
                    m.version,
                    m.command,
                    opt(m.d),
                    opt(m.k),
                    opt(m.radius),
                    m.config_hash
                );
                for t in &self.human {
                    out.push('\n');
                    t.human(&mut out);
                }
                if !self.notes.is_empty() {
                    out.push('\n');
                    for n in &self.notes {
                        let _ = writeln!(out, "{n}");
                    }
                }
            }
        }
        out
    }
}

fn opt(v: Option<u32>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

/// `x` with `digits` significant digits, shortest representation.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("valid float");
    rounded.to_string()
}

/// Like [`sig`], switching to scientific notation for very small or very
/// large magnitudes.
pub fn display(x: f64, digits: usize) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e12).contains(&a) {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, exp) = s.split_once('e').expect("exponent");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    } else {
        sig(x, digits)
    }
}

/// Exact integer as a JSON number, however large.
pub fn big_number(v: &BigUint) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("integer literal"))
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r: f64 = sig(x, 12).parse().expect("valid float");
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(4.957474795414069, 6), "4.95747");
        assert_eq!(sig(4.957474795414069, 12), "4.95747479541");
        assert_eq!(sig(0.0, 6), "0");
        assert_eq!(sig(2.0, 6), "2");
        assert_eq!(display(2.39808e-14, 6), "2.39808e-14");
        assert_eq!(display(1.5e20, 6), "1.5e20");
        assert_eq!(display(0.25, 6), "0.25");
    }

    #[test]
    fn json_floats_are_rounded_and_integers_kept() {
        let v = round_floats(json!({"a": 1.0 / 3.0, "b": [7u64], "c": 2.5}));
        assert_eq!(v["a"].as_f64(), Some(0.333333333333));
        assert_eq!(v["b"][0].as_u64(), Some(7));
        assert_eq!(v["c"].as_f64(), Some(2.5));
    }

    #[test]
    fn big_integers_survive() {
        let big = BigUint::from(3u8).pow(60);
        let s = serde_json::to_string(&big_number(&big)).unwrap();
        assert_eq!(s, big.to_string());
    }

    #[test]
    fn hash_ignores_nothing_it_is_given() {
        let a = Meta::new("bounds", Some(7), Some(3), None, &json!({"d": 7, "k": 3}));
        let b = Meta::new("bounds", Some(7), Some(3), None, &json!({"d": 7, "k": 3}));
        let c = Meta::new("bounds", Some(7), Some(4), None, &json!({"d": 7, "k": 4}));
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
        assert_eq!(a.config_hash.len(), 16);
    }

    #[test]
    fn tables_align() {
        let mut t = Table::new("", &["n", "value"]);
        t.push(vec![1u64.into(), 0.5.into()]);
        t.push(vec![10u64.into(), Cell::Empty]);
        let mut s = String::new();
        t.human(&mut s);
        assert_eq!(s, " n  value\n--  -----\n 1    0.5\n10       \n");
        let mut c = String::new();
        t.csv(&mut c);
        assert_eq!(c, "n,value\n1,0.5\n10,\n");
    }
}
