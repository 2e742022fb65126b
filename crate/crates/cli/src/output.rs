//! Deterministic CSV/JSON rendering of command results.
//!
//! Identical invocations must produce byte-identical output: no
//! timestamps, fixed column order, locale-independent numbers, and the
//! same numeric strings in both encodings.

use num_bigint::BigInt;
use num_rational::BigRational;

use cohen_ramanujan::rational::decimal_15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One command's output: an echo of the invocation, its parameters, and
/// a rectangular table of string cells.
pub struct OutputRecord {
    pub command: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl OutputRecord {
    pub fn new(command: &'static str) -> Self {
        OutputRecord {
            command,
            params: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl ToString) {
        self.params.push((key, value.to_string()));
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Csv => print!("{}", self.to_csv()),
            Format::Json => println!("{}", self.to_json()),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command,{}\n", self.command));
        for (k, v) in &self.params {
            out.push_str(&format!("# param,{k},{}\n", csv_cell(v)));
        }
        out.push_str(&self.columns.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        // serde_json maps are sorted; order params and columns via arrays
        let params: Vec<serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| serde_json::json!([k, v]))
            .collect();
        serde_json::json!({
            "command": self.command,
            "format": "json",
            "params": params,
            "columns": self.columns,
            "rows": self.rows,
        })
        .to_string()
    }
}

fn csv_cell(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

pub fn fmt_int(v: &BigInt) -> String {
    v.to_string()
}

/// "p/q" form (bare integer when the denominator is 1).
pub fn fmt_rational_pq(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// 15-significant-digit decimal form.
pub fn fmt_rational_decimal(v: &BigRational) -> String {
    decimal_15(v)
}

/// Deterministic 15-significant-digit rendering of a float via its exact
/// binary value.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    match BigRational::from_float(v) {
        Some(r) => decimal_15(&r),
        None => "0".to_string(),
    }
}

pub fn fmt_bool(v: bool) -> String {
    if v { "pass".to_string() } else { "fail".to_string() }
}
