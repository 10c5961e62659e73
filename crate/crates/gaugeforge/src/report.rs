//! JSON (sorted keys) and CSV output.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Builds a JSON object; `serde_json::Map` is ordered by key.
#[derive(Default)]
pub struct JsonObject(Map<String, Value>);

impl JsonObject {
    pub fn new() -> Self {
        JsonObject(Map::new())
    }

    pub fn set(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    /// Non-finite floats become `null`.
    pub fn num(self, key: &str, x: f64) -> Self {
        self.set(key, number(x))
    }

    pub fn nums(self, key: &str, xs: &[f64]) -> Self {
        self.set(key, numbers(xs))
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Rows of numbers under a fixed header.
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.header.len(), "csv row width");
        self.rows.push(row.iter().map(|&x| float(x)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

/// `%.12e`: one digit, twelve decimals, signed two-digit exponent.
pub fn float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("exponent digits");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printf_style_floats() {
        assert_eq!(float(0.0), "0.000000000000e+00");
        assert_eq!(float(1.5), "1.500000000000e+00");
        assert_eq!(float(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(float(6.02e123), "6.020000000000e+123");
        assert_eq!(float(f64::NAN), "nan");
    }

    #[test]
    fn json_keys_sorted() {
        let v = JsonObject::new()
            .num("zeta", 1.0)
            .num("alpha", f64::NAN)
            .set("mid", 3)
            .into_value();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"alpha":null,"mid":3,"zeta":1.0}"#
        );
    }

    #[test]
    fn csv_has_header() {
        let mut c = Csv::new(&["a", "b"]);
        c.push(&[1.0, 2.0]);
        assert_eq!(c.render(), "a,b\n1.000000000000e+00,2.000000000000e+00\n");
    }
}
