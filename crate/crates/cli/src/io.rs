//! JSON and CSV encoding of complex numbers and matrices.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use w9_core::siegel::ComplexMatrix;

use crate::expr;

/// `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        // `+ 0.0` turns a negative zero into zero.
        Self {
            re: z.re + 0.0,
            im: z.im + 0.0,
        }
    }
}

pub fn matrix_json(m: &ComplexMatrix) -> Vec<Vec<JsonComplex>> {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(JsonComplex::from).collect())
        .collect()
}

pub fn complex_list(v: &[Complex64]) -> Vec<JsonComplex> {
    v.iter().copied().map(JsonComplex::from).collect()
}

/// Shortest round-trip decimal, with an exponent for very small or large values.
pub fn num(x: f64) -> String {
    format!("{:?}", x + 0.0)
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `name,row,col,re,im` rows for a matrix (1-based indices).
pub fn matrix_csv_rows(name: &str, m: &ComplexMatrix, out: &mut String) {
    for (i, row) in m.to_rows().iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            out.push_str(&format!(
                "{name},{},{},{},{}\n",
                i + 1,
                j + 1,
                num(z.re),
                num(z.im)
            ));
        }
    }
}

fn entry(v: &Value, at: &str) -> Result<Complex64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|x| Complex64::new(x, 0.0))
            .ok_or_else(|| anyhow!("{at}: bad number")),
        Value::String(s) => expr::eval(s).with_context(|| at.to_string()),
        Value::Object(map) => {
            let part = |key: &str| -> Result<f64> {
                match map.get(key) {
                    None => Ok(0.0),
                    Some(x) => x
                        .as_f64()
                        .ok_or_else(|| anyhow!("{at}: '{key}' is not a number")),
                }
            };
            if !map.contains_key("re") && !map.contains_key("im") {
                bail!("{at}: expected {{\"re\", \"im\"}}");
            }
            Ok(Complex64::new(part("re")?, part("im")?))
        }
        _ => bail!("{at}: expected a number, string or {{\"re\", \"im\"}} object"),
    }
}

fn matrix_from_array(v: &Value) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| anyhow!("matrix must be an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| anyhow!("row {} is not an array", i + 1))?;
        let parsed: Result<Vec<_>> = row
            .iter()
            .enumerate()
            .map(|(j, e)| entry(e, &format!("entry ({}, {})", i + 1, j + 1)))
            .collect();
        out.push(parsed?);
    }
    ComplexMatrix::from_rows(&out).map_err(|e| anyhow!("{e}"))
}

/// A matrix from JSON: either nested arrays, or an object holding one under
/// `zhat`, `z` or `matrix`. With `genus`, the first field of that size wins.
pub fn matrix_from_json(v: &Value, genus: Option<usize>) -> Result<ComplexMatrix> {
    match v {
        Value::Array(_) => matrix_from_array(v),
        Value::Object(map) => {
            let mut seen = Vec::new();
            for key in ["zhat", "z", "matrix"] {
                if let Some(field) = map.get(key) {
                    let m = matrix_from_array(field).with_context(|| format!("field '{key}'"))?;
                    if genus.is_none_or(|g| g == m.rows()) {
                        return Ok(m);
                    }
                    seen.push(format!("{key} ({}x{})", m.rows(), m.cols()));
                }
            }
            if seen.is_empty() {
                bail!("no 'zhat', 'z' or 'matrix' field");
            }
            bail!(
                "no matrix of genus {} among {}",
                genus.unwrap_or(0),
                seen.join(", ")
            );
        }
        _ => bail!("expected a matrix"),
    }
}

/// `[[a, b], [c, d]]` with expression entries, e.g. `[[i]]`.
fn matrix_from_inline(text: &str) -> Result<ComplexMatrix> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("[[")
        .and_then(|s| s.strip_suffix("]]"))
        .ok_or_else(|| anyhow!("inline matrix must look like [[a,b],[c,d]]"))?;
    let mut rows = Vec::new();
    for (i, row) in inner.split("],[").enumerate() {
        let entries: Result<Vec<_>> = row
            .split(',')
            .enumerate()
            .map(|(j, e)| expr::eval(e).with_context(|| format!("entry ({}, {})", i + 1, j + 1)))
            .collect();
        rows.push(entries?);
    }
    ComplexMatrix::from_rows(&rows).map_err(|e| anyhow!("{e}"))
}

/// `--matrix` argument: a file path, inline JSON, or inline expressions.
pub fn read_matrix_arg(arg: &str, genus: Option<usize>) -> Result<ComplexMatrix> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let v: Value =
            serde_json::from_str(&text).with_context(|| format!("{arg} is not valid JSON"))?;
        return matrix_from_json(&v, genus).with_context(|| arg.to_string());
    }
    match serde_json::from_str::<Value>(arg) {
        Ok(v) => matrix_from_json(&v, genus),
        Err(_) => matrix_from_inline(arg),
    }
}
