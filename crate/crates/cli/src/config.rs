//! JSON run configuration and curve-spec parsing.
//!
//! A config file carries the same knobs as the flags; flags win on conflict.
//! Curve specs are small JSON objects, `{"preset": "helix", "n": 3}`, whose
//! non-`preset` keys become preset parameters. Polylines ingest from CSV
//! with header `s,x1,...,xd`.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use sig_core::curve::{self, Curve, ParamValue, Params, Polyline};

use crate::csvout::read_numeric_csv;
use crate::CliError;

/// Optional values loadable from `--config <file>`; every field can be
/// overridden by the matching flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub curve: Option<Value>,
    pub curve_b: Option<Value>,
    pub table: Option<String>,
    pub polyline: Option<String>,
    pub out: Option<String>,
    pub plot: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub nmax: Option<usize>,
    pub x: Option<f64>,
    pub j: Option<usize>,
    pub i: Option<usize>,
    pub scheme: Option<String>,
    pub eps0: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub slack: Option<f64>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub raw: Option<bool>,
    pub vertices: Option<usize>,
    pub maxlevel: Option<usize>,
    pub ms: Option<Vec<u32>>,
    pub ns: Option<Vec<usize>>,
    pub sgrid: Option<usize>,
    pub cbar1: Option<f64>,
    pub cbar2: Option<f64>,
    pub kbound: Option<f64>,
    pub scales: Option<Vec<f64>>,
    pub frequency: Option<u32>,
    pub epsgrid: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
    }
}

/// `{"preset": name, <params>}` into a [`Curve`].
pub fn curve_from_json(spec: &Value) -> Result<Curve, CliError> {
    let obj = spec
        .as_object()
        .ok_or_else(|| CliError::config("curve spec must be a JSON object"))?;
    let preset = obj
        .get("preset")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config("curve spec needs a string `preset` key"))?;
    let mut params = Params::new();
    for (key, value) in obj {
        if key == "preset" {
            continue;
        }
        let parsed = match value {
            Value::Number(n) => ParamValue::Number(
                n.as_f64()
                    .ok_or_else(|| CliError::config(format!("parameter `{key}` is not finite")))?,
            ),
            Value::Array(items) => {
                let list: Option<Vec<f64>> = items.iter().map(Value::as_f64).collect();
                ParamValue::List(list.ok_or_else(|| {
                    CliError::config(format!("parameter `{key}` must be a numeric array"))
                })?)
            }
            _ => {
                return Err(CliError::config(format!(
                    "parameter `{key}` must be a number or numeric array"
                )))
            }
        };
        params.insert(key.clone(), parsed);
    }
    curve::make_preset(preset, &params).map_err(|e| CliError::config(e.to_string()))
}

/// Reads a polyline CSV with header `s,x1,...,xd`.
pub fn polyline_from_csv(path: &Path) -> Result<Polyline, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let (header, rows) = read_numeric_csv(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if header.is_empty() || header[0] != "s" || header.len() < 2 {
        return Err(CliError::config(format!(
            "{}: polyline CSV header must be s,x1,...,xd",
            path.display()
        )));
    }
    let d = header.len() - 1;
    let mut grid = Vec::with_capacity(rows.len());
    let mut points = Vec::with_capacity(rows.len());
    for (idx, row) in rows.iter().enumerate() {
        if row.len() != d + 1 {
            return Err(CliError::config(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                idx + 1,
                row.len(),
                d + 1
            )));
        }
        grid.push(row[0]);
        points.push(row[1..].to_vec());
    }
    Polyline::new(grid, points).map_err(|e| CliError::config(e.to_string()))
}

/// Writes a polyline as `s,x1,...,xd`.
pub fn polyline_to_csv(poly: &Polyline, comments: &[(&str, String)]) -> String {
    let mut header: Vec<String> = vec!["s".to_string()];
    for c in 1..=poly.dim() {
        header.push(format!("x{c}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut doc = crate::csvout::CsvDoc::new(&header_refs);
    for (k, v) in comments {
        doc.comment(k, v.clone());
    }
    for (idx, s) in poly.grid().iter().enumerate() {
        let mut fields = vec![*s];
        fields.extend_from_slice(poly.vertex(idx));
        doc.row_f64(&fields);
    }
    doc.render()
}

pub fn parse_scheme(name: &str) -> Result<sig_core::RationalScheme, CliError> {
    match name {
        "naive" => Ok(sig_core::RationalScheme::Naive),
        "decimal" => Ok(sig_core::RationalScheme::Decimal),
        "cf" => Ok(sig_core::RationalScheme::ContinuedFraction),
        other => Err(CliError::config(format!(
            "unknown scheme `{other}` (expected naive|decimal|cf)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn curve_specs_parse() {
        let helix = curve_from_json(&json!({"preset": "helix", "n": 3})).unwrap();
        assert_eq!(helix.dim(), 3);
        let poly = curve_from_json(&json!({"preset": "polynomial", "coeffs": [1.0, 2.0]})).unwrap();
        assert_eq!(poly.deriv_component(2, 1.0), 3.0);
        assert!(curve_from_json(&json!({"preset": "nope"})).is_err());
        assert!(curve_from_json(&json!({"preset": "helix", "n": "three"})).is_err());
        assert!(curve_from_json(&json!(42)).is_err());
    }

    #[test]
    fn polyline_csv_round_trip() {
        let poly = Polyline::new(
            vec![0.0, 0.5, 1.0],
            vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 1.0]],
        )
        .unwrap();
        let text = polyline_to_csv(&poly, &[("source", "test".to_string())]);
        let dir = std::env::temp_dir().join("sig-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("poly.csv");
        std::fs::write(&path, &text).unwrap();
        let back = polyline_from_csv(&path).unwrap();
        assert_eq!(poly, back);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let dir = std::env::temp_dir().join("sig-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"experiment": "rate", "bogus": 1}"#).unwrap();
        assert!(FileConfig::load(&path).is_err());
        std::fs::write(&path, r#"{"experiment": "rate", "eps0": 0.1}"#).unwrap();
        let cfg = FileConfig::load(&path).unwrap();
        assert_eq!(cfg.eps0, Some(0.1));
    }
}
