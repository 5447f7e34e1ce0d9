//! The coefficient-table file format.
//!
//! JSON schema (scaled form):
//!
//! ```json
//! {"d":2,"i":1,"C0":1.0,"N":64,"scaled":true,
//!  "cells":[{"j":2,"k":0,"l":0,"v":0.5}, ...]}
//! ```
//!
//! The raw variant stores `{"sign":1,"loga":-0.693}` per cell in place of
//! `"v"`: raw coefficients overflow `f64` past level ~170, so they travel as
//! sign/log pairs and are rescaled on ingestion via the log-factorial
//! (`Ŝ = sign·exp(ln(k+l+1)! + loga − (k+l)·ln C₀)`). A zero coefficient is
//! `"sign":0` with `loga` omitted (JSON has no −∞). The optional `tol` and
//! `bound` keys carry quadrature metadata; files without them ingest fine.
//! The CSV export mirrors the same columns under a `#` config echo.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sig_core::engine::{self, CoeffTable};

use crate::csvout::{fmt_f64, CsvDoc};
use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    d: usize,
    i: usize,
    #[serde(rename = "C0")]
    c0: f64,
    #[serde(rename = "N")]
    n: usize,
    scaled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    cells: Vec<CellEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CellEntry {
    j: usize,
    k: usize,
    l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    loga: Option<f64>,
}

fn table_to_file(table: &CoeffTable, scaled: bool) -> TableFile {
    let cells = table
        .iter_cells()
        .map(|(j, k, l, value)| {
            if scaled {
                CellEntry {
                    j,
                    k,
                    l,
                    v: Some(value),
                    sign: None,
                    loga: None,
                }
            } else {
                let (sign, loga) =
                    engine::sign_log_from_scaled(value, k + l, table.axial_speed());
                CellEntry {
                    j,
                    k,
                    l,
                    v: None,
                    sign: Some(sign),
                    loga: if sign == 0 { None } else { Some(loga) },
                }
            }
        })
        .collect();
    TableFile {
        d: table.dim(),
        i: table.axial_index(),
        c0: table.axial_speed(),
        n: table.n_max(),
        scaled,
        tol: Some(table.tol()),
        bound: Some(table.deriv_bound()),
        cells,
    }
}

/// Serializes a table to the JSON schema (`scaled: false` emits sign/log
/// cells).
pub fn emit_json(table: &CoeffTable, scaled: bool) -> String {
    let file = table_to_file(table, scaled);
    serde_json::to_string(&file).expect("table serialization cannot fail")
}

pub fn write_json(table: &CoeffTable, scaled: bool, path: &Path) -> Result<(), CliError> {
    fs::write(path, emit_json(table, scaled))
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

/// Parses and validates a table file, rescaling raw cells via log-gamma.
pub fn ingest_json(text: &str) -> Result<CoeffTable, CliError> {
    let file: TableFile =
        serde_json::from_str(text).map_err(|e| CliError::config(format!("bad table file: {e}")))?;
    if !(file.c0 > 0.0) || !file.c0.is_finite() {
        return Err(CliError::config(format!(
            "table header C0 = {} must be a positive real",
            file.c0
        )));
    }
    if file.d < 2 || file.i == 0 || file.i > file.d {
        return Err(CliError::config(format!(
            "table header (d={}, i={}) is not a valid axial shape",
            file.d, file.i
        )));
    }
    let coords = engine::cell_coords(file.d, file.i, file.n);
    if file.cells.len() != coords.len() {
        return Err(CliError::config(format!(
            "table has {} cells, schema requires {}",
            file.cells.len(),
            coords.len()
        )));
    }
    let mut cells = vec![f64::NAN; coords.len()];
    let index_of = |j: usize, k: usize, l: usize| -> Option<usize> {
        if j == 0 || j > file.d || j == file.i || k + l > file.n {
            return None;
        }
        let rank = if j < file.i { j - 1 } else { j - 2 };
        let n = k + l;
        Some(rank * (file.n + 1) * (file.n + 2) / 2 + n * (n + 1) / 2 + k)
    };
    for cell in &file.cells {
        let slot = index_of(cell.j, cell.k, cell.l).ok_or_else(|| {
            CliError::config(format!(
                "cell (j={}, k={}, l={}) is outside the table shape",
                cell.j, cell.k, cell.l
            ))
        })?;
        let value = if file.scaled {
            let v = cell.v.ok_or_else(|| {
                CliError::config("scaled table cell is missing its `v` field".to_string())
            })?;
            if !v.is_finite() {
                return Err(CliError::config(format!(
                    "non-finite cell value at (j={}, k={}, l={})",
                    cell.j, cell.k, cell.l
                )));
            }
            v
        } else {
            let sign = cell.sign.ok_or_else(|| {
                CliError::config("raw table cell is missing its `sign` field".to_string())
            })?;
            if !(-1..=1).contains(&sign) {
                return Err(CliError::config(format!("cell sign {sign} must be -1, 0, or 1")));
            }
            if sign == 0 {
                0.0
            } else {
                let loga = cell.loga.ok_or_else(|| {
                    CliError::config("raw table cell is missing its `loga` field".to_string())
                })?;
                if loga.is_nan() || loga == f64::INFINITY {
                    return Err(CliError::config("non-finite `loga` entry".to_string()));
                }
                engine::scaled_from_sign_log(sign, loga, cell.k + cell.l, file.c0)
            }
        };
        if !cells[slot].is_nan() {
            return Err(CliError::config(format!(
                "duplicate cell (j={}, k={}, l={})",
                cell.j, cell.k, cell.l
            )));
        }
        cells[slot] = value;
    }
    let bound = file.bound.unwrap_or_else(|| {
        cells.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    });
    CoeffTable::from_parts(
        file.d,
        file.i,
        file.c0,
        file.n,
        file.tol.unwrap_or(1e-11),
        bound,
        cells,
    )
    .map_err(|e| CliError::config(format!("table file rejected: {e}")))
}

pub fn read_json(path: &Path) -> Result<CoeffTable, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    ingest_json(&text)
}

/// CSV mirror of the same columns.
pub fn emit_csv(table: &CoeffTable, scaled: bool) -> String {
    let mut doc = if scaled {
        CsvDoc::new(&["j", "k", "l", "v"])
    } else {
        CsvDoc::new(&["j", "k", "l", "sign", "loga"])
    };
    doc.comment("d", table.dim());
    doc.comment("i", table.axial_index());
    doc.comment("C0", fmt_f64(table.axial_speed()));
    doc.comment("N", table.n_max());
    doc.comment("scaled", scaled);
    for (j, k, l, value) in table.iter_cells() {
        if scaled {
            doc.row(vec![j.to_string(), k.to_string(), l.to_string(), fmt_f64(value)]);
        } else {
            let (sign, loga) = engine::sign_log_from_scaled(value, k + l, table.axial_speed());
            doc.row(vec![
                j.to_string(),
                k.to_string(),
                l.to_string(),
                sign.to_string(),
                if sign == 0 { String::new() } else { fmt_f64(loga) },
            ]);
        }
    }
    doc.render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sig_core::curve::Curve;
    use sig_core::engine::build_table;
    use sig_core::quad::QuadConfig;

    fn monomial_table(n: usize) -> CoeffTable {
        build_table(&Curve::monomial(1), n, &QuadConfig::default()).unwrap()
    }

    #[test]
    fn scaled_round_trip_is_identity() {
        let table = monomial_table(20);
        let back = ingest_json(&emit_json(&table, true)).unwrap();
        assert_eq!(table, back);
    }

    #[test]
    fn raw_round_trip_within_one_ulp_of_log() {
        let table = monomial_table(20);
        let back = ingest_json(&emit_json(&table, false)).unwrap();
        for ((j, k, l, a), (_, _, _, b)) in table.iter_cells().zip(back.iter_cells()) {
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1e-300),
                "cell ({j},{k},{l}): {a} vs {b}"
            );
        }
    }

    #[test]
    fn spec_shaped_minimal_file_ingests() {
        let text = r#"{"d":2,"i":1,"C0":1.0,"N":1,"scaled":true,
            "cells":[{"j":2,"k":0,"l":0,"v":0.5},
                     {"j":2,"k":1,"l":0,"v":0.6},
                     {"j":2,"k":0,"l":1,"v":0.4}]}"#;
        let table = ingest_json(text).unwrap();
        assert_eq!(table.get(2, 1, 0), Some(0.6));
    }

    #[test]
    fn raw_unit_cell_rescales_to_one() {
        // loga = -ln((k+l+1)!), sign +, C0 = 1 -> scaled 1.0.
        let loga = -sig_core::math::ln_factorial(3);
        let text = format!(
            r#"{{"d":2,"i":1,"C0":1.0,"N":2,"scaled":false,"cells":[
            {{"j":2,"k":0,"l":0,"sign":1,"loga":0.0}},
            {{"j":2,"k":1,"l":0,"sign":0}},
            {{"j":2,"k":0,"l":1,"sign":0}},
            {{"j":2,"k":2,"l":0,"sign":1,"loga":{loga}}},
            {{"j":2,"k":1,"l":1,"sign":0}},
            {{"j":2,"k":0,"l":2,"sign":0}}]}}"#
        );
        let table = ingest_json(&text).unwrap();
        assert!((table.get(2, 2, 0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(table.get(2, 1, 1), Some(0.0));
    }

    #[test]
    fn schema_violations_rejected() {
        // C0 = 0.
        assert!(ingest_json(r#"{"d":2,"i":1,"C0":0.0,"N":0,"scaled":true,"cells":[{"j":2,"k":0,"l":0,"v":1.0}]}"#).is_err());
        // Wrong cell count.
        assert!(ingest_json(r#"{"d":2,"i":1,"C0":1.0,"N":1,"scaled":true,"cells":[{"j":2,"k":0,"l":0,"v":1.0}]}"#).is_err());
        // Non-finite value.
        assert!(ingest_json(r#"{"d":2,"i":1,"C0":1.0,"N":0,"scaled":true,"cells":[{"j":2,"k":0,"l":0,"v":1e999}]}"#).is_err());
        // Duplicate cell.
        assert!(ingest_json(r#"{"d":2,"i":1,"C0":1.0,"N":1,"scaled":true,
            "cells":[{"j":2,"k":0,"l":0,"v":1.0},{"j":2,"k":0,"l":0,"v":1.0},{"j":2,"k":0,"l":1,"v":1.0}]}"#).is_err());
        // Axial cell.
        assert!(ingest_json(r#"{"d":2,"i":1,"C0":1.0,"N":0,"scaled":true,"cells":[{"j":1,"k":0,"l":0,"v":1.0}]}"#).is_err());
    }

    #[test]
    fn csv_mirror_carries_all_cells() {
        let table = monomial_table(3);
        let text = emit_csv(&table, true);
        let (header, rows) = crate::csvout::read_numeric_csv(&text).unwrap();
        assert_eq!(header, vec!["j", "k", "l", "v"]);
        assert_eq!(rows.len(), 10);
    }
}
