//! Deterministic CSV emission: `#`-prefixed config echo comments, one header
//! row, then data rows. Floats are rendered with the shortest round-trip
//! representation, so identical values always produce identical bytes.
//! Wall-clock times never enter a CSV.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

pub struct CsvDoc {
    comments: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Avoid the -0/-0.0 split.
        return "0".to_string();
    }
    format!("{v}")
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl ToString) {
        self.comments.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields);
    }

    pub fn row_f64(&mut self, fields: &[f64]) {
        self.row(fields.iter().map(|v| fmt_f64(*v)).collect());
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.comments {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.render())
    }
}

/// Minimal numeric CSV reader: skips `#` comments, takes the first
/// non-comment line as a header, parses the rest as f64 rows.
pub fn read_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header.is_none() {
            header = Some(line.split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => return Err(format!("line {}: {e}", lineno + 1)),
        }
    }
    match header {
        Some(h) => Ok((h, rows)),
        None => Err("no header row found".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_comments_header_rows() {
        let mut doc = CsvDoc::new(&["a", "b"]);
        doc.comment("experiment", "demo");
        doc.row_f64(&[1.0, 0.5]);
        doc.row_f64(&[2.0, -0.0]);
        let text = doc.render();
        assert_eq!(text, "# experiment: demo\na,b\n1,0.5\n2,0\n");
    }

    #[test]
    fn identical_content_identical_bytes() {
        let build = || {
            let mut doc = CsvDoc::new(&["x", "y"]);
            doc.comment("seed", 7);
            doc.row_f64(&[0.1, 1e-300]);
            doc.render()
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn round_trips_through_reader() {
        let mut doc = CsvDoc::new(&["n", "v"]);
        doc.comment("k", "v");
        doc.row_f64(&[3.0, 0.25]);
        doc.row_f64(&[4.0, 1.5e-12]);
        let (header, rows) = read_numeric_csv(&doc.render()).unwrap();
        assert_eq!(header, vec!["n", "v"]);
        assert_eq!(rows, vec![vec![3.0, 0.25], vec![4.0, 1.5e-12]]);
        assert!(read_numeric_csv("# only comments\n").is_err());
    }
}
