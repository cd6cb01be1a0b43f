use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde_json::Value;

use codrisk::figures::FigureTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A flat CSV table with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, inner, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    /// One row from a (possibly nested) JSON object.
    pub fn from_record(v: &Value) -> Table {
        let mut pairs = Vec::new();
        flatten("", v, &mut pairs);
        let (headers, row) = pairs.into_iter().unzip();
        Table {
            headers,
            rows: vec![row],
        }
    }

    /// One row per element of a JSON array of objects sharing their keys.
    pub fn from_records(v: &Value) -> Table {
        let mut t = Table::default();
        for item in v.as_array().map(Vec::as_slice).unwrap_or_default() {
            let mut pairs = Vec::new();
            flatten("", item, &mut pairs);
            if t.headers.is_empty() {
                t.headers = pairs.iter().map(|p| p.0.clone()).collect();
            }
            t.rows.push(pairs.into_iter().map(|p| p.1).collect());
        }
        t
    }

    pub fn figure_rows(tables: &[FigureTable]) -> Table {
        let headers = ["figure", "series", "x", "y"].map(String::from).to_vec();
        let rows = tables
            .iter()
            .flat_map(|t| {
                t.rows.iter().map(|r| {
                    vec![
                        t.id.clone(),
                        r.series.clone(),
                        r.x.to_string(),
                        r.y.to_string(),
                    ]
                })
            })
            .collect();
        Table { headers, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let line = |cells: &[String]| cells.iter().map(|c| quote(c)).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "{}", line(&self.headers));
        for r in &self.rows {
            let _ = writeln!(s, "{}", line(r));
        }
        s
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Script plotting each series of each panel from the CSV written to `data`.
pub fn gnuplot_script(tables: &[FigureTable], data: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key outside right");
    let data = data.display();
    for t in tables {
        let _ = writeln!(s, "\nset title \"{}\"", t.title.replace('"', "'"));
        let _ = writeln!(s, "set xlabel \"{}\"", t.x_label);
        let _ = writeln!(s, "set ylabel \"{}\"", t.y_label);
        let plots: Vec<String> = t
            .series_names()
            .iter()
            .map(|name| {
                format!(
                    "'{data}' using (strcol(1) eq '{id}' && strcol(2) eq '{name}' ? $3 : 1/0):4 with lines title '{name}'",
                    id = t.id,
                    name = name.replace('\'', "''"),
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        let _ = writeln!(s, "pause -1");
    }
    s
}
