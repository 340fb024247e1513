//! Report writers: deterministic JSON (one object per line, insertion
//! order preserved) and RFC-4180 CSV.

use klt_core::error::KltError;
use std::io::Write;
use std::path::Path;

/// Ordered key/value report row.
pub struct Row {
    fields: Vec<(&'static str, f64)>,
}

impl Row {
    pub fn new() -> Self {
        Row { fields: Vec::new() }
    }

    pub fn push(&mut self, key: &'static str, value: f64) {
        self.fields.push((key, value));
    }

    pub fn keys(&self) -> Vec<String> {
        self.fields.iter().map(|(k, _)| k.to_string()).collect()
    }

    pub fn values_as_strings(&self) -> Vec<String> {
        self.fields.iter().map(|(_, v)| format_number(*v)).collect()
    }

    pub fn to_json_line(&self) -> String {
        let mut s = String::from("{");
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push('"');
            s.push_str(k);
            s.push_str("\":");
            s.push_str(&format_number(*v));
        }
        s.push_str("}\n");
        s
    }
}

/// Shortest round-trip float formatting (integers stay integral).
fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let mut buf = ryu_format(v);
        if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("nan")
        {
            buf.push_str(".0");
        }
        buf
    }
}

fn ryu_format(v: f64) -> String {
    // serde_json's float path produces the shortest round-trip form.
    serde_json::to_string(&v).unwrap_or_else(|_| "null".to_string())
}

/// One CSV record with RFC-4180 quoting.
pub fn csv_row(fields: &[String]) -> String {
    let mut s = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        if f.contains(',') || f.contains('"') || f.contains('\n') {
            s.push('"');
            s.push_str(&f.replace('"', "\"\""));
            s.push('"');
        } else {
            s.push_str(f);
        }
    }
    s.push('\n');
    s
}

pub fn write_out(path: Option<&Path>, text: &str) -> Result<(), KltError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| KltError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(|source| KltError::Io {
                path: "<stdout>".to_string(),
                source,
            })
        }
    }
}
