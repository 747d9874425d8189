//! Plain-text artifacts: `key = value` files and CSV tables.

use std::fmt::Write as _;
use std::path::Path;

use mildsol::Result;

/// Full-precision float text, identical across runs.
pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}

#[derive(Debug, Default)]
pub struct KeyValues {
    lines: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.put(key, num(value))
    }

    pub fn render(&self) -> String {
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.lines {
            writeln!(out, "{k:<width$} = {v}").unwrap();
        }
        out
    }
}

/// `header` then one line per row, fields joined by commas.
pub fn csv<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r.into_iter().collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    Ok(())
}
