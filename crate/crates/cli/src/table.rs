//! CSV tables with a fixed number format.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Formats a float with 10 significant digits, trailing zeros removed.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One output table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf)?)
    }
}

/// Cell helpers.
pub fn f(x: f64) -> String {
    fmt_f64(x)
}

pub fn i<T: ToString>(x: T) -> String {
    x.to_string()
}

/// Writes each table to `<dir>/<name>.csv`, or all of them to stdout
/// separated by blank lines when `dir` is `None`.
pub fn emit(tables: &[Table], dir: Option<&Path>) -> Result<()> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for t in tables {
                let path = dir.join(format!("{}.csv", t.name));
                let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                t.write(std::io::BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (j, t) in tables.iter().enumerate() {
                if j > 0 {
                    writeln!(lock).context("writing to stdout")?;
                }
                t.write(&mut lock).context("writing to stdout")?;
            }
        }
    }
    Ok(())
}
