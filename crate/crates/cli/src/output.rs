//! Diff-stable CSV and JSON writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty field for a missing value.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

pub fn write_csv(file: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(file).with_context(|| format!("creating {}", file.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(file: &Path, value: &T) -> Result<()> {
    let f = File::create(file).with_context(|| format!("creating {}", file.display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        assert_eq!(opt(None), "");
    }
}
