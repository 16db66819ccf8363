use std::path::{Path, PathBuf};

use serde::Serialize;

use super::SweepConfig;
use crate::error::{Error, Result};

/// Twelve significant digits, round-trip stable for the same binary.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

/// Writes `header` and `rows` as CSV, creating parent directories.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Run record written next to every output.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub program: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: SweepConfig,
    /// Expanded grid values, keyed by axis name.
    pub grids: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: &SweepConfig) -> Self {
        let grids = serde_json::json!({
            "gamma": config.gamma.values(),
            "lambda1": config.lambda1.values(),
            "lambda2": config.lambda2.values(),
            "beta_s": config.beta_s.values(),
            "t": config.t.values(),
        });
        Self {
            program: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            grids,
            outputs: vec![],
            wall_time_s: 0.0,
            summary: serde_json::Value::Null,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(0.1), "1.00000000000e-1");
        assert_eq!(fmt_float(-1234.5678901234), "-1.23456789012e3");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        let x = 0.123456789012345_f64;
        let back: f64 = fmt_float(x).parse().unwrap();
        assert!((back - x).abs() < 1e-11 * x);
    }
}
