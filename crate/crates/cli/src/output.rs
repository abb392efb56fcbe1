//! CSV tables, run manifests and error records.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, IoContext};

/// Fixed-width scientific notation with 12 significant digits, e.g.
/// ` 1.29493448400e+003`. Non-finite values are right-aligned to the same width.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x:>19}");
    }
    let s = format!("{x:.11e}");
    let (m, e) = s.split_once('e').expect("exponent");
    let e: i32 = e.parse().expect("integer exponent");
    format!("{m:>14}e{}{:03}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).at(dir)?;
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().at(path)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    status: &'static str,
    experiment: String,
    biharm_version: &'static str,
    cli_version: &'static str,
    files: Vec<String>,
    config: &'a ExperimentConfig,
    checks: &'a [Check],
}

/// Writes `manifest.toml` with the config echo, versions and check summary.
pub fn write_manifest(config: &ExperimentConfig, files: &[PathBuf], checks: &[Check]) -> Result<PathBuf, CliError> {
    let m = Manifest {
        status: if checks.iter().all(|c| c.passed) { "ok" } else { "invariant_violation" },
        experiment: config.experiment.to_string(),
        biharm_version: biharm::VERSION,
        cli_version: env!("CARGO_PKG_VERSION"),
        files: files
            .iter()
            .map(|f| f.strip_prefix(&config.out).unwrap_or(f).display().to_string())
            .collect(),
        config,
        checks,
    };
    let path = config.out.join("manifest.toml");
    fs::create_dir_all(&config.out).at(&config.out)?;
    fs::write(&path, toml::to_string(&m).expect("manifest serializes")).at(&path)?;
    Ok(path)
}

#[derive(Debug, Serialize)]
struct ErrorRecord {
    kind: &'static str,
    exit_code: i32,
    message: String,
}

/// Writes `error.toml` into `dir`. Failures to write are ignored, the error
/// is also reported on stderr by the caller.
pub fn write_error(dir: &Path, err: &CliError) {
    let rec = ErrorRecord { kind: err.kind(), exit_code: err.exit_code(), message: err.to_string() };
    if fs::create_dir_all(dir).is_ok() {
        let _ = fs::write(dir.join("error.toml"), toml::to_string(&rec).unwrap_or_default());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_scientific() {
        assert_eq!(sci(1294.934484), " 1.29493448400e+003");
        assert_eq!(sci(-1.69823e-5), "-1.69823000000e-005");
        assert_eq!(sci(0.0), " 0.00000000000e+000");
        assert_eq!(sci(f64::NAN).len(), 19);
        for x in [1e-300, -3.5e200, 7.0, 1.0 / 3.0] {
            let s = sci(x);
            assert_eq!(s.len(), 19, "{s}");
            assert_eq!(s.trim().parse::<f64>().unwrap(), format!("{x:.11e}").parse::<f64>().unwrap());
        }
    }
}
