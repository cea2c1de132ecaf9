use std::path::{Path, PathBuf};
use std::time::Duration;

use super::config::ExperimentConfig;
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A file produced by a run, held in memory until exported.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: impl Into<String>, text: String) -> Self {
        Self {
            name: name.into(),
            bytes: text.into_bytes(),
        }
    }

    pub fn is_csv(&self) -> bool {
        self.name.ends_with(".csv")
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub artifacts: Vec<Artifact>,
    /// Ordered `key: value` summary lines.
    pub summary: Vec<(String, String)>,
    /// Members whose trajectories overflowed and were cut short.
    pub truncated_members: Vec<usize>,
    pub wall_clock: Duration,
    pub version: &'static str,
}

impl RunReport {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            config,
            artifacts: Vec::new(),
            summary: Vec::new(),
            truncated_members: Vec::new(),
            wall_clock: Duration::ZERO,
            version: VERSION,
        }
    }

    pub fn add(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    pub fn csv_paths(&self) -> impl Iterator<Item = &str> {
        self.artifacts.iter().filter(|a| a.is_csv()).map(|a| a.name.as_str())
    }

    /// `summary.txt` contents.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: &str| out.push_str(&format!("{k}: {v}\n"));
        line("version", self.version);
        line("kind", self.config.kind.as_str());
        line("seed", &self.config.seed.to_string());
        line("wall_clock_seconds", &format!("{:.3}", self.wall_clock.as_secs_f64()));
        let truncated: Vec<String> = self.truncated_members.iter().map(usize::to_string).collect();
        line("truncated_members", &truncated.join(" "));
        for (k, v) in &self.summary {
            line(k, v);
        }
        for a in &self.artifacts {
            line("output", &a.name);
        }
        line("config", "config.toml");
        out
    }
}

/// Write the summary, the config echo and every artifact under `dir`,
/// overwriting earlier output.
pub fn export_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mkdir = |d: &Path| std::fs::create_dir_all(d).map_err(|e| Error::io(d, e));
    mkdir(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            mkdir(parent)?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for a in &report.artifacts {
        put(&a.name, &a.bytes)?;
    }
    put("config.toml", report.config.to_toml().as_bytes())?;
    put("summary.txt", report.summary_text().as_bytes())?;
    Ok(written)
}

/// First quartile, median and third quartile by linear interpolation between
/// order statistics (position `(n − 1)·p`).
pub fn quartiles(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (v.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Some((q(0.25), q(0.5), q(0.75)))
}

pub(crate) fn add_quartiles(report: &mut RunReport, prefix: &str, values: &[f64]) {
    match quartiles(values) {
        Some((a, b, c)) => {
            report.add(format!("{prefix}_q1"), a);
            report.add(format!("{prefix}_median"), b);
            report.add(format!("{prefix}_q3"), c);
            report.add(format!("{prefix}_mean"), values.iter().sum::<f64>() / values.len() as f64);
        }
        None => report.add(format!("{prefix}_median"), "none"),
    }
}
