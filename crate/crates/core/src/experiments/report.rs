use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: serde_json::Value,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.verdicts.iter().filter(|(_, v)| !v.pass).map(|(k, _)| k.as_str()).collect()
    }

    /// `name: PASS (3/3 verdicts)` or `name: FAIL (a, b)`.
    pub fn summary_line(&self) -> String {
        let failed = self.failed();
        if failed.is_empty() {
            format!("{}: PASS ({}/{} verdicts)", self.experiment, self.verdicts.len(), self.verdicts.len())
        } else {
            format!("{}: FAIL ({})", self.experiment, failed.join(", "))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A report under construction, applying the config's tolerance overrides.
pub(crate) struct ReportBuilder {
    report: Report,
    overrides: BTreeMap<String, f64>,
    used: BTreeSet<String>,
}

fn finite(x: f64) -> f64 {
    if x.is_nan() {
        f64::MAX
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

impl ReportBuilder {
    pub(crate) fn new(name: &str, cfg: &ExperimentConfig) -> Self {
        ReportBuilder {
            report: Report {
                experiment: name.to_string(),
                metrics: BTreeMap::new(),
                verdicts: BTreeMap::new(),
                notes: Vec::new(),
                provenance: Provenance {
                    config: cfg.to_json(),
                    version: concat!("strlab-core ", env!("CARGO_PKG_VERSION")).to_string(),
                },
            },
            overrides: cfg.tolerances.clone(),
            used: BTreeSet::new(),
        }
    }

    pub(crate) fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.report.metrics.insert(name.into(), finite(value));
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.report.notes.push(text.into());
    }

    /// Passes when `deviation < tolerance`; a zero tolerance always fails.
    pub(crate) fn check(&mut self, name: impl Into<String>, deviation: f64, tolerance: f64) -> bool {
        let name = name.into();
        let tolerance = match self.overrides.get(&name) {
            Some(&t) => {
                self.used.insert(name.clone());
                t
            }
            None => tolerance,
        };
        let deviation = finite(deviation);
        let pass = deviation < tolerance;
        self.report.verdicts.insert(
            name,
            Verdict {
                pass,
                deviation,
                tolerance,
            },
        );
        pass
    }

    /// Fails on overrides that name no verdict of this experiment.
    pub(crate) fn finish(self) -> Result<Report> {
        let unknown: Vec<&String> = self.overrides.keys().filter(|k| !self.used.contains(*k)).collect();
        if !unknown.is_empty() {
            let known: Vec<&String> = self.report.verdicts.keys().collect();
            return Err(Error::Config(format!(
                "tolerance overrides {unknown:?} match no verdict of {}; known verdicts: {known:?}",
                self.report.experiment
            )));
        }
        Ok(self.report)
    }
}

/// A data file produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

impl Artifact {
    pub(crate) fn csv(file_name: &str, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Artifact {
        let mut buf = Vec::new();
        write(&mut buf).expect("writing to memory cannot fail");
        Artifact {
            file_name: file_name.to_string(),
            contents: String::from_utf8(buf).expect("csv output is utf-8"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    /// Writes `report.json` and every artifact into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        let report = dir.join("report.json");
        std::fs::write(&report, self.report.to_json()).map_err(io(&report))?;
        written.push(report);
        for a in &self.artifacts {
            let path = dir.join(&a.file_name);
            std::fs::write(&path, &a.contents).map_err(io(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}
