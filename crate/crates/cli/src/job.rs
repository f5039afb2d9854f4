//! Job files and the report written for each run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hypam::Tolerances;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub command: Option<String>,
    pub seed: Option<u64>,
    /// Inline input object, or a path to a JSON file holding one.
    #[serde(default)]
    pub input: Value,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    /// PLY or CSV file chosen by extension.
    pub artifact: Option<PathBuf>,
    pub density: Option<usize>,
    pub count: Option<usize>,
    pub starts: Option<usize>,
}

impl Job {
    pub fn load(path: &Path) -> anyhow::Result<Job> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut job: Job = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Value::String(p) = &job.input {
            let p = path.parent().unwrap_or(Path::new(".")).join(p);
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            job.input = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
        }
        Ok(job)
    }

    pub fn tolerances(&self) -> anyhow::Result<Tolerances> {
        let mut t = Tolerances::default();
        for (k, v) in &self.tol {
            t.set(k, *v)?;
        }
        Ok(t)
    }

    pub fn require_seed(&self) -> anyhow::Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("this command samples and needs a seed"),
        }
    }

    pub fn input<T: serde::de::DeserializeOwned>(&self) -> anyhow::Result<T> {
        let v = if self.input.is_null() { Value::Object(Map::new()) } else { self.input.clone() };
        serde_json::from_value(v).context("parsing input")
    }
}

/// Command output before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Map<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn put(&mut self, key: &str, v: impl Serialize) -> anyhow::Result<()> {
        self.result.insert(key.into(), serde_json::to_value(v)?);
        Ok(())
    }

    pub fn residual(&mut self, key: &str, v: f64) {
        self.residuals.insert(key.into(), v);
    }

    pub fn verdict(&mut self, key: &str, v: bool) {
        self.verdicts.insert(key.into(), v);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v)
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    #[serde(flatten)]
    pub result: Map<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub passed: bool,
    pub artifacts: Vec<String>,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}
