//! Job files: everything one pipeline run needs, as JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qcut_core::bench::{self, BenchSpec};
use qcut_core::cut::CutPoint;
use qcut_core::hw::{self, HardwarePool};
use qcut_core::timing::TimeModel;
use qcut_core::{qasm, Circuit, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitSource {
    QasmPath(PathBuf),
    Bench(BenchSpec),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSpec {
    /// Explicit cut points.
    Points(Vec<CutPoint>),
    /// The benchmark family's standard cut for this fragment count
    /// (bench circuits only).
    Canonical { fragments: usize },
    /// Leave the circuit whole.
    #[default]
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolSource {
    Path(PathBuf),
    /// Bundled Table-2 pool with uniform per-device averages.
    Table2,
    /// Bundled pool with seeded +-50% per-qubit/per-edge jitter; when
    /// `seed` is absent the job seed is used.
    Heterogeneous { seed: Option<u64> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauPolicy {
    #[default]
    Min,
    Max,
    /// One budget for every device.
    Uniform(u64),
    Explicit(BTreeMap<String, u64>),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Ilp,
    Matching,
    Both,
}

fn default_noise_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobFile {
    pub circuit: CircuitSource,
    #[serde(default)]
    pub cuts: CutSpec,
    pub pool: PoolSource,
    #[serde(default)]
    pub time_model: Option<TimeModel>,
    #[serde(default)]
    pub tau: TauPolicy,
    /// Per-device budget overrides applied on top of the policy.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tau_overrides: BTreeMap<String, u64>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_noise_scale")]
    pub noise_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl JobFile {
    pub fn load(path: impl AsRef<Path>) -> Result<JobFile> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let job: JobFile = serde_json::from_str(&text).map_err(|e| Error::Schema {
            path: path.as_ref().display().to_string(),
            msg: e.to_string(),
        })?;
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_scale.is_nan() || self.noise_scale < 0.0 {
            return Err(Error::Schema {
                path: "noise_scale".into(),
                msg: format!("must be non-negative, got {}", self.noise_scale),
            });
        }
        if let CircuitSource::QasmPath(p) = &self.circuit {
            if !p.exists() {
                return Err(Error::Schema {
                    path: "circuit.qasm_path".into(),
                    msg: format!("file `{}` does not exist", p.display()),
                });
            }
        }
        if let PoolSource::Path(p) = &self.pool {
            if !p.exists() {
                return Err(Error::Schema {
                    path: "pool.path".into(),
                    msg: format!("file `{}` does not exist", p.display()),
                });
            }
        }
        if let CutSpec::Canonical { .. } = &self.cuts {
            if matches!(self.circuit, CircuitSource::QasmPath(_)) {
                return Err(Error::Schema {
                    path: "cuts".into(),
                    msg: "canonical cuts need a bench circuit source".into(),
                });
            }
        }
        Ok(())
    }

    pub fn circuit(&self) -> Result<Circuit> {
        match &self.circuit {
            CircuitSource::QasmPath(path) => {
                let text = std::fs::read_to_string(path)?;
                let mut c = qasm::parse_qasm(&text)?;
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    c.name = stem.to_string();
                }
                Ok(c)
            }
            CircuitSource::Bench(spec) => bench::generate(spec),
        }
    }

    pub fn cut_points(&self, circuit: &Circuit) -> Result<Vec<CutPoint>> {
        match &self.cuts {
            CutSpec::None => Ok(Vec::new()),
            CutSpec::Points(points) => Ok(points.clone()),
            CutSpec::Canonical { fragments } => match &self.circuit {
                CircuitSource::Bench(spec) => bench::cuts::canonical(spec, circuit, *fragments),
                CircuitSource::QasmPath(_) => unreachable!("validated"),
            },
        }
    }

    pub fn pool(&self) -> Result<HardwarePool> {
        match &self.pool {
            PoolSource::Path(path) => hw::load_pool(path),
            PoolSource::Table2 => Ok(hw::fixtures::table2_pool()),
            PoolSource::Heterogeneous { seed } => {
                Ok(hw::fixtures::heterogeneous_pool(seed.unwrap_or(self.seed)))
            }
        }
    }

    pub fn time_model(&self) -> TimeModel {
        self.time_model.unwrap_or_default()
    }
}
