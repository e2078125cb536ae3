//! Report types. Everything serialized here is deterministic for a fixed
//! job and seed: maps are ordered, floats print shortest-roundtrip, and
//! wall-clock numbers live in a separate timing side file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qcut_core::layout::ScoredLayout;
use qcut_core::sim::Distribution;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubcircuitReport {
    pub name: String,
    pub num_qubits: usize,
    /// Tomographic instance count (eta).
    pub instances: usize,
    /// Per-instance execution time estimate (max over instances).
    pub time: u64,
    pub area: usize,
    pub area_norm: f64,
    pub measure_cut_wires: Vec<usize>,
    pub prepare_cut_wires: Vec<usize>,
    pub output_wires: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub score: f64,
    pub layout: Vec<usize>,
}

impl From<&ScoredLayout> for CellReport {
    fn from(s: &ScoredLayout) -> Self {
        CellReport { score: s.score, layout: s.layout.0.clone() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentReport {
    pub hardware: String,
    pub layout: Vec<usize>,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub checked: bool,
    pub equal_objective: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub method: String,
    pub assignment: BTreeMap<String, AssignmentReport>,
    pub objective: f64,
    pub loads: BTreeMap<String, u64>,
    pub tau: BTreeMap<String, u64>,
    pub tau_policy: String,
    pub tie_break: String,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityReport {
    pub cut: f64,
    /// Noisy fidelity of the whole circuit on its best device, absent when
    /// nothing in the pool can host it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncut_hardware: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncut_layout: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncut_unavailable: Option<String>,
    /// Which reconstruction variant fidelity consumed.
    pub input: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub term_count: usize,
    pub raw: BTreeMap<String, f64>,
    pub clipped: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    pub circuit: String,
    pub num_qubits: usize,
    pub noise_scale: f64,
    pub seed: u64,
    pub subcircuits: Vec<SubcircuitReport>,
    /// Rows: subcircuits; columns: hardware names; null cells infeasible.
    pub q_matrix: BTreeMap<String, BTreeMap<String, Option<CellReport>>>,
    pub schedule: ScheduleReport,
    /// Digest per instance distribution, per subcircuit.
    pub instance_digests: BTreeMap<String, Vec<String>>,
    pub reconstruction: ReconstructionReport,
    pub fidelity: FidelityReport,
    pub notes: BTreeMap<String, String>,
}

/// Wall-clock numbers, kept out of the deterministic report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingReport {
    pub reconstruction_ms: f64,
    pub total_ms: f64,
}

/// FNV-1a over the canonical JSON encoding; stable across runs.
pub fn digest_distribution(d: &Distribution) -> String {
    let json = serde_json::to_string(&d.to_map()).expect("distribution serializes");
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in json.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

pub fn dist_map(d: &Distribution) -> BTreeMap<String, f64> {
    d.to_map()
}

/// Rows of (key columns..., value columns...) to a CSV string.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
