//! Experiment sweeps: fidelity over every ordered device pair for a
//! two-fragment job, and fidelity/postprocessing-time series along a
//! fragment-count or circuit-size axis.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qcut_core::bench;
use qcut_core::cut::apply_cuts;
use qcut_core::layout;
use qcut_core::reconstruct::{reconstruct, CutPlan};
use qcut_core::sim;
use qcut_core::{Error, Result};

use crate::job::{CircuitSource, CutSpec, JobFile, PoolSource};
use crate::pipeline::simulate_fragment_instances;
use crate::report::to_csv;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCell {
    pub first: String,
    pub second: String,
    pub fidelity: f64,
    /// "tau_max" on the diagonal (both fragments share a device, running
    /// sequentially), "tau_min" off it.
    pub execution_time: String,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSweepReport {
    pub schema_version: u32,
    pub circuit: String,
    pub fragments: Vec<String>,
    pub seed: u64,
    pub cells: Vec<PairCell>,
}

impl PairSweepReport {
    pub fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.first.clone(),
                    c.second.clone(),
                    format!("{}", c.fidelity),
                    c.execution_time.clone(),
                    format!("{}", c.score),
                ]
            })
            .collect();
        to_csv(&["first", "second", "fidelity", "execution_time", "score"], &rows)
    }
}

/// Run the two fragments on every ordered device pair (j, k) that can host
/// them, and report each pair's fidelity against the ideal distribution.
pub fn sweep_pairs(job: &JobFile) -> Result<PairSweepReport> {
    let circuit = job.circuit()?;
    let cut_points = job.cut_points(&circuit)?;
    let pool = job.pool()?;
    let subs = apply_cuts(&circuit, &cut_points)?;
    if subs.len() != 2 {
        return Err(Error::InvalidCut(format!(
            "pair sweep needs exactly 2 subcircuits, got {}",
            subs.len()
        )));
    }
    let matrix = layout::score_matrix(&subs, &pool)?;
    let plan = CutPlan::from_subcircuits(&subs)?;
    let ideal = sim::simulate_ideal(&circuit)?;

    let feasible: Vec<Vec<usize>> = (0..2)
        .map(|i| {
            (0..pool.devices.len())
                .filter(|&j| matrix[i][j].is_some())
                .collect()
        })
        .collect();

    let pairs: Vec<(usize, usize)> = feasible[0]
        .iter()
        .flat_map(|&j| feasible[1].iter().map(move |&k| (j, k)))
        .collect();
    let cells: Result<Vec<PairCell>> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let dists = vec![
                simulate_fragment_instances(
                    &subs[0],
                    &pool.devices[j],
                    &matrix[0][j].as_ref().unwrap().layout,
                    job.noise_scale,
                )?,
                simulate_fragment_instances(
                    &subs[1],
                    &pool.devices[k],
                    &matrix[1][k].as_ref().unwrap().layout,
                    job.noise_scale,
                )?,
            ];
            let recon = reconstruct(&plan, &dists)?;
            let fidelity = sim::fidelity(&recon.clipped, &ideal)?;
            let areas = qcut_core::sched::normalized_areas(&subs);
            let score = matrix[0][j].as_ref().unwrap().score * areas[0]
                + matrix[1][k].as_ref().unwrap().score * areas[1];
            Ok(PairCell {
                first: pool.devices[j].name.clone(),
                second: pool.devices[k].name.clone(),
                fidelity,
                execution_time: if j == k { "tau_max".into() } else { "tau_min".into() },
                score,
            })
        })
        .collect();

    Ok(PairSweepReport {
        schema_version: crate::report::SCHEMA_VERSION,
        circuit: circuit.name.clone(),
        fragments: subs.iter().map(|s| s.circuit.name.clone()).collect(),
        seed: job.seed,
        cells: cells?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingAxis {
    NumSubcircuits,
    CircuitSize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub x: usize,
    pub mean_fidelity: f64,
    pub fidelities: Vec<f64>,
    pub term_count: usize,
    pub reconstruction_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub schema_version: u32,
    pub axis: ScalingAxis,
    pub seeds: u64,
    pub points: Vec<ScalingPoint>,
}

impl ScalingReport {
    pub fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|p| {
                vec![
                    format!("{}", p.x),
                    format!("{}", p.mean_fidelity),
                    format!("{}", p.term_count),
                    format!("{}", p.reconstruction_ms),
                ]
            })
            .collect();
        to_csv(&["x", "mean_fidelity", "term_count", "reconstruction_ms"], &rows)
    }
}

/// Mean cut-pipeline fidelity over `seeds` trials per axis value. Each trial
/// re-rolls the heterogeneous pool jitter; the job template's bench circuit
/// is re-cut canonically per axis value.
pub fn scaling(job: &JobFile, axis: ScalingAxis, values: &[usize], seeds: u64) -> Result<ScalingReport> {
    let spec = match &job.circuit {
        CircuitSource::Bench(spec) => spec.clone(),
        CircuitSource::QasmPath(_) => {
            return Err(Error::Schema {
                path: "circuit".into(),
                msg: "scaling sweeps need a bench circuit template".into(),
            })
        }
    };
    let mut points = Vec::new();
    for &x in values {
        let mut trial_spec = spec.clone();
        let fragments = match axis {
            ScalingAxis::NumSubcircuits => x,
            ScalingAxis::CircuitSize => {
                trial_spec.num_qubits = x;
                2
            }
        };
        let circuit = bench::generate(&trial_spec)?;
        let cut_points = bench::cuts::canonical(&trial_spec, &circuit, fragments)?;
        let ideal = sim::simulate_ideal(&circuit)?;
        let subs = apply_cuts(&circuit, &cut_points)?;
        let plan = CutPlan::from_subcircuits(&subs)?;

        let mut fidelities = Vec::new();
        let mut recon_ms = Vec::new();
        let mut term_count = 0;
        for trial in 0..seeds {
            let mut trial_job = job.clone();
            trial_job.seed = job.seed + trial;
            if let PoolSource::Heterogeneous { seed } = &mut trial_job.pool {
                *seed = Some(trial_job.seed);
            }
            trial_job.circuit = CircuitSource::Bench(trial_spec.clone());
            trial_job.cuts = CutSpec::Points(cut_points.clone());
            let pool = trial_job.pool()?;

            let matrix = layout::score_matrix(&subs, &pool)?;
            let tm = trial_job.time_model();
            let tau = crate::pipeline::budgets(&trial_job, &subs, &tm, &pool)?;
            let problem = crate::pipeline::schedule_problem(&subs, &matrix, &tm, &pool, &tau);
            let schedule = qcut_core::sched::solve_ilp(&problem)?;

            let mut dists = Vec::new();
            for (i, frag) in subs.iter().enumerate() {
                let j = schedule.assignment[i];
                dists.push(simulate_fragment_instances(
                    frag,
                    &pool.devices[j],
                    &matrix[i][j].as_ref().unwrap().layout,
                    trial_job.noise_scale,
                )?);
            }
            let t0 = Instant::now();
            let recon = reconstruct(&plan, &dists)?;
            recon_ms.push(t0.elapsed().as_secs_f64() * 1e3);
            term_count = recon.term_count;
            fidelities.push(sim::fidelity(&recon.clipped, &ideal)?);
        }
        let mean = fidelities.iter().sum::<f64>() / fidelities.len() as f64;
        let mean_ms = recon_ms.iter().sum::<f64>() / recon_ms.len() as f64;
        points.push(ScalingPoint {
            x,
            mean_fidelity: mean,
            fidelities,
            term_count,
            reconstruction_ms: mean_ms,
        });
    }
    Ok(ScalingReport {
        schema_version: crate::report::SCHEMA_VERSION,
        axis,
        seeds,
        points,
    })
}

/// Map of cells keyed "first->second" for JSON emission.
pub fn pair_matrix_json(report: &PairSweepReport) -> BTreeMap<String, PairCell> {
    report
        .cells
        .iter()
        .map(|c| (format!("{}->{}", c.first, c.second), c.clone()))
        .collect()
}
