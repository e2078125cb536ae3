//! The full pipeline: cut, filter, score, schedule, simulate under noise,
//! reconstruct, and compare against the uncut-best-device baseline.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use qcut_core::cut::{apply_cuts, expand_instances, Subcircuit};
use qcut_core::hw::{HardwarePool, HardwareSpec};
use qcut_core::layout::{self, Layout, ScoredLayout};
use qcut_core::reconstruct::{reconstruct, CutPlan, Reconstruction};
use qcut_core::sched::{self, Schedule, ScheduleProblem};
use qcut_core::sim::{self, Distribution, NoiseModel};
use qcut_core::timing::{self, TimeModel};
use qcut_core::{Circuit, Error, Result};

use crate::job::{JobFile, Method, TauPolicy};
use crate::report::*;

pub struct PipelineOutput {
    pub report: PipelineReport,
    pub timing: TimingReport,
}

/// Prefix an error's message with the pipeline stage it came from, keeping
/// the variant (and thus the exit code) intact.
fn tag_stage(stage: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::InvalidCircuit(m) => Error::InvalidCircuit(format!("[{stage}] {m}")),
        Error::InvalidCut(m) => Error::InvalidCut(format!("[{stage}] {m}")),
        Error::InvalidLayout(m) => Error::InvalidLayout(format!("[{stage}] {m}")),
        Error::Infeasible(m) => Error::Infeasible(format!("[{stage}] {m}")),
        Error::ResourceGuard(m) => Error::ResourceGuard(format!("[{stage}] {m}")),
        Error::Reconstruction(m) => Error::Reconstruction(format!("[{stage}] {m}")),
        Error::NoFeasibleHardware(m) => Error::NoFeasibleHardware(format!("[{stage}] {m}")),
        other => other,
    }
}

/// Per-device budgets under a policy, with per-device overrides on top.
pub fn budgets(
    job: &JobFile,
    subs: &[Subcircuit],
    tm: &TimeModel,
    pool: &HardwarePool,
) -> Result<BTreeMap<String, u64>> {
    let mut out = BTreeMap::new();
    match &job.tau {
        TauPolicy::Min => {
            let tau = timing::tau_min(subs, tm);
            for dev in &pool.devices {
                out.insert(dev.name.clone(), tau);
            }
        }
        TauPolicy::Max => {
            let tau = timing::tau_max(subs, tm);
            for dev in &pool.devices {
                out.insert(dev.name.clone(), tau);
            }
        }
        TauPolicy::Uniform(tau) => {
            for dev in &pool.devices {
                out.insert(dev.name.clone(), *tau);
            }
        }
        TauPolicy::Explicit(map) => {
            for dev in &pool.devices {
                let tau = map.get(&dev.name).copied().ok_or_else(|| Error::Schema {
                    path: format!("tau.explicit.{}", dev.name),
                    msg: "missing budget for device".into(),
                })?;
                out.insert(dev.name.clone(), tau);
            }
        }
    }
    for (name, tau) in &job.tau_overrides {
        if !out.contains_key(name) {
            return Err(Error::Schema {
                path: format!("tau_overrides.{name}"),
                msg: "no such device in the pool".into(),
            });
        }
        out.insert(name.clone(), *tau);
    }
    Ok(out)
}

/// Assemble the scheduling problem from fragments, scores, and budgets.
pub fn schedule_problem(
    subs: &[Subcircuit],
    matrix: &[Vec<Option<ScoredLayout>>],
    tm: &TimeModel,
    pool: &HardwarePool,
    tau: &BTreeMap<String, u64>,
) -> ScheduleProblem {
    let areas = sched::normalized_areas(subs);
    ScheduleProblem {
        circuits: subs
            .iter()
            .zip(&areas)
            .map(|(s, &area_norm)| sched::ProblemEntry {
                name: s.circuit.name.clone(),
                area_norm,
                eta: s.instance_count() as u64,
                time: timing::instance_time(s, tm),
            })
            .collect(),
        devices: pool
            .devices
            .iter()
            .map(|d| sched::DeviceEntry { name: d.name.clone(), tau: tau[&d.name] })
            .collect(),
        scores: matrix
            .iter()
            .map(|row| row.iter().map(|c| c.as_ref().map(|s| s.score)).collect())
            .collect(),
    }
}

fn solve(problem: &ScheduleProblem, method: Method) -> Result<(Schedule, String, Option<EquivalenceReport>)> {
    match method {
        Method::Ilp => Ok((sched::solve_ilp(problem)?, "ilp".into(), None)),
        Method::Matching => Ok((sched::solve_matching(problem)?, "matching".into(), None)),
        Method::Both => {
            let ilp = sched::solve_ilp(problem)?;
            let equivalence = match sched::solve_matching(problem) {
                Ok(matching) => EquivalenceReport {
                    checked: true,
                    equal_objective: Some(matching.objective_value == ilp.objective_value),
                    note: if matching.objective_value == ilp.objective_value {
                        "matching and ilp agree".into()
                    } else {
                        format!(
                            "objectives differ: matching {} vs ilp {}",
                            matching.objective_value, ilp.objective_value
                        )
                    },
                },
                Err(e) => EquivalenceReport {
                    checked: true,
                    equal_objective: None,
                    note: format!("matching unavailable: {e}"),
                },
            };
            Ok((ilp, "both(ilp)".into(), Some(equivalence)))
        }
    }
}

/// Noisy distributions for every instance of a fragment on its assigned
/// placement; instances run on the worker pool, collected in order.
pub fn simulate_fragment_instances(
    frag: &Subcircuit,
    dev: &HardwareSpec,
    layout: &Layout,
    noise_scale: f64,
) -> Result<Vec<Distribution>> {
    expand_instances(frag)
        .par_iter()
        .map(|inst| {
            if inst.circuit.measured_qubits().is_empty() {
                return Ok(Distribution::scalar());
            }
            let nm = NoiseModel::from_layout(&inst.circuit, dev, layout, noise_scale)?;
            sim::simulate_noisy(&inst.circuit, &nm)
        })
        .collect()
}

/// Best (device, layout) across the pool for a whole circuit, by score.
pub fn best_placement<'p>(
    c: &Circuit,
    pool: &'p HardwarePool,
) -> Option<(&'p HardwareSpec, ScoredLayout)> {
    let mut best: Option<(&HardwareSpec, ScoredLayout)> = None;
    for dev in &pool.devices {
        if dev.num_qubits < c.num_qubits {
            continue;
        }
        match layout::best_layout(c, dev) {
            Ok(scored) => {
                let better = best.as_ref().is_none_or(|(_, b)| scored.score < b.score);
                if better {
                    best = Some((dev, scored));
                }
            }
            Err(Error::NoEmbedding { .. }) => continue,
            Err(_) => continue,
        }
    }
    best
}

pub fn run_pipeline(job: &JobFile) -> Result<PipelineOutput> {
    let started = Instant::now();
    let circuit = job.circuit()?;
    let cut_points = job.cut_points(&circuit)?;
    let pool = job.pool()?;
    let tm = job.time_model();

    let subs = apply_cuts(&circuit, &cut_points).map_err(tag_stage("cut"))?;
    for sub in &subs {
        if qcut_core::hw::feasible_hardware(sub, &pool).is_empty() {
            return Err(tag_stage("feasibility")(Error::NoFeasibleHardware(
                sub.circuit.name.clone(),
            )));
        }
    }
    let matrix = layout::score_matrix(&subs, &pool).map_err(tag_stage("score"))?;
    let tau = budgets(job, &subs, &tm, &pool)?;
    let problem = schedule_problem(&subs, &matrix, &tm, &pool, &tau);
    let (schedule, method_label, equivalence) =
        solve(&problem, job.method).map_err(tag_stage("schedule"))?;
    if !sched::verify_schedule(&problem, &schedule) {
        return Err(Error::Infeasible(
            "[schedule] solver output failed schedule verification".into(),
        ));
    }

    // Noisy execution of every instance on its assigned placement.
    let mut instance_dists: Vec<Vec<Distribution>> = Vec::with_capacity(subs.len());
    for (i, frag) in subs.iter().enumerate() {
        let j = schedule.assignment[i];
        let placed = matrix[i][j].as_ref().expect("schedule uses feasible cells");
        instance_dists.push(
            simulate_fragment_instances(frag, &pool.devices[j], &placed.layout, job.noise_scale)
                .map_err(tag_stage("simulate"))?,
        );
    }

    let plan = CutPlan::from_subcircuits(&subs).map_err(tag_stage("reconstruct"))?;
    let recon_started = Instant::now();
    let recon = reconstruct(&plan, &instance_dists).map_err(tag_stage("reconstruct"))?;
    let reconstruction_ms = recon_started.elapsed().as_secs_f64() * 1e3;

    let ideal = sim::simulate_ideal(&circuit).map_err(tag_stage("fidelity"))?;
    let cut_fidelity = sim::fidelity(&recon.clipped, &ideal)?;

    // Uncut baseline on its own best placement, when one exists and fits
    // the noisy-simulation guard.
    let mut fid = FidelityReport {
        cut: cut_fidelity,
        uncut: None,
        uncut_hardware: None,
        uncut_layout: None,
        uncut_unavailable: None,
        input: "clipped_renormalized".into(),
    };
    match best_placement(&circuit, &pool) {
        Some((dev, scored)) => {
            if circuit.num_qubits <= sim::NOISY_QUBIT_GUARD {
                let nm = NoiseModel::from_layout(&circuit, dev, &scored.layout, job.noise_scale)?;
                let noisy = sim::simulate_noisy(&circuit, &nm)?;
                fid.uncut = Some(sim::fidelity(&noisy, &ideal)?);
                fid.uncut_hardware = Some(dev.name.clone());
                fid.uncut_layout = Some(scored.layout.0.clone());
            } else {
                fid.uncut_unavailable = Some(format!(
                    "{} qubits exceed the noisy-simulation guard of {}",
                    circuit.num_qubits,
                    sim::NOISY_QUBIT_GUARD
                ));
            }
        }
        None => {
            fid.uncut_unavailable = Some(
                "no device in the pool can host the uncut circuit".into(),
            );
        }
    }

    let report = assemble_report(
        job, &circuit, &subs, &matrix, &pool, &tau, &problem, &schedule, method_label,
        equivalence, &instance_dists, &recon, fid,
    );
    let timing = TimingReport {
        reconstruction_ms,
        total_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok(PipelineOutput { report, timing })
}

#[allow(clippy::too_many_arguments)]
fn assemble_report(
    job: &JobFile,
    circuit: &Circuit,
    subs: &[Subcircuit],
    matrix: &[Vec<Option<ScoredLayout>>],
    pool: &HardwarePool,
    tau: &BTreeMap<String, u64>,
    problem: &ScheduleProblem,
    schedule: &Schedule,
    method_label: String,
    equivalence: Option<EquivalenceReport>,
    instance_dists: &[Vec<Distribution>],
    recon: &Reconstruction,
    fidelity: FidelityReport,
) -> PipelineReport {
    let areas = sched::normalized_areas(subs);
    let tm = job.time_model();
    let subcircuits = subs
        .iter()
        .zip(&areas)
        .map(|(s, &area_norm)| SubcircuitReport {
            name: s.circuit.name.clone(),
            num_qubits: s.circuit.num_qubits,
            instances: s.instance_count(),
            time: timing::instance_time(s, &tm),
            area: s.circuit.area(),
            area_norm,
            measure_cut_wires: s.measure_cut_wires.clone(),
            prepare_cut_wires: s.prepare_cut_wires.clone(),
            output_wires: s.output_wires.clone(),
        })
        .collect();

    let mut q_matrix = BTreeMap::new();
    for (i, sub) in subs.iter().enumerate() {
        let mut row = BTreeMap::new();
        for (j, dev) in pool.devices.iter().enumerate() {
            row.insert(dev.name.clone(), matrix[i][j].as_ref().map(CellReport::from));
        }
        q_matrix.insert(sub.circuit.name.clone(), row);
    }

    let mut assignment = BTreeMap::new();
    let mut loads = BTreeMap::new();
    for (i, sub) in subs.iter().enumerate() {
        let j = schedule.assignment[i];
        let placed = matrix[i][j].as_ref().expect("feasible");
        assignment.insert(
            sub.circuit.name.clone(),
            AssignmentReport {
                hardware: pool.devices[j].name.clone(),
                layout: placed.layout.0.clone(),
                score: placed.score,
            },
        );
    }
    for (j, dev) in pool.devices.iter().enumerate() {
        loads.insert(dev.name.clone(), schedule.loads[j]);
    }

    let mut instance_digests = BTreeMap::new();
    for (sub, dists) in subs.iter().zip(instance_dists) {
        instance_digests.insert(
            sub.circuit.name.clone(),
            dists.iter().map(digest_distribution).collect(),
        );
    }

    let mut notes = BTreeMap::new();
    notes.insert(
        "instance_time_rule".into(),
        "max over a subcircuit's instances of the level time, times eta".into(),
    );

    PipelineReport {
        schema_version: SCHEMA_VERSION,
        circuit: circuit.name.clone(),
        num_qubits: circuit.num_qubits,
        noise_scale: job.noise_scale,
        seed: job.seed,
        subcircuits,
        q_matrix,
        schedule: ScheduleReport {
            method: method_label,
            assignment,
            objective: schedule.objective_value,
            loads,
            tau: tau.clone(),
            tau_policy: match &job.tau {
                TauPolicy::Min => "min".into(),
                TauPolicy::Max => "max".into(),
                TauPolicy::Uniform(units) => format!("uniform({units})"),
                TauPolicy::Explicit(_) => "explicit".into(),
            },
            tie_break: "lexicographic (subcircuit index, hardware name)".into(),
            verified: sched::verify_schedule(problem, schedule),
            equivalence,
        },
        instance_digests,
        reconstruction: ReconstructionReport {
            term_count: recon.term_count,
            raw: dist_map(&recon.raw),
            clipped: dist_map(&recon.clipped),
        },
        fidelity,
        notes,
    }
}
