use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcut_cli::job::{JobFile, Method, PoolSource, TauPolicy};
use qcut_cli::pipeline::{run_pipeline, PipelineOutput};
use qcut_cli::report::TimingReport;
use qcut_cli::sweep::{pair_matrix_json, scaling, sweep_pairs, ScalingAxis};
use qcut_core::bench::{BenchFamily, BenchSpec};
use qcut_core::cut::{apply_cuts, expand_instances, CutPoint};
use qcut_core::hw;
use qcut_core::layout::{self, Layout};
use qcut_core::qasm::{emit_qasm, parse_qasm};
use qcut_core::reconstruct::{reconstruct, term_count, CutPlan};
use qcut_core::sim::{self, Distribution, NoiseModel};
use qcut_core::timing::{estimate_time, TimeModel};
use qcut_core::{Circuit, Error, Result};

#[derive(Parser)]
#[command(
    name = "qcut",
    version,
    about = "Cut quantum circuits, score placements, schedule fragments under time budgets, simulate, and reconstruct"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: GlobalOverrides,
}

#[derive(Args, Clone)]
struct GlobalOverrides {
    /// Hardware pool JSON (overrides the job file's pool).
    #[arg(long, global = true)]
    pool: Option<PathBuf>,
    /// Seed for seeded fixtures and trial variation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Duration units of a single-qubit level.
    #[arg(long, global = true)]
    t1: Option<u64>,
    /// Duration units of a level containing a two-qubit gate.
    #[arg(long, global = true)]
    t2: Option<u64>,
    /// Budget policy: "min", "max", or a number of duration units.
    #[arg(long, global = true)]
    tau: Option<String>,
    /// Per-device budget override, NAME=UNITS (repeatable).
    #[arg(long = "tau-for", global = true)]
    tau_for: Vec<String>,
    /// Multiplier on every calibration error probability.
    #[arg(long, global = true)]
    noise_scale: Option<f64>,
    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    RealAmplitudes,
    BernsteinVazirani,
    RippleAdder,
    Trotter,
}

impl From<FamilyArg> for BenchFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::RealAmplitudes => BenchFamily::RealAmplitudes,
            FamilyArg::BernsteinVazirani => BenchFamily::BernsteinVazirani,
            FamilyArg::RippleAdder => BenchFamily::RippleAdder,
            FamilyArg::Trotter => BenchFamily::Trotter,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ilp,
    Matching,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    NumSubcircuits,
    CircuitSize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark circuit as QASM text.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        secret: Option<String>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value_t = qcut_core::bench::DEFAULT_ANGLE_SEED)]
        angle_seed: u64,
    },
    /// Cut a circuit and write fragments, instances, and the cut plan.
    Cut {
        #[arg(long)]
        circuit: PathBuf,
        /// Cut point QUBIT:AFTER_GATE (repeatable).
        #[arg(long = "cut")]
        cuts: Vec<String>,
    },
    /// Score (subcircuit, hardware) pairs: best layout and Q per cell.
    Score {
        #[arg(long, conflicts_with = "circuit")]
        job: Option<PathBuf>,
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Level counts and the execution-time estimate of a circuit.
    EstimateTime {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Cut, score, and schedule without simulating.
    Schedule {
        #[arg(long)]
        job: PathBuf,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Exact output distribution of one circuit (noisy when a device and
    /// layout are given).
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        device: Option<String>,
        /// Comma-separated physical qubits hosting logical 0,1,...
        #[arg(long)]
        layout: Option<String>,
    },
    /// Combine simulated instance distributions from a `cut` directory into
    /// the uncut distribution.
    Reconstruct {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Full run: cut, score, schedule, simulate under noise, reconstruct,
    /// and compare against the uncut baseline.
    Pipeline {
        #[arg(long)]
        job: PathBuf,
    },
    /// Fidelity of a two-fragment job on every ordered device pair.
    SweepPairs {
        #[arg(long)]
        job: PathBuf,
    },
    /// Fidelity series along a fragment-count or circuit-size axis.
    Scaling {
        #[arg(long)]
        job: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated axis values, e.g. 2,3,4.
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ov = cli.overrides.clone();
    match cli.command {
        Command::Gen { family, qubits, reps, secret, steps, angle_seed } => {
            let spec = BenchSpec {
                family: family.into(),
                num_qubits: qubits,
                reps,
                secret,
                steps,
                angle_seed,
            };
            let circuit = qcut_core::bench::generate(&spec)?;
            emit_text(&ov, "circuit.qasm", &emit_qasm(&circuit))
        }
        Command::Cut { circuit, cuts } => cmd_cut(&ov, &circuit, &cuts),
        Command::Score { job, circuit } => cmd_score(&ov, job, circuit),
        Command::EstimateTime { circuit } => {
            let c = load_circuit(&circuit)?;
            let tm = time_model_from(&ov);
            let seq = c.levels();
            let payload = serde_json::json!({
                "kappa1": seq.kappa1(),
                "kappa2": seq.kappa2(),
                "time": estimate_time(&c, &tm),
                "t1": tm.t1,
                "t2": tm.t2,
            });
            emit_json(&ov, "estimate.json", &payload)
        }
        Command::Schedule { job, method } => {
            let mut job = load_job(&ov, &job)?;
            if let Some(m) = method {
                job.method = match m {
                    MethodArg::Ilp => Method::Ilp,
                    MethodArg::Matching => Method::Matching,
                    MethodArg::Both => Method::Both,
                };
            }
            let out = run_pipeline_schedule_only(&job)?;
            emit_json(&ov, "schedule.json", &out)
        }
        Command::Simulate { circuit, device, layout } => {
            cmd_simulate(&ov, &circuit, device, layout)
        }
        Command::Reconstruct { dir } => cmd_reconstruct(&ov, &dir),
        Command::Pipeline { job } => {
            let job = load_job(&ov, &job)?;
            let PipelineOutput { report, timing } = run_pipeline(&job)?;
            emit_json(&ov, "report.json", &report)?;
            write_timing(&ov, &timing)
        }
        Command::SweepPairs { job } => {
            let job = load_job(&ov, &job)?;
            let report = sweep_pairs(&job)?;
            let payload = serde_json::json!({
                "schema_version": report.schema_version,
                "circuit": report.circuit,
                "fragments": report.fragments,
                "seed": report.seed,
                "cells": pair_matrix_json(&report),
            });
            emit_json(&ov, "pairs.json", &payload)?;
            if let Some(dir) = &ov.out {
                std::fs::write(dir.join("pairs.csv"), report.csv())?;
            }
            Ok(())
        }
        Command::Scaling { job, axis, values, seeds } => {
            let job = load_job(&ov, &job)?;
            let axis = match axis {
                AxisArg::NumSubcircuits => ScalingAxis::NumSubcircuits,
                AxisArg::CircuitSize => ScalingAxis::CircuitSize,
            };
            let values = parse_values(&values)?;
            let report = scaling(&job, axis, &values, seeds)?;
            emit_json(&ov, "scaling.json", &report)?;
            if let Some(dir) = &ov.out {
                std::fs::write(dir.join("scaling.csv"), report.csv())?;
            }
            Ok(())
        }
    }
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)?;
    let mut c = parse_qasm(&text)?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        c.name = stem.to_string();
    }
    Ok(c)
}

fn time_model_from(ov: &GlobalOverrides) -> TimeModel {
    let mut tm = TimeModel::default();
    if let Some(t1) = ov.t1 {
        tm.t1 = t1;
    }
    if let Some(t2) = ov.t2 {
        tm.t2 = t2;
    }
    tm
}

fn load_job(ov: &GlobalOverrides, path: &Path) -> Result<JobFile> {
    let mut job = JobFile::load(path)?;
    if let Some(pool) = &ov.pool {
        job.pool = PoolSource::Path(pool.clone());
    }
    if let Some(seed) = ov.seed {
        job.seed = seed;
    }
    if ov.t1.is_some() || ov.t2.is_some() {
        let mut tm = job.time_model();
        if let Some(t1) = ov.t1 {
            tm.t1 = t1;
        }
        if let Some(t2) = ov.t2 {
            tm.t2 = t2;
        }
        job.time_model = Some(tm);
    }
    if let Some(tau) = &ov.tau {
        job.tau = match tau.as_str() {
            "min" => TauPolicy::Min,
            "max" => TauPolicy::Max,
            other => TauPolicy::Uniform(other.parse().map_err(|_| Error::Schema {
                path: "--tau".into(),
                msg: format!("expected `min`, `max`, or units, got `{other}`"),
            })?),
        };
    }
    for spec in &ov.tau_for {
        let (name, units) = spec.split_once('=').ok_or_else(|| Error::Schema {
            path: "--tau-for".into(),
            msg: format!("expected NAME=UNITS, got `{spec}`"),
        })?;
        let units: u64 = units.parse().map_err(|_| Error::Schema {
            path: "--tau-for".into(),
            msg: format!("invalid units in `{spec}`"),
        })?;
        job.tau_overrides.insert(name.to_string(), units);
    }
    if let Some(scale) = ov.noise_scale {
        job.noise_scale = scale;
    }
    if let Some(out) = &ov.out {
        job.out_dir = Some(out.clone());
    }
    job.validate()?;
    Ok(job)
}

fn parse_values(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|p| {
            p.trim().parse().map_err(|_| Error::Schema {
                path: "--values".into(),
                msg: format!("invalid value `{p}`"),
            })
        })
        .collect()
}

fn emit_json<T: serde::Serialize>(ov: &GlobalOverrides, filename: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(dir) = &ov.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(filename), format!("{text}\n"))?;
    }
    Ok(())
}

fn emit_text(ov: &GlobalOverrides, filename: &str, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(dir) = &ov.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(filename), text)?;
    }
    Ok(())
}

fn write_timing(ov: &GlobalOverrides, timing: &TimingReport) -> Result<()> {
    if let Some(dir) = &ov.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("timing.json"), serde_json::to_string_pretty(timing)?)?;
    }
    Ok(())
}

fn cmd_cut(ov: &GlobalOverrides, circuit: &Path, cut_args: &[String]) -> Result<()> {
    let c = load_circuit(circuit)?;
    let mut cuts = Vec::new();
    for spec in cut_args {
        let (q, g) = spec.split_once(':').ok_or_else(|| Error::InvalidCut(format!(
            "expected QUBIT:AFTER_GATE, got `{spec}`"
        )))?;
        cuts.push(CutPoint {
            qubit: q.trim().parse().map_err(|_| Error::InvalidCut(format!("bad qubit in `{spec}`")))?,
            after_gate: g
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCut(format!("bad gate index in `{spec}`")))?,
        });
    }
    let frags = apply_cuts(&c, &cuts)?;
    let plan = CutPlan::from_subcircuits(&frags)?;
    let dir = ov.out.clone().ok_or_else(|| Error::Schema {
        path: "--out".into(),
        msg: "cut needs an output directory".into(),
    })?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("plan.json"), serde_json::to_string_pretty(&plan)?)?;
    std::fs::write(dir.join("subcircuits.json"), serde_json::to_string_pretty(&frags)?)?;
    let mut manifest = Vec::new();
    for (i, frag) in frags.iter().enumerate() {
        std::fs::write(dir.join(format!("frag_{i}.qasm")), emit_qasm(&frag.circuit))?;
        let instances = expand_instances(frag);
        for (j, inst) in instances.iter().enumerate() {
            std::fs::write(
                dir.join(format!("frag_{i}_inst_{j}.qasm")),
                emit_qasm(&inst.circuit),
            )?;
        }
        manifest.push(serde_json::json!({
            "fragment": frag.circuit.name,
            "qubits": frag.circuit.num_qubits,
            "instances": instances.len(),
            "labels": instances.iter().map(|x| x.label()).collect::<Vec<_>>(),
        }));
    }
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    Ok(())
}

fn cmd_score(ov: &GlobalOverrides, job: Option<PathBuf>, circuit: Option<PathBuf>) -> Result<()> {
    let (subs, pool) = match (job, circuit) {
        (Some(path), None) => {
            let job = load_job(ov, &path)?;
            let c = job.circuit()?;
            let cuts = job.cut_points(&c)?;
            (apply_cuts(&c, &cuts)?, job.pool()?)
        }
        (None, Some(path)) => {
            let c = load_circuit(&path)?;
            let pool = match &ov.pool {
                Some(p) => hw::load_pool(p)?,
                None => hw::fixtures::table2_pool(),
            };
            (apply_cuts(&c, &[])?, pool)
        }
        _ => {
            return Err(Error::Schema {
                path: "score".into(),
                msg: "pass exactly one of --job or --circuit".into(),
            })
        }
    };
    let matrix = layout::score_matrix(&subs, &pool)?;
    let mut rows = BTreeMap::new();
    for (i, sub) in subs.iter().enumerate() {
        let mut row = BTreeMap::new();
        for (j, dev) in pool.devices.iter().enumerate() {
            row.insert(
                dev.name.clone(),
                matrix[i][j].as_ref().map(|s| {
                    serde_json::json!({"score": s.score, "layout": s.layout.0})
                }),
            );
        }
        rows.insert(sub.circuit.name.clone(), row);
    }
    emit_json(ov, "scores.json", &rows)
}

fn run_pipeline_schedule_only(job: &JobFile) -> Result<serde_json::Value> {
    use qcut_cli::pipeline::{budgets, schedule_problem};
    let circuit = job.circuit()?;
    let cuts = job.cut_points(&circuit)?;
    let pool = job.pool()?;
    let tm = job.time_model();
    let subs = apply_cuts(&circuit, &cuts)?;
    let matrix = layout::score_matrix(&subs, &pool)?;
    let tau = budgets(job, &subs, &tm, &pool)?;
    let problem = schedule_problem(&subs, &matrix, &tm, &pool, &tau);
    let run = |label: &str, schedule: qcut_core::sched::Schedule| {
        let mut assignment = BTreeMap::new();
        for (i, sub) in subs.iter().enumerate() {
            assignment.insert(
                sub.circuit.name.clone(),
                pool.devices[schedule.assignment[i]].name.clone(),
            );
        }
        serde_json::json!({
            "method": label,
            "assignment": assignment,
            "objective": schedule.objective_value,
            "loads": pool
                .devices
                .iter()
                .enumerate()
                .map(|(j, d)| (d.name.clone(), schedule.loads[j]))
                .collect::<BTreeMap<_, _>>(),
            "verified": qcut_core::sched::verify_schedule(&problem, &schedule),
        })
    };
    match job.method {
        Method::Ilp => Ok(run("ilp", qcut_core::sched::solve_ilp(&problem)?)),
        Method::Matching => Ok(run("matching", qcut_core::sched::solve_matching(&problem)?)),
        Method::Both => {
            let ilp = qcut_core::sched::solve_ilp(&problem)?;
            let matching = qcut_core::sched::solve_matching(&problem);
            let equal = matching
                .as_ref()
                .map(|m| m.objective_value == ilp.objective_value)
                .ok();
            let mut value = run("both(ilp)", ilp);
            value["equivalence"] = serde_json::json!({
                "checked": true,
                "equal_objective": equal,
            });
            Ok(value)
        }
    }
}

fn cmd_simulate(
    ov: &GlobalOverrides,
    circuit: &Path,
    device: Option<String>,
    layout_arg: Option<String>,
) -> Result<()> {
    let c = load_circuit(circuit)?;
    let dist: Distribution = match device {
        None => sim::simulate_ideal(&c)?,
        Some(name) => {
            let pool = match &ov.pool {
                Some(p) => hw::load_pool(p)?,
                None => hw::fixtures::table2_pool(),
            };
            let dev = pool.get(&name).ok_or_else(|| Error::Schema {
                path: "--device".into(),
                msg: format!("no device named `{name}` in the pool"),
            })?;
            let layout = match layout_arg {
                Some(text) => Layout(
                    text.split(',')
                        .map(|p| {
                            p.trim().parse().map_err(|_| Error::InvalidLayout(format!(
                                "bad layout entry `{p}`"
                            )))
                        })
                        .collect::<Result<Vec<usize>>>()?,
                ),
                None => layout::best_layout(&c, dev)?.layout,
            };
            let scale = ov.noise_scale.unwrap_or(1.0);
            let nm = NoiseModel::from_layout(&c, dev, &layout, scale)?;
            sim::simulate_noisy(&c, &nm)?
        }
    };
    emit_json(ov, "distribution.json", &dist.to_map())
}

fn cmd_reconstruct(ov: &GlobalOverrides, dir: &Path) -> Result<()> {
    let plan: CutPlan = serde_json::from_str(&std::fs::read_to_string(dir.join("plan.json"))?)?;
    let mut dists: Vec<Vec<Distribution>> = Vec::new();
    for (i, frag) in plan.fragments.iter().enumerate() {
        let m = frag.cut_measure.len() as u32;
        let p = frag.cut_prepare.len() as u32;
        let count = 3usize.pow(m) * 4usize.pow(p);
        let mut frag_dists = Vec::with_capacity(count);
        for j in 0..count {
            let path = dir.join(format!("dist_f{i}_i{j}.json"));
            let map: BTreeMap<String, f64> = serde_json::from_str(
                &std::fs::read_to_string(&path).map_err(|e| {
                    Error::Reconstruction(format!(
                        "missing instance distribution `{}`: {e}",
                        path.display()
                    ))
                })?,
            )?;
            frag_dists.push(dist_from_map(&map)?);
        }
        dists.push(frag_dists);
    }
    let started = std::time::Instant::now();
    let recon = reconstruct(&plan, &dists)?;
    let ms = started.elapsed().as_secs_f64() * 1e3;
    let payload = serde_json::json!({
        "term_count": term_count(plan.num_cuts),
        "raw": recon.raw.to_map(),
        "clipped": recon.clipped.to_map(),
    });
    emit_json(ov, "reconstruction.json", &payload)?;
    write_timing(ov, &TimingReport { reconstruction_ms: ms, total_ms: ms })
}

fn dist_from_map(map: &BTreeMap<String, f64>) -> Result<Distribution> {
    let num_bits = map.keys().next().map_or(0, |k| k.len());
    let mut dist = Distribution::zeros(num_bits);
    for (key, &p) in map {
        if key.len() != num_bits || !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Reconstruction(format!("bad bitstring key `{key}`")));
        }
        let mut idx = 0usize;
        for (j, b) in key.bytes().enumerate() {
            if b == b'1' {
                idx |= 1 << j;
            }
        }
        dist.probs[idx] = p;
    }
    Ok(dist)
}
