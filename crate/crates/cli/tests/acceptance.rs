//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers once its assertions hold.

use std::collections::BTreeMap;
use std::time::Instant;

use qcut_cli::job::{CircuitSource, CutSpec, JobFile, Method, PoolSource, TauPolicy};
use qcut_cli::pipeline::run_pipeline;
use qcut_cli::sweep::{scaling, sweep_pairs, ScalingAxis};
use qcut_core::bench::{self, BenchFamily, BenchSpec};
use qcut_core::cut::{apply_cuts, expand_instances};
use qcut_core::reconstruct::{reconstruct, term_count, CutPlan};
use qcut_core::sched::{self, ScheduleProblem};
use qcut_core::sim::{self, Distribution};
use qcut_core::testkit;
use qcut_core::timing::{estimate_time, TimeModel};

fn bench_job(family: BenchFamily, qubits: usize, fragments: usize, seed: u64) -> JobFile {
    JobFile {
        circuit: CircuitSource::Bench(BenchSpec::new(family, qubits)),
        cuts: CutSpec::Canonical { fragments },
        pool: PoolSource::Heterogeneous { seed: Some(seed) },
        time_model: None,
        tau: TauPolicy::Min,
        tau_overrides: BTreeMap::new(),
        method: Method::Ilp,
        noise_scale: 1.0,
        seed,
        out_dir: None,
    }
}

#[test]
fn criterion_1_time_model_ground_truth() {
    let started = Instant::now();
    let tm = TimeModel::default();
    let circuit = bench::real_amplitudes(6, 1, bench::DEFAULT_ANGLE_SEED).unwrap();
    let uncut = estimate_time(&circuit, &tm);
    let cuts = bench::cuts::ra_chain(&circuit, 2).unwrap();
    let frags = apply_cuts(&circuit, &cuts).unwrap();
    let mut times: Vec<u64> = frags.iter().map(|f| estimate_time(&f.circuit, &tm)).collect();
    times.sort_unstable();
    assert_eq!(uncut, 52);
    assert_eq!(times, vec![22, 32]);
    assert!(started.elapsed().as_secs() < 1);
    println!(
        "[criterion 1] PASS - level times 52 (uncut), 22 and 32 (subcircuits) with t1=1, t2=10 ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_2_reconstruction_exactness() {
    let started = Instant::now();
    let mut rng = testkit::rng(0x5eed);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let qubits = 4 + (trial % 5);
        let cuts = 1 + (trial % 2);
        let (circuit, cut_points, frags) =
            testkit::random_cut_circuit(&mut rng, qubits, cuts, 8);
        let plan = CutPlan::from_subcircuits(&frags).unwrap();
        let dists: Vec<Vec<Distribution>> = frags
            .iter()
            .map(|frag| {
                expand_instances(frag)
                    .iter()
                    .map(|inst| {
                        if inst.circuit.measured_qubits().is_empty() {
                            Distribution::scalar()
                        } else {
                            sim::simulate_ideal(&inst.circuit).unwrap()
                        }
                    })
                    .collect()
            })
            .collect();
        let recon = reconstruct(&plan, &dists).unwrap();
        let ideal = sim::simulate_ideal(&circuit).unwrap();
        let l1 = recon.raw.l1_distance(&ideal);
        assert!(
            l1 <= 1e-8,
            "trial {trial} ({qubits} qubits, {} cuts at {:?}): L1 = {l1}",
            cuts,
            cut_points
        );
        worst = worst.max(l1);
    }
    assert!(started.elapsed().as_secs() < 60);
    println!(
        "[criterion 2] PASS - 50 random cut circuits reconstruct with worst L1 {worst:.2e} ({:?})",
        started.elapsed()
    );
}

/// Exhaustive oracle: minimum over all |H|^|C| assignments, same tie-break.
fn brute_force(p: &ScheduleProblem) -> Option<(f64, Vec<usize>)> {
    let nc = p.num_circuits();
    let nh = p.num_devices();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut assignment = vec![0usize; nc];
    'outer: loop {
        let mut loads = vec![0u64; nh];
        let mut ok = true;
        for i in 0..nc {
            if p.scores[i][assignment[i]].is_none() {
                ok = false;
                break;
            }
            loads[assignment[i]] += p.load_of(i);
        }
        if ok && loads.iter().zip(&p.devices).all(|(&l, d)| l <= d.tau) {
            let obj = sched::objective_value(p, &assignment).unwrap();
            let better = match &best {
                None => true,
                Some((b, a)) => {
                    obj < b - 1e-12
                        || ((obj - b).abs() <= 1e-12 && {
                            let names =
                                |xs: &[usize]| -> Vec<&str> { xs.iter().map(|&j| p.devices[j].name.as_str()).collect() };
                            names(&assignment) < names(a)
                        })
                }
            };
            if better {
                best = Some((obj, assignment.clone()));
            }
        }
        for slot in assignment.iter_mut() {
            *slot += 1;
            if *slot < nh {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    best
}

#[test]
fn criterion_3_ilp_optimality_oracle() {
    let started = Instant::now();
    let mut rng = testkit::rng(20_26);
    let mut feasible = 0;
    for trial in 0..200 {
        let p = testkit::random_schedule_problem(&mut rng, 4, 6);
        match (sched::solve_ilp(&p), brute_force(&p)) {
            (Ok(s), Some((obj, assignment))) => {
                assert!(
                    (s.objective_value - obj).abs() <= 1e-12,
                    "trial {trial}: {} vs oracle {obj}",
                    s.objective_value
                );
                assert_eq!(s.assignment, assignment, "trial {trial}: tie-break mismatch");
                feasible += 1;
            }
            (Err(_), None) => {}
            (got, want) => panic!("trial {trial}: feasibility mismatch {got:?} vs {want:?}"),
        }
    }
    assert!(started.elapsed().as_secs() < 30);
    println!(
        "[criterion 3] PASS - 200 seeded problems match the exhaustive oracle ({feasible} feasible) ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_4_mwmm_ilp_equivalence() {
    let started = Instant::now();
    let mut rng = testkit::rng(60_01);
    for trial in 0..300 {
        let p = testkit::random_unit_capacity_problem(&mut rng, 5, 8);
        let ilp = sched::solve_ilp(&p).unwrap();
        let matching = sched::solve_matching(&p).unwrap();
        assert_eq!(
            matching.objective_value, ilp.objective_value,
            "trial {trial}: objectives differ"
        );
        assert_eq!(matching.assignment, ilp.assignment, "trial {trial}");
    }
    assert!(started.elapsed().as_secs() < 30);
    println!(
        "[criterion 4] PASS - 300 unit-capacity problems: matching objective == ilp objective exactly ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_5_constraint_soundness() {
    let started = Instant::now();
    let mut checked = 0usize;

    // Every schedule produced across randomized problems.
    let mut rng = testkit::rng(7_31);
    for _ in 0..100 {
        let p = testkit::random_schedule_problem(&mut rng, 4, 6);
        if let Ok(s) = sched::solve_ilp(&p) {
            assert!(sched::verify_schedule(&p, &s));
            checked += 1;
        }
        if p.num_circuits() <= p.num_devices() {
            if let Ok(s) = sched::solve_matching(&p) {
                assert!(sched::verify_schedule(&p, &s));
                checked += 1;
            }
        }
    }

    // Every schedule emitted by pipeline jobs (the pipeline re-verifies
    // internally and reports the audit).
    for (family, qubits) in [
        (BenchFamily::RealAmplitudes, 6),
        (BenchFamily::RippleAdder, 6),
        (BenchFamily::Trotter, 6),
        (BenchFamily::BernsteinVazirani, 6),
    ] {
        for seed in 0..3 {
            let out = run_pipeline(&bench_job(family, qubits, 2, seed)).unwrap();
            assert!(out.report.schedule.verified, "{family:?} seed {seed}");
            checked += 1;
        }
    }
    println!(
        "[criterion 5] PASS - {checked} schedules verified with zero budget or coverage violations ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_6_directional_fidelity_improvement() {
    let started = Instant::now();
    let mut summary = Vec::new();
    for (family, label) in [
        (BenchFamily::RippleAdder, "ripple_adder_6"),
        (BenchFamily::RealAmplitudes, "real_amplitudes_6"),
    ] {
        let mut wins = 0;
        let mut margins = Vec::new();
        for seed in 0..10 {
            let out = run_pipeline(&bench_job(family, 6, 2, seed)).unwrap();
            let cut = out.report.fidelity.cut;
            let uncut = out
                .report
                .fidelity
                .uncut
                .expect("6-qubit circuits have an uncut baseline");
            if cut > uncut {
                wins += 1;
            }
            margins.push(cut - uncut);
        }
        assert!(
            wins >= 7,
            "{label}: cut beat uncut in only {wins}/10 seeds (margins {margins:?})"
        );
        summary.push(format!("{label} {wins}/10"));
    }
    assert!(started.elapsed().as_secs() < 300);
    println!(
        "[criterion 6] PASS - cut pipeline beats uncut baseline: {} ({:?})",
        summary.join(", "),
        started.elapsed()
    );
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                out[k] = avg;
            }
            i = j + 1;
        }
        out
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

#[test]
fn criterion_7_scaling_shapes() {
    let started = Instant::now();

    // Fidelity is non-decreasing from 2 to 3 fragments at 10 qubits.
    let job = bench_job(BenchFamily::RealAmplitudes, 10, 2, 0);
    let report = scaling(&job, ScalingAxis::NumSubcircuits, &[2, 3], 10).unwrap();
    let mean2 = report.points[0].mean_fidelity;
    let mean3 = report.points[1].mean_fidelity;
    assert!(
        mean3 >= mean2,
        "mean fidelity decreased from {mean2} (2 fragments) to {mean3} (3 fragments)"
    );
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for point in &report.points {
        for &f in &point.fidelities {
            xs.push(point.x as f64);
            ys.push(f);
        }
    }
    let rho = spearman(&xs, &ys);
    assert!(rho > 0.0, "Spearman rho = {rho}");

    // Term count follows 4^k exactly and reconstruction time at least
    // doubles per extra cut on fixed-size fragments.
    let mut times_ms = Vec::new();
    for k in 1..=4usize {
        let n = 3 * (k + 1);
        let circuit = bench::real_amplitudes(n, 1, 11).unwrap();
        let cuts = bench::cuts::ra_chain(&circuit, k + 1).unwrap();
        assert_eq!(cuts.len(), k);
        let frags = apply_cuts(&circuit, &cuts).unwrap();
        let plan = CutPlan::from_subcircuits(&frags).unwrap();
        let dists: Vec<Vec<Distribution>> = frags
            .iter()
            .map(|frag| {
                expand_instances(frag)
                    .iter()
                    .map(|inst| sim::simulate_ideal(&inst.circuit).unwrap())
                    .collect()
            })
            .collect();
        let mut samples = Vec::new();
        let mut terms = 0;
        for _ in 0..5 {
            let t0 = Instant::now();
            let recon = reconstruct(&plan, &dists).unwrap();
            samples.push(t0.elapsed().as_secs_f64() * 1e3);
            terms = recon.term_count;
        }
        assert_eq!(terms, term_count(k));
        assert_eq!(terms, 4usize.pow(k as u32));
        samples.sort_by(f64::total_cmp);
        times_ms.push(samples[2]); // median of 5
    }
    for k in 1..=3usize {
        let ratio = times_ms[k] / times_ms[k - 1];
        assert!(
            ratio >= 2.0,
            "reconstruction time ratio {}->{} cuts is {ratio:.2} (times {times_ms:?})",
            k,
            k + 1
        );
    }
    println!(
        "[criterion 7] PASS - mean fidelity {mean2:.4} -> {mean3:.4} over 2 -> 3 fragments (rho {rho:.2}); \
         term counts 4^k with time ratios {:?} ({:?})",
        (1..=3)
            .map(|k| format!("{:.1}x", times_ms[k] / times_ms[k - 1]))
            .collect::<Vec<_>>(),
        started.elapsed()
    );
}

#[test]
fn criterion_8_pair_sweep_structure() {
    let started = Instant::now();
    let mut close = 0;
    let mut flags_ok = true;
    for seed in 0..10 {
        let job = bench_job(BenchFamily::RealAmplitudes, 10, 2, seed);
        let report = sweep_pairs(&job).unwrap();
        for cell in &report.cells {
            let expect = if cell.first == cell.second { "tau_max" } else { "tau_min" };
            if cell.execution_time != expect {
                flags_ok = false;
            }
        }
        let best_diag = report
            .cells
            .iter()
            .filter(|c| c.first == c.second)
            .map(|c| c.fidelity)
            .fold(f64::MIN, f64::max);
        let best_off = report
            .cells
            .iter()
            .filter(|c| c.first != c.second)
            .min_by(|a, b| a.score.total_cmp(&b.score))
            .expect("off-diagonal cells exist");
        if best_off.fidelity >= best_diag - 0.02 {
            close += 1;
        }
    }
    assert!(flags_ok, "an execution-time flag was wrong");
    assert!(close >= 7, "minimum-score off-diagonal pair was within 2pp in only {close}/10 seeds");
    println!(
        "[criterion 8] PASS - off-diagonal best-score pair within 2pp of best diagonal in {close}/10 seeds; \
         all tau flags exact ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_9_determinism() {
    let started = Instant::now();

    let job = bench_job(BenchFamily::RippleAdder, 6, 2, 3);
    let a = serde_json::to_string_pretty(&run_pipeline(&job).unwrap().report).unwrap();
    let b = serde_json::to_string_pretty(&run_pipeline(&job).unwrap().report).unwrap();
    assert_eq!(a, b, "pipeline reports differ between runs");

    let sweep_job = bench_job(BenchFamily::RealAmplitudes, 6, 2, 5);
    let s1 = sweep_pairs(&sweep_job).unwrap();
    let s2 = sweep_pairs(&sweep_job).unwrap();
    assert_eq!(
        serde_json::to_string(&s1.cells.iter().map(|c| (c.first.clone(), c.second.clone(), c.fidelity)).collect::<Vec<_>>()).unwrap(),
        serde_json::to_string(&s2.cells.iter().map(|c| (c.first.clone(), c.second.clone(), c.fidelity)).collect::<Vec<_>>()).unwrap(),
        "pair sweeps differ between runs"
    );

    let scale_job = bench_job(BenchFamily::RealAmplitudes, 8, 2, 1);
    let sc1 = scaling(&scale_job, ScalingAxis::NumSubcircuits, &[2, 3], 3).unwrap();
    let sc2 = scaling(&scale_job, ScalingAxis::NumSubcircuits, &[2, 3], 3).unwrap();
    let strip = |r: &qcut_cli::sweep::ScalingReport| {
        serde_json::to_string(
            &r.points
                .iter()
                .map(|p| (p.x, p.mean_fidelity, p.term_count, p.fidelities.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    };
    assert_eq!(strip(&sc1), strip(&sc2), "scaling series differ between runs");

    println!(
        "[criterion 9] PASS - pipeline, pair-sweep, and scaling outputs byte-identical across reruns ({:?})",
        started.elapsed()
    );
}
