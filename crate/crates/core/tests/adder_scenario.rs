//! The ripple-carry adder scheduling scenario end to end: two 4-qubit
//! fragments land on two distinct devices, each placed better than the best
//! placement the whole circuit can get, and the exact solver agrees with an
//! exhaustive enumeration oracle and with the matching solver.

use qcut_core::bench;
use qcut_core::cut::apply_cuts;
use qcut_core::hw::fixtures;
use qcut_core::layout::{best_layout, score_matrix};
use qcut_core::sched::{self, ScheduleProblem};
use qcut_core::timing::{self, TimeModel};

fn adder_problem(seed: u64) -> (ScheduleProblem, f64) {
    let pool = fixtures::heterogeneous_pool(seed);
    let circuit = bench::ripple_adder(6).unwrap();
    let cuts = bench::cuts::adder_split(&circuit).unwrap();
    let frags = apply_cuts(&circuit, &cuts).unwrap();
    assert_eq!(frags.len(), 2);
    assert!(frags.iter().all(|f| f.circuit.num_qubits == 4));

    let matrix = score_matrix(&frags, &pool).unwrap();
    let tm = TimeModel::default();
    let tau = timing::tau_min(&frags, &tm);
    let areas = sched::normalized_areas(&frags);
    let problem = ScheduleProblem {
        circuits: frags
            .iter()
            .zip(&areas)
            .map(|(f, &a)| sched::ProblemEntry {
                name: f.circuit.name.clone(),
                area_norm: a,
                eta: f.instance_count() as u64,
                time: timing::instance_time(f, &tm),
            })
            .collect(),
        devices: pool
            .devices
            .iter()
            .map(|d| sched::DeviceEntry { name: d.name.clone(), tau })
            .collect(),
        scores: matrix
            .iter()
            .map(|row| row.iter().map(|c| c.as_ref().map(|s| s.score)).collect())
            .collect(),
    };

    let uncut_best = pool
        .devices
        .iter()
        .filter(|d| d.num_qubits >= circuit.num_qubits)
        .filter_map(|d| best_layout(&circuit, d).ok())
        .map(|s| s.score)
        .fold(f64::INFINITY, f64::min);
    (problem, uncut_best)
}

/// Exhaustive oracle over all assignments.
fn enumerate_best(p: &ScheduleProblem) -> (f64, Vec<usize>) {
    let nh = p.num_devices();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for a in 0..nh {
        for b in 0..nh {
            let assignment = vec![a, b];
            let mut loads = vec![0u64; nh];
            loads[a] += p.load_of(0);
            loads[b] += p.load_of(1);
            if p.scores[0][a].is_none() || p.scores[1][b].is_none() {
                continue;
            }
            if loads.iter().zip(&p.devices).any(|(&l, d)| l > d.tau) {
                continue;
            }
            let obj = sched::objective_value(p, &assignment).unwrap();
            if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                best = Some((obj, assignment));
            }
        }
    }
    best.expect("feasible")
}

#[test]
fn adder_lands_on_two_distinct_quieter_devices() {
    for seed in 0..5 {
        let (problem, uncut_best) = adder_problem(seed);
        let schedule = sched::solve_ilp(&problem).unwrap();
        assert!(sched::verify_schedule(&problem, &schedule));

        let (a, b) = (schedule.assignment[0], schedule.assignment[1]);
        assert_ne!(a, b, "seed {seed}: budget tau_min must force distinct devices");
        for (i, &j) in schedule.assignment.iter().enumerate() {
            let score = problem.scores[i][j].unwrap();
            assert!(
                score < uncut_best,
                "seed {seed}: fragment {i} score {score} not below uncut best {uncut_best}"
            );
        }

        let (oracle_obj, _) = enumerate_best(&problem);
        assert!((schedule.objective_value - oracle_obj).abs() <= 1e-12, "seed {seed}");
    }
}

#[test]
fn matching_reproduces_the_ilp_adder_schedule() {
    for seed in 0..5 {
        let (problem, _) = adder_problem(seed);
        let ilp = sched::solve_ilp(&problem).unwrap();
        let matching = sched::solve_matching(&problem).unwrap();
        assert_eq!(matching.assignment, ilp.assignment, "seed {seed}");
        assert_eq!(matching.objective_value, ilp.objective_value, "seed {seed}");
    }
}
