//! Seeded generators for randomized tests: circuits, valid cut sets, and
//! scheduling problems. Kept in the library so integration suites across
//! crates can share them; oracles stay in the test code itself.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::cut::{apply_cuts, CutPoint, Subcircuit};
use crate::sched::{DeviceEntry, ProblemEntry, ScheduleProblem};

pub fn rng(seed: u64) -> Pcg64Mcg {
    Pcg64Mcg::seed_from_u64(seed)
}

/// Random circuit over the native gate set, all qubits measured.
pub fn random_circuit(rng: &mut Pcg64Mcg, num_qubits: usize, num_gates: usize) -> Circuit {
    let mut c = Circuit::new(format!("random_{num_qubits}"), num_qubits);
    for _ in 0..num_gates {
        if num_qubits >= 2 && rng.random_bool(0.45) {
            let a = rng.random_range(0..num_qubits);
            let mut b = rng.random_range(0..num_qubits);
            while b == a {
                b = rng.random_range(0..num_qubits);
            }
            c.push(Gate::cx(a, b));
        } else {
            let q = rng.random_range(0..num_qubits);
            match rng.random_range(0..6) {
                0 => c.push(Gate::one(GateKind::H, q)),
                1 => c.push(Gate::one(GateKind::X, q)),
                2 => c.push(Gate::one(GateKind::S, q)),
                3 => c.push(Gate::rot(GateKind::Rx, q, rng.random::<f64>() * std::f64::consts::TAU)),
                4 => c.push(Gate::rot(GateKind::Ry, q, rng.random::<f64>() * std::f64::consts::TAU)),
                _ => c.push(Gate::rot(GateKind::Rz, q, rng.random::<f64>() * std::f64::consts::TAU)),
            }
        }
    }
    for q in 0..num_qubits {
        c.push(Gate::measure(q));
    }
    c
}

/// A circuit plus a valid cut set splitting it into at least two fragments,
/// none larger than `max_fragment` qubits. Retries until the sampled cut
/// points yield a valid topology.
pub fn random_cut_circuit(
    rng: &mut Pcg64Mcg,
    num_qubits: usize,
    num_cuts: usize,
    max_fragment: usize,
) -> (Circuit, Vec<CutPoint>, Vec<Subcircuit>) {
    loop {
        let extra = rng.random_range(0..8);
        let c = random_circuit(rng, num_qubits, num_qubits * 3 + extra);
        'attempt: for _ in 0..60 {
            let mut cuts = Vec::new();
            for _ in 0..num_cuts {
                let q = rng.random_range(0..num_qubits);
                let on_wire: Vec<usize> = (0..c.gates.len())
                    .filter(|&i| c.gates[i].qubits.contains(&q))
                    .collect();
                if on_wire.len() < 2 {
                    continue 'attempt;
                }
                let pos = rng.random_range(0..on_wire.len() - 1);
                let cut = CutPoint { qubit: q, after_gate: on_wire[pos] };
                if cuts.contains(&cut) {
                    continue 'attempt;
                }
                cuts.push(cut);
            }
            if let Ok(frags) = apply_cuts(&c, &cuts) {
                let sizes_ok = frags.iter().all(|f| f.circuit.num_qubits <= max_fragment);
                if frags.len() >= 2 && sizes_ok {
                    return (c, cuts, frags);
                }
            }
        }
    }
}

/// Random scheduling problem with every score in (0, 1), unit areas scaled
/// into (0, 1], and budgets loose enough that feasible instances dominate.
pub fn random_schedule_problem(
    rng: &mut Pcg64Mcg,
    max_circuits: usize,
    max_devices: usize,
) -> ScheduleProblem {
    let nc = rng.random_range(1..=max_circuits);
    let nh = rng.random_range(1..=max_devices);
    let areas: Vec<f64> = (0..nc).map(|_| rng.random_range(1.0..10.0)).collect();
    let max_area = areas.iter().cloned().fold(f64::MIN, f64::max);
    let circuits: Vec<ProblemEntry> = (0..nc)
        .map(|i| ProblemEntry {
            name: format!("c{i}"),
            area_norm: areas[i] / max_area,
            eta: rng.random_range(1..=12),
            time: rng.random_range(5..40),
        })
        .collect();
    let total_load: u64 = circuits.iter().map(|c| c.eta * c.time).sum();
    let devices: Vec<DeviceEntry> = (0..nh)
        .map(|j| DeviceEntry {
            name: format!("h{j}"),
            tau: rng.random_range(total_load / (nh as u64) + 1..=total_load + 1),
        })
        .collect();
    let scores: Vec<Vec<Option<f64>>> = (0..nc)
        .map(|_| {
            (0..nh)
                .map(|_| {
                    if rng.random_bool(0.85) {
                        Some(rng.random_range(0.01..0.6))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let mut p = ScheduleProblem { circuits, devices, scores };
    // Guarantee every circuit has at least one feasible device.
    for i in 0..nc {
        if p.scores[i].iter().all(|s| s.is_none()) {
            let j = rng.random_range(0..nh);
            p.scores[i][j] = Some(rng.random_range(0.01..0.6));
        }
    }
    p
}

/// Unit-capacity problem: |C| <= |H| and budgets sized so no device can take
/// two subcircuits.
pub fn random_unit_capacity_problem(
    rng: &mut Pcg64Mcg,
    max_circuits: usize,
    max_devices: usize,
) -> ScheduleProblem {
    let nc = rng.random_range(1..=max_circuits);
    let nh = rng.random_range(nc.max(1)..=max_devices.max(nc));
    let mut p = random_schedule_problem(rng, 1, 1);
    let areas: Vec<f64> = (0..nc).map(|_| rng.random_range(1.0..10.0)).collect();
    let max_area = areas.iter().cloned().fold(f64::MIN, f64::max);
    // Loads in [10, 19] with tau = 19: any two loads exceed the budget.
    p.circuits = (0..nc)
        .map(|i| ProblemEntry {
            name: format!("c{i}"),
            area_norm: areas[i] / max_area,
            eta: 1,
            time: rng.random_range(10..20),
        })
        .collect();
    p.devices = (0..nh).map(|j| DeviceEntry { name: format!("h{j}"), tau: 19 }).collect();
    p.scores = (0..nc)
        .map(|_| (0..nh).map(|_| Some(rng.random_range(0.01..0.6))).collect())
        .collect();
    p
}
