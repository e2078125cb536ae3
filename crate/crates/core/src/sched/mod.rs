//! Scheduling of subcircuits onto hardware under per-device time budgets:
//! shared problem/schedule types, the exact branch-and-bound solver, and the
//! Hungarian-matching solver for the one-per-device case.

mod ilp;
mod matching;

pub use ilp::solve_ilp;
pub use matching::{solve_matching, AssignmentProblem};

use serde::{Deserialize, Serialize};

use crate::cut::Subcircuit;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub name: String,
    /// Area normalized by the largest area, in (0, 1].
    pub area_norm: f64,
    /// Instance multiplier eta_i (the tomographic instance count).
    pub eta: u64,
    /// Execution time t_i in abstract duration units.
    pub time: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceEntry {
    pub name: String,
    /// Budget tau_j in duration units.
    pub tau: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleProblem {
    pub circuits: Vec<ProblemEntry>,
    pub devices: Vec<DeviceEntry>,
    /// scores[i][j] = Q_ij, `None` where (i, j) is infeasible.
    pub scores: Vec<Vec<Option<f64>>>,
}

impl ScheduleProblem {
    pub fn validate(&self) -> Result<()> {
        if self.circuits.is_empty() || self.devices.is_empty() {
            return Err(Error::Infeasible("empty problem".into()));
        }
        if self.scores.len() != self.circuits.len()
            || self.scores.iter().any(|row| row.len() != self.devices.len())
        {
            return Err(Error::Infeasible("score matrix shape mismatch".into()));
        }
        for (i, entry) in self.circuits.iter().enumerate() {
            if !(entry.area_norm > 0.0 && entry.area_norm <= 1.0) {
                return Err(Error::Infeasible(format!(
                    "normalized area of `{}` is {}, outside (0, 1]",
                    entry.name, entry.area_norm
                )));
            }
            if entry.eta == 0 {
                return Err(Error::Infeasible(format!("`{}` has eta = 0", entry.name)));
            }
            if self.scores[i].iter().all(|c| c.is_none()) {
                return Err(Error::NoFeasibleHardware(entry.name.clone()));
            }
        }
        Ok(())
    }

    /// Load a subcircuit puts on its device: eta_i * t_i.
    pub fn load_of(&self, i: usize) -> u64 {
        self.circuits[i].eta * self.circuits[i].time
    }

    pub fn num_circuits(&self) -> usize {
        self.circuits.len()
    }

    pub fn num_devices(&self) -> usize {
        self.devices.len()
    }
}

/// Max-normalized areas for a fragment set, each in (0, 1].
pub fn normalized_areas(subs: &[Subcircuit]) -> Vec<f64> {
    let areas: Vec<f64> = subs.iter().map(|s| s.circuit.area() as f64).collect();
    let max = areas.iter().cloned().fold(f64::MIN, f64::max);
    areas.into_iter().map(|a| a / max).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// assignment[i] = device index for circuit i.
    pub assignment: Vec<usize>,
    pub objective_value: f64,
    /// Load per device in duration units.
    pub loads: Vec<u64>,
}

/// Objective sum Q_ij * A_i in canonical circuit order; both solvers report
/// their result through this same summation so equal assignments give
/// bit-identical objectives.
pub fn objective_value(p: &ScheduleProblem, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != p.num_circuits() {
        return Err(Error::Infeasible(format!(
            "assignment covers {} of {} circuits",
            assignment.len(),
            p.num_circuits()
        )));
    }
    let mut total = 0.0f64;
    for (i, &j) in assignment.iter().enumerate() {
        let q = p.scores[i].get(j).copied().flatten().ok_or_else(|| {
            Error::Infeasible(format!(
                "assignment places `{}` on infeasible device index {j}",
                p.circuits[i].name
            ))
        })?;
        total += q * p.circuits[i].area_norm;
    }
    Ok(total)
}

/// True iff every circuit is assigned to a feasible device exactly once, no
/// device exceeds its budget, and the stated objective recomputes to within
/// 1e-12.
pub fn verify_schedule(p: &ScheduleProblem, s: &Schedule) -> bool {
    if s.assignment.len() != p.num_circuits() || s.loads.len() != p.num_devices() {
        return false;
    }
    let mut loads = vec![0u64; p.num_devices()];
    for (i, &j) in s.assignment.iter().enumerate() {
        if j >= p.num_devices() || p.scores[i][j].is_none() {
            return false;
        }
        loads[j] += p.load_of(i);
    }
    for (j, dev) in p.devices.iter().enumerate() {
        if loads[j] > dev.tau {
            return false;
        }
    }
    if loads != s.loads {
        return false;
    }
    match objective_value(p, &s.assignment) {
        Ok(obj) => (obj - s.objective_value).abs() <= 1e-12,
        Err(_) => false,
    }
}

/// Compare two complete assignments by the (circuit index, device name)
/// lexicographic rule used to break objective ties.
pub(crate) fn lex_before(p: &ScheduleProblem, a: &[usize], b: &[usize]) -> bool {
    for i in 0..a.len() {
        let na = &p.devices[a[i]].name;
        let nb = &p.devices[b[i]].name;
        if na != nb {
            return na < nb;
        }
    }
    false
}

pub(crate) fn build_schedule(p: &ScheduleProblem, assignment: Vec<usize>) -> Result<Schedule> {
    let objective = objective_value(p, &assignment)?;
    let mut loads = vec![0u64; p.num_devices()];
    for (i, &j) in assignment.iter().enumerate() {
        loads[j] += p.load_of(i);
    }
    Ok(Schedule { assignment, objective_value: objective, loads })
}
