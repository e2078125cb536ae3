//! Exact branch-and-bound solver for the budgeted assignment program:
//! minimize sum X_ij * Q_ij * A_i subject to every circuit assigned exactly
//! once and per-device loads sum eta_i * t_i * X_ij <= tau_j.
//!
//! Problem sizes here are tiny (a handful of fragments against a dozen
//! devices), so a deterministic exact search beats pulling in a solver.

use super::{build_schedule, lex_before, Schedule, ScheduleProblem};
use crate::{Error, Result};

const OBJ_EPS: f64 = 1e-12;

pub fn solve_ilp(p: &ScheduleProblem) -> Result<Schedule> {
    p.validate()?;

    let total_load: u64 = (0..p.num_circuits()).map(|i| p.load_of(i)).sum();
    let total_budget: u64 = p.devices.iter().map(|d| d.tau).sum();
    if total_budget < total_load {
        return Err(Error::Infeasible(infeasibility_report(p)));
    }

    match search(p, &branch_order(p)) {
        Some(assignment) => build_schedule(p, assignment),
        None => Err(Error::Infeasible(infeasibility_report(p))),
    }
}

/// Weighted cost of placing circuit i on device j.
fn cost(p: &ScheduleProblem, i: usize, j: usize) -> Option<f64> {
    p.scores[i][j].map(|q| q * p.circuits[i].area_norm)
}

/// Branch on circuits whose best choice matters most: decreasing gap between
/// their cheapest and second-cheapest feasible cost (infinite when only one
/// device is feasible), ties by index.
fn branch_order(p: &ScheduleProblem) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = (0..p.num_circuits())
        .map(|i| {
            let mut costs: Vec<f64> =
                (0..p.num_devices()).filter_map(|j| cost(p, i, j)).collect();
            costs.sort_by(f64::total_cmp);
            let gap = match costs.as_slice() {
                [_only] => f64::INFINITY,
                [first, second, ..] => second - first,
                [] => 0.0,
            };
            (gap, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}

struct SearchState {
    best: Option<(f64, Vec<usize>)>,
    assignment: Vec<usize>,
    remaining: Vec<u64>,
}

fn search(p: &ScheduleProblem, order: &[usize]) -> Option<Vec<usize>> {
    // Cheapest feasible cost per circuit, for the capacity-free lower bound.
    let min_cost: Vec<f64> = (0..p.num_circuits())
        .map(|i| {
            (0..p.num_devices())
                .filter_map(|j| cost(p, i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut state = SearchState {
        best: None,
        assignment: vec![usize::MAX; p.num_circuits()],
        remaining: p.devices.iter().map(|d| d.tau).collect(),
    };
    descend(p, order, 0, 0.0, &min_cost, &mut state);
    state.best.map(|(_, assignment)| assignment)
}

fn descend(
    p: &ScheduleProblem,
    order: &[usize],
    depth: usize,
    partial_cost: f64,
    min_cost: &[f64],
    state: &mut SearchState,
) {
    if depth == order.len() {
        let assignment = state.assignment.clone();
        match &state.best {
            Some((best_cost, best_assignment)) => {
                if partial_cost < best_cost - OBJ_EPS
                    || (partial_cost <= best_cost + OBJ_EPS
                        && lex_before(p, &assignment, best_assignment))
                {
                    state.best = Some((partial_cost.min(*best_cost), assignment));
                }
            }
            None => state.best = Some((partial_cost, assignment)),
        }
        return;
    }

    // Capacity-free lower bound over the unassigned tail.
    let bound: f64 = partial_cost + order[depth..].iter().map(|&i| min_cost[i]).sum::<f64>();
    if let Some((best_cost, _)) = &state.best {
        if bound > best_cost + OBJ_EPS {
            return;
        }
    }

    let i = order[depth];
    let load = p.load_of(i);
    // Try devices cheapest-first so good incumbents arrive early.
    let mut options: Vec<(f64, usize)> = (0..p.num_devices())
        .filter_map(|j| cost(p, i, j).map(|c| (c, j)))
        .collect();
    options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (c, j) in options {
        if state.remaining[j] < load {
            continue;
        }
        state.remaining[j] -= load;
        state.assignment[i] = j;
        descend(p, order, depth + 1, partial_cost + c, min_cost, state);
        state.assignment[i] = usize::MAX;
        state.remaining[j] += load;
    }
}

/// Feasibility-only search used to extract a minimal infeasible core.
fn feasible_subset(p: &ScheduleProblem, subset: &[usize]) -> bool {
    fn go(p: &ScheduleProblem, subset: &[usize], depth: usize, remaining: &mut Vec<u64>) -> bool {
        if depth == subset.len() {
            return true;
        }
        let i = subset[depth];
        let load = p.load_of(i);
        for j in 0..p.num_devices() {
            if p.scores[i][j].is_some() && remaining[j] >= load {
                remaining[j] -= load;
                if go(p, subset, depth + 1, remaining) {
                    remaining[j] += load;
                    return true;
                }
                remaining[j] += load;
            }
        }
        false
    }
    let mut remaining: Vec<u64> = p.devices.iter().map(|d| d.tau).collect();
    go(p, subset, 0, &mut remaining)
}

/// Iterative deletion: drop circuits whose removal keeps the rest
/// infeasible, leaving a minimal violating subset, then name the budgets it
/// competes for.
fn infeasibility_report(p: &ScheduleProblem) -> String {
    let mut core: Vec<usize> = (0..p.num_circuits()).collect();
    let mut idx = 0;
    while idx < core.len() {
        let mut without = core.clone();
        without.remove(idx);
        if !feasible_subset(p, &without) {
            core = without;
        } else {
            idx += 1;
        }
    }
    let names: Vec<&str> = core.iter().map(|&i| p.circuits[i].name.as_str()).collect();
    let mut budget_names: Vec<String> = p
        .devices
        .iter()
        .enumerate()
        .filter(|&(j, _)| core.iter().any(|&i| p.scores[i][j].is_some()))
        .map(|(_, d)| format!("{} (tau = {})", d.name, d.tau))
        .collect();
    budget_names.sort();
    format!(
        "no assignment satisfies all budgets; minimal violating subset: [{}] against budgets [{}]",
        names.join(", "),
        budget_names.join(", ")
    )
}
