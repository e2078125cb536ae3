//! Polynomial-time solver for the one-subcircuit-per-device case: minimum
//! weight maximum matching via the Hungarian algorithm on the rectangular
//! cost matrix W[i][j] = Q_ij * A_i.
//!
//! Infeasible pairs carry a finite big-M inside the solver so arithmetic
//! stays total; a big-M edge surviving into the solution means the instance
//! is infeasible. Ties between equal-cost matchings are broken exactly like
//! the branch-and-bound solver: among optimal matchings (identified through
//! the optimal dual potentials' tight edges), take the lexicographically
//! least by (circuit index, device name).

use super::{build_schedule, Schedule, ScheduleProblem};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct AssignmentProblem {
    /// |C| x |H| costs; infeasible pairs are +infinity.
    pub costs: Vec<Vec<f64>>,
    pub circuit_names: Vec<String>,
    pub device_names: Vec<String>,
}

impl AssignmentProblem {
    /// Requires |C| <= |H| (otherwise some device must take two subcircuits
    /// and matching cannot represent the schedule) and marks pairs whose
    /// load would already blow the device budget as infeasible.
    pub fn from_problem(p: &ScheduleProblem) -> Result<Self> {
        p.validate()?;
        if p.num_circuits() > p.num_devices() {
            return Err(Error::Infeasible(format!(
                "{} subcircuits exceed {} devices: one-per-device matching does not apply, use the ILP solver",
                p.num_circuits(),
                p.num_devices()
            )));
        }
        let costs: Vec<Vec<f64>> = (0..p.num_circuits())
            .map(|i| {
                (0..p.num_devices())
                    .map(|j| match p.scores[i][j] {
                        Some(q) if p.load_of(i) <= p.devices[j].tau => {
                            q * p.circuits[i].area_norm
                        }
                        _ => f64::INFINITY,
                    })
                    .collect()
            })
            .collect();
        for (i, row) in costs.iter().enumerate() {
            if row.iter().all(|c| c.is_infinite()) {
                return Err(Error::NoFeasibleHardware(p.circuits[i].name.clone()));
            }
        }
        Ok(AssignmentProblem {
            costs,
            circuit_names: p.circuits.iter().map(|c| c.name.clone()).collect(),
            device_names: p.devices.iter().map(|d| d.name.clone()).collect(),
        })
    }
}

/// Solve the matching, then translate back into a Schedule (loads follow the
/// originating problem's eta_i * t_i).
pub fn solve_matching(p: &ScheduleProblem) -> Result<Schedule> {
    let problem = AssignmentProblem::from_problem(p)?;
    let assignment = solve_assignment(&problem)?;
    build_schedule(p, assignment)
}

/// Core assignment solve on the rectangular matrix; returns circuit -> device.
pub fn solve_assignment(p: &AssignmentProblem) -> Result<Vec<usize>> {
    let rows = p.costs.len();
    let cols = p.device_names.len();
    debug_assert!(rows <= cols);

    let max_finite = p
        .costs
        .iter()
        .flatten()
        .filter(|c| c.is_finite())
        .fold(0.0f64, |a, &b| a.max(b.abs()));
    let big_m = (cols as f64 + 1.0) * (max_finite + 1.0);

    // Square matrix: real rows first, zero-cost dummy rows pad the rest.
    let mut cost = vec![vec![0.0f64; cols]; cols];
    for (padded, original) in cost.iter_mut().zip(&p.costs) {
        for (cell, &value) in padded.iter_mut().zip(original) {
            *cell = if value.is_finite() { value } else { big_m };
        }
    }

    let (_hungarian_match, u, v) = hungarian(&cost);

    // Complementary slackness: optimal matchings use only tight edges, and
    // any perfect matching of tight edges is optimal. Walk the real rows in
    // order, fixing the name-least tight device that still admits a perfect
    // completion of the remaining rows.
    let eps = 1e-9 * (1.0 + big_m.abs());
    let tight: Vec<Vec<usize>> = (0..cols)
        .map(|i| {
            (0..cols)
                .filter(|&j| (cost[i][j] - u[i] - v[j]).abs() <= eps)
                .collect()
        })
        .collect();

    let mut name_order: Vec<usize> = (0..cols).collect();
    name_order.sort_by(|&a, &b| p.device_names[a].cmp(&p.device_names[b]));

    let mut fixed_col = vec![usize::MAX; cols];
    let mut col_taken = vec![false; cols];
    for i in 0..rows {
        let mut chosen = None;
        for &j in &name_order {
            if col_taken[j] || !tight[i].contains(&j) {
                continue;
            }
            if completion_exists(&tight, &col_taken, i, j, cols) {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.ok_or_else(|| {
            Error::Infeasible("tight-edge refinement lost the matching".into())
        })?;
        fixed_col[i] = j;
        col_taken[j] = true;
    }

    let mut assignment = Vec::with_capacity(rows);
    for (i, &j) in fixed_col.iter().take(rows).enumerate() {
        if !p.costs[i][j].is_finite() {
            return Err(Error::Infeasible(format!(
                "subcircuit `{}` has no feasible device under one-per-device budgets",
                p.circuit_names[i]
            )));
        }
        assignment.push(j);
    }
    Ok(assignment)
}

/// Can rows row+1.. (real and dummy alike) still be perfectly matched over
/// tight edges if `row` takes column `candidate`? Kuhn's augmenting-path
/// matching on the reduced tight graph.
fn completion_exists(
    tight: &[Vec<usize>],
    col_taken: &[bool],
    row: usize,
    candidate: usize,
    n: usize,
) -> bool {
    let blocked = |j: usize| col_taken[j] || j == candidate;
    let mut match_of_col = vec![usize::MAX; n];
    for r in row + 1..n {
        let mut seen = vec![false; n];
        if !augment(tight, r, &blocked, &mut match_of_col, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    tight: &[Vec<usize>],
    row: usize,
    blocked: &dyn Fn(usize) -> bool,
    match_of_col: &mut [usize],
    seen: &mut [bool],
) -> bool {
    for &j in &tight[row] {
        if blocked(j) || seen[j] {
            continue;
        }
        seen[j] = true;
        if match_of_col[j] == usize::MAX
            || augment(tight, match_of_col[j], blocked, match_of_col, seen)
        {
            match_of_col[j] = row;
            return true;
        }
    }
    false
}

/// O(n^3) Hungarian algorithm with potentials on a square matrix; returns
/// (row -> col, u, v) with u[i] + v[j] <= cost[i][j] and equality on matched
/// edges.
#[allow(clippy::needless_range_loop)]
fn hungarian(cost: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = cost.len();
    // 1-indexed internals with a sentinel column 0.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut match_row_of_col = vec![0usize; n + 1]; // p[j] = row matched to column j
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        match_row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = match_row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[match_row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if match_row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            match_row_of_col[j0] = match_row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=n {
        if match_row_of_col[j] != 0 {
            row_to_col[match_row_of_col[j] - 1] = j - 1;
        }
    }
    let u_out: Vec<f64> = u[1..].to_vec();
    let v_out: Vec<f64> = v[1..].to_vec();
    (row_to_col, u_out, v_out)
}
