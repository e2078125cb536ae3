//! Level-based execution-time estimation and the per-hardware budget bounds.
//!
//! A level holding only single-qubit gates costs `t1` units, a level holding
//! any two-qubit gate costs `t2`, so a circuit runs in kappa1*t1 + kappa2*t2.
//! Durations are abstract integer units.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::cut::{expand_instances, Subcircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeModel {
    pub t1: u64,
    pub t2: u64,
}

impl Default for TimeModel {
    fn default() -> Self {
        TimeModel { t1: 1, t2: 10 }
    }
}

pub fn estimate_time(c: &Circuit, m: &TimeModel) -> u64 {
    let seq = c.levels();
    seq.kappa1() as u64 * m.t1 + seq.kappa2() as u64 * m.t2
}

/// Execution time charged for one subcircuit: the maximum estimate over its
/// tomographic instances, so inserted basis/preparation gates are counted.
pub fn instance_time(s: &Subcircuit, m: &TimeModel) -> u64 {
    expand_instances(s)
        .iter()
        .map(|inst| estimate_time(&inst.circuit, m))
        .max()
        .unwrap_or(0)
}

/// Smallest budget that still lets every subcircuit run somewhere: the
/// largest single-subcircuit load eta_i * t_i.
pub fn tau_min(subs: &[Subcircuit], m: &TimeModel) -> u64 {
    subs.iter()
        .map(|s| s.instance_count() as u64 * instance_time(s, m))
        .max()
        .unwrap_or(0)
}

/// Budget equal to running every instance of every subcircuit sequentially.
pub fn tau_max(subs: &[Subcircuit], m: &TimeModel) -> u64 {
    subs.iter()
        .map(|s| s.instance_count() as u64 * instance_time(s, m))
        .sum()
}
