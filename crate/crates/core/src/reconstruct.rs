//! Classical postprocessing: combine instance distributions of the cut
//! fragments into the uncut circuit's (quasi-)distribution.
//!
//! Each cut contributes the channel identity
//! id(rho) = 1/2 * sum_{P in {I,X,Y,Z}} Tr[P rho] P, with each Pauli P
//! expanded over the four preparation states through
//!
//! ```text
//! I = rho_0 + rho_1
//! Z = rho_0 - rho_1
//! X = 2 rho_+  - rho_0 - rho_1
//! Y = 2 rho_+i - rho_0 - rho_1
//! ```
//!
//! The trace side reads off a sign-weighted marginal of the basis instance
//! that measured the cut wire (the Z instance serves both I and Z). With k
//! cuts the sum runs over 4^k Pauli assignments; each assignment contributes
//! the product of per-fragment signed marginals, tensored into the uncut
//! output bits with an overall factor (1/2)^k. The identities above are
//! re-verified numerically against 2x2 matrix arithmetic the first time a
//! reconstruction runs.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cut::{Basis, Prep, Subcircuit};
use crate::sim::Distribution;
use crate::{Error, Result};

/// Pauli label on a cut wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl Pauli {
    /// Basis instance that serves this Pauli's measurement side.
    fn basis(self) -> Basis {
        match self {
            Pauli::I | Pauli::Z => Basis::Z,
            Pauli::X => Basis::X,
            Pauli::Y => Basis::Y,
        }
    }

    /// Outcome sign on the cut wire.
    fn sign(self, outcome: usize) -> f64 {
        match (self, outcome) {
            (Pauli::I, _) | (_, 0) => 1.0,
            _ => -1.0,
        }
    }

    /// Signed preparation expansion of this Pauli.
    fn prep_coefficients(self) -> &'static [(Prep, f64)] {
        match self {
            Pauli::I => &[(Prep::Zero, 1.0), (Prep::One, 1.0)],
            Pauli::Z => &[(Prep::Zero, 1.0), (Prep::One, -1.0)],
            Pauli::X => &[(Prep::Plus, 2.0), (Prep::Zero, -1.0), (Prep::One, -1.0)],
            Pauli::Y => &[(Prep::PlusI, 2.0), (Prep::Zero, -1.0), (Prep::One, -1.0)],
        }
    }
}

/// Where each fragment's measured bits go: which are cut-wire bits (and for
/// which cut), which are uncut output bits (and at which global position).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentPlan {
    pub name: String,
    /// Local measured qubits, ascending; instance distributions are over
    /// exactly these bits.
    pub measured_qubits: Vec<usize>,
    /// (cut id, bit position within `measured_qubits`) per measure-cut wire,
    /// in the subcircuit's wire order.
    pub cut_measure: Vec<(usize, usize)>,
    /// Cut id per prepare-cut wire, in the subcircuit's wire order.
    pub cut_prepare: Vec<usize>,
    /// (bit position within `measured_qubits`, global output bit).
    pub outputs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPlan {
    pub num_cuts: usize,
    pub num_output_bits: usize,
    pub fragments: Vec<FragmentPlan>,
}

impl CutPlan {
    /// Assemble the plan from cut fragments; checks that the output bits
    /// form a bijection onto the uncut outputs and every cut has exactly one
    /// measure side and one prepare side.
    pub fn from_subcircuits(subs: &[Subcircuit]) -> Result<CutPlan> {
        let mut num_cuts = 0usize;
        for sub in subs {
            for &id in sub.measure_cut_ids.iter().chain(&sub.prepare_cut_ids) {
                num_cuts = num_cuts.max(id + 1);
            }
        }
        let mut meas_seen = vec![0usize; num_cuts];
        let mut prep_seen = vec![0usize; num_cuts];
        let mut bits_seen = Vec::new();
        let mut fragments = Vec::with_capacity(subs.len());
        for sub in subs {
            let mut measured: Vec<usize> = sub
                .measure_cut_wires
                .iter()
                .copied()
                .chain(sub.output_wires.keys().copied())
                .collect();
            measured.sort_unstable();
            measured.dedup();
            let pos_of = |wire: usize| measured.iter().position(|&w| w == wire).unwrap();
            let cut_measure: Vec<(usize, usize)> = sub
                .measure_cut_ids
                .iter()
                .zip(&sub.measure_cut_wires)
                .map(|(&id, &w)| {
                    meas_seen[id] += 1;
                    (id, pos_of(w))
                })
                .collect();
            for &id in &sub.prepare_cut_ids {
                prep_seen[id] += 1;
            }
            let outputs: Vec<(usize, usize)> =
                sub.output_wires.iter().map(|(&w, &bit)| (pos_of(w), bit)).collect();
            bits_seen.extend(outputs.iter().map(|&(_, bit)| bit));
            fragments.push(FragmentPlan {
                name: sub.circuit.name.clone(),
                measured_qubits: measured,
                cut_measure,
                cut_prepare: sub.prepare_cut_ids.clone(),
                outputs,
            });
        }
        for cut in 0..num_cuts {
            if meas_seen[cut] != 1 || prep_seen[cut] != 1 {
                return Err(Error::Reconstruction(format!(
                    "cut {cut} has {} measure side(s) and {} prepare side(s)",
                    meas_seen[cut], prep_seen[cut]
                )));
            }
        }
        bits_seen.sort_unstable();
        let num_output_bits = bits_seen.len();
        if bits_seen != (0..num_output_bits).collect::<Vec<_>>() {
            return Err(Error::Reconstruction(
                "output bits do not form a bijection onto the uncut outputs".into(),
            ));
        }
        Ok(CutPlan { num_cuts, num_output_bits, fragments })
    }
}

/// Number of signed product terms accumulated for k cuts.
pub fn term_count(num_cuts: usize) -> usize {
    4usize.pow(num_cuts as u32)
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Raw signed combination; may carry small negative entries.
    pub raw: Distribution,
    /// Clipped-and-renormalized variant, the input fidelity consumes.
    pub clipped: Distribution,
    pub term_count: usize,
}

/// Combine per-instance distributions into the uncut output distribution.
/// `instance_dists[f][i]` is fragment f's i-th instance in expansion order.
pub fn reconstruct(plan: &CutPlan, instance_dists: &[Vec<Distribution>]) -> Result<Reconstruction> {
    assert!(coefficient_identities_hold(), "Pauli preparation identities failed self-check");
    if instance_dists.len() != plan.fragments.len() {
        return Err(Error::Reconstruction(format!(
            "expected distributions for {} fragments, got {}",
            plan.fragments.len(),
            instance_dists.len()
        )));
    }

    // Per fragment: signed marginal over its output bits for every Pauli
    // assignment to its own cut wires, keyed base-4 (measure wires then
    // prepare wires, each in stored order).
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(plan.fragments.len());
    for (frag, dists) in plan.fragments.iter().zip(instance_dists) {
        tables.push(fragment_table(frag, dists)?);
    }

    let k = plan.num_cuts;
    let weight = 0.5f64.powi(k as i32);
    let mut raw = Distribution::zeros(plan.num_output_bits);
    let mut assignment = vec![Pauli::I; k];
    for code in 0..term_count(k) {
        let mut rem = code;
        for slot in (0..k).rev() {
            assignment[slot] = PAULIS[rem % 4];
            rem /= 4;
        }
        let keys: Vec<usize> = plan
            .fragments
            .iter()
            .map(|frag| fragment_key(frag, &assignment))
            .collect();
        for g in 0..raw.probs.len() {
            let mut term = weight;
            for (frag_idx, frag) in plan.fragments.iter().enumerate() {
                let mut local = 0usize;
                for (r, &(_, global_bit)) in frag.outputs.iter().enumerate() {
                    local |= (g >> global_bit & 1) << r;
                }
                term *= tables[frag_idx][keys[frag_idx]][local];
                if term == 0.0 {
                    break;
                }
            }
            raw.probs[g] += term;
        }
    }
    let clipped = raw.clipped_renormalized();
    Ok(Reconstruction { raw, clipped, term_count: term_count(k) })
}

/// Key into a fragment's table for a global Pauli assignment.
fn fragment_key(frag: &FragmentPlan, assignment: &[Pauli]) -> usize {
    let mut key = 0usize;
    for &(cut, _) in &frag.cut_measure {
        key = key * 4 + PAULIS.iter().position(|&p| p == assignment[cut]).unwrap();
    }
    for &cut in &frag.cut_prepare {
        key = key * 4 + PAULIS.iter().position(|&p| p == assignment[cut]).unwrap();
    }
    key
}

/// All signed marginals of one fragment: for every Pauli choice on its cut
/// wires, sum the relevant instances (prepare side) with their coefficients
/// and fold the cut-measure bits away under outcome signs.
#[allow(clippy::needless_range_loop)]
fn fragment_table(frag: &FragmentPlan, dists: &[Distribution]) -> Result<Vec<Vec<f64>>> {
    let m = frag.cut_measure.len();
    let p = frag.cut_prepare.len();
    let expected_instances = 3usize.pow(m as u32) * 4usize.pow(p as u32);
    if dists.len() != expected_instances {
        return Err(Error::Reconstruction(format!(
            "fragment `{}` expects {} instance distributions, got {}",
            frag.name,
            expected_instances,
            dists.len()
        )));
    }
    let num_bits = frag.measured_qubits.len();
    for d in dists {
        if d.num_bits != num_bits {
            return Err(Error::Reconstruction(format!(
                "fragment `{}` instance has {} bits, expected {}",
                frag.name, d.num_bits, num_bits
            )));
        }
    }
    let out_len = 1usize << frag.outputs.len();
    let keys = 4usize.pow((m + p) as u32);
    let mut table = vec![vec![0.0f64; out_len]; keys];

    let mut meas_paulis = vec![Pauli::I; m];
    let mut prep_paulis = vec![Pauli::I; p];
    for key in 0..keys {
        let mut rem = key;
        for slot in (0..p).rev() {
            prep_paulis[slot] = PAULIS[rem % 4];
            rem /= 4;
        }
        for slot in (0..m).rev() {
            meas_paulis[slot] = PAULIS[rem % 4];
            rem /= 4;
        }
        let basis_choice: Vec<Basis> = meas_paulis.iter().map(|p| p.basis()).collect();

        // Sum over preparation choices with non-zero coefficients.
        let mut prep_choice = vec![Prep::Zero; p];
        accumulate_preps(
            frag,
            dists,
            &basis_choice,
            &meas_paulis,
            &prep_paulis,
            &mut prep_choice,
            0,
            1.0,
            &mut table[key],
        );
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn accumulate_preps(
    frag: &FragmentPlan,
    dists: &[Distribution],
    basis_choice: &[Basis],
    meas_paulis: &[Pauli],
    prep_paulis: &[Pauli],
    prep_choice: &mut Vec<Prep>,
    slot: usize,
    coef: f64,
    acc: &mut [f64],
) {
    if slot == prep_paulis.len() {
        let ordinal = ordinal_of(basis_choice, prep_choice);
        let dist = &dists[ordinal];
        for (idx, &value) in dist.probs.iter().enumerate() {
            if value == 0.0 {
                continue;
            }
            let mut sign = 1.0f64;
            for (slot, &(_, pos)) in frag.cut_measure.iter().enumerate() {
                sign *= meas_paulis[slot].sign(idx >> pos & 1);
            }
            let mut local = 0usize;
            for (r, &(pos, _)) in frag.outputs.iter().enumerate() {
                local |= (idx >> pos & 1) << r;
            }
            acc[local] += coef * sign * value;
        }
        return;
    }
    for &(prep, c) in prep_paulis[slot].prep_coefficients() {
        prep_choice[slot] = prep;
        accumulate_preps(
            frag,
            dists,
            basis_choice,
            meas_paulis,
            prep_paulis,
            prep_choice,
            slot + 1,
            coef * c,
            acc,
        );
    }
}

/// Ordinal within `cut::expand_instances` order.
fn ordinal_of(basis: &[Basis], prep: &[Prep]) -> usize {
    let mut ord = 0usize;
    for &b in basis {
        ord = ord * 3 + Basis::ALL.iter().position(|&x| x == b).unwrap();
    }
    for &p in prep {
        ord = ord * 4 + Prep::ALL.iter().position(|&x| x == p).unwrap();
    }
    ord
}

/// One-time numeric check of the operator identities behind
/// `prep_coefficients` and `sign`, done in plain 2x2 complex arithmetic.
#[allow(clippy::needless_range_loop)]
fn coefficient_identities_hold() -> bool {
    static VERIFIED: OnceLock<bool> = OnceLock::new();
    *VERIFIED.get_or_init(|| {
        type M = [[(f64, f64); 2]; 2];
        let dens = |a: (f64, f64), b: (f64, f64)| -> M {
            // |v><v| for v = (a, b) with complex entries.
            let conj = |x: (f64, f64)| (x.0, -x.1);
            let mul = |x: (f64, f64), y: (f64, f64)| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
            [
                [mul(a, conj(a)), mul(a, conj(b))],
                [mul(b, conj(a)), mul(b, conj(b))],
            ]
        };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho: [M; 4] = [
            dens((1.0, 0.0), (0.0, 0.0)),  // |0>
            dens((0.0, 0.0), (1.0, 0.0)),  // |1>
            dens((s, 0.0), (s, 0.0)),      // |+>
            dens((s, 0.0), (0.0, s)),      // |+i>
        ];
        let paulis: [(Pauli, M); 4] = [
            (Pauli::I, [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]]),
            (Pauli::X, [[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]]),
            (Pauli::Y, [[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]]),
            (Pauli::Z, [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]]),
        ];
        let prep_index = |p: Prep| match p {
            Prep::Zero => 0,
            Prep::One => 1,
            Prep::Plus => 2,
            Prep::PlusI => 3,
        };
        for (pauli, matrix) in paulis {
            let mut combo = [[(0.0, 0.0); 2]; 2];
            for &(prep, c) in pauli.prep_coefficients() {
                let r = rho[prep_index(prep)];
                for i in 0..2 {
                    for j in 0..2 {
                        combo[i][j].0 += c * r[i][j].0;
                        combo[i][j].1 += c * r[i][j].1;
                    }
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    if (combo[i][j].0 - matrix[i][j].0).abs() > 1e-12
                        || (combo[i][j].1 - matrix[i][j].1).abs() > 1e-12
                    {
                        return false;
                    }
                }
            }
            // Measurement side: Tr[P rho_s] must equal the signed sum of the
            // basis-rotated outcome probabilities for every prep state.
            for r in &rho {
                let trace_p: f64 = {
                    let mut t = (0.0, 0.0);
                    for i in 0..2 {
                        for k in 0..2 {
                            t.0 += matrix[i][k].0 * r[k][i].0 - matrix[i][k].1 * r[k][i].1;
                            t.1 += matrix[i][k].0 * r[k][i].1 + matrix[i][k].1 * r[k][i].0;
                        }
                    }
                    t.0
                };
                let signed: f64 = {
                    // Outcome probabilities after rotating into the basis.
                    let u: M = match pauli.basis() {
                        Basis::Z => [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]],
                        Basis::X => [[(s, 0.0), (s, 0.0)], [(s, 0.0), (-s, 0.0)]],
                        // H * Sdg
                        Basis::Y => [[(s, 0.0), (0.0, -s)], [(s, 0.0), (0.0, s)]],
                    };
                    let mut total = 0.0;
                    for outcome in 0..2 {
                        // <outcome| U rho U^dag |outcome>
                        let mut prob = 0.0;
                        for k in 0..2 {
                            for l in 0..2 {
                                let a = u[outcome][k];
                                let b = r[k][l];
                                let cdag = (u[outcome][l].0, -u[outcome][l].1);
                                let ab = (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
                                prob += ab.0 * cdag.0 - ab.1 * cdag.1;
                            }
                        }
                        total += pauli.sign(outcome) * prob;
                    }
                    total
                };
                if (trace_p - signed).abs() > 1e-12 {
                    return false;
                }
            }
        }
        true
    })
}
