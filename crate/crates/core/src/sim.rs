//! Exact simulation backends: noiseless statevector evolution and noisy
//! density-matrix evolution with per-gate depolarizing channels plus a
//! symmetric readout confusion, both producing exact output distributions
//! (no shot sampling anywhere).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::hw::HardwareSpec;
use crate::layout::Layout;
use crate::{Error, Result};

pub const IDEAL_QUBIT_GUARD: usize = 24;
pub const NOISY_QUBIT_GUARD: usize = 12;

/// Exact probability map over the measured qubits (ascending), stored dense:
/// bit `j` of an index is the outcome of the j-th measured qubit.
/// Reconstruction emits quasi-distributions, so entries may be negative
/// there; proper distributions stay non-negative and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub num_bits: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn zeros(num_bits: usize) -> Self {
        Distribution { num_bits, probs: vec![0.0; 1usize << num_bits] }
    }

    /// The trivial distribution of a circuit with nothing measured.
    pub fn scalar() -> Self {
        Distribution { num_bits: 0, probs: vec![1.0] }
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn bitstring(&self, index: usize) -> String {
        (0..self.num_bits)
            .map(|j| if index >> j & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Map keyed by bitstring; BTreeMap keeps keys lexicographic for JSON.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.bitstring(i), p))
            .collect()
    }

    pub fn l1_distance(&self, other: &Distribution) -> f64 {
        assert_eq!(self.num_bits, other.num_bits);
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Negative entries clipped to zero, then renormalized.
    pub fn clipped_renormalized(&self) -> Distribution {
        let clipped: Vec<f64> = self.probs.iter().map(|&p| p.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let probs = if total > 0.0 {
            clipped.iter().map(|&p| p / total).collect()
        } else {
            clipped
        };
        Distribution { num_bits: self.num_bits, probs }
    }
}

/// Per-gate depolarizing probabilities and per-qubit readout flip
/// probabilities for one concrete placement of a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability per gate index (zero for measures).
    pub gate_noise: Vec<f64>,
    /// Readout flip probability per logical qubit.
    pub readout: Vec<f64>,
}

impl NoiseModel {
    pub fn noiseless(c: &Circuit) -> Self {
        NoiseModel { gate_noise: vec![0.0; c.gates.len()], readout: vec![0.0; c.num_qubits] }
    }

    /// Map calibration data through a layout: each single-qubit gate picks up
    /// its physical qubit's error, each cx its physical edge's error, each
    /// measured qubit its readout error. `scale` multiplies every
    /// probability (clamped below 1).
    pub fn from_layout(c: &Circuit, hw: &HardwareSpec, layout: &Layout, scale: f64) -> Result<Self> {
        let clamp = |p: f64| (p * scale).clamp(0.0, 1.0 - 1e-9);
        let mut gate_noise = Vec::with_capacity(c.gates.len());
        for gate in &c.gates {
            let p = match gate.kind {
                GateKind::Measure => 0.0,
                GateKind::Cx => {
                    let a = layout.physical(gate.qubits[0]);
                    let b = layout.physical(gate.qubits[1]);
                    let edge = hw.edge_index(a, b).ok_or_else(|| {
                        Error::InvalidLayout(format!(
                            "cx ({},{}) not on a coupling edge of `{}`",
                            gate.qubits[0], gate.qubits[1], hw.name
                        ))
                    })?;
                    clamp(hw.err_2q[edge])
                }
                _ => clamp(hw.err_1q[layout.physical(gate.qubits[0])]),
            };
            gate_noise.push(p);
        }
        let readout = (0..c.num_qubits)
            .map(|q| clamp(hw.err_readout[layout.physical(q)]))
            .collect();
        Ok(NoiseModel { gate_noise, readout })
    }
}

fn gate_matrix(gate: &Gate) -> [Complex64; 4] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match gate.kind {
        GateKind::H => [
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
        ],
        GateKind::X => [z, one, one, z],
        GateKind::Y => [z, -i, i, z],
        GateKind::Z => [one, z, z, -one],
        GateKind::S => [one, z, z, i],
        GateKind::Sdg => [one, z, z, -i],
        GateKind::Rx => {
            let t = gate.param.unwrap() / 2.0;
            let (c, m) = (Complex64::new(t.cos(), 0.0), Complex64::new(0.0, -t.sin()));
            [c, m, m, c]
        }
        GateKind::Ry => {
            let t = gate.param.unwrap() / 2.0;
            [
                Complex64::new(t.cos(), 0.0),
                Complex64::new(-t.sin(), 0.0),
                Complex64::new(t.sin(), 0.0),
                Complex64::new(t.cos(), 0.0),
            ]
        }
        GateKind::Rz => {
            let t = gate.param.unwrap() / 2.0;
            [Complex64::from_polar(1.0, -t), z, z, Complex64::from_polar(1.0, t)]
        }
        GateKind::Cx | GateKind::Measure => unreachable!("not a one-qubit unitary"),
    }
}

/// Apply a 2x2 unitary `[u00, u01, u10, u11]` on bit `q` of a state of
/// `total_bits` index bits.
fn apply_1q(state: &mut [Complex64], u: &[Complex64; 4], q: usize, total_bits: usize) {
    let mask = 1usize << q;
    for base in 0..1usize << total_bits {
        if base & mask != 0 {
            continue;
        }
        let hi = base | mask;
        let a = state[base];
        let b = state[hi];
        state[base] = u[0] * a + u[1] * b;
        state[hi] = u[2] * a + u[3] * b;
    }
}

fn apply_cx(state: &mut [Complex64], control: usize, target: usize, total_bits: usize) {
    let c_mask = 1usize << control;
    let t_mask = 1usize << target;
    for idx in 0..1usize << total_bits {
        if idx & c_mask != 0 && idx & t_mask == 0 {
            state.swap(idx, idx | t_mask);
        }
    }
}

/// Noiseless Born-rule distribution over the measured qubits.
pub fn simulate_ideal(c: &Circuit) -> Result<Distribution> {
    c.validate()?;
    if c.num_qubits > IDEAL_QUBIT_GUARD {
        return Err(Error::ResourceGuard(format!(
            "statevector simulation capped at {IDEAL_QUBIT_GUARD} qubits, circuit `{}` has {}",
            c.name, c.num_qubits
        )));
    }
    let measured = c.measured_qubits();
    if measured.is_empty() {
        return Err(Error::InvalidCircuit(format!(
            "circuit `{}` measures nothing",
            c.name
        )));
    }
    let n = c.num_qubits;
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << n];
    state[0] = Complex64::new(1.0, 0.0);
    for gate in &c.gates {
        match gate.kind {
            GateKind::Measure => {}
            GateKind::Cx => apply_cx(&mut state, gate.qubits[0], gate.qubits[1], n),
            _ => apply_1q(&mut state, &gate_matrix(gate), gate.qubits[0], n),
        }
    }
    let mut dist = Distribution::zeros(measured.len());
    for (idx, amp) in state.iter().enumerate() {
        let p = amp.norm_sqr();
        if p > 0.0 {
            dist.probs[project_bits(idx, &measured)] += p;
        }
    }
    Ok(dist)
}

fn project_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0usize, |acc, (j, &q)| acc | (index >> q & 1) << j)
}

/// Density-matrix evolution: after each gate a depolarizing channel with
/// that gate's probability acts on its support; readout confusion is applied
/// to the final distribution per measured qubit.
pub fn simulate_noisy(c: &Circuit, nm: &NoiseModel) -> Result<Distribution> {
    c.validate()?;
    if c.num_qubits > NOISY_QUBIT_GUARD {
        return Err(Error::ResourceGuard(format!(
            "density-matrix simulation capped at {NOISY_QUBIT_GUARD} qubits, circuit `{}` has {}",
            c.name, c.num_qubits
        )));
    }
    if nm.gate_noise.len() != c.gates.len() || nm.readout.len() != c.num_qubits {
        return Err(Error::InvalidCircuit(
            "noise model does not match the circuit".into(),
        ));
    }
    let measured = c.measured_qubits();
    if measured.is_empty() {
        return Err(Error::InvalidCircuit(format!(
            "circuit `{}` measures nothing",
            c.name
        )));
    }

    // rho is flattened over 2n index bits: row bits 0..n, column bits n..2n.
    let n = c.num_qubits;
    let mut rho = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
    rho[0] = Complex64::new(1.0, 0.0);

    for (gi, gate) in c.gates.iter().enumerate() {
        match gate.kind {
            GateKind::Measure => continue,
            GateKind::Cx => {
                apply_cx(&mut rho, gate.qubits[0], gate.qubits[1], 2 * n);
                apply_cx(&mut rho, gate.qubits[0] + n, gate.qubits[1] + n, 2 * n);
            }
            _ => {
                let u = gate_matrix(gate);
                let conj = [u[0].conj(), u[1].conj(), u[2].conj(), u[3].conj()];
                apply_1q(&mut rho, &u, gate.qubits[0], 2 * n);
                apply_1q(&mut rho, &conj, gate.qubits[0] + n, 2 * n);
            }
        }
        let p = nm.gate_noise[gi];
        if p > 0.0 {
            if gate.kind == GateKind::Cx {
                depolarize_2q(&mut rho, gate.qubits[0], gate.qubits[1], p, n);
            } else {
                depolarize_1q(&mut rho, gate.qubits[0], p, n);
            }
        }
    }

    // Diagonal, marginalized onto the measured qubits.
    let mut dist = Distribution::zeros(measured.len());
    for idx in 0..1usize << n {
        let p = rho[idx | idx << n].re;
        dist.probs[project_bits(idx, &measured)] += p;
    }
    // Symmetric readout confusion per measured qubit.
    for (j, &q) in measured.iter().enumerate() {
        let r = nm.readout[q];
        if r == 0.0 {
            continue;
        }
        let mask = 1usize << j;
        for idx in 0..dist.probs.len() {
            if idx & mask == 0 {
                let a = dist.probs[idx];
                let b = dist.probs[idx | mask];
                dist.probs[idx] = (1.0 - r) * a + r * b;
                dist.probs[idx | mask] = (1.0 - r) * b + r * a;
            }
        }
    }
    Ok(dist)
}

/// Depolarizing with error probability p on one qubit, written through the
/// identity (X.X + Y.Y + Z.Z)(rho) = 4 (I/2 (x) tr_q rho) - rho so the update
/// stays in place: diagonal (in q) pairs mix, coherences scale by 1 - 4p/3.
fn depolarize_1q(rho: &mut [Complex64], q: usize, p: f64, n: usize) {
    let keep = 1.0 - 4.0 * p / 3.0;
    let mix = 2.0 * p / 3.0;
    let row = 1usize << q;
    let col = 1usize << (q + n);
    for base in 0..rho.len() {
        if base & row != 0 || base & col != 0 {
            continue;
        }
        let d00 = rho[base];
        let d11 = rho[base | row | col];
        rho[base] = keep * d00 + mix * (d00 + d11);
        rho[base | row | col] = keep * d11 + mix * (d00 + d11);
        rho[base | row] *= keep;
        rho[base | col] *= keep;
    }
}

/// Two-qubit depolarizing with error probability p: uniform over the 15
/// non-identity Paulis, equivalently (1 - 16p/15) rho + 16p/15 (I/4 (x) tr).
fn depolarize_2q(rho: &mut [Complex64], a: usize, b: usize, p: f64, n: usize) {
    let keep = 1.0 - 16.0 * p / 15.0;
    let mix = (16.0 * p / 15.0) / 4.0;
    let rows = [1usize << a, 1usize << b];
    let cols = [1usize << (a + n), 1usize << (b + n)];
    let all = rows[0] | rows[1] | cols[0] | cols[1];
    for base in 0..rho.len() {
        if base & all != 0 {
            continue;
        }
        // Sub-block over (row_ab, col_ab) in {0..4}^2.
        let at = |r: usize, c: usize| -> usize {
            base | ((r & 1) * rows[1])
                | ((r >> 1) * rows[0])
                | ((c & 1) * cols[1])
                | ((c >> 1) * cols[0])
        };
        let trace: Complex64 = (0..4).map(|m| rho[at(m, m)]).sum();
        for r in 0..4 {
            for cidx in 0..4 {
                let pos = at(r, cidx);
                rho[pos] *= keep;
                if r == cidx {
                    rho[pos] += mix * trace;
                }
            }
        }
    }
}

/// Classical (Bhattacharyya) fidelity between two distributions over the
/// same bits; quasi-distributions are clipped and renormalized first.
pub fn fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.num_bits != q.num_bits {
        return Err(Error::InvalidCircuit(format!(
            "fidelity domains differ: {} vs {} bits",
            p.num_bits, q.num_bits
        )));
    }
    let pc = p.clipped_renormalized();
    let qc = q.clipped_renormalized();
    let bc: f64 = pc
        .probs
        .iter()
        .zip(&qc.probs)
        .map(|(&a, &b)| (a * b).max(0.0).sqrt())
        .sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}
