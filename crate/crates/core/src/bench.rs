//! Deterministic generators for the benchmark circuit families.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::{Error, Result};

pub const DEFAULT_ANGLE_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchFamily {
    RealAmplitudes,
    BernsteinVazirani,
    RippleAdder,
    Trotter,
}

impl BenchFamily {
    pub fn name(self) -> &'static str {
        match self {
            BenchFamily::RealAmplitudes => "real_amplitudes",
            BenchFamily::BernsteinVazirani => "bernstein_vazirani",
            BenchFamily::RippleAdder => "ripple_adder",
            BenchFamily::Trotter => "trotter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub family: BenchFamily,
    pub num_qubits: usize,
    /// Ansatz repetitions (real_amplitudes).
    #[serde(default = "default_reps")]
    pub reps: usize,
    /// Hidden bitstring of length n-1 (bernstein_vazirani); all-ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret: Option<String>,
    /// Trotter steps.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Seed for rotation angles (real_amplitudes, trotter).
    #[serde(default = "default_angle_seed")]
    pub angle_seed: u64,
}

fn default_reps() -> usize {
    1
}
fn default_steps() -> usize {
    1
}
fn default_angle_seed() -> u64 {
    DEFAULT_ANGLE_SEED
}

impl BenchSpec {
    pub fn new(family: BenchFamily, num_qubits: usize) -> Self {
        BenchSpec {
            family,
            num_qubits,
            reps: 1,
            secret: None,
            steps: 1,
            angle_seed: DEFAULT_ANGLE_SEED,
        }
    }
}

/// Angles are drawn from a seeded PCG stream in gate order, uniform over
/// [0, 2pi); the same spec always yields a byte-identical circuit.
pub fn generate(spec: &BenchSpec) -> Result<Circuit> {
    let c = match spec.family {
        BenchFamily::RealAmplitudes => real_amplitudes(spec.num_qubits, spec.reps, spec.angle_seed)?,
        BenchFamily::BernsteinVazirani => {
            let secret = match &spec.secret {
                Some(s) => s.clone(),
                None => "1".repeat(spec.num_qubits.saturating_sub(1)),
            };
            bernstein_vazirani(spec.num_qubits, &secret)?
        }
        BenchFamily::RippleAdder => ripple_adder(spec.num_qubits)?,
        BenchFamily::Trotter => trotter(spec.num_qubits, spec.steps, spec.angle_seed)?,
    };
    c.validate()?;
    Ok(c)
}

fn angle_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    move || rng.random::<f64>() * std::f64::consts::TAU
}

/// RealAmplitudes ansatz with reverse-linear entanglement: per repetition a
/// layer of ry on every qubit followed by the cx chain
/// (n-2,n-1) .. (1,2) (0,1), then one final ry layer. One repetition uses
/// n-1 cx gates and 2n angles.
pub fn real_amplitudes(n: usize, reps: usize, angle_seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidCircuit(
            "real_amplitudes requires at least 2 qubits".into(),
        ));
    }
    if reps == 0 {
        return Err(Error::InvalidCircuit("real_amplitudes requires reps >= 1".into()));
    }
    let mut next_angle = angle_stream(angle_seed);
    let mut c = Circuit::new(format!("real_amplitudes_{n}"), n);
    for _ in 0..reps {
        for q in 0..n {
            c.push(Gate::rot(GateKind::Ry, q, next_angle()));
        }
        for i in (0..n - 1).rev() {
            c.push(Gate::cx(i, i + 1));
        }
    }
    for q in 0..n {
        c.push(Gate::rot(GateKind::Ry, q, next_angle()));
    }
    for q in 0..n {
        c.push(Gate::measure(q));
    }
    Ok(c)
}

/// Bernstein-Vazirani with hidden string `secret` (length n-1, bit i on data
/// qubit i); the ancilla is the last qubit and stays unmeasured.
pub fn bernstein_vazirani(n: usize, secret: &str) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidCircuit(
            "bernstein_vazirani requires at least 2 qubits".into(),
        ));
    }
    if secret.len() != n - 1 || !secret.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidCircuit(format!(
            "bernstein_vazirani secret must be {} bits of 0/1, got `{secret}`",
            n - 1
        )));
    }
    let anc = n - 1;
    let mut c = Circuit::new(format!("bernstein_vazirani_{n}"), n);
    for q in 0..anc {
        c.push(Gate::one(GateKind::H, q));
    }
    c.push(Gate::one(GateKind::X, anc));
    c.push(Gate::one(GateKind::H, anc));
    for (i, bit) in secret.bytes().enumerate() {
        if bit == b'1' {
            c.push(Gate::cx(i, anc));
        }
    }
    for q in 0..anc {
        c.push(Gate::one(GateKind::H, q));
    }
    for q in 0..anc {
        c.push(Gate::measure(q));
    }
    Ok(c)
}

/// Ripple-carry adder (MAJ/UMA cascade) over two (n-2)/2-bit operands held on
/// interleaved wires, with carry-in q0 and carry-out q(n-1). Operand wires
/// are put in uniform superposition so the output distribution exercises the
/// whole truth table. Toffolis are expanded over the native gate set.
pub fn ripple_adder(n: usize) -> Result<Circuit> {
    if n < 6 || !n.is_multiple_of(2) {
        return Err(Error::InvalidCircuit(format!(
            "ripple_adder requires an even size of at least 6 (got {n})"
        )));
    }
    let k = (n - 2) / 2;
    let a = |i: usize| 2 * i + 1;
    let b = |i: usize| 2 * i + 2;
    let cin = 0;
    let cout = n - 1;

    let mut c = Circuit::new(format!("ripple_adder_{n}"), n);
    for i in 0..k {
        c.push(Gate::one(GateKind::H, a(i)));
        c.push(Gate::one(GateKind::H, b(i)));
    }
    let carry = |i: usize| if i == 0 { cin } else { a(i - 1) };
    for i in 0..k {
        push_maj(&mut c, carry(i), b(i), a(i));
    }
    c.push(Gate::cx(a(k - 1), cout));
    for i in (0..k).rev() {
        push_uma(&mut c, carry(i), b(i), a(i));
    }
    for q in 0..n {
        c.push(Gate::measure(q));
    }
    Ok(c)
}

fn push_maj(c: &mut Circuit, x: usize, y: usize, z: usize) {
    c.push(Gate::cx(z, y));
    c.push(Gate::cx(z, x));
    push_ccx(c, x, y, z);
}

fn push_uma(c: &mut Circuit, x: usize, y: usize, z: usize) {
    push_ccx(c, x, y, z);
    c.push(Gate::cx(z, x));
    c.push(Gate::cx(x, y));
}

/// Textbook Toffoli expansion; rz(+-pi/4) stands in for T/Tdg, which only
/// shifts the global phase.
fn push_ccx(c: &mut Circuit, ctl_a: usize, ctl_b: usize, tgt: usize) {
    let t = std::f64::consts::FRAC_PI_4;
    c.push(Gate::one(GateKind::H, tgt));
    c.push(Gate::cx(ctl_b, tgt));
    c.push(Gate::rot(GateKind::Rz, tgt, -t));
    c.push(Gate::cx(ctl_a, tgt));
    c.push(Gate::rot(GateKind::Rz, tgt, t));
    c.push(Gate::cx(ctl_b, tgt));
    c.push(Gate::rot(GateKind::Rz, tgt, -t));
    c.push(Gate::cx(ctl_a, tgt));
    c.push(Gate::rot(GateKind::Rz, ctl_b, t));
    c.push(Gate::rot(GateKind::Rz, tgt, t));
    c.push(Gate::one(GateKind::H, tgt));
    c.push(Gate::cx(ctl_a, ctl_b));
    c.push(Gate::rot(GateKind::Rz, ctl_a, t));
    c.push(Gate::rot(GateKind::Rz, ctl_b, -t));
    c.push(Gate::cx(ctl_a, ctl_b));
}

/// First-order Trotter steps of a nearest-neighbour ZZ chain plus a
/// transverse X field: per step, cx-rz-cx on each (i, i+1) pair followed by
/// an rx layer.
pub fn trotter(n: usize, steps: usize, angle_seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidCircuit("trotter requires at least 2 qubits".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidCircuit("trotter requires steps >= 1".into()));
    }
    let mut next_angle = angle_stream(angle_seed);
    let mut c = Circuit::new(format!("trotter_{n}"), n);
    for _ in 0..steps {
        for i in 0..n - 1 {
            let theta = next_angle();
            c.push(Gate::cx(i, i + 1));
            c.push(Gate::rot(GateKind::Rz, i + 1, theta));
            c.push(Gate::cx(i, i + 1));
        }
        for q in 0..n {
            c.push(Gate::rot(GateKind::Rx, q, next_angle()));
        }
    }
    for q in 0..n {
        c.push(Gate::measure(q));
    }
    Ok(c)
}

/// Canonical cut fixtures for the benchmark families. Cut points are always
/// user-supplied in job files; these helpers just encode the standard places
/// to cut each family.
pub mod cuts {
    use super::*;
    use crate::cut::CutPoint;

    /// Cut a reverse-linear RealAmplitudes (single repetition) into
    /// `fragments` chained pieces of near-equal width: boundary wire b is
    /// severed right after its cx(b, b+1).
    pub fn ra_chain(c: &Circuit, fragments: usize) -> Result<Vec<CutPoint>> {
        let n = c.num_qubits;
        if fragments < 1 || fragments > n / 2 {
            return Err(Error::InvalidCut(format!(
                "cannot split {n} qubits into {fragments} fragments"
            )));
        }
        let mut cuts = Vec::new();
        for i in 1..fragments {
            let boundary = n * (fragments - i) / fragments;
            let after_gate = c
                .gates
                .iter()
                .position(|g| g.kind == GateKind::Cx && g.qubits == vec![boundary, boundary + 1])
                .ok_or_else(|| {
                    Error::InvalidCut(format!(
                        "no cx({boundary},{}) found; is this a single-rep reverse-linear ansatz?",
                        boundary + 1
                    ))
                })?;
            cuts.push(CutPoint { qubit: boundary, after_gate });
        }
        Ok(cuts)
    }

    /// Cut a Bernstein-Vazirani on its ancilla wire between the oracle cx
    /// gates, splitting the star roughly in half. Needs at least two ones in
    /// the secret.
    pub fn bv_split(c: &Circuit) -> Result<Vec<CutPoint>> {
        let anc = c.num_qubits - 1;
        let oracle: Vec<usize> = c
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.kind == GateKind::Cx && g.qubits[1] == anc)
            .map(|(i, _)| i)
            .collect();
        if oracle.len() < 2 {
            return Err(Error::InvalidCut(
                "bernstein_vazirani needs at least two oracle cx gates to cut".into(),
            ));
        }
        let after_gate = oracle[oracle.len().div_ceil(2) - 1];
        Ok(vec![CutPoint { qubit: anc, after_gate }])
    }

    /// Cut the ripple-carry adder into two equal halves: the middle carry
    /// wire is severed twice, once after its MAJ involvement with the low
    /// half and once after its last gate into the high half. The two
    /// fragments depend on each other in both directions, which the
    /// reconstruction handles like any other cut pair.
    pub fn adder_split(c: &Circuit) -> Result<Vec<CutPoint>> {
        let n = c.num_qubits;
        let k = (n - 2) / 2;
        let j = k.div_ceil(2) - 1;
        let wire = 2 * j + 1; // a_j
        let high_start = 2 * j + 3; // first wire of the high half
        let on_wire: Vec<usize> = c
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.qubits.contains(&wire))
            .map(|(i, _)| i)
            .collect();
        let is_high =
            |g: usize| c.gates[g].qubits.iter().any(|&q| q >= high_start && q != wire);
        let first_high = on_wire
            .iter()
            .position(|&g| is_high(g))
            .ok_or_else(|| Error::InvalidCut("adder carry wire never reaches the high half".into()))?;
        let last_high = on_wire.iter().rposition(|&g| is_high(g)).unwrap();
        Ok(vec![
            CutPoint { qubit: wire, after_gate: on_wire[first_high - 1] },
            CutPoint { qubit: wire, after_gate: on_wire[last_high] },
        ])
    }

    /// Cut a single-step Trotter chain on its middle wire, between its two
    /// ZZ blocks.
    pub fn trotter_split(c: &Circuit) -> Result<Vec<CutPoint>> {
        let wire = c.num_qubits / 2;
        let on_wire: Vec<usize> = c
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.qubits.contains(&wire))
            .map(|(i, _)| i)
            .collect();
        let first_up = on_wire
            .iter()
            .position(|&g| c.gates[g].qubits.iter().any(|&q| q > wire))
            .ok_or_else(|| Error::InvalidCut("middle wire has no upward coupling".into()))?;
        if first_up == 0 {
            return Err(Error::InvalidCut(
                "trotter cut requires the downward ZZ block first; use steps = 1".into(),
            ));
        }
        Ok(vec![CutPoint { qubit: wire, after_gate: on_wire[first_up - 1] }])
    }

    /// The family's standard cut set for a given fragment count.
    pub fn canonical(spec: &BenchSpec, c: &Circuit, fragments: usize) -> Result<Vec<CutPoint>> {
        match spec.family {
            BenchFamily::RealAmplitudes => ra_chain(c, fragments),
            BenchFamily::BernsteinVazirani if fragments == 2 => bv_split(c),
            BenchFamily::RippleAdder if fragments == 2 => adder_split(c),
            BenchFamily::Trotter if fragments == 2 => trotter_split(c),
            _ => Err(Error::InvalidCut(format!(
                "{} has no canonical {fragments}-fragment cut",
                spec.family.name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qasm::emit_qasm;

    #[test]
    fn real_amplitudes_counts() {
        let c = real_amplitudes(6, 1, DEFAULT_ANGLE_SEED).unwrap();
        let cx = c.gates.iter().filter(|g| g.kind == GateKind::Cx).count();
        let ry: Vec<f64> = c
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Ry)
            .map(|g| g.param.unwrap())
            .collect();
        assert_eq!(cx, 5);
        assert_eq!(ry.len(), 12);
    }

    #[test]
    fn real_amplitudes_interaction_graph_is_path() {
        let c = real_amplitudes(6, 1, DEFAULT_ANGLE_SEED).unwrap();
        let g = c.interaction_graph();
        let expected: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 1)).collect();
        assert_eq!(g.edges.iter().copied().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = BenchSpec::new(BenchFamily::RealAmplitudes, 6);
        let a = emit_qasm(&generate(&spec).unwrap());
        let b = emit_qasm(&generate(&spec).unwrap());
        assert_eq!(a, b);

        let mut other = spec.clone();
        other.angle_seed = 8;
        assert_ne!(a, emit_qasm(&generate(&other).unwrap()));
    }

    #[test]
    fn bv_zero_secret_has_no_cx() {
        let c = bernstein_vazirani(6, "00000").unwrap();
        assert!(!c.gates.iter().any(|g| g.kind == GateKind::Cx));
    }

    #[test]
    fn bv_secret_length_checked() {
        assert!(bernstein_vazirani(6, "1111").is_err());
        assert!(bernstein_vazirani(6, "10a01").is_err());
    }

    #[test]
    fn adder_size_congruence() {
        assert!(ripple_adder(6).is_ok());
        assert!(ripple_adder(10).is_ok());
        assert!(ripple_adder(7).is_err());
        assert!(ripple_adder(4).is_err());
    }

    #[test]
    fn adder_split_gives_two_four_qubit_fragments() {
        let c = ripple_adder(6).unwrap();
        let cut_points = cuts::adder_split(&c).unwrap();
        assert_eq!(cut_points.len(), 2);
        let frags = crate::cut::apply_cuts(&c, &cut_points).unwrap();
        assert_eq!(frags.len(), 2);
        for frag in &frags {
            assert_eq!(frag.circuit.num_qubits, 4);
            assert_eq!(frag.measure_cut_wires.len(), 1);
            assert_eq!(frag.prepare_cut_wires.len(), 1);
            assert_eq!(frag.instance_count(), 12);
            assert_eq!(crate::cut::expand_instances(frag).len(), 12);
        }
    }

    #[test]
    fn adder10_split_balances() {
        let c = ripple_adder(10).unwrap();
        let frags = crate::cut::apply_cuts(&c, &cuts::adder_split(&c).unwrap()).unwrap();
        assert_eq!(frags.len(), 2);
        assert_eq!(frags[0].circuit.num_qubits, 6);
        assert_eq!(frags[1].circuit.num_qubits, 6);
    }

    #[test]
    fn ra_chain_cut_counts() {
        let c = real_amplitudes(10, 1, DEFAULT_ANGLE_SEED).unwrap();
        let frags =
            crate::cut::apply_cuts(&c, &cuts::ra_chain(&c, 3).unwrap()).unwrap();
        let mut sizes: Vec<usize> = frags.iter().map(|f| f.circuit.num_qubits).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 4, 4]);
    }

    #[test]
    fn bv_split_roles() {
        let c = bernstein_vazirani(6, "11111").unwrap();
        let frags = crate::cut::apply_cuts(&c, &cuts::bv_split(&c).unwrap()).unwrap();
        assert_eq!(frags.len(), 2);
        assert_eq!(frags.iter().map(|f| f.instance_count()).sum::<usize>(), 7);
    }

    #[test]
    fn trotter_split_two_fragments() {
        let c = trotter(6, 1, DEFAULT_ANGLE_SEED).unwrap();
        let frags = crate::cut::apply_cuts(&c, &cuts::trotter_split(&c).unwrap()).unwrap();
        assert_eq!(frags.len(), 2);
    }

    #[test]
    fn trotter_4q_single_step_fixture() {
        // Frozen reference gate list, angles included bit for bit.
        let c = trotter(4, 1, DEFAULT_ANGLE_SEED).unwrap();
        let mut expected = Circuit::new("trotter_4".to_string(), 4);
        let zz = [4.3347532714864645, 2.992255201074358, 1.7011218356960975];
        let x = [
            5.849550052133026,
            1.8331917248210725,
            1.368384475853764,
            1.3571097660705533,
        ];
        for (i, &theta) in zz.iter().enumerate() {
            expected.push(Gate::cx(i, i + 1));
            expected.push(Gate::rot(GateKind::Rz, i + 1, theta));
            expected.push(Gate::cx(i, i + 1));
        }
        for (q, &phi) in x.iter().enumerate() {
            expected.push(Gate::rot(GateKind::Rx, q, phi));
        }
        for q in 0..4 {
            expected.push(Gate::measure(q));
        }
        assert_eq!(c, expected);
    }
}
