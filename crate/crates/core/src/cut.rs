//! Wire cutting: split a circuit into tagged fragments and expand each
//! fragment into its tomographic instance set.
//!
//! A cut severs one wire immediately after a chosen gate. The early side of
//! the wire becomes a measure-cut wire (measured in the X/Y/Z bases), the
//! late side becomes a fresh prepare-cut wire (initialised to one of
//! |0>, |1>, |+>, |+i>). Fragments are the connected components of the gate
//! adjacency that remains after severing; a fragment may sit on both sides
//! of different cuts, so chains and two-fragment loops are both accepted.
//! A cut whose two sides land in the same fragment does not separate
//! anything and is rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPoint {
    /// Wire being severed.
    pub qubit: usize,
    /// Index into the parent gate list; the wire is cut right after this gate.
    pub after_gate: usize,
}

/// Measurement basis on a measure-cut wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn label(self) -> &'static str {
        match self {
            Basis::X => "X",
            Basis::Y => "Y",
            Basis::Z => "Z",
        }
    }
}

/// Initial state on a prepare-cut wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prep {
    Zero,
    One,
    Plus,
    PlusI,
}

impl Prep {
    pub const ALL: [Prep; 4] = [Prep::Zero, Prep::One, Prep::Plus, Prep::PlusI];

    pub fn label(self) -> &'static str {
        match self {
            Prep::Zero => "0",
            Prep::One => "1",
            Prep::Plus => "+",
            Prep::PlusI => "+i",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subcircuit {
    pub circuit: Circuit,
    /// Name of the uncut circuit.
    pub parent: String,
    /// Local qubits measured in a tomography basis, ascending.
    pub measure_cut_wires: Vec<usize>,
    /// Cut id (index into the cut list) per measure-cut wire.
    pub measure_cut_ids: Vec<usize>,
    /// Local qubits starting in a prepared state, ascending.
    pub prepare_cut_wires: Vec<usize>,
    pub prepare_cut_ids: Vec<usize>,
    /// Local qubit -> output bit position of the uncut circuit.
    pub output_wires: BTreeMap<usize, usize>,
}

impl Subcircuit {
    /// Total tomographic instances: 3 per measure-cut wire, 4 per
    /// prepare-cut wire.
    pub fn instance_count(&self) -> usize {
        3usize.pow(self.measure_cut_wires.len() as u32)
            * 4usize.pow(self.prepare_cut_wires.len() as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceCircuit {
    /// Basis per measure-cut wire, in `measure_cut_wires` order.
    pub basis_choice: Vec<Basis>,
    /// Preparation per prepare-cut wire, in `prepare_cut_wires` order.
    pub prep_choice: Vec<Prep>,
    pub circuit: Circuit,
}

impl InstanceCircuit {
    pub fn label(&self) -> String {
        let basis: String = self.basis_choice.iter().map(|b| b.label()).collect();
        let prep: String = self.prep_choice.iter().map(|p| p.label()).collect();
        format!("O={basis};rho={prep}")
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Split `c` along `cuts`. Fragments are returned in order of their earliest
/// gate; each knows its cut-wire roles and where its measured wires land in
/// the uncut circuit's output bits.
pub fn apply_cuts(c: &Circuit, cuts: &[CutPoint]) -> Result<Vec<Subcircuit>> {
    c.validate()?;

    // Gate indices per wire, in circuit order.
    let mut wire_gates: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits];
    for (idx, gate) in c.gates.iter().enumerate() {
        for &q in &gate.qubits {
            wire_gates[q].push(idx);
        }
    }

    // Positions (per wire) after which the wire is severed.
    let mut cut_positions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c.num_qubits]; // (pos, cut id)
    for (cut_id, cut) in cuts.iter().enumerate() {
        if cut.qubit >= c.num_qubits {
            return Err(Error::InvalidCut(format!(
                "cut {cut_id}: qubit {} out of range",
                cut.qubit
            )));
        }
        let pos = wire_gates[cut.qubit]
            .iter()
            .position(|&g| g == cut.after_gate)
            .ok_or_else(|| {
                Error::InvalidCut(format!(
                    "cut {cut_id}: gate {} does not act on qubit {}",
                    cut.after_gate, cut.qubit
                ))
            })?;
        if pos + 1 == wire_gates[cut.qubit].len() {
            return Err(Error::InvalidCut(format!(
                "cut {cut_id}: gate {} is the last gate on qubit {}",
                cut.after_gate, cut.qubit
            )));
        }
        if cut_positions[cut.qubit].iter().any(|&(p, _)| p == pos) {
            return Err(Error::InvalidCut(format!(
                "cut {cut_id}: duplicate cut on qubit {} after gate {}",
                cut.qubit, cut.after_gate
            )));
        }
        cut_positions[cut.qubit].push((pos, cut_id));
    }
    for positions in &mut cut_positions {
        positions.sort_unstable();
    }

    // Segment index of a wire position: number of cut boundaries before it.
    let seg_of = |wire: usize, pos: usize| -> usize {
        cut_positions[wire].iter().take_while(|&&(p, _)| p < pos).count()
    };

    // Connect consecutive gates within a wire segment; a two-qubit gate is a
    // single node shared by both its wires, which is what joins them.
    let mut dsu = DisjointSet::new(c.gates.len());
    for (wire, gates) in wire_gates.iter().enumerate() {
        for (pos, &g) in gates.iter().enumerate().skip(1) {
            if seg_of(wire, pos) == seg_of(wire, pos - 1) {
                dsu.union(gates[pos - 1], g);
            }
        }
    }

    // Fragment ids in order of earliest member gate.
    let mut frag_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for gate in 0..c.gates.len() {
        let root = dsu.find(gate);
        let next = frag_of_root.len();
        frag_of_root.entry(root).or_insert(next);
    }
    if frag_of_root.is_empty() {
        return Err(Error::InvalidCut("cannot cut a circuit with no gates".into()));
    }
    let num_frags = frag_of_root.len();
    let frag_of_gate =
        |dsu: &mut DisjointSet, gate: usize| -> usize { frag_of_root[&dsu.find(gate)] };

    // Enumerate segments per fragment; local qubit order is (wire, segment).
    let mut local_of_segment: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new(); // (wire, seg) -> (frag, local)
    let mut frag_qubits = vec![0usize; num_frags];
    for (wire, gates) in wire_gates.iter().enumerate() {
        for (pos, &g) in gates.iter().enumerate() {
            let seg = seg_of(wire, pos);
            let frag = frag_of_gate(&mut dsu, g);
            local_of_segment.entry((wire, seg)).or_insert_with(|| {
                let local = frag_qubits[frag];
                frag_qubits[frag] += 1;
                (frag, local)
            });
        }
    }

    for (frag, &n) in frag_qubits.iter().enumerate() {
        if n > c.num_qubits {
            return Err(Error::InvalidCut(format!(
                "fragment {frag} needs {n} qubits, exceeding the parent's {}",
                c.num_qubits
            )));
        }
    }

    // Assemble fragment circuits.
    let mut fragments: Vec<Subcircuit> = (0..num_frags)
        .map(|i| Subcircuit {
            circuit: Circuit::new(format!("{}#{}", c.name, i), frag_qubits[i]),
            parent: c.name.clone(),
            measure_cut_wires: Vec::new(),
            measure_cut_ids: Vec::new(),
            prepare_cut_wires: Vec::new(),
            prepare_cut_ids: Vec::new(),
            output_wires: BTreeMap::new(),
        })
        .collect();

    let mut pos_on_wire = vec![0usize; c.num_qubits];
    for (idx, gate) in c.gates.iter().enumerate() {
        let frag = frag_of_gate(&mut dsu, idx);
        let mut mapped = gate.clone();
        for q in &mut mapped.qubits {
            let seg = seg_of(*q, pos_on_wire[*q]);
            let (seg_frag, local) = local_of_segment[&(*q, seg)];
            debug_assert_eq!(seg_frag, frag);
            pos_on_wire[*q] += 1;
            *q = local;
        }
        fragments[frag].circuit.push(mapped);
    }

    // Cut roles: early side measures, late side prepares.
    for (cut_id, cut) in cuts.iter().enumerate() {
        let (pos, _) = *cut_positions[cut.qubit]
            .iter()
            .find(|&&(_, id)| id == cut_id)
            .expect("validated above");
        let seg = seg_of(cut.qubit, pos);
        let (up_frag, up_local) = local_of_segment[&(cut.qubit, seg)];
        let (down_frag, down_local) = local_of_segment[&(cut.qubit, seg + 1)];
        if up_frag == down_frag {
            return Err(Error::InvalidCut(format!(
                "cut {cut_id} on qubit {} does not separate: both sides stay in fragment {}",
                cut.qubit, up_frag
            )));
        }
        fragments[up_frag].measure_cut_wires.push(up_local);
        fragments[up_frag].measure_cut_ids.push(cut_id);
        fragments[down_frag].prepare_cut_wires.push(down_local);
        fragments[down_frag].prepare_cut_ids.push(cut_id);
    }
    for frag in &mut fragments {
        sort_paired(&mut frag.measure_cut_wires, &mut frag.measure_cut_ids);
        sort_paired(&mut frag.prepare_cut_wires, &mut frag.prepare_cut_ids);
    }

    // Output bit positions follow the parent's measured qubits, ascending.
    for (bit, q) in c.measured_qubits().into_iter().enumerate() {
        let last_seg = cut_positions[q].len();
        let (frag, local) = local_of_segment[&(q, last_seg)];
        fragments[frag].output_wires.insert(local, bit);
    }

    for frag in &fragments {
        debug_assert!(frag
            .measure_cut_wires
            .iter()
            .all(|w| !frag.output_wires.contains_key(w)));
        frag.circuit.validate()?;
    }
    Ok(fragments)
}

fn sort_paired(wires: &mut Vec<usize>, ids: &mut Vec<usize>) {
    let mut pairs: Vec<(usize, usize)> = wires.iter().copied().zip(ids.iter().copied()).collect();
    pairs.sort_unstable();
    *wires = pairs.iter().map(|&(w, _)| w).collect();
    *ids = pairs.iter().map(|&(_, i)| i).collect();
}

/// Cartesian product of basis and preparation choices, in lexicographic
/// order: bases cycle X < Y < Z over measure-cut wires (ascending, last wire
/// fastest), then preparations cycle 0 < 1 < + < +i over prepare-cut wires.
pub fn expand_instances(s: &Subcircuit) -> Vec<InstanceCircuit> {
    let m = s.measure_cut_wires.len();
    let p = s.prepare_cut_wires.len();
    let total = s.instance_count();
    let mut out = Vec::with_capacity(total);
    for ordinal in 0..total {
        let mut rem = ordinal;
        let mut prep_choice = vec![Prep::Zero; p];
        for i in (0..p).rev() {
            prep_choice[i] = Prep::ALL[rem % 4];
            rem /= 4;
        }
        let mut basis_choice = vec![Basis::Z; m];
        for i in (0..m).rev() {
            basis_choice[i] = Basis::ALL[rem % 3];
            rem /= 3;
        }

        let mut circuit = Circuit::new(
            format!("{}[{}]", s.circuit.name, instance_suffix(&basis_choice, &prep_choice)),
            s.circuit.num_qubits,
        );
        for (i, &wire) in s.prepare_cut_wires.iter().enumerate() {
            match prep_choice[i] {
                Prep::Zero => {}
                Prep::One => circuit.push(Gate::one(GateKind::X, wire)),
                Prep::Plus => circuit.push(Gate::one(GateKind::H, wire)),
                Prep::PlusI => {
                    circuit.push(Gate::one(GateKind::H, wire));
                    circuit.push(Gate::one(GateKind::S, wire));
                }
            }
        }
        circuit.gates.extend(s.circuit.gates.iter().cloned());
        for (i, &wire) in s.measure_cut_wires.iter().enumerate() {
            match basis_choice[i] {
                Basis::X => circuit.push(Gate::one(GateKind::H, wire)),
                Basis::Y => {
                    circuit.push(Gate::one(GateKind::Sdg, wire));
                    circuit.push(Gate::one(GateKind::H, wire));
                }
                Basis::Z => {}
            }
            circuit.push(Gate::measure(wire));
        }
        out.push(InstanceCircuit { basis_choice, prep_choice, circuit });
    }
    out
}

fn instance_suffix(basis: &[Basis], prep: &[Prep]) -> String {
    let b: String = basis.iter().map(|x| x.label()).collect();
    let p: String = prep.iter().map(|x| x.label()).collect();
    format!("O={b};rho={p}")
}

/// Ordinal of an instance within `expand_instances` order.
pub fn instance_ordinal(s: &Subcircuit, basis: &[Basis], prep: &[Prep]) -> usize {
    debug_assert_eq!(basis.len(), s.measure_cut_wires.len());
    debug_assert_eq!(prep.len(), s.prepare_cut_wires.len());
    let mut ord = 0usize;
    for &b in basis {
        ord = ord * 3 + Basis::ALL.iter().position(|&x| x == b).unwrap();
    }
    for &p in prep {
        ord = ord * 4 + Prep::ALL.iter().position(|&x| x == p).unwrap();
    }
    ord
}
