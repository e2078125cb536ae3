//! Circuit intermediate representation and structural metrics.
//!
//! A [`Circuit`] is an ordered gate list over dense logical qubits
//! `0..num_qubits`. Structural metrics (levels, two-qubit depth, area,
//! interaction graph) drive execution-time estimates and layout search.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Rx,
    Ry,
    Rz,
    Cx,
    Measure,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Measure => "measure",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "cx" => GateKind::Cx,
            "measure" => GateKind::Measure,
            _ => return None,
        })
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::Cx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub param: Option<f64>,
}

impl Gate {
    pub fn one(kind: GateKind, qubit: usize) -> Self {
        Gate { kind, qubits: vec![qubit], param: None }
    }

    pub fn rot(kind: GateKind, qubit: usize, angle: f64) -> Self {
        Gate { kind, qubits: vec![qubit], param: Some(angle) }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cx, qubits: vec![control, target], param: None }
    }

    pub fn measure(qubit: usize) -> Self {
        Gate { kind: GateKind::Measure, qubits: vec![qubit], param: None }
    }

    pub fn validate(&self) -> Result<()> {
        let arity = if self.kind.is_two_qubit() { 2 } else { 1 };
        if self.qubits.len() != arity {
            return Err(Error::InvalidCircuit(format!(
                "{} expects {} qubit(s), got {}",
                self.kind.name(),
                arity,
                self.qubits.len()
            )));
        }
        if arity == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::InvalidCircuit(format!(
                "{} acts twice on qubit {}",
                self.kind.name(),
                self.qubits[0]
            )));
        }
        if self.kind.is_rotation() != self.param.is_some() {
            return Err(Error::InvalidCircuit(format!(
                "{} parameter mismatch (angle present: {})",
                self.kind.name(),
                self.param.is_some()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, num_qubits: usize) -> Self {
        Circuit { name: name.into(), num_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// Check all structural invariants: qubit indices in range, gate arity,
    /// rotation parameters present exactly for rotations, and measure gates
    /// last on their wire.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(Error::InvalidCircuit("circuit has zero qubits".into()));
        }
        let mut measured = vec![false; self.num_qubits];
        for (idx, gate) in self.gates.iter().enumerate() {
            gate.validate()?;
            for &q in &gate.qubits {
                if q >= self.num_qubits {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {idx} ({}) uses qubit {q} but circuit has {} qubits",
                        gate.kind.name(),
                        self.num_qubits
                    )));
                }
                if measured[q] {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {idx} ({}) acts on qubit {q} after its measurement",
                        gate.kind.name()
                    )));
                }
            }
            if gate.kind == GateKind::Measure {
                measured[gate.qubits[0]] = true;
            }
        }
        Ok(())
    }

    /// Qubits carrying a measure gate, ascending.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Measure)
            .map(|g| g.qubits[0])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Greedy left-aligned level structure over the non-measure gates: each
    /// gate lands in the earliest level where all its qubits are free.
    pub fn levels(&self) -> LevelSeq {
        let mut next_free = vec![0usize; self.num_qubits];
        let mut levels: Vec<Level> = Vec::new();
        for (idx, gate) in self.gates.iter().enumerate() {
            if gate.kind == GateKind::Measure {
                continue;
            }
            let lvl = gate.qubits.iter().map(|&q| next_free[q]).max().unwrap_or(0);
            if lvl == levels.len() {
                levels.push(Level { gates: Vec::new(), kind: LevelKind::OneQubitOnly });
            }
            levels[lvl].gates.push(idx);
            if gate.kind.is_two_qubit() {
                levels[lvl].kind = LevelKind::HasTwoQubit;
            }
            for &q in &gate.qubits {
                next_free[q] = lvl + 1;
            }
        }
        LevelSeq { levels }
    }

    /// Number of levels containing a two-qubit gate (kappa_2).
    pub fn two_qubit_depth(&self) -> usize {
        self.levels().kappa2()
    }

    /// Qubit count times two-qubit depth; a cx-free circuit counts depth 1 so
    /// the area stays strictly positive.
    pub fn area(&self) -> usize {
        self.num_qubits * self.two_qubit_depth().max(1)
    }

    pub fn interaction_graph(&self) -> InteractionGraph {
        let mut edges = BTreeSet::new();
        for gate in &self.gates {
            if gate.kind.is_two_qubit() {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        InteractionGraph { num_vertices: self.num_qubits, edges }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelKind {
    OneQubitOnly,
    HasTwoQubit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Indices into the circuit's gate list; pairwise qubit-disjoint.
    pub gates: Vec<usize>,
    pub kind: LevelKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSeq {
    pub levels: Vec<Level>,
}

impl LevelSeq {
    /// Count of levels holding only single-qubit gates.
    pub fn kappa1(&self) -> usize {
        self.levels.iter().filter(|l| l.kind == LevelKind::OneQubitOnly).count()
    }

    /// Count of levels holding at least one two-qubit gate.
    pub fn kappa2(&self) -> usize {
        self.levels.iter().filter(|l| l.kind == LevelKind::HasTwoQubit).count()
    }
}

/// Undirected graph of qubit pairs coupled by a cx anywhere in the circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionGraph {
    pub num_vertices: usize,
    /// Edges stored as (min, max) pairs.
    pub edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Connected components, each sorted ascending; singletons included.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_vertices];
        let mut comps = Vec::new();
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for n in self.neighbors(v) {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}
