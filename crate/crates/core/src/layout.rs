//! Embedding enumeration and calibration-based scoring of
//! (circuit, hardware, layout) triples.
//!
//! A layout maps logical qubits injectively onto physical qubits so that
//! every interaction edge lands on a coupling edge; there is no SWAP
//! routing, so a pair with no embedding is simply infeasible. The score is
//! Q = 1 - prod(1 - eps) over every operation's calibration error; lower is
//! better.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, InteractionGraph};
use crate::cut::Subcircuit;
use crate::hw::{feasible_hardware, HardwarePool, HardwareSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Layout(pub Vec<usize>);

impl Layout {
    pub fn physical(&self, logical: usize) -> usize {
        self.0[logical]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredLayout {
    pub layout: Layout,
    pub score: f64,
}

/// All injective, edge-preserving embeddings of `g` into the coupling graph,
/// in lexicographic order of the mapping array. Disconnected interaction
/// graphs are handled per component and merged under a shared used-qubit set.
pub fn enumerate_layouts(g: &InteractionGraph, hw: &HardwareSpec) -> Vec<Layout> {
    if g.num_vertices > hw.num_qubits {
        return Vec::new();
    }
    let components = g.components();
    // Search order inside a component: BFS from the highest-degree vertex,
    // so each later vertex has a mapped neighbour to anchor on.
    let orders: Vec<Vec<usize>> = components.iter().map(|comp| bfs_order(g, comp)).collect();

    let mut results = Vec::new();
    let mut mapping = vec![usize::MAX; g.num_vertices];
    let mut used = vec![false; hw.num_qubits];
    #[allow(clippy::too_many_arguments)]
    fn place(
        g: &InteractionGraph,
        hw: &HardwareSpec,
        orders: &[Vec<usize>],
        comp: usize,
        pos: usize,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
        results: &mut Vec<Layout>,
    ) {
        if comp == orders.len() {
            results.push(Layout(mapping.clone()));
            return;
        }
        if pos == orders[comp].len() {
            place(g, hw, orders, comp + 1, 0, mapping, used, results);
            return;
        }
        let v = orders[comp][pos];
        let mapped_neighbors: Vec<usize> = g
            .neighbors(v)
            .into_iter()
            .filter(|&n| mapping[n] != usize::MAX)
            .collect();
        let candidates: Vec<usize> = match mapped_neighbors.first() {
            // Anchor on an already-mapped neighbour's image.
            Some(&anchor) => hw.neighbors(mapping[anchor]),
            None => (0..hw.num_qubits).collect(),
        };
        let degree_needed = g.degree(v);
        for phys in candidates {
            if used[phys] || hw.degree(phys) < degree_needed {
                continue;
            }
            if !mapped_neighbors.iter().all(|&n| hw.has_edge(mapping[n], phys)) {
                continue;
            }
            mapping[v] = phys;
            used[phys] = true;
            place(g, hw, orders, comp, pos + 1, mapping, used, results);
            mapping[v] = usize::MAX;
            used[phys] = false;
        }
    }
    place(g, hw, &orders, 0, 0, &mut mapping, &mut used, &mut results);
    results.sort_by(|a, b| a.0.cmp(&b.0));
    results
}

fn bfs_order(g: &InteractionGraph, comp: &[usize]) -> Vec<usize> {
    let start = *comp
        .iter()
        .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
        .expect("components are non-empty");
    let mut order = vec![start];
    let mut seen: Vec<bool> = vec![false; g.num_vertices];
    seen[start] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for n in g.neighbors(v) {
            if !seen[n] {
                seen[n] = true;
                order.push(n);
            }
        }
    }
    debug_assert_eq!(order.len(), comp.len());
    order
}

/// Noise score of a layout: one error factor per single-qubit gate, per cx,
/// and per measured qubit's readout.
pub fn score_layout(c: &Circuit, hw: &HardwareSpec, layout: &Layout) -> Result<f64> {
    if layout.0.len() != c.num_qubits {
        return Err(Error::InvalidLayout(format!(
            "layout has {} entries for a {}-qubit circuit",
            layout.0.len(),
            c.num_qubits
        )));
    }
    let mut seen = vec![false; hw.num_qubits];
    for &p in &layout.0 {
        if p >= hw.num_qubits {
            return Err(Error::InvalidLayout(format!(
                "physical qubit {p} out of range on `{}`",
                hw.name
            )));
        }
        if seen[p] {
            return Err(Error::InvalidLayout(format!("physical qubit {p} used twice")));
        }
        seen[p] = true;
    }

    let mut success = 1.0f64;
    for gate in &c.gates {
        match gate.kind {
            GateKind::Measure => {
                success *= 1.0 - hw.err_readout[layout.physical(gate.qubits[0])];
            }
            GateKind::Cx => {
                let a = layout.physical(gate.qubits[0]);
                let b = layout.physical(gate.qubits[1]);
                let edge = hw.edge_index(a, b).ok_or_else(|| {
                    Error::InvalidLayout(format!(
                        "cx ({},{}) maps to ({a},{b}), not a coupling edge on `{}`",
                        gate.qubits[0], gate.qubits[1], hw.name
                    ))
                })?;
                success *= 1.0 - hw.err_2q[edge];
            }
            _ => {
                success *= 1.0 - hw.err_1q[layout.physical(gate.qubits[0])];
            }
        }
    }
    Ok(1.0 - success)
}

/// Minimum-score layout; ties broken by the canonical (lexicographic)
/// layout order.
pub fn best_layout(c: &Circuit, hw: &HardwareSpec) -> Result<ScoredLayout> {
    let graph = c.interaction_graph();
    let layouts = enumerate_layouts(&graph, hw);
    let mut best: Option<ScoredLayout> = None;
    for layout in layouts {
        let score = score_layout(c, hw, &layout)?;
        let better = match &best {
            None => true,
            Some(b) => score < b.score,
        };
        if better {
            best = Some(ScoredLayout { layout, score });
        }
    }
    best.ok_or_else(|| Error::NoEmbedding {
        circuit: c.name.clone(),
        hardware: hw.name.clone(),
    })
}

/// Q matrix over (subcircuit, hardware): best-layout score where the pair is
/// feasible and embeddable, `None` otherwise. A subcircuit with no feasible
/// cell anywhere is a terminal diagnostic.
pub fn score_matrix(
    subs: &[Subcircuit],
    pool: &HardwarePool,
) -> Result<Vec<Vec<Option<ScoredLayout>>>> {
    let mut matrix = Vec::with_capacity(subs.len());
    for sub in subs {
        let feasible: Vec<&str> =
            feasible_hardware(sub, pool).iter().map(|d| d.name.as_str()).collect();
        let mut row = Vec::with_capacity(pool.devices.len());
        for dev in &pool.devices {
            if !feasible.contains(&dev.name.as_str()) {
                row.push(None);
                continue;
            }
            match best_layout(&sub.circuit, dev) {
                Ok(scored) => row.push(Some(scored)),
                Err(Error::NoEmbedding { .. }) => row.push(None),
                Err(e) => return Err(e),
            }
        }
        if row.iter().all(|cell| cell.is_none()) {
            return Err(Error::NoFeasibleHardware(sub.circuit.name.clone()));
        }
        matrix.push(row);
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;
    use crate::circuit::{Circuit, Gate};
    use crate::hw::fixtures;

    /// Exhaustive reference: try every injective vertex map.
    fn brute_force_layouts(g: &InteractionGraph, hw: &HardwareSpec) -> Vec<Layout> {
        let mut results = Vec::new();
        let mut mapping = vec![usize::MAX; g.num_vertices];
        let mut used = vec![false; hw.num_qubits];
        fn go(
            g: &InteractionGraph,
            hw: &HardwareSpec,
            v: usize,
            mapping: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Layout>,
        ) {
            if v == g.num_vertices {
                for &(a, b) in &g.edges {
                    if !hw.has_edge(mapping[a], mapping[b]) {
                        return;
                    }
                }
                out.push(Layout(mapping.clone()));
                return;
            }
            for p in 0..hw.num_qubits {
                if !used[p] {
                    mapping[v] = p;
                    used[p] = true;
                    go(g, hw, v + 1, mapping, used, out);
                    used[p] = false;
                }
            }
            mapping[v] = usize::MAX;
        }
        go(g, hw, 0, &mut mapping, &mut used, &mut results);
        results.sort_by(|a, b| a.0.cmp(&b.0));
        results
    }

    fn path_graph(n: usize) -> InteractionGraph {
        let mut c = Circuit::new("path", n);
        for i in 0..n - 1 {
            c.push(Gate::cx(i, i + 1));
        }
        c.interaction_graph()
    }

    fn t_shaped() -> HardwareSpec {
        fixtures::table2_pool().get("IBMQ Belem").unwrap().clone()
    }

    #[test]
    fn three_path_on_t_shape_matches_brute_force() {
        let g = path_graph(3);
        let hw = t_shaped();
        let fast = enumerate_layouts(&g, &hw);
        let slow = brute_force_layouts(&g, &hw);
        assert!(!fast.is_empty());
        assert_eq!(fast, slow);
    }

    #[test]
    fn isolated_vertex_gets_every_physical_qubit() {
        let g = InteractionGraph { num_vertices: 1, edges: Default::default() };
        let hw = t_shaped();
        let layouts = enumerate_layouts(&g, &hw);
        assert_eq!(layouts.len(), 5);
    }

    #[test]
    fn disconnected_graph_merged_against_brute_force() {
        let mut c = Circuit::new("split", 3);
        c.push(Gate::cx(0, 1));
        let g = c.interaction_graph(); // edge (0,1) plus isolated vertex 2
        let hw = t_shaped();
        assert_eq!(enumerate_layouts(&g, &hw), brute_force_layouts(&g, &hw));
    }

    #[test]
    fn six_path_embeds_on_lagos_like_line() {
        let pool = fixtures::table2_pool();
        let lagos = pool.get("IBMQ Lagos").unwrap();
        let layouts = enumerate_layouts(&path_graph(6), lagos);
        assert!(layouts.contains(&Layout(vec![0, 1, 2, 3, 5, 6])));
        assert_eq!(layouts, brute_force_layouts(&path_graph(6), lagos));
    }

    #[test]
    fn score_of_empty_circuit_is_zero() {
        let c = Circuit::new("idle", 2);
        let hw = t_shaped();
        let q = score_layout(&c, &hw, &Layout(vec![0, 1])).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn score_single_cx_is_its_edge_error() {
        let mut hw = t_shaped();
        hw.err_2q = vec![0.01, 0.02, 0.03, 0.04];
        let mut c = Circuit::new("one_cx", 2);
        c.push(Gate::cx(0, 1));
        let q = score_layout(&c, &hw, &Layout(vec![0, 1])).unwrap();
        assert!((q - 0.01).abs() < 1e-15);
    }

    #[test]
    fn bell_score_on_uniform_hanoi_matches_hand_product() {
        let pool = fixtures::table2_pool();
        let hanoi = pool.get("IBMQ Hanoi").unwrap();
        let mut bell = Circuit::new("bell", 2);
        bell.push(Gate::one(GateKind::H, 0));
        bell.push(Gate::cx(0, 1));
        bell.push(Gate::measure(0));
        bell.push(Gate::measure(1));
        let q = score_layout(&bell, hanoi, &Layout(vec![0, 1])).unwrap();
        let expected = 1.0 - (1.0 - 8.3e-3) * (1.0 - 2.1e-4) * (1.0 - 1.0e-2f64).powi(2);
        assert!((q - expected).abs() < 1e-15);
    }

    #[test]
    fn invalid_layout_rejected() {
        let hw = t_shaped();
        let mut c = Circuit::new("one_cx", 2);
        c.push(Gate::cx(0, 1));
        // (0,2) is not an edge of the T shape.
        assert!(score_layout(&c, &hw, &Layout(vec![0, 2])).is_err());
        assert!(score_layout(&c, &hw, &Layout(vec![1, 1])).is_err());
    }

    #[test]
    fn best_layout_prefers_quiet_path() {
        let mut hw = t_shaped();
        // Make the 0-1 edge clearly the quietest and qubits 0,1 the cleanest.
        hw.err_2q = vec![1e-4, 5e-2, 5e-2, 5e-2];
        hw.err_1q = vec![1e-5, 1e-5, 5e-3, 5e-3, 5e-3];
        hw.err_readout = vec![1e-3, 1e-3, 5e-2, 5e-2, 5e-2];
        let mut c = Circuit::new("pair", 2);
        c.push(Gate::cx(0, 1));
        c.push(Gate::measure(0));
        c.push(Gate::measure(1));
        let best = best_layout(&c, &hw).unwrap();
        assert_eq!(best.layout, Layout(vec![0, 1]));
        // Exhaustive oracle: nothing scores lower.
        for l in enumerate_layouts(&c.interaction_graph(), &hw) {
            assert!(best.score <= score_layout(&c, &hw, &l).unwrap() + 1e-15);
        }
    }

    #[test]
    fn single_embedding_is_returned_regardless_of_score() {
        let hw = HardwareSpec {
            name: "line2".into(),
            num_qubits: 2,
            coupling: vec![(0, 1)],
            err_1q: vec![0.5, 0.5],
            err_2q: vec![0.9],
            err_readout: vec![0.5, 0.5],
            t1_us: None,
            t2_us: None,
        };
        let mut c = Circuit::new("pair", 2);
        c.push(Gate::cx(0, 1));
        let best = best_layout(&c, &hw).unwrap();
        assert!(best.layout == Layout(vec![0, 1]) || best.layout == Layout(vec![1, 0]));
    }

    #[test]
    fn best_layout_equals_enumerate_min_on_random_cases() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(5);
        let pool = fixtures::heterogeneous_pool(3);
        let small: Vec<&HardwareSpec> =
            pool.devices.iter().filter(|d| d.num_qubits <= 7).collect();
        for trial in 0..50 {
            let n = rng.random_range(2..5);
            let c = bench::real_amplitudes(n, 1, trial).unwrap();
            let hw = small[rng.random_range(0..small.len())];
            match best_layout(&c, hw) {
                Ok(best) => {
                    let min = enumerate_layouts(&c.interaction_graph(), hw)
                        .into_iter()
                        .map(|l| score_layout(&c, hw, &l).unwrap())
                        .fold(f64::INFINITY, f64::min);
                    assert!((best.score - min).abs() < 1e-15);
                }
                Err(Error::NoEmbedding { .. }) => {
                    assert!(enumerate_layouts(&c.interaction_graph(), hw).is_empty());
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn zero_noise_device_scores_zero() {
        let hw = HardwareSpec {
            name: "clean".into(),
            num_qubits: 3,
            coupling: vec![(0, 1), (1, 2)],
            err_1q: vec![0.0; 3],
            err_2q: vec![0.0; 2],
            err_readout: vec![0.0; 3],
            t1_us: None,
            t2_us: None,
        };
        let c = bench::real_amplitudes(3, 1, 7).unwrap();
        for l in enumerate_layouts(&c.interaction_graph(), &hw) {
            assert_eq!(score_layout(&c, &hw, &l).unwrap(), 0.0);
        }
    }

    #[test]
    fn adding_a_gate_never_lowers_the_score() {
        let pool = fixtures::heterogeneous_pool(1);
        let hanoi = pool.get("IBMQ Hanoi").unwrap();
        // 0-1-2 is a coupled path on the fixture, so the grown circuit stays
        // layout-valid throughout.
        let layout = Layout(vec![0, 1, 2]);
        let mut c = Circuit::new("grow", 3);
        c.push(Gate::cx(0, 1));
        let mut prev = score_layout(&c, hanoi, &layout).unwrap();
        for gate in [Gate::one(GateKind::H, 2), Gate::cx(1, 2), Gate::measure(0)] {
            c.push(gate);
            let q = score_layout(&c, hanoi, &layout).unwrap();
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn edge_preservation_over_random_layouts() {
        let pool = fixtures::table2_pool();
        let c = bench::real_amplitudes(5, 1, 9).unwrap();
        let g = c.interaction_graph();
        for dev in &pool.devices {
            for layout in enumerate_layouts(&g, dev) {
                for &(a, b) in &g.edges {
                    assert!(dev.has_edge(layout.physical(a), layout.physical(b)));
                }
            }
        }
    }

    #[test]
    fn score_matrix_flags_infeasible_and_errors_when_nothing_fits() {
        let pool = fixtures::table2_pool();
        let c = bench::real_amplitudes(10, 1, 7).unwrap();
        let frags = crate::cut::apply_cuts(&c, &[]).unwrap();
        let matrix = score_matrix(&frags, &pool).unwrap();
        // 10-qubit circuit: the 7- and 5-qubit devices are infeasible cells.
        assert_eq!(matrix[0].iter().filter(|c| c.is_some()).count(), 5);

        let big = bench::real_amplitudes(28, 1, 7).unwrap();
        let bigfrags = crate::cut::apply_cuts(&big, &[]).unwrap();
        assert!(matches!(
            score_matrix(&bigfrags, &pool),
            Err(Error::NoFeasibleHardware(_))
        ));
    }
}
