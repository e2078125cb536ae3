//! Property tests over randomly generated circuits: parser round-trips,
//! level structure invariants, cut bookkeeping, and score monotonicity.

use proptest::prelude::*;

use qcut_core::circuit::{Circuit, Gate, GateKind, LevelKind};
use qcut_core::qasm::{emit_qasm, parse_qasm};
use qcut_core::testkit;

fn arb_gate(num_qubits: usize) -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0..num_qubits).prop_map(|q| Gate::one(GateKind::H, q)),
        (0..num_qubits).prop_map(|q| Gate::one(GateKind::X, q)),
        (0..num_qubits).prop_map(|q| Gate::one(GateKind::Sdg, q)),
        ((0..num_qubits), -10.0..10.0f64).prop_map(|(q, a)| Gate::rot(GateKind::Ry, q, a)),
        ((0..num_qubits), -10.0..10.0f64).prop_map(|(q, a)| Gate::rot(GateKind::Rz, q, a)),
        ((0..num_qubits), (0..num_qubits))
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(a, b)| Gate::cx(a, b)),
    ]
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..7)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(arb_gate(n), 0..40)))
        .prop_map(|(n, gates)| {
            let mut c = Circuit::new("prop", n);
            for g in gates {
                c.push(g);
            }
            for q in 0..n {
                c.push(Gate::measure(q));
            }
            c
        })
}

proptest! {
    /// emit -> parse is the identity on the circuit value, so parsing
    /// normalized source is idempotent.
    #[test]
    fn qasm_round_trip(c in arb_circuit()) {
        let text = emit_qasm(&c);
        let parsed = parse_qasm(&text).unwrap();
        prop_assert_eq!(parsed.num_qubits, c.num_qubits);
        prop_assert_eq!(&parsed.gates, &c.gates);
        let again = parse_qasm(&emit_qasm(&parsed)).unwrap();
        prop_assert_eq!(again.gates, parsed.gates);
    }

    /// No two gates in a level share a qubit, every non-measure gate is
    /// levelled exactly once, and level kinds match their contents.
    #[test]
    fn levels_partition_disjointly(c in arb_circuit()) {
        let seq = c.levels();
        let mut seen = vec![false; c.gates.len()];
        for level in &seq.levels {
            let mut used = vec![false; c.num_qubits];
            let mut has_two = false;
            for &g in &level.gates {
                prop_assert!(!seen[g]);
                seen[g] = true;
                for &q in &c.gates[g].qubits {
                    prop_assert!(!used[q], "level shares qubit {q}");
                    used[q] = true;
                }
                has_two |= c.gates[g].kind.is_two_qubit();
            }
            prop_assert_eq!(
                level.kind,
                if has_two { LevelKind::HasTwoQubit } else { LevelKind::OneQubitOnly }
            );
        }
        for (idx, gate) in c.gates.iter().enumerate() {
            prop_assert_eq!(seen[idx], gate.kind != GateKind::Measure);
        }
    }

    /// Greedy left-alignment: a gate above level zero always collides with
    /// the previous level on at least one of its qubits.
    #[test]
    fn levels_are_left_aligned(c in arb_circuit()) {
        let seq = c.levels();
        for (lvl, level) in seq.levels.iter().enumerate().skip(1) {
            for &g in &level.gates {
                let collides = seq.levels[lvl - 1].gates.iter().any(|&earlier| {
                    c.gates[earlier].qubits.iter().any(|q| c.gates[g].qubits.contains(q))
                });
                prop_assert!(collides, "gate {g} could move from level {lvl} to {}", lvl - 1);
            }
        }
    }
}

#[test]
fn hundred_random_programs_round_trip() {
    let mut rng = testkit::rng(404);
    for trial in 0..100 {
        let n = 2 + trial % 8;
        let c = testkit::random_circuit(&mut rng, n, 3 * n);
        let first = parse_qasm(&emit_qasm(&c)).unwrap();
        let second = parse_qasm(&emit_qasm(&first)).unwrap();
        assert_eq!(first, second, "trial {trial}");
        assert_eq!(first.gates, c.gates, "trial {trial}");
    }
}

#[test]
fn cut_bookkeeping_over_random_circuits() {
    let mut rng = testkit::rng(808);
    for _ in 0..40 {
        let (c, _cuts, frags) = testkit::random_cut_circuit(&mut rng, 5, 1, 6);
        // Gate conservation: fragment gates are exactly the parent's gates.
        let total: usize = frags.iter().map(|f| f.circuit.gates.len()).sum();
        assert_eq!(total, c.gates.len());
        let parent_kinds: Vec<GateKind> = c.gates.iter().map(|g| g.kind).collect();
        let mut frag_kinds: Vec<GateKind> = Vec::new();
        for f in &frags {
            frag_kinds.extend(f.circuit.gates.iter().map(|g| g.kind));
        }
        let sort = |mut v: Vec<GateKind>| {
            v.sort_by_key(|k| k.name());
            v
        };
        assert_eq!(sort(frag_kinds), sort(parent_kinds));
        // Qubit accounting: fresh prepare wires are the only extra qubits.
        let effective: usize =
            frags.iter().map(|f| f.circuit.num_qubits - f.prepare_cut_wires.len()).sum();
        assert_eq!(effective, c.num_qubits);
    }
}
