//! Hardware descriptors: coupling map plus calibration data, pool loading
//! with schema validation, and qubit-count feasibility filtering.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};

use crate::cut::Subcircuit;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareSpec {
    pub name: String,
    pub num_qubits: usize,
    /// Undirected edges of the coupling graph.
    pub coupling: Vec<(usize, usize)>,
    /// Single-qubit gate error probability per qubit.
    pub err_1q: Vec<f64>,
    /// Two-qubit gate error probability per coupling edge.
    pub err_2q: Vec<f64>,
    /// Readout error probability per qubit (symmetric average).
    pub err_readout: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_us: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_us: Option<Vec<f64>>,
}

impl HardwareSpec {
    /// Edge index in `coupling` for an unordered qubit pair.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.coupling
            .iter()
            .position(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .coupling
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn degree(&self, q: usize) -> usize {
        self.neighbors(q).len()
    }

    fn validate(&self, path: &str) -> Result<()> {
        let fail = |sub: &str, msg: String| Error::Schema { path: format!("{path}.{sub}"), msg };
        if self.name.is_empty() {
            return Err(fail("name", "empty hardware name".into()));
        }
        if self.num_qubits == 0 {
            return Err(fail("num_qubits", "must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for (i, &(a, b)) in self.coupling.iter().enumerate() {
            if a >= self.num_qubits || b >= self.num_qubits {
                return Err(fail(
                    &format!("coupling[{i}]"),
                    format!("edge ({a},{b}) references a qubit >= {}", self.num_qubits),
                ));
            }
            if a == b {
                return Err(fail(&format!("coupling[{i}]"), format!("self-edge on qubit {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(fail(&format!("coupling[{i}]"), format!("duplicate edge ({a},{b})")));
            }
        }
        let check_probs = |sub: &str, vals: &[f64], expect: usize| -> Result<()> {
            if vals.len() != expect {
                return Err(fail(sub, format!("expected {expect} entries, got {}", vals.len())));
            }
            for (i, &v) in vals.iter().enumerate() {
                if !(0.0..1.0).contains(&v) {
                    return Err(fail(
                        &format!("{sub}[{i}]"),
                        format!("probability {v} outside [0, 1)"),
                    ));
                }
            }
            Ok(())
        };
        check_probs("err_1q", &self.err_1q, self.num_qubits)?;
        check_probs("err_2q", &self.err_2q, self.coupling.len())?;
        check_probs("err_readout", &self.err_readout, self.num_qubits)?;
        for (sub, vals) in [("t1_us", &self.t1_us), ("t2_us", &self.t2_us)] {
            if let Some(vals) = vals {
                if vals.len() != self.num_qubits {
                    return Err(fail(
                        sub,
                        format!("expected {} entries, got {}", self.num_qubits, vals.len()),
                    ));
                }
                if let Some((i, &v)) = vals.iter().enumerate().find(|&(_, &v)| v <= 0.0) {
                    return Err(fail(&format!("{sub}[{i}]"), format!("time {v} must be positive")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HardwarePool {
    pub devices: Vec<HardwareSpec>,
}

impl HardwarePool {
    pub fn validate(&self) -> Result<()> {
        if self.devices.is_empty() {
            return Err(Error::Schema {
                path: "devices".into(),
                msg: "hardware pool is empty".into(),
            });
        }
        let mut names = BTreeSet::new();
        for (i, dev) in self.devices.iter().enumerate() {
            dev.validate(&format!("devices[{i}]"))?;
            if !names.insert(dev.name.clone()) {
                return Err(Error::Schema {
                    path: format!("devices[{i}].name"),
                    msg: format!("duplicate hardware name `{}`", dev.name),
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&HardwareSpec> {
        self.devices.iter().find(|d| d.name == name)
    }
}

pub fn load_pool(path: impl AsRef<Path>) -> Result<HardwarePool> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let pool: HardwarePool = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.as_ref().display().to_string(),
        msg: e.to_string(),
    })?;
    pool.validate()?;
    Ok(pool)
}

/// Devices large enough to host the subcircuit, pool order preserved. An
/// empty result means the fragment must be re-cut; callers that cannot
/// re-cut treat it as a terminal diagnostic.
pub fn feasible_hardware<'p>(s: &Subcircuit, pool: &'p HardwarePool) -> Vec<&'p HardwareSpec> {
    pool.devices
        .iter()
        .filter(|d| d.num_qubits >= s.circuit.num_qubits)
        .collect()
}

/// Built-in pools carrying representative per-device calibration averages,
/// with invented coupling graphs (the source table lists only sizes and
/// average error rates).
pub mod fixtures {
    use super::*;

    /// name, qubits, err_2q, err_1q, t1, t2, err_readout
    const TABLE: [(&str, usize, f64, f64, f64, f64, f64); 12] = [
        ("IBMQ Hanoi", 27, 8.3e-3, 2.1e-4, 156.69, 137.7, 1.0e-2),
        ("IBMQ Mumbai", 27, 7.5e-3, 2.5e-4, 118.01, 161.97, 1.8e-2),
        ("IBMQ Cairo", 27, 9.4e-3, 2.2e-4, 94.62, 116.42, 1.3e-2),
        ("IBMQ Kolkata", 27, 8.7e-3, 2.0e-4, 117.42, 92.97, 1.2e-2),
        ("IBMQ Guadalupe", 16, 9.74e-3, 2.64e-4, 86.72, 118.73, 1.64e-2),
        ("IBMQ Lagos", 7, 7.2e-3, 2.0e-4, 112.51, 84.42, 1.4e-2),
        ("IBMQ Nairobi", 7, 8.7e-3, 3.5e-4, 114.75, 71.42, 2.7e-2),
        ("IBMQ Jakarta", 7, 7.3e-3, 1.03e-4, 136.95, 38.99, 2.09e-2),
        ("IBMQ Manila", 5, 7.7e-3, 2.46e-4, 141.15, 56.53, 2.2e-2),
        ("IBMQ Lima", 5, 9.58e-3, 3.76e-4, 98.68, 115.32, 2.41e-2),
        ("IBMQ Belem", 5, 8.89e-3, 3.88e-4, 101.42, 98.85, 2.39e-2),
        ("IBMQ Quito", 5, 7.9e-3, 2.88e-4, 96.83, 104.39, 4.15e-2),
    ];

    /// Standard 27-qubit heavy-hex connectivity.
    const HEAVY_HEX_27: [(usize, usize); 28] = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 5),
        (1, 4),
        (4, 7),
        (5, 8),
        (6, 7),
        (7, 10),
        (8, 9),
        (8, 11),
        (10, 12),
        (11, 14),
        (12, 13),
        (13, 14),
        (12, 15),
        (14, 16),
        (15, 18),
        (16, 19),
        (17, 18),
        (18, 21),
        (19, 20),
        (19, 22),
        (21, 23),
        (22, 25),
        (23, 24),
        (24, 25),
        (25, 26),
    ];

    /// Standard 16-qubit heavy-hex connectivity.
    const HEAVY_HEX_16: [(usize, usize); 16] = [
        (0, 1),
        (1, 2),
        (2, 3),
        (1, 4),
        (3, 5),
        (4, 7),
        (5, 8),
        (6, 7),
        (7, 10),
        (8, 9),
        (8, 11),
        (10, 12),
        (12, 13),
        (11, 14),
        (13, 14),
        (12, 15),
    ];

    /// Heavy-hex base plus fully-connected quads on the given vertex sets.
    /// Quads model densely coupled pockets; a circuit whose interaction
    /// graph carries triangles embeds only where such a pocket exists.
    fn with_quads(base: &[(usize, usize)], quads: &[[usize; 4]]) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = base.to_vec();
        for quad in quads {
            for i in 0..4 {
                for j in i + 1..4 {
                    let (a, b) = (quad[i].min(quad[j]), quad[i].max(quad[j]));
                    if !edges.iter().any(|&(x, y)| (x, y) == (a, b)) {
                        edges.push((a, b));
                    }
                }
            }
        }
        edges
    }

    fn coupling_for(name: &str, n: usize) -> Vec<(usize, usize)> {
        match (name, n) {
            ("IBMQ Hanoi", 27) => with_quads(&HEAVY_HEX_27, &[[10, 12, 13, 14]]),
            ("IBMQ Mumbai", 27) => with_quads(&HEAVY_HEX_27, &[[12, 13, 14, 16]]),
            ("IBMQ Kolkata", 27) => with_quads(&HEAVY_HEX_27, &[[15, 17, 18, 21]]),
            ("IBMQ Cairo", 27) => with_quads(&HEAVY_HEX_27, &[[14, 16, 19, 20]]),
            // Two quads sharing qubit 13: the one device dense enough to
            // host bowtie-shaped interaction graphs without cutting.
            (_, 16) => with_quads(&HEAVY_HEX_16, &[[7, 10, 12, 13], [8, 11, 13, 14]]),
            ("IBMQ Lagos", 7) => {
                vec![(0, 1), (1, 2), (2, 3), (3, 5), (4, 5), (5, 6)]
            }
            (_, 7) => vec![(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)],
            ("IBMQ Manila", 5) => vec![(0, 1), (1, 2), (2, 3), (3, 4)],
            (_, 5) => vec![(0, 1), (1, 2), (1, 3), (3, 4)],
            _ => unreachable!("no fixture coupling for {name} ({n} qubits)"),
        }
    }

    fn build(jitter_seed: Option<u64>) -> HardwarePool {
        let mut devices = Vec::new();
        for (idx, &(name, n, e2, e1, t1, t2, ero)) in TABLE.iter().enumerate() {
            let coupling = coupling_for(name, n);
            let (err_1q, err_2q, err_readout) = match jitter_seed {
                None => (vec![e1; n], vec![e2; coupling.len()], vec![ero; n]),
                Some(seed) => {
                    let mut rng = Pcg64Mcg::seed_from_u64(seed.wrapping_add(idx as u64));
                    let mut jitter = |base: f64| base * (1.0 + 0.5 * (rng.random::<f64>() * 2.0 - 1.0));
                    let e1s = (0..n).map(|_| jitter(e1)).collect();
                    let e2s = (0..coupling.len()).map(|_| jitter(e2)).collect();
                    let eros = (0..n).map(|_| jitter(ero)).collect();
                    (e1s, e2s, eros)
                }
            };
            devices.push(HardwareSpec {
                name: name.to_string(),
                num_qubits: n,
                coupling,
                err_1q,
                err_2q,
                err_readout,
                t1_us: Some(vec![t1; n]),
                t2_us: Some(vec![t2; n]),
            });
        }
        let pool = HardwarePool { devices };
        pool.validate().expect("fixture pool must validate");
        pool
    }

    /// Per-device averages replicated uniformly per qubit/edge.
    pub fn table2_pool() -> HardwarePool {
        build(None)
    }

    /// Same devices with seeded per-qubit/per-edge jitter of +-50% around
    /// each device average, so layout choice matters.
    pub fn heterogeneous_pool(seed: u64) -> HardwarePool {
        build(Some(seed))
    }

    /// A small pool (largest device 12 qubits) for oversized-circuit cases.
    pub fn small_pool() -> HardwarePool {
        let line = |n: usize| -> Vec<(usize, usize)> { (0..n - 1).map(|i| (i, i + 1)).collect() };
        let make = |name: &str, n: usize, coupling: Vec<(usize, usize)>, e2: f64, e1: f64, ero: f64| HardwareSpec {
            name: name.to_string(),
            num_qubits: n,
            err_1q: vec![e1; n],
            err_2q: vec![e2; coupling.len()],
            err_readout: vec![ero; n],
            coupling,
            t1_us: None,
            t2_us: None,
        };
        let mut ladder12 = line(12);
        ladder12.extend([(0, 2), (3, 5), (6, 8), (9, 11)]);
        let mut ring10 = line(10);
        ring10.push((0, 9));
        let pool = HardwarePool {
            devices: vec![
                make("Ladder A12", 12, ladder12, 8.0e-3, 2.0e-4, 1.2e-2),
                make("Line B12", 12, line(12), 9.0e-3, 2.5e-4, 1.5e-2),
                make("Ring C10", 10, ring10, 7.5e-3, 2.2e-4, 1.3e-2),
                make("Line D8", 8, line(8), 8.5e-3, 3.0e-4, 2.0e-2),
            ],
        };
        pool.validate().expect("fixture pool must validate");
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;
    use crate::cut::apply_cuts;

    #[test]
    fn table2_pool_has_twelve_devices() {
        let pool = fixtures::table2_pool();
        assert_eq!(pool.devices.len(), 12);
        let hanoi = pool.get("IBMQ Hanoi").unwrap();
        assert_eq!(hanoi.num_qubits, 27);
        assert_eq!(hanoi.err_2q[0], 8.3e-3);
        assert_eq!(hanoi.err_readout[5], 1.0e-2);
    }

    #[test]
    fn single_qubit_zero_error_pool_is_valid() {
        let pool = HardwarePool {
            devices: vec![HardwareSpec {
                name: "one".into(),
                num_qubits: 1,
                coupling: vec![],
                err_1q: vec![0.0],
                err_2q: vec![],
                err_readout: vec![0.0],
                t1_us: None,
                t2_us: None,
            }],
        };
        assert!(pool.validate().is_ok());
    }

    #[test]
    fn out_of_range_probability_is_schema_error() {
        let mut pool = fixtures::small_pool();
        pool.devices[0].err_readout[2] = 1.5;
        let err = pool.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("devices[0].err_readout[2]"), "{msg}");
    }

    #[test]
    fn feasibility_by_qubit_count() {
        let pool = fixtures::table2_pool();
        let adder = bench::ripple_adder(6).unwrap();
        let frags = apply_cuts(&adder, &[]).unwrap();
        // 6-qubit circuit: everything with >= 6 qubits accepts it.
        let feasible = feasible_hardware(&frags[0], &pool);
        assert_eq!(feasible.len(), 8);

        // 4-qubit fragments fit every device in the pool.
        let four = bench::real_amplitudes(4, 1, 7).unwrap();
        let f4 = apply_cuts(&four, &[]).unwrap();
        assert_eq!(feasible_hardware(&f4[0], &pool).len(), 12);

        // 28 qubits outgrow the whole pool.
        let big = bench::real_amplitudes(28, 1, 7).unwrap();
        let fb = apply_cuts(&big, &[]).unwrap();
        assert!(feasible_hardware(&fb[0], &pool).is_empty());

        // Boundary: same size as the device is included.
        let five = bench::real_amplitudes(5, 1, 7).unwrap();
        let f5 = apply_cuts(&five, &[]).unwrap();
        assert_eq!(feasible_hardware(&f5[0], &pool).len(), 12);
    }

    #[test]
    fn feasibility_is_monotone_in_fragment_size() {
        let pool = fixtures::table2_pool();
        let mut prev = usize::MAX;
        for n in [4usize, 6, 8, 16, 27] {
            let c = bench::real_amplitudes(n, 1, 7).unwrap();
            let frags = apply_cuts(&c, &[]).unwrap();
            let count = feasible_hardware(&frags[0], &pool).len();
            assert!(count <= prev);
            prev = count;
        }
    }

    #[test]
    fn heterogeneous_pool_is_seed_deterministic_and_spread() {
        let a = fixtures::heterogeneous_pool(0);
        let b = fixtures::heterogeneous_pool(0);
        assert_eq!(a, b);
        let c = fixtures::heterogeneous_pool(1);
        assert_ne!(a, c);
        let hanoi = a.get("IBMQ Hanoi").unwrap();
        let base = 8.3e-3;
        assert!(hanoi.err_2q.iter().any(|&e| (e - base).abs() > 1e-4));
        for &e in &hanoi.err_2q {
            assert!(e >= 0.5 * base - 1e-12 && e <= 1.5 * base + 1e-12);
        }
    }

    #[test]
    fn belem_fixture_matches_t_shape() {
        let pool = fixtures::table2_pool();
        let belem = pool.get("IBMQ Belem").unwrap();
        assert_eq!(belem.coupling, vec![(0, 1), (1, 2), (1, 3), (3, 4)]);
    }
}
