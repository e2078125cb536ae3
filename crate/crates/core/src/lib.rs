//! Core library: circuit IR and QASM-subset parsing, benchmark generators,
//! wire cutting with tomographic instance expansion, hardware models, layout
//! search and noise scoring, execution-time estimation, budgeted schedulers
//! (exact branch-and-bound and Hungarian matching), exact statevector /
//! density-matrix simulation, and classical reconstruction of cut circuits.

pub mod bench;
pub mod circuit;
pub mod cut;
pub mod error;
pub mod hw;
pub mod layout;
pub mod qasm;
pub mod reconstruct;
pub mod sched;
pub mod sim;
pub mod testkit;
pub mod timing;

pub use circuit::{Circuit, Gate, GateKind, InteractionGraph, LevelKind, LevelSeq};
pub use error::{Error, Result};
