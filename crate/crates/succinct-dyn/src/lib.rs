//! Executable machinery for succinctly encoded automata networks: circuit-encoded
//! deterministic and non-deterministic networks, monadic second-order model checking of
//! their dynamics, k-graph and tree-decomposition gluing, pumping arithmetic for
//! `q`-uniform sizes, and a compiler from gadget families plus a propositional formula
//! to a network circuit whose dynamics is the glued word graph.

pub mod annet;
pub mod arith;
pub mod graph;
pub mod logic;
pub mod par;
pub mod pump;
pub mod reduce;
pub mod treedec;

pub use graph::{Digraph, GadgetFamily, PortedGraph};
