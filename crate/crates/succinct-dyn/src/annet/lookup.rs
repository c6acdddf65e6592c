//! A network realising a given graph as its dynamics: one decoder minterm per configuration,
//! then per-output-bit ORs (deterministic) or an OR over edge minterms (non-deterministic).

use super::{bit_width, AnError, CircuitBuilder, ConfigSpace, Kind, NetworkDescriptor, Wire};
use crate::graph::{out_degree_exactly, Digraph};

/// Minterms for every index in `[0, size)` over the bits starting at `first`.
fn decoder(b: &mut CircuitBuilder, first: usize, w: usize, size: usize) -> Vec<Wire> {
    let pos: Vec<Wire> = (0..w).map(|j| b.input(first + j)).collect();
    let neg: Vec<Wire> = pos.iter().map(|&p| b.not(p)).collect();
    (0..size)
        .map(|x| {
            let lits: Vec<Wire> = (0..w).map(|j| if x >> j & 1 == 1 { pos[j] } else { neg[j] }).collect();
            b.and_many(&lits)
        })
        .collect()
}

/// Vertex `i` of `g` becomes configuration `i`. Functional graphs give an AN, others a NAN.
pub fn lookup_table_network(g: &Digraph, alphabet_sizes: &[u64]) -> Result<NetworkDescriptor, AnError> {
    let space = ConfigSpace::new(alphabet_sizes)?;
    if space.len() != g.len() as u64 {
        return Err(AnError::SizeMismatch { graph: g.len(), space: space.len() });
    }
    let n = g.len();
    let w = bit_width(space.len());
    if out_degree_exactly(g, 1) {
        let mut b = CircuitBuilder::new(w);
        let minterm = decoder(&mut b, 0, w, n);
        let outputs: Vec<Wire> = (0..w)
            .map(|j| {
                let hits: Vec<Wire> = (0..n).filter(|&x| g.succ(x)[0] >> j & 1 == 1).map(|x| minterm[x]).collect();
                b.or_many(&hits)
            })
            .collect();
        NetworkDescriptor::new(Kind::Deterministic, alphabet_sizes, b.finish(&outputs))
    } else {
        let mut b = CircuitBuilder::new(2 * w);
        let from = decoder(&mut b, 0, w, n);
        let to = decoder(&mut b, w, w, n);
        let edges: Vec<Wire> = g.edges().map(|(x, y)| b.and(from[x], to[y])).collect();
        let out = b.or_many(&edges);
        NetworkDescriptor::new(Kind::Nondeterministic, alphabet_sizes, b.finish(&[out]))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{expand_dynamics, step};
    use super::*;

    #[test]
    fn lookup_examples() {
        let c2 = Digraph::from_edges(2, [(0, 1), (1, 0)]);
        let d = lookup_table_network(&c2, &[2]).unwrap();
        assert_eq!(d.kind(), Kind::Deterministic);
        assert_eq!((step(&d, 0).unwrap(), step(&d, 1).unwrap()), (1, 0));

        let g = Digraph::from_edges(9, [(0, 1), (1, 0), (0, 0), (4, 8), (8, 2)]);
        let d = lookup_table_network(&g, &[3, 3]).unwrap();
        assert_eq!(d.kind(), Kind::Nondeterministic);
        assert_eq!(d.n(), 2);
        assert!(expand_dynamics(&d).unwrap().same_indexed_edges(&g));

        let f = Digraph::from_edges(8, (0..8).map(|i| (i, (i * 3 + 1) % 8)));
        let d = lookup_table_network(&f, &[2, 2, 2]).unwrap();
        assert_eq!(d.kind(), Kind::Deterministic);
        assert!(expand_dynamics(&d).unwrap().same_indexed_edges(&f));
    }

    #[test]
    fn size_mismatch_is_reported() {
        let g = Digraph::from_edges(3, [(0, 0), (1, 1), (2, 2)]);
        assert_eq!(lookup_table_network(&g, &[2, 2]).unwrap_err(), AnError::SizeMismatch { graph: 3, space: 4 });
    }

    #[test]
    fn single_configuration_networks() {
        for (edges, kind) in [(vec![(0, 0)], Kind::Deterministic), (vec![], Kind::Nondeterministic)] {
            let g = Digraph::from_edges(1, edges);
            let d = lookup_table_network(&g, &[1]).unwrap();
            assert_eq!(d.kind(), kind);
            assert!(expand_dynamics(&d).unwrap().same_indexed_edges(&g));
        }
    }
}
