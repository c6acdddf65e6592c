//! `G ≡_m H` via the m-round MSO Ehrenfeucht–Fraïssé game with point and set moves.
//!
//! Duplicator wins from a position iff both sides have the same atomic type and every
//! extension on one side is matched on the other, so the m-round type of a position is
//! its atomic type together with the sets of (m−1)-round types of its extensions. Types are
//! interned, making `≡_m` an equality of ids that can be shared across many graphs.

use std::collections::{BTreeSet, HashMap};

use super::LogicError;
use crate::graph::Digraph;

pub const EF_SIZE_BOUND: usize = 6;
pub const EF_ROUND_BOUND: usize = 3;

#[derive(Debug, Clone, Copy)]
enum Move {
    Point(usize),
    Set(u32),
}

/// Atomic type of a move sequence: kinds, equalities, edges and memberships among the moves.
fn atomic(g: &Digraph, moves: &[Move]) -> Vec<u8> {
    let mut key = Vec::with_capacity(moves.len() * moves.len() + moves.len());
    for (i, a) in moves.iter().enumerate() {
        key.push(matches!(a, Move::Set(_)) as u8);
        for b in &moves[..=i] {
            let bits = match (*a, *b) {
                (Move::Point(u), Move::Point(v)) => {
                    (u == v) as u8 | (g.has_edge(u, v) as u8) << 1 | (g.has_edge(v, u) as u8) << 2
                }
                (Move::Point(u), Move::Set(s)) | (Move::Set(s), Move::Point(u)) => (s >> u & 1) as u8,
                (Move::Set(_), Move::Set(_)) => 0,
            };
            key.push(bits);
        }
    }
    key
}

type TypeKey = (Vec<u8>, Vec<usize>, Vec<usize>);

/// Interns game types so that graphs typed by one `EfTyper` compare by id.
#[derive(Debug, Default)]
pub struct EfTyper {
    rounds: usize,
    ids: HashMap<TypeKey, usize>,
}

impl EfTyper {
    pub fn new(rounds: usize) -> Result<Self, LogicError> {
        if rounds > EF_ROUND_BOUND {
            return Err(LogicError::SizeBoundExceeded { size: rounds, bound: EF_ROUND_BOUND });
        }
        Ok(Self { rounds, ids: HashMap::new() })
    }

    /// Id of the `rounds`-round type of `g`; equal ids mean `≡_rounds`.
    pub fn type_of(&mut self, g: &Digraph) -> Result<usize, LogicError> {
        if g.len() > EF_SIZE_BOUND {
            return Err(LogicError::SizeBoundExceeded { size: g.len(), bound: EF_SIZE_BOUND });
        }
        let mut moves = Vec::with_capacity(self.rounds);
        Ok(self.position(g, &mut moves, self.rounds))
    }

    fn position(&mut self, g: &Digraph, moves: &mut Vec<Move>, left: usize) -> usize {
        let mut points = BTreeSet::new();
        let mut sets = BTreeSet::new();
        if left > 0 {
            for v in 0..g.len() {
                moves.push(Move::Point(v));
                points.insert(self.position(g, moves, left - 1));
                moves.pop();
            }
            for s in 0..1u32 << g.len() {
                moves.push(Move::Set(s));
                sets.insert(self.position(g, moves, left - 1));
                moves.pop();
            }
        }
        let key = (atomic(g, moves), points.into_iter().collect(), sets.into_iter().collect());
        let next = self.ids.len();
        *self.ids.entry(key).or_insert(next)
    }
}

/// Whether duplicator wins the `m`-round game on `g` and `h`.
pub fn ef_equiv(g: &Digraph, h: &Digraph, m: usize) -> Result<bool, LogicError> {
    let mut t = EfTyper::new(m)?;
    Ok(t.type_of(g)? == t.type_of(h)?)
}

/// Direct game search, exponential in both graphs; an oracle for [`ef_equiv`] on tiny inputs.
pub fn ef_equiv_by_game(g: &Digraph, h: &Digraph, m: usize) -> bool {
    fn moves_of(g: &Digraph) -> Vec<Move> {
        (0..g.len()).map(Move::Point).chain((0..1u32 << g.len()).map(Move::Set)).collect()
    }
    fn same_kind(a: Move, b: Move) -> bool {
        matches!((a, b), (Move::Point(_), Move::Point(_)) | (Move::Set(_), Move::Set(_)))
    }
    fn wins(g: &Digraph, h: &Digraph, mg: &mut Vec<Move>, mh: &mut Vec<Move>, left: usize) -> bool {
        if atomic(g, mg) != atomic(h, mh) {
            return false;
        }
        if left == 0 {
            return true;
        }
        let (gm, hm) = (moves_of(g), moves_of(h));
        let spoiler_on_g = gm.iter().all(|&a| {
            mg.push(a);
            let ok = hm.iter().filter(|&&b| same_kind(a, b)).any(|&b| {
                mh.push(b);
                let w = wins(g, h, mg, mh, left - 1);
                mh.pop();
                w
            });
            mg.pop();
            ok
        });
        spoiler_on_g
            && hm.iter().all(|&b| {
                mh.push(b);
                let ok = gm.iter().filter(|&&a| same_kind(a, b)).any(|&a| {
                    mg.push(a);
                    let w = wins(g, h, mg, mh, left - 1);
                    mg.pop();
                    w
                });
                mh.pop();
                ok
            })
    }
    wins(g, h, &mut Vec::new(), &mut Vec::new(), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        Digraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn ef_examples() {
        let c3 = cycle(3);
        for m in 0..=3 {
            assert!(ef_equiv(&c3, &c3, m).unwrap());
        }
        assert!(!ef_equiv(&cycle(2), &cycle(3), 2).unwrap());
        let relabelled = c3.relabel(&[2, 0, 1]);
        assert!(ef_equiv(&c3, &relabelled, 3).unwrap());
        // One round cannot tell the cycles apart: every vertex looks alike.
        assert!(ef_equiv(&cycle(2), &cycle(3), 1).unwrap());
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(ef_equiv(&cycle(7), &cycle(3), 1).is_err());
        assert!(ef_equiv(&cycle(2), &cycle(3), 4).is_err());
    }

    #[test]
    fn interned_types_match_the_game_search() {
        let mut graphs = Vec::new();
        for n in 1..=2usize {
            for mask in 0u32..1 << (n * n) {
                graphs.push(Digraph::from_edges(n, (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n))));
            }
        }
        graphs.push(cycle(3));
        graphs.push(Digraph::from_edges(3, [(0, 1), (1, 2)]));
        for m in 0..=2 {
            let mut typer = EfTyper::new(m).unwrap();
            let ids: Vec<usize> = graphs.iter().map(|g| typer.type_of(g).unwrap()).collect();
            for (i, g) in graphs.iter().enumerate() {
                for (j, h) in graphs.iter().enumerate().skip(i) {
                    assert_eq!(ids[i] == ids[j], ef_equiv_by_game(g, h, m), "m={m} {i} {j}");
                }
            }
        }
    }
}
