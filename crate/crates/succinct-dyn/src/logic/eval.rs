//! Quantifier recursion with short-circuiting. Point quantifiers are restricted to the
//! vertices a guard atom allows: `∃x. (y → x) ∧ …` only ranges over successors of `y`,
//! `∀x. ¬(y → x) ∨ …` likewise, and similarly for `x → y`, `x = y` and `x ∈ X`.

use std::collections::HashMap;

use super::{Formula, LogicError};
use crate::graph::Digraph;
use crate::par::{self, Exec};

/// Largest graph accepted when the formula only quantifies over vertices.
pub const POINT_SIZE_BOUND: usize = 1 << 20;
/// Largest graph accepted when the formula has a set quantifier.
pub const SET_SIZE_BOUND: usize = 20;

#[derive(Debug, Clone, Copy)]
enum Guard {
    All,
    Succ(usize),
    Pred(usize),
    Single(usize),
    Members(usize),
}

#[derive(Debug, Clone)]
enum Node {
    Edge(usize, usize),
    Eq(usize, usize),
    In(usize, usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Point { exists: bool, slot: usize, guard: Guard, body: Box<Node> },
    Set { exists: bool, slot: usize, body: Box<Node> },
}

struct Compiler {
    points: HashMap<String, usize>,
    sets: HashMap<String, usize>,
    depth_points: usize,
    depth_sets: usize,
    max_points: usize,
    max_sets: usize,
}

impl Compiler {
    fn compile(&mut self, f: &Formula, negate: bool) -> Node {
        let wrap = |n: Node| if negate { Node::Not(Box::new(n)) } else { n };
        match f {
            Formula::Edge(x, y) => wrap(Node::Edge(self.points[x], self.points[y])),
            Formula::Eq(x, y) => wrap(Node::Eq(self.points[x], self.points[y])),
            Formula::In(x, s) => wrap(Node::In(self.points[x], self.sets[s])),
            Formula::Not(a) => self.compile(a, !negate),
            // Negations are pushed inward so that guards become visible.
            Formula::And(a, b) | Formula::Or(a, b) => {
                let is_and = matches!(f, Formula::And(..)) != negate;
                let parts = vec![self.compile(a, negate), self.compile(b, negate)];
                junction(is_and, parts)
            }
            Formula::Implies(a, b) => {
                let parts = vec![self.compile(a, !negate), self.compile(b, negate)];
                junction(negate, parts)
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let exists = matches!(f, Formula::Exists(..)) != negate;
                let slot = self.depth_points;
                let saved = self.points.insert(v.clone(), slot);
                self.depth_points += 1;
                self.max_points = self.max_points.max(self.depth_points);
                let body = self.compile(a, negate);
                self.depth_points -= 1;
                restore(&mut self.points, v, saved);
                let guard = find_guard(&body, slot, exists);
                Node::Point { exists, slot, guard, body: Box::new(body) }
            }
            Formula::ExistsSet(v, a) | Formula::ForallSet(v, a) => {
                let exists = matches!(f, Formula::ExistsSet(..)) != negate;
                let slot = self.depth_sets;
                let saved = self.sets.insert(v.clone(), slot);
                self.depth_sets += 1;
                self.max_sets = self.max_sets.max(self.depth_sets);
                let body = self.compile(a, negate);
                self.depth_sets -= 1;
                restore(&mut self.sets, v, saved);
                Node::Set { exists, slot, body: Box::new(body) }
            }
        }
    }
}

fn restore(map: &mut HashMap<String, usize>, v: &str, saved: Option<usize>) {
    match saved {
        Some(s) => map.insert(v.to_string(), s),
        None => map.remove(v),
    };
}

fn junction(is_and: bool, parts: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for p in parts {
        match p {
            Node::And(xs) if is_and => flat.extend(xs),
            Node::Or(xs) if !is_and => flat.extend(xs),
            other => flat.push(other),
        }
    }
    if is_and {
        Node::And(flat)
    } else {
        Node::Or(flat)
    }
}

/// A guard for `slot`: an atom that must hold (for ∃, a conjunct) or whose failure makes the
/// body true (for ∀, a negated disjunct).
fn find_guard(body: &Node, slot: usize, exists: bool) -> Guard {
    let atoms: Vec<&Node> = match (body, exists) {
        (Node::And(xs), true) => xs.iter().collect(),
        (Node::Or(xs), false) => xs.iter().filter_map(|x| if let Node::Not(a) = x { Some(a.as_ref()) } else { None }).collect(),
        (Node::Not(a), false) => vec![a.as_ref()],
        (atom, true) => vec![atom],
        _ => Vec::new(),
    };
    let mut best = Guard::All;
    let rank = |g: &Guard| match g {
        Guard::Single(_) => 0,
        Guard::Succ(_) => 1,
        Guard::Pred(_) => 2,
        Guard::Members(_) => 3,
        Guard::All => 4,
    };
    for a in atoms {
        let g = match *a {
            Node::Eq(x, y) if x == slot && y != slot => Guard::Single(y),
            Node::Eq(y, x) if x == slot && y != slot => Guard::Single(y),
            Node::Edge(y, x) if x == slot && y != slot => Guard::Succ(y),
            Node::Edge(x, y) if x == slot && y != slot => Guard::Pred(y),
            Node::In(x, s) if x == slot => Guard::Members(s),
            _ => continue,
        };
        if rank(&g) < rank(&best) {
            best = g;
        }
    }
    best
}

struct Evaluator<'a> {
    g: &'a Digraph,
    pred: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct Env {
    points: Vec<usize>,
    sets: Vec<u32>,
}

impl Evaluator<'_> {
    fn domain(&self, guard: Guard, env: &Env) -> Domain<'_> {
        match guard {
            Guard::All => Domain::Range(self.g.len()),
            Guard::Succ(y) => Domain::Slice(self.g.succ(env.points[y])),
            Guard::Pred(y) => Domain::Slice(&self.pred[env.points[y]]),
            Guard::Single(y) => Domain::One(env.points[y]),
            Guard::Members(s) => Domain::Mask(env.sets[s]),
        }
    }

    fn eval(&self, n: &Node, env: &mut Env) -> bool {
        match n {
            Node::Edge(x, y) => self.g.has_edge(env.points[*x], env.points[*y]),
            Node::Eq(x, y) => env.points[*x] == env.points[*y],
            Node::In(x, s) => env.sets[*s] >> env.points[*x] & 1 == 1,
            Node::Not(a) => !self.eval(a, env),
            Node::And(xs) => xs.iter().all(|x| self.eval(x, env)),
            Node::Or(xs) => xs.iter().any(|x| self.eval(x, env)),
            Node::Point { exists, slot, guard, body } => {
                let dom = self.domain(*guard, env);
                let hit = |v: usize, env: &mut Env| {
                    env.points[*slot] = v;
                    self.eval(body, env) == *exists
                };
                let found = match dom {
                    Domain::Range(k) => (0..k).any(|v| hit(v, env)),
                    Domain::Slice(vs) => vs.iter().any(|&v| hit(v, env)),
                    Domain::One(v) => hit(v, env),
                    Domain::Mask(m) => (0..32).filter(|i| m >> i & 1 == 1).any(|v| hit(v, env)),
                };
                found == *exists
            }
            Node::Set { exists, slot, body } => {
                let found = (0..1u32 << self.g.len()).any(|m| {
                    env.sets[*slot] = m;
                    self.eval(body, env) == *exists
                });
                found == *exists
            }
        }
    }

    /// Splits the outermost quantifier across the pool.
    fn eval_root(&self, n: &Node, env: Env, exec: Exec) -> bool {
        match n {
            Node::Point { exists, slot, guard: Guard::All, body } => {
                let found = par::any_range(exec, self.g.len(), |v| {
                    let mut env = env.clone();
                    env.points[*slot] = v;
                    self.eval(body, &mut env) == *exists
                });
                found == *exists
            }
            Node::Set { exists, slot, body } => {
                let found = par::any_range(exec, 1usize << self.g.len(), |m| {
                    let mut env = env.clone();
                    env.sets[*slot] = m as u32;
                    self.eval(body, &mut env) == *exists
                });
                found == *exists
            }
            Node::Not(a) => !self.eval_root(a, env, exec),
            _ => self.eval(n, &mut env.clone()),
        }
    }
}

enum Domain<'a> {
    Range(usize),
    Slice(&'a [usize]),
    One(usize),
    Mask(u32),
}

pub fn evaluate(f: &Formula, g: &Digraph) -> Result<bool, LogicError> {
    evaluate_with(f, g, Exec::default())
}

pub fn evaluate_with(f: &Formula, g: &Digraph, exec: Exec) -> Result<bool, LogicError> {
    f.check()?;
    let bound = if f.is_first_order() { POINT_SIZE_BOUND } else { SET_SIZE_BOUND };
    if g.len() > bound {
        return Err(LogicError::SizeBoundExceeded { size: g.len(), bound });
    }
    let mut c = Compiler {
        points: HashMap::new(),
        sets: HashMap::new(),
        depth_points: 0,
        depth_sets: 0,
        max_points: 0,
        max_sets: 0,
    };
    let node = c.compile(f, false);
    let ev = Evaluator { g, pred: g.predecessors() };
    let env = Env { points: vec![0; c.max_points], sets: vec![0; c.max_sets] };
    Ok(ev.eval_root(&node, env, exec))
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::graph::{out_degree_exactly, Digraph};

    fn g(n: usize, es: &[(usize, usize)]) -> Digraph {
        Digraph::from_edges(n, es.iter().copied())
    }

    /// Textbook semantics without guards or pushing negations, as an oracle.
    fn naive(f: &Formula, g: &Digraph, pts: &mut Vec<(String, usize)>, sets: &mut Vec<(String, u32)>) -> bool {
        let pt = |v: &String, pts: &Vec<(String, usize)>| pts.iter().rev().find(|(n, _)| n == v).unwrap().1;
        match f {
            Formula::Edge(x, y) => g.has_edge(pt(x, pts), pt(y, pts)),
            Formula::Eq(x, y) => pt(x, pts) == pt(y, pts),
            Formula::In(x, s) => sets.iter().rev().find(|(n, _)| n == s).unwrap().1 >> pt(x, pts) & 1 == 1,
            Formula::Not(a) => !naive(a, g, pts, sets),
            Formula::And(a, b) => naive(a, g, pts, sets) && naive(b, g, pts, sets),
            Formula::Or(a, b) => naive(a, g, pts, sets) || naive(b, g, pts, sets),
            Formula::Implies(a, b) => !naive(a, g, pts, sets) || naive(b, g, pts, sets),
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let ex = matches!(f, Formula::Exists(..));
                let r = (0..g.len()).map(|u| {
                    pts.push((v.clone(), u));
                    let r = naive(a, g, pts, sets);
                    pts.pop();
                    r
                });
                let vals: Vec<bool> = r.collect();
                if ex { vals.iter().any(|&b| b) } else { vals.iter().all(|&b| b) }
            }
            Formula::ExistsSet(v, a) | Formula::ForallSet(v, a) => {
                let ex = matches!(f, Formula::ExistsSet(..));
                let vals: Vec<bool> = (0..1u32 << g.len())
                    .map(|m| {
                        sets.push((v.clone(), m));
                        let r = naive(a, g, pts, sets);
                        sets.pop();
                        r
                    })
                    .collect();
                if ex { vals.iter().any(|&b| b) } else { vals.iter().all(|&b| b) }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let loop1 = g(1, &[(0, 0)]);
        let cycle2 = g(2, &[(0, 1), (1, 0)]);
        let path2 = g(2, &[(0, 1)]);
        assert!(evaluate(&fixed_point(), &loop1).unwrap());
        assert!(!evaluate(&fixed_point(), &cycle2).unwrap());
        assert!(evaluate(&nontrivial_scc(), &cycle2).unwrap());
        assert!(!evaluate(&nontrivial_scc(), &path2).unwrap());
    }

    #[test]
    fn chi_examples() {
        assert!(evaluate(&chi(), &g(2, &[(0, 1), (1, 0)])).unwrap());
        assert!(!evaluate(&chi(), &g(2, &[(0, 0), (0, 1), (1, 1)])).unwrap());
    }

    #[test]
    fn chi_matches_out_degree_on_small_graphs() {
        for n in 0..=3usize {
            for mask in 0u32..1 << (n * n) {
                let es: Vec<_> = (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n)).collect();
                let gr = g(n, &es);
                assert_eq!(evaluate(&chi(), &gr).unwrap(), out_degree_exactly(&gr, 1));
            }
        }
    }

    #[test]
    fn set_bound_is_enforced() {
        let big = g(21, &[]);
        assert!(matches!(evaluate(&nontrivial_scc(), &big), Err(LogicError::SizeBoundExceeded { bound: 20, .. })));
        assert_eq!(evaluate(&fixed_point(), &big), Ok(false));
        assert!(matches!(evaluate(&Formula::edge("x", "x"), &big), Err(LogicError::FreeVariable(_))));
    }

    #[test]
    fn guards_agree_with_textbook_semantics() {
        let corpus = random_corpus(11, 400, 3);
        for n in 1..=3usize {
            for mask in (0u32..1 << (n * n)).step_by(3) {
                let es: Vec<_> = (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n)).collect();
                let gr = g(n, &es);
                for f in &corpus {
                    let want = naive(f, &gr, &mut Vec::new(), &mut Vec::new());
                    assert_eq!(evaluate_with(f, &gr, crate::par::Exec::Sequential).unwrap(), want, "{f}");
                }
            }
        }
        for f in [chi(), injective(), nontrivial_scc()] {
            let gr = g(3, &[(0, 1), (1, 2), (2, 0), (1, 1)]);
            assert_eq!(evaluate(&f, &gr).unwrap(), naive(&f, &gr, &mut Vec::new(), &mut Vec::new()));
        }
    }

    #[test]
    fn strong_connectivity_matches_reachability() {
        let sc = strongly_connected();
        for n in 1..=3usize {
            for mask in 0u32..1 << (n * n) {
                let es: Vec<_> = (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n)).collect();
                let gr = g(n, &es);
                let reach_all = |s: usize| {
                    let mut seen = vec![false; n];
                    let mut stack = vec![s];
                    seen[s] = true;
                    while let Some(u) = stack.pop() {
                        for &v in gr.succ(u) {
                            if !std::mem::replace(&mut seen[v], true) {
                                stack.push(v);
                            }
                        }
                    }
                    seen.iter().all(|&b| b)
                };
                assert_eq!(evaluate(&sc, &gr).unwrap(), (0..n).all(reach_all), "{es:?}");
            }
        }
    }

    #[test]
    fn execution_modes_agree() {
        let gr = g(5, &[(0, 1), (1, 2), (2, 0), (3, 3), (4, 3)]);
        for f in random_corpus(3, 200, 3) {
            assert_eq!(
                evaluate_with(&f, &gr, crate::par::Exec::Sequential),
                evaluate_with(&f, &gr, crate::par::Exec::Parallel)
            );
        }
    }
}
