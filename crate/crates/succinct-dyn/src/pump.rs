//! Pumping on decomposed models: equivalence probing against a finite context family,
//! extraction of a pumpable part from a tree decomposition, verification of the pumped
//! family, saturation probing and assembly of the five reduction gadgets `G₀..G₄`.
//!
//! Exact equivalence classes are out of reach, so every result here is finite evidence:
//! [`find_pump`] proposes candidates and [`verify_pump`] is the soundness gate.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{delta, glue, Digraph, GadgetFamily, GraphError, PortedGraph, Renamer};
use crate::logic::{chi, evaluate, parse_formula, Formula, LogicError};
use crate::par::{self, Exec};
use crate::treedec::{boundaried_subgraph, n_key, part_graph, TdError, TreeDecomp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PumpError {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("condition violated: {0}")]
    ConditionViolation(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomp(#[from] TdError),
    #[error("fixture {path}: {msg}")]
    Fixture { path: String, msg: String },
}

/// Finite stand-in for "every k-graph H" when comparing boundaried graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextFamily {
    k: usize,
    contexts: Vec<PortedGraph>,
}

impl ContextFamily {
    pub fn new(k: usize, contexts: Vec<PortedGraph>) -> Result<Self, PumpError> {
        if let Some(h) = contexts.iter().find(|h| h.k() != k) {
            return Err(PumpError::ArityMismatch { left: k, right: h.k() });
        }
        Ok(Self { k, contexts })
    }

    /// Every digraph on `k + extra` vertices, the first `k` being both port sequences.
    pub fn exhaustive(k: usize, extra: usize) -> Self {
        let n = k + extra;
        assert!(n * n <= 20, "exhaustive context family too large");
        let ports: Vec<usize> = (0..k).collect();
        let contexts = (0u32..1 << (n * n))
            .map(|mask| {
                let es = (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n));
                let g = Digraph::with_names((0..n).map(|i| format!("h{i}")).collect()).expect("distinct names");
                let mut g = g;
                for (u, v) in es {
                    g.add_edge(u, v);
                }
                PortedGraph::boundaried(g, ports.clone()).expect("ports are vertices")
            })
            .collect();
        Self { k, contexts }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contexts(&self) -> &[PortedGraph] {
        &self.contexts
    }
}

/// Pumpable part `g1` with prefix `g2` and suffix `g3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TripleJson")]
pub struct PumpTriple {
    pub g1: PortedGraph,
    pub g2: PortedGraph,
    pub g3: PortedGraph,
}

impl PumpTriple {
    pub fn new(g1: PortedGraph, g2: PortedGraph, g3: PortedGraph) -> Result<Self, PumpError> {
        for g in [&g2, &g3] {
            if g.k() != g1.k() {
                return Err(PumpError::ArityMismatch { left: g1.k(), right: g.k() });
            }
        }
        if g1.non_primary().is_empty() {
            return Err(PumpError::ConditionViolation("pumping g1 would not add vertices".into()));
        }
        Ok(Self { g1, g2, g3 })
    }

    pub fn family(&self) -> GadgetFamily {
        let members = [("1", &self.g1), ("2", &self.g2), ("3", &self.g3)];
        GadgetFamily::new(members.into_iter().map(|(s, g)| (s.to_string(), g.clone()))).expect("arities checked")
    }

    /// `Δ(2·1^ℓ·3)`.
    pub fn pumped(&self, l: usize) -> Result<PortedGraph, PumpError> {
        let mut word = vec!["2"];
        word.extend(std::iter::repeat_n("1", l));
        word.push("3");
        Ok(delta(&self.family(), &word)?)
    }
}

pub fn empirical_equiv(g: &PortedGraph, h: &PortedGraph, psi: &Formula, ctx: &ContextFamily) -> Result<bool, PumpError> {
    empirical_equiv_all(g, h, std::slice::from_ref(psi), ctx)
}

/// Equivalence for every formula of `psis` simultaneously.
pub fn empirical_equiv_all(
    g: &PortedGraph,
    h: &PortedGraph,
    psis: &[Formula],
    ctx: &ContextFamily,
) -> Result<bool, PumpError> {
    for x in [g, h] {
        if x.k() != ctx.k {
            return Err(PumpError::ArityMismatch { left: ctx.k, right: x.k() });
        }
    }
    for c in &ctx.contexts {
        let (gc, hc) = (glue(g, c)?, glue(h, c)?);
        for psi in psis {
            if evaluate(psi, &gc.graph)? != evaluate(psi, &hc.graph)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Splits the decomposition at `v` above `w`: `(g1, g2, g3)` spanned by
/// `(S(v)∖S(w)) ∪ {w}`, `(D∖S(v)) ∪ {v}` and `S(w)`.
fn split(t: &TreeDecomp, model: &Digraph, v: &str, w: &str) -> Result<PumpTriple, PumpError> {
    let sv = t.subtree(v)?;
    let sw = t.subtree(w)?;
    let sw_set: HashSet<&String> = sw.iter().collect();
    let sv_set: HashSet<&String> = sv.iter().collect();
    let mut t1: Vec<String> = sv.iter().filter(|n| !sw_set.contains(n)).cloned().collect();
    t1.push(w.to_string());
    let mut t2: Vec<String> = t.nodes().iter().filter(|n| !sv_set.contains(n)).cloned().collect();
    t2.push(v.to_string());
    let (bv, bw) = (t.bag(v)?.to_vec(), t.bag(w)?.to_vec());
    let root_bag = t.bag(t.root())?.to_vec();
    let tail = if sw_set.contains(&t.leaf().to_string()) { t.bag(t.leaf())?.to_vec() } else { bw.clone() };
    let g1 = part_graph(t, model, &t1, &bv, &bw)?;
    let g2 = part_graph(t, model, &t2, &root_bag, &bv)?;
    let g3 = part_graph(t, model, &sw, &bw, &tail)?;
    PumpTriple::new(g1, g2, g3)
}

pub fn find_pump(model: &Digraph, t: &TreeDecomp, psi: &Formula, ctx: &ContextFamily) -> Result<Option<PumpTriple>, PumpError> {
    find_pump_multi(model, t, std::slice::from_ref(psi), ctx)
}

/// Searches root-to-leaf paths for 𝒩-different nodes `v` above `w` whose boundaried graphs
/// are equivalent for all of `psis` on `ctx`. Among all such pairs the one with the smallest
/// pumpable part wins; ties go to the first found (higher `v`, then nearer `w`).
pub fn find_pump_multi(
    model: &Digraph,
    t: &TreeDecomp,
    psis: &[Formula],
    ctx: &ContextFamily,
) -> Result<Option<PumpTriple>, PumpError> {
    let mut seen_pairs = HashSet::new();
    let mut candidates = Vec::new();
    for path in t.root_leaf_paths() {
        let parts: Vec<PortedGraph> =
            path.iter().map(|v| boundaried_subgraph(t, model, v)).collect::<Result<_, _>>()?;
        let keys: Vec<_> = parts.iter().map(n_key).collect();
        for i in 0..path.len() {
            for j in i + 1..path.len() {
                if keys[i] != keys[j] && seen_pairs.insert((path[i].clone(), path[j].clone())) {
                    candidates.push((path[i].clone(), path[j].clone(), parts[i].clone(), parts[j].clone()));
                }
            }
        }
    }
    let verdicts = par::map(Exec::default(), &candidates, |(_, _, a, b)| empirical_equiv_all(a, b, psis, ctx));
    let mut best: Option<PumpTriple> = None;
    for ((v, w, _, _), ok) in candidates.iter().zip(verdicts) {
        if !ok? {
            continue;
        }
        let triple = split(t, model, v, w)?;
        if best.as_ref().is_none_or(|b| triple.g1.len() < b.g1.len()) {
            best = Some(triple);
        }
    }
    Ok(best)
}

/// `ψ` (and χ when `require_functional`) holds on `Δ(2·1^ℓ·3)` for every `ℓ ≤ l_max`.
pub fn verify_pump(t: &PumpTriple, psi: &Formula, l_max: usize, require_functional: bool) -> Result<bool, PumpError> {
    let chi = chi();
    let results = par::map_range(Exec::default(), l_max + 1, |l| -> Result<bool, PumpError> {
        let g = t.pumped(l)?.graph;
        Ok(evaluate(psi, &g)? && (!require_functional || evaluate(&chi, &g)?))
    });
    for r in results {
        if !r? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Saturation {
    AllModels,
    AllCounterModels,
    Mixed,
}

/// Truth of `G ⊔ omega ⊨ ψ` across `family`.
pub fn saturation_check(omega: &Digraph, psi: &Formula, family: &[Digraph]) -> Result<Saturation, PumpError> {
    let mut seen = BTreeSet::new();
    for g in family {
        seen.insert(evaluate(psi, &g.disjoint_union(omega))?);
    }
    Ok(match (seen.contains(&true), seen.contains(&false)) {
        (true, false) => Saturation::AllModels,
        (false, true) => Saturation::AllCounterModels,
        _ => Saturation::Mixed,
    })
}

/// The five gadgets of the metareduction together with their size parameters.
/// Serialises the five graphs and `α`; `a` and `b` are recomputed when reading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GadgetsJson")]
pub struct AssembledGadgets {
    pub g0: PortedGraph,
    pub g1: PortedGraph,
    pub g2: PortedGraph,
    pub g3: PortedGraph,
    pub g4: PortedGraph,
    pub alpha: u64,
    /// `|g4| − k`, the growth of one pump.
    #[serde(skip_serializing)]
    pub a: u64,
    /// `|g2 ⊕ g3|`.
    #[serde(skip_serializing)]
    pub b: u64,
}

#[derive(Deserialize)]
struct GadgetsJson {
    g0: PortedGraph,
    g1: PortedGraph,
    g2: PortedGraph,
    g3: PortedGraph,
    g4: PortedGraph,
    alpha: u64,
}

impl TryFrom<GadgetsJson> for AssembledGadgets {
    type Error = PumpError;
    fn try_from(j: GadgetsJson) -> Result<Self, PumpError> {
        AssembledGadgets::new(j.g0, j.g1, j.g2, j.g3, j.g4, j.alpha)
    }
}

#[derive(Deserialize)]
struct TripleJson {
    g1: PortedGraph,
    g2: PortedGraph,
    g3: PortedGraph,
}

impl TryFrom<TripleJson> for PumpTriple {
    type Error = PumpError;
    fn try_from(j: TripleJson) -> Result<Self, PumpError> {
        PumpTriple::new(j.g1, j.g2, j.g3)
    }
}

impl AssembledGadgets {
    /// Computes `a` and `b` from the graphs.
    pub fn new(
        g0: PortedGraph,
        g1: PortedGraph,
        g2: PortedGraph,
        g3: PortedGraph,
        g4: PortedGraph,
        alpha: u64,
    ) -> Result<Self, PumpError> {
        let k = g0.k();
        for g in [&g1, &g2, &g3, &g4] {
            if g.k() != k {
                return Err(PumpError::ArityMismatch { left: k, right: g.k() });
            }
        }
        let a = (g4.len() - k) as u64;
        let b = glue(&g2, &g3)?.len() as u64;
        Ok(Self { g0, g1, g2, g3, g4, alpha, a, b })
    }

    pub fn k(&self) -> usize {
        self.g0.k()
    }

    /// Members indexed `"0"`..`"4"`.
    pub fn family(&self) -> GadgetFamily {
        let members = [&self.g0, &self.g1, &self.g2, &self.g3, &self.g4];
        GadgetFamily::new(members.into_iter().enumerate().map(|(i, g)| (i.to_string(), g.clone())))
            .expect("arities checked")
    }
}

/// Describes where an out-neighbour sits: primary port position or rank among the rest.
fn out_profile(g: &PortedGraph, v: usize) -> BTreeSet<(bool, usize)> {
    let non_primary = g.non_primary();
    g.graph
        .succ(v)
        .iter()
        .map(|u| match g.primary_ports().iter().position(|p| p == u) {
            Some(i) => (true, i),
            None => (false, non_primary.binary_search(u).expect("non-primary vertex")),
        })
        .collect()
}

/// Position pairs `(i, j)` with `P₁[i] = P₂[j]`.
fn shared_positions(g: &PortedGraph) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for (i, p) in g.primary_ports().iter().enumerate() {
        for (j, s) in g.secondary_ports().iter().enumerate() {
            if p == s {
                out.insert((i, j));
            }
        }
    }
    out
}

/// The three port conditions relating `g0` and `g1`; the first failure is described.
pub fn conditions_report(g: &AssembledGadgets) -> Result<(), String> {
    let (g0, g1) = (&g.g0, &g.g1);
    if g0.len() != g1.len() {
        return Err(format!("|G0| = {} but |G1| = {}", g0.len(), g1.len()));
    }
    let (s0, s1) = (shared_positions(g0), shared_positions(g1));
    if s0 != s1 {
        return Err(format!("port overlaps differ: {s0:?} vs {s1:?}"));
    }
    if s1.len() >= g1.len() {
        return Err("every vertex of G1 is a shared port".into());
    }
    for &(i, _) in &s0 {
        let (p0, p1) = (g0.primary_ports()[i], g1.primary_ports()[i]);
        if out_profile(g0, p0) != out_profile(g1, p1) {
            return Err(format!("shared port at position {i} has different out-neighbourhoods"));
        }
    }
    Ok(())
}

pub fn conditions_check(g: &AssembledGadgets) -> bool {
    conditions_report(g).is_ok()
}

/// Builds `G₀ = (Ω ⊔ g̃₁)` padded with isolated loops, `G₁ = ⊕^α g̃₁`, `G₄ = g̃₁`.
///
/// With `q = Some(q)`, `α` is the least power of `q` making `|G₁| ≥ |Ω| + |g̃₁|`; otherwise the
/// least integer. `G₀` lists the primary ports first, then `Ω`, the padding and the
/// remaining vertices of `g̃₁`, so that its secondary ports sit at the same rank among the
/// non-primary vertices as in `G₁`.
pub fn assemble_gadgets(t: &PumpTriple, omega: &Digraph, q: Option<u64>) -> Result<AssembledGadgets, PumpError> {
    let g1t = &t.g1;
    let k = g1t.k();
    let a = (g1t.len() - k) as u64;
    let need = (omega.len() + g1t.len()) as u64;
    let size = |alpha: u64| alpha * a + k as u64;
    let alpha = match q {
        Some(q) => std::iter::successors(Some(1u64), |x| x.checked_mul(q)).find(|&x| size(x) >= need),
        None => (1..).find(|&x| size(x) >= need),
    }
    .ok_or_else(|| PumpError::ConditionViolation("no admissible α".into()))?;
    let mut g1 = crate::graph::Gluer::new(g1t);
    for _ in 1..alpha {
        g1.push(g1t)?;
    }
    let g1 = g1.finish();

    let mut names = Renamer::new(g1t.graph.names().iter().cloned());
    let primary: BTreeSet<usize> = g1t.primary_ports().iter().copied().collect();
    let mut order: Vec<String> = Vec::with_capacity(g1.len());
    let mut index_of_t = vec![usize::MAX; g1t.len()];
    for &p in &primary {
        index_of_t[p] = order.len();
        order.push(g1t.graph.name(p).to_string());
    }
    let omega_at = order.len();
    for v in omega.names() {
        order.push(names.fresh(v));
    }
    let pad = g1.len() - omega.len() - g1t.len();
    let pad_at = order.len();
    for i in 0..pad {
        order.push(names.fresh(&format!("pad{i}")));
    }
    for v in g1t.non_primary() {
        index_of_t[v] = order.len();
        order.push(g1t.graph.name(v).to_string());
    }
    let mut g0 = Digraph::with_names(order)?;
    for (u, v) in g1t.graph.edges() {
        g0.add_edge(index_of_t[u], index_of_t[v]);
    }
    for (u, v) in omega.edges() {
        g0.add_edge(omega_at + u, omega_at + v);
    }
    for i in 0..pad {
        g0.add_edge(pad_at + i, pad_at + i);
    }
    let g0 = PortedGraph::new(
        g0,
        g1t.primary_ports().iter().map(|&p| index_of_t[p]).collect(),
        g1t.secondary_ports().iter().map(|&p| index_of_t[p]).collect(),
    )?;
    let out = AssembledGadgets::new(g0, g1, t.g2.clone(), t.g3.clone(), g1t.clone(), alpha)?;
    conditions_report(&out).map_err(PumpError::ConditionViolation)?;
    Ok(out)
}

/// Contents of `expected.json` in a pump fixture directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedVerdict {
    pub verdict: bool,
    pub l_max: usize,
    #[serde(default)]
    pub require_functional: bool,
}

/// A pump fixture directory: `g1.json`, `g2.json`, `g3.json`, `psi.txt`, `expected.json`,
/// and optionally the `model.json`/`decomp.json` the triple was cut from.
#[derive(Debug, Clone)]
pub struct PumpFixture {
    pub triple: PumpTriple,
    pub psi: Formula,
    pub expected: ExpectedVerdict,
    pub model: Option<Digraph>,
    pub decomp: Option<TreeDecomp>,
}

impl PumpFixture {
    pub fn load(dir: impl AsRef<std::path::Path>) -> Result<Self, PumpError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path)
                .map_err(|e| PumpError::Fixture { path: path.display().to_string(), msg: e.to_string() })
        };
        fn parse<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T, PumpError> {
            serde_json::from_str(text).map_err(|e| PumpError::Fixture { path: name.to_string(), msg: e.to_string() })
        }
        let optional = |name: &str| dir.join(name).exists().then(|| read(name)).transpose();
        let triple = PumpTriple::new(
            parse("g1.json", &read("g1.json")?)?,
            parse("g2.json", &read("g2.json")?)?,
            parse("g3.json", &read("g3.json")?)?,
        )?;
        let psi = parse_formula(read("psi.txt")?.trim())?;
        let expected = parse("expected.json", &read("expected.json")?)?;
        let model = optional("model.json")?.map(|t| parse("model.json", &t)).transpose()?;
        let decomp = optional("decomp.json")?.map(|t| parse("decomp.json", &t)).transpose()?;
        Ok(Self { triple, psi, expected, model, decomp })
    }

    /// Runs [`verify_pump`] with the recorded parameters and compares with the verdict.
    pub fn check(&self) -> Result<bool, PumpError> {
        let got = verify_pump(&self.triple, &self.psi, self.expected.l_max, self.expected.require_functional)?;
        Ok(got == self.expected.verdict)
    }
}

/// Directory of the shipped deterministic pump fixture.
pub fn shipped_fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("chain")
}

/// The shipped deterministic chain model: a path `0 → 1 → … → 6` closed by `7 → 6`, with
/// a width-1 path decomposition whose bags alternate like a zipper.
pub mod fixtures {
    use super::*;

    pub fn chain_model() -> Digraph {
        let mut es: Vec<(usize, usize)> = (0..7).map(|i| (i, i + 1)).collect();
        es.push((7, 6));
        Digraph::from_edges(8, es)
    }

    pub fn chain_decomp() -> TreeDecomp {
        let bags = [["0", "1"], ["2", "1"], ["2", "3"], ["4", "3"], ["4", "5"], ["6", "5"], ["6", "7"]];
        TreeDecomp::path(&bags.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).expect("fixture decomposition")
    }

    /// No vertex is its own successor.
    pub fn chain_psi() -> Formula {
        Formula::forall("x", Formula::edge("x", "x").not())
    }
}
