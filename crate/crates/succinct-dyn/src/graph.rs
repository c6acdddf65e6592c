//! Finite digraphs, biboundaried k-graphs, gluing and word gluing.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default vertex bound for [`isomorphic`].
pub const ISO_BOUND: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("edge endpoint {0:?} is not a vertex")]
    UnknownVertex(String),
    #[error("port arity mismatch: {left} vs {right}")]
    PortArityMismatch { left: usize, right: usize },
    #[error("invalid ports: {0}")]
    InvalidPorts(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("empty word")]
    EmptyWord,
    #[error("graph with {size} vertices exceeds the bound {bound}")]
    SizeBoundExceeded { size: usize, bound: usize },
}

/// A finite directed graph. Vertex order is canonical: vertex `i` is configuration `i`
/// wherever a graph is read as network dynamics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Digraph {
    /// Graph on vertices named `"0"`..`"n-1"` with no edges.
    pub fn empty(n: usize) -> Self {
        Self::with_names((0..n).map(|i| i.to_string()).collect()).expect("distinct numeric names")
    }

    pub fn with_names(names: Vec<String>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let succ = vec![Vec::new(); names.len()];
        Ok(Self { names, index, succ, edge_count: 0 })
    }

    /// Numerically named graph built from index pairs. Panics on out-of-range indices.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn from_named_edges<S: AsRef<str>>(
        names: Vec<String>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::with_names(names)?;
        for (u, v) in edges {
            let iu = g.require(u.as_ref())?;
            let iv = g.require(v.as_ref())?;
            g.add_edge(iu, iv);
        }
        Ok(g)
    }

    fn require(&self, name: &str) -> Result<usize, GraphError> {
        self.index_of(name).ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    /// Adds a vertex and returns its index.
    pub fn add_vertex(&mut self, name: String) -> Result<usize, GraphError> {
        if self.index.contains_key(&name) {
            return Err(GraphError::DuplicateVertex(name));
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        self.succ.push(Vec::new());
        Ok(i)
    }

    /// Inserts an edge; returns false when it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(v < self.names.len(), "edge target out of range");
        let list = &mut self.succ[u];
        match list.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                list.insert(pos, v);
                self.edge_count += 1;
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Sorted out-neighbours of `v`.
    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.succ[v].len()
    }

    /// Edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (u, v) in self.edges() {
            pred[v].push(u);
        }
        pred
    }

    /// Same vertex names in the same order and the same edge set.
    pub fn same_as(&self, other: &Digraph) -> bool {
        self.names == other.names && self.succ == other.succ
    }

    /// Same edge set under the index bijection `i ↦ i`, ignoring names.
    pub fn same_indexed_edges(&self, other: &Digraph) -> bool {
        self.len() == other.len() && self.succ == other.succ
    }

    /// Copy with vertices permuted: vertex `i` of `self` becomes vertex `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Digraph {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let mut names = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = self.names[i].clone();
        }
        let mut g = Digraph::with_names(names).expect("permutation keeps names distinct");
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Subgraph induced by `keep` (indices of `self`), in ascending index order.
    pub fn induced(&self, keep: &[usize]) -> Digraph {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut map = HashMap::with_capacity(sorted.len());
        for (j, &i) in sorted.iter().enumerate() {
            map.insert(i, j);
        }
        let mut g = Digraph::with_names(sorted.iter().map(|&i| self.names[i].clone()).collect())
            .expect("subset of distinct names");
        for &i in &sorted {
            for &v in &self.succ[i] {
                if let Some(&jv) = map.get(&v) {
                    g.add_edge(map[&i], jv);
                }
            }
        }
        g
    }

    /// Disjoint union; right vertices are renamed when their names collide.
    pub fn disjoint_union(&self, other: &Digraph) -> Digraph {
        let mut g = self.clone();
        let mut namer = Renamer::new(self.names.iter().cloned());
        let mut map = Vec::with_capacity(other.len());
        for name in &other.names {
            let fresh = namer.fresh(name);
            map.push(g.add_vertex(fresh).expect("renamer yields unused names"));
        }
        for (u, v) in other.edges() {
            g.add_edge(map[u], map[v]);
        }
        g
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default)]
    primary_ports: Vec<String>,
    #[serde(default)]
    secondary_ports: Vec<String>,
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PortedGraph::unported(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(PortedGraph::deserialize(d)?.graph)
    }
}

/// A k-graph: a digraph with ordered primary and secondary port sequences of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortedGraph {
    pub graph: Digraph,
    primary: Vec<usize>,
    secondary: Vec<usize>,
}

impl PortedGraph {
    pub fn new(graph: Digraph, primary: Vec<usize>, secondary: Vec<usize>) -> Result<Self, GraphError> {
        if primary.len() != secondary.len() {
            return Err(GraphError::InvalidPorts(format!(
                "primary has {} ports, secondary has {}",
                primary.len(),
                secondary.len()
            )));
        }
        for (label, ports) in [("primary", &primary), ("secondary", &secondary)] {
            let mut seen = HashSet::new();
            for &p in ports.iter() {
                if p >= graph.len() {
                    return Err(GraphError::InvalidPorts(format!("{label} port index {p} out of range")));
                }
                if !seen.insert(p) {
                    return Err(GraphError::InvalidPorts(format!(
                        "{label} port {:?} repeated",
                        graph.name(p)
                    )));
                }
            }
        }
        Ok(Self { graph, primary, secondary })
    }

    pub fn from_names<S: AsRef<str>>(graph: Digraph, primary: &[S], secondary: &[S]) -> Result<Self, GraphError> {
        let look = |ports: &[S]| -> Result<Vec<usize>, GraphError> {
            ports
                .iter()
                .map(|p| {
                    graph
                        .index_of(p.as_ref())
                        .ok_or_else(|| GraphError::InvalidPorts(format!("port {:?} is not a vertex", p.as_ref())))
                })
                .collect()
        };
        let (p, s) = (look(primary)?, look(secondary)?);
        Self::new(graph, p, s)
    }

    /// Arity-0 graph.
    pub fn unported(graph: Digraph) -> Self {
        Self { graph, primary: Vec::new(), secondary: Vec::new() }
    }

    /// Boundaried graph seen as biboundaried with equal port sequences.
    pub fn boundaried(graph: Digraph, ports: Vec<usize>) -> Result<Self, GraphError> {
        Self::new(graph, ports.clone(), ports)
    }

    pub fn k(&self) -> usize {
        self.primary.len()
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn primary_ports(&self) -> &[usize] {
        &self.primary
    }

    pub fn secondary_ports(&self) -> &[usize] {
        &self.secondary
    }

    pub fn primary_names(&self) -> Vec<&str> {
        self.primary.iter().map(|&p| self.graph.name(p)).collect()
    }

    pub fn secondary_names(&self) -> Vec<&str> {
        self.secondary.iter().map(|&p| self.graph.name(p)).collect()
    }

    /// Vertices that are not primary ports, in vertex order. Gluing appends exactly these.
    pub fn non_primary(&self) -> Vec<usize> {
        let primary: HashSet<usize> = self.primary.iter().copied().collect();
        (0..self.len()).filter(|v| !primary.contains(v)).collect()
    }

    /// Number of vertices shared by both port sequences.
    pub fn shared_port_count(&self) -> usize {
        let primary: HashSet<usize> = self.primary.iter().copied().collect();
        self.secondary.iter().filter(|p| primary.contains(p)).count()
    }

    /// Same graph with the vertex order permuted (`perm[i]` is the new index of vertex `i`).
    pub fn relabel(&self, perm: &[usize]) -> PortedGraph {
        PortedGraph {
            graph: self.graph.relabel(perm),
            primary: self.primary.iter().map(|&p| perm[p]).collect(),
            secondary: self.secondary.iter().map(|&p| perm[p]).collect(),
        }
    }

    /// Disjoint union with an unported graph; ports are kept.
    pub fn with_disjoint(&self, extra: &Digraph) -> PortedGraph {
        PortedGraph {
            graph: self.graph.disjoint_union(extra),
            primary: self.primary.clone(),
            secondary: self.secondary.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serialization is infallible")
    }
}

impl Serialize for PortedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let g = &self.graph;
        GraphJson {
            vertices: g.names.clone(),
            edges: g.edges().map(|(u, v)| (g.names[u].clone(), g.names[v].clone())).collect(),
            primary_ports: self.primary.iter().map(|&p| g.names[p].clone()).collect(),
            secondary_ports: self.secondary.iter().map(|&p| g.names[p].clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PortedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = GraphJson::deserialize(d)?;
        let g = Digraph::from_named_edges(raw.vertices, raw.edges).map_err(D::Error::custom)?;
        PortedGraph::from_names(g, &raw.primary_ports, &raw.secondary_ports).map_err(D::Error::custom)
    }
}

/// Finite family of k-graphs indexed by symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetFamily {
    pub k: usize,
    pub members: BTreeMap<String, PortedGraph>,
}

impl GadgetFamily {
    pub fn new(members: impl IntoIterator<Item = (String, PortedGraph)>) -> Result<Self, GraphError> {
        let members: BTreeMap<String, PortedGraph> = members.into_iter().collect();
        let k = members.values().next().map_or(0, PortedGraph::k);
        for g in members.values() {
            if g.k() != k {
                return Err(GraphError::PortArityMismatch { left: k, right: g.k() });
            }
        }
        Ok(Self { k, members })
    }

    pub fn get(&self, symbol: &str) -> Result<&PortedGraph, GraphError> {
        self.members.get(symbol).ok_or_else(|| GraphError::UnknownSymbol(symbol.to_string()))
    }
}

/// Splits a word: comma-separated when it contains a comma, one symbol per character otherwise.
pub fn parse_word(text: &str) -> Vec<String> {
    let text = text.trim();
    if text.contains(',') {
        text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    } else {
        text.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
    }
}

/// Fresh-name source: a colliding name `n` becomes the first unused of `n'`, `n'2`, `n'3`, ...
/// The result depends only on the name and the set of names in use.
#[derive(Debug, Clone, Default)]
pub(crate) struct Renamer {
    used: HashSet<String>,
    next: HashMap<String, usize>,
}

impl Renamer {
    pub(crate) fn new(used: impl IntoIterator<Item = String>) -> Self {
        Self { used: used.into_iter().collect(), next: HashMap::new() }
    }

    pub(crate) fn fresh(&mut self, base: &str) -> String {
        if !self.used.contains(base) {
            self.used.insert(base.to_string());
            return base.to_string();
        }
        let start = self.next.get(base).copied().unwrap_or(1);
        let mut i = start;
        loop {
            let cand = if i == 1 { format!("{base}'") } else { format!("{base}'{i}") };
            if !self.used.contains(&cand) {
                self.next.insert(base.to_string(), i + 1);
                self.used.insert(cand.clone());
                return cand;
            }
            i += 1;
        }
    }
}

/// Incremental left fold of [`glue`]; keeps the name pool across steps.
#[derive(Debug, Clone)]
pub struct Gluer {
    graph: Digraph,
    primary: Vec<usize>,
    secondary: Vec<usize>,
    names: Renamer,
}

impl Gluer {
    pub fn new(first: &PortedGraph) -> Self {
        Self {
            graph: first.graph.clone(),
            primary: first.primary.clone(),
            secondary: first.secondary.clone(),
            names: Renamer::new(first.graph.names.iter().cloned()),
        }
    }

    /// Glues `right` onto the current secondary ports.
    pub fn push(&mut self, right: &PortedGraph) -> Result<(), GraphError> {
        if right.k() != self.primary.len() {
            return Err(GraphError::PortArityMismatch { left: self.primary.len(), right: right.k() });
        }
        let mut map: Vec<Option<usize>> = vec![None; right.len()];
        for (i, &p) in right.primary.iter().enumerate() {
            map[p] = Some(self.secondary[i]);
        }
        // Renaming is decided in name order so that decomposition gluing reproduces it.
        let mut fresh_order: Vec<usize> = (0..right.len()).filter(|&v| map[v].is_none()).collect();
        fresh_order.sort_by(|&a, &b| right.graph.names[a].cmp(&right.graph.names[b]));
        let mut fresh_names = HashMap::with_capacity(fresh_order.len());
        for v in fresh_order {
            fresh_names.insert(v, self.names.fresh(&right.graph.names[v]));
        }
        for (v, slot) in map.iter_mut().enumerate() {
            if slot.is_none() {
                let name = fresh_names.remove(&v).expect("named above");
                *slot = Some(self.graph.add_vertex(name)?);
            }
        }
        let map: Vec<usize> = map.into_iter().map(|m| m.expect("every vertex mapped")).collect();
        for (u, v) in right.graph.edges() {
            self.graph.add_edge(map[u], map[v]);
        }
        self.secondary = right.secondary.iter().map(|&p| map[p]).collect();
        Ok(())
    }

    pub fn finish(self) -> PortedGraph {
        PortedGraph { graph: self.graph, primary: self.primary, secondary: self.secondary }
    }
}

/// `left ⊕ right`: right's primary port `i` is merged into left's secondary port `i`.
pub fn glue(left: &PortedGraph, right: &PortedGraph) -> Result<PortedGraph, GraphError> {
    let mut g = Gluer::new(left);
    g.push(right)?;
    Ok(g.finish())
}

/// Word gluing: left fold of [`glue`] over the members named by `word`.
pub fn delta<S: AsRef<str>>(family: &GadgetFamily, word: &[S]) -> Result<PortedGraph, GraphError> {
    let (first, rest) = word.split_first().ok_or(GraphError::EmptyWord)?;
    let mut g = Gluer::new(family.get(first.as_ref())?);
    for sym in rest {
        g.push(family.get(sym.as_ref())?)?;
    }
    Ok(g.finish())
}

/// Size of `delta(family, word)` without building it.
pub fn delta_size<S: AsRef<str>>(family: &GadgetFamily, word: &[S]) -> Result<usize, GraphError> {
    let mut total = 0usize;
    for (j, sym) in word.iter().enumerate() {
        let g = family.get(sym.as_ref())?;
        total += if j == 0 { g.len() } else { g.len() - g.k() };
    }
    Ok(total)
}

pub fn out_degree_exactly(g: &Digraph, d: usize) -> bool {
    (0..g.len()).all(|v| g.out_degree(v) == d)
}

pub fn isomorphic(g: &Digraph, h: &Digraph) -> Result<bool, GraphError> {
    isomorphic_bounded(g, h, ISO_BOUND)
}

/// Exact isomorphism test by colour refinement with individualisation and backtracking.
pub fn isomorphic_bounded(g: &Digraph, h: &Digraph, bound: usize) -> Result<bool, GraphError> {
    for x in [g, h] {
        if x.len() > bound {
            return Err(GraphError::SizeBoundExceeded { size: x.len(), bound });
        }
    }
    if g.len() != h.len() || g.edge_count() != h.edge_count() {
        return Ok(false);
    }
    if g.same_indexed_edges(h) {
        return Ok(true);
    }
    let joint = Joint::new(g, h);
    let colours = joint.initial_colours();
    Ok(joint.search(colours))
}

/// Disjoint union of the two graphs on one index space: `g` first, then `h`.
struct Joint<'a> {
    n: usize,
    g: &'a Digraph,
    h: &'a Digraph,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl<'a> Joint<'a> {
    fn new(g: &'a Digraph, h: &'a Digraph) -> Self {
        let n = g.len();
        let mut succ = vec![Vec::new(); 2 * n];
        let mut pred = vec![Vec::new(); 2 * n];
        for (u, v) in g.edges() {
            succ[u].push(v);
            pred[v].push(u);
        }
        for (u, v) in h.edges() {
            succ[n + u].push(n + v);
            pred[n + v].push(n + u);
        }
        Self { n, g, h, succ, pred }
    }

    fn initial_colours(&self) -> Vec<usize> {
        (0..2 * self.n).map(|v| usize::from(self.succ[v].contains(&v))).collect()
    }

    /// Refines to a stable colouring; `None` when the two sides have unequal class sizes.
    fn refine(&self, mut colours: Vec<usize>) -> Option<Vec<usize>> {
        let mut classes = count_classes(&colours);
        loop {
            let mut sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::with_capacity(2 * self.n);
            for v in 0..2 * self.n {
                let mut out: Vec<usize> = self.succ[v].iter().map(|&u| colours[u]).collect();
                let mut inn: Vec<usize> = self.pred[v].iter().map(|&u| colours[u]).collect();
                out.sort_unstable();
                inn.sort_unstable();
                sigs.push((colours[v], out, inn));
            }
            let mut table: BTreeMap<&(usize, Vec<usize>, Vec<usize>), usize> = BTreeMap::new();
            for s in &sigs {
                let next = table.len();
                table.entry(s).or_insert(next);
            }
            // BTreeMap order makes ids canonical (independent of vertex order).
            let ids: HashMap<&(usize, Vec<usize>, Vec<usize>), usize> =
                table.keys().enumerate().map(|(i, k)| (*k, i)).collect();
            colours = sigs.iter().map(|s| ids[s]).collect();
            let now = count_classes(&colours);
            if !self.balanced(&colours) {
                return None;
            }
            if now == classes {
                return Some(colours);
            }
            classes = now;
        }
    }

    fn balanced(&self, colours: &[usize]) -> bool {
        let mut count: HashMap<usize, isize> = HashMap::new();
        for (v, &c) in colours.iter().enumerate() {
            *count.entry(c).or_default() += if v < self.n { 1 } else { -1 };
        }
        count.values().all(|&c| c == 0)
    }

    fn search(&self, colours: Vec<usize>) -> bool {
        let Some(colours) = self.refine(colours) else {
            return false;
        };
        // Smallest non-singleton class on the g side.
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colours.iter().enumerate() {
            members.entry(c).or_default().push(v);
        }
        let target = members.iter().filter(|(_, vs)| vs.len() > 2).min_by_key(|(_, vs)| vs.len());
        let Some((_, vs)) = target else {
            return self.check_discrete(&colours);
        };
        let fresh = colours.iter().max().copied().unwrap_or(0) + 1;
        let pick = vs.iter().copied().find(|&v| v < self.n).expect("balanced class has a g vertex");
        for &w in vs.iter().filter(|&&w| w >= self.n) {
            let mut next = colours.clone();
            next[pick] = fresh;
            next[w] = fresh;
            if self.search(next) {
                return true;
            }
        }
        false
    }

    fn check_discrete(&self, colours: &[usize]) -> bool {
        let n = self.n;
        let mut by_colour: HashMap<usize, usize> = HashMap::new();
        for (v, &c) in colours[n..2 * n].iter().enumerate() {
            by_colour.insert(c, v);
        }
        let map: Vec<usize> = (0..n).map(|v| by_colour[&colours[v]]).collect();
        self.g.edges().all(|(u, v)| self.h.has_edge(map[u], map[v]))
    }
}

fn count_classes(colours: &[usize]) -> usize {
    colours.iter().collect::<HashSet<_>>().len()
}
