//! Tree-decompositions with ordered bags, validity, bag-substitution gluing and the
//! correspondence between decomposition gluing and graph gluing.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{delta, Digraph, GadgetFamily, GraphError, PortedGraph, Renamer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("bags must all have size {expected}, node {node:?} has {found}")]
    NonUniformBags { expected: usize, node: String, found: usize },
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("empty word")]
    EmptyWord,
    #[error("unknown node {0:?}")]
    InvalidNode(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("bag vertex {0:?} is not a graph vertex")]
    UnknownVertex(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Rooted tree with ordered bags of one common size; the root and a designated leaf act as ports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeDecompJson", into = "TreeDecompJson")]
pub struct TreeDecomp {
    nodes: Vec<String>,
    parent: BTreeMap<String, String>,
    bags: BTreeMap<String, Vec<String>>,
    root: String,
    leaf: String,
    children: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct TreeDecompJson {
    nodes: Vec<String>,
    parent: BTreeMap<String, String>,
    bags: BTreeMap<String, Vec<String>>,
    root: String,
    leaf: String,
}

impl TryFrom<TreeDecompJson> for TreeDecomp {
    type Error = TdError;
    fn try_from(raw: TreeDecompJson) -> Result<Self, TdError> {
        TreeDecomp::new(raw.nodes, raw.parent, raw.bags, raw.root, raw.leaf)
    }
}

impl From<TreeDecomp> for TreeDecompJson {
    fn from(t: TreeDecomp) -> Self {
        TreeDecompJson { nodes: t.nodes, parent: t.parent, bags: t.bags, root: t.root, leaf: t.leaf }
    }
}

impl TreeDecomp {
    pub fn new(
        nodes: Vec<String>,
        parent: BTreeMap<String, String>,
        bags: BTreeMap<String, Vec<String>>,
        root: String,
        leaf: String,
    ) -> Result<Self, TdError> {
        let set: HashSet<&String> = nodes.iter().collect();
        if set.len() != nodes.len() {
            return Err(TdError::InvalidTree("duplicate node".into()));
        }
        for n in [&root, &leaf] {
            if !set.contains(n) {
                return Err(TdError::InvalidNode(n.clone()));
            }
        }
        if parent.contains_key(&root) {
            return Err(TdError::InvalidTree("root has a parent".into()));
        }
        let mut children: BTreeMap<String, Vec<String>> = nodes.iter().map(|n| (n.clone(), Vec::new())).collect();
        for n in &nodes {
            if n == &root {
                continue;
            }
            let p = parent.get(n).ok_or_else(|| TdError::InvalidTree(format!("node {n:?} has no parent")))?;
            if !set.contains(p) {
                return Err(TdError::InvalidNode(p.clone()));
            }
            children.get_mut(p).expect("checked membership").push(n.clone());
        }
        if parent.len() != nodes.len() - 1 {
            return Err(TdError::InvalidTree("parent map mentions unknown nodes".into()));
        }
        // Every node must reach the root.
        let mut seen = HashSet::new();
        let mut stack = vec![root.clone()];
        while let Some(n) = stack.pop() {
            seen.insert(n.clone());
            stack.extend(children[&n].iter().cloned());
        }
        if seen.len() != nodes.len() {
            return Err(TdError::InvalidTree("parent map has a cycle".into()));
        }
        if !children[&leaf].is_empty() {
            return Err(TdError::InvalidTree(format!("designated leaf {leaf:?} has children")));
        }
        let size = bags.get(&root).ok_or_else(|| TdError::InvalidTree("root has no bag".into()))?.len();
        if size == 0 {
            return Err(TdError::InvalidTree("empty bags".into()));
        }
        if bags.len() != nodes.len() {
            return Err(TdError::InvalidTree("bag map and node list differ".into()));
        }
        for n in &nodes {
            let bag = bags.get(n).ok_or_else(|| TdError::InvalidTree(format!("node {n:?} has no bag")))?;
            if bag.len() != size {
                return Err(TdError::NonUniformBags { expected: size, node: n.clone(), found: bag.len() });
            }
            if bag.iter().collect::<HashSet<_>>().len() != bag.len() {
                return Err(TdError::InvalidTree(format!("bag of {n:?} repeats a vertex")));
            }
        }
        Ok(Self { nodes, parent, bags, root, leaf, children })
    }

    /// Path decomposition `n0 - n1 - ...` rooted at the first bag with the last bag as leaf.
    pub fn path<S: AsRef<str>>(bags: &[Vec<S>]) -> Result<Self, TdError> {
        let nodes: Vec<String> = (0..bags.len()).map(|i| format!("t{i}")).collect();
        let parent = (1..bags.len()).map(|i| (nodes[i].clone(), nodes[i - 1].clone())).collect();
        let bag_map = nodes
            .iter()
            .zip(bags)
            .map(|(n, b)| (n.clone(), b.iter().map(|v| v.as_ref().to_string()).collect()))
            .collect();
        let last = nodes.last().cloned().ok_or_else(|| TdError::InvalidTree("no nodes".into()))?;
        Self::new(nodes.clone(), parent, bag_map, nodes[0].clone(), last)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn leaf(&self) -> &str {
        &self.leaf
    }

    pub fn parent(&self, node: &str) -> Option<&str> {
        self.parent.get(node).map(String::as_str)
    }

    pub fn children(&self, node: &str) -> &[String] {
        self.children.get(node).map_or(&[], Vec::as_slice)
    }

    pub fn bag(&self, node: &str) -> Result<&[String], TdError> {
        self.bags.get(node).map(Vec::as_slice).ok_or_else(|| TdError::InvalidNode(node.to_string()))
    }

    pub fn bag_size(&self) -> usize {
        self.bags[&self.root].len()
    }

    /// Nodes of the subtree rooted at `node`, in preorder.
    pub fn subtree(&self, node: &str) -> Result<Vec<String>, TdError> {
        if !self.bags.contains_key(node) {
            return Err(TdError::InvalidNode(node.to_string()));
        }
        let mut out = Vec::new();
        let mut stack = vec![node.to_string()];
        while let Some(n) = stack.pop() {
            for c in self.children[&n].iter().rev() {
                stack.push(c.clone());
            }
            out.push(n);
        }
        Ok(out)
    }

    /// Root-to-leaf paths (every leaf), each listed from the root down.
    pub fn root_leaf_paths(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![self.root.clone()]];
        while let Some(path) = stack.pop() {
            let last = path.last().expect("nonempty");
            let kids = &self.children[last];
            if kids.is_empty() {
                out.push(path);
            } else {
                for c in kids.iter().rev() {
                    let mut p = path.clone();
                    p.push(c.clone());
                    stack.push(p);
                }
            }
        }
        out
    }

    /// Same decomposition with the node list reordered.
    pub fn with_node_order(&self, order: Vec<String>) -> Result<Self, TdError> {
        Self::new(order, self.parent.clone(), self.bags.clone(), self.root.clone(), self.leaf.clone())
    }

    fn vertex_names(&self) -> impl Iterator<Item = &String> {
        self.bags.values().flatten()
    }
}

/// Finite family of decompositions of one width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompFamily {
    pub k: usize,
    pub members: BTreeMap<String, TreeDecomp>,
}

impl DecompFamily {
    pub fn new(members: impl IntoIterator<Item = (String, TreeDecomp)>) -> Result<Self, TdError> {
        let members: BTreeMap<String, TreeDecomp> = members.into_iter().collect();
        let k = members.values().next().map_or(0, width);
        for t in members.values() {
            if width(t) != k {
                return Err(TdError::WidthMismatch { left: k, right: width(t) });
            }
        }
        Ok(Self { k, members })
    }

    pub fn get(&self, symbol: &str) -> Result<&TreeDecomp, TdError> {
        self.members.get(symbol).ok_or_else(|| TdError::UnknownSymbol(symbol.to_string()))
    }
}

pub fn is_valid_decomposition(t: &TreeDecomp, g: &Digraph) -> bool {
    let mut holders: Vec<Vec<&str>> = vec![Vec::new(); g.len()];
    for (node, bag) in &t.bags {
        for v in bag {
            match g.index_of(v) {
                Some(i) => holders[i].push(node),
                None => return false,
            }
        }
    }
    if holders.iter().any(Vec::is_empty) {
        return false;
    }
    let bag_sets: HashMap<&str, HashSet<usize>> = t
        .bags
        .iter()
        .map(|(n, b)| (n.as_str(), b.iter().filter_map(|v| g.index_of(v)).collect()))
        .collect();
    let covered = g.edges().all(|(u, v)| bag_sets.values().any(|s| s.contains(&u) && s.contains(&v)));
    if !covered {
        return false;
    }
    // The holder nodes of a vertex form a subtree iff exactly one of them has no holder parent.
    holders.iter().enumerate().all(|(v, nodes)| {
        nodes
            .iter()
            .filter(|n| t.parent(n).is_none_or(|p| !bag_sets[p].contains(&v)))
            .count()
            == 1
    })
}

/// Maximum bag size minus one.
pub fn width(t: &TreeDecomp) -> usize {
    t.bags.values().map(Vec::len).max().unwrap_or(1) - 1
}

/// Incremental left fold of [`glue_td`]; the vertex renaming matches [`crate::graph::Gluer`].
#[derive(Debug, Clone)]
struct TdGluer {
    t: TreeDecomp,
    node_names: Renamer,
    vertex_names: Renamer,
}

impl TdGluer {
    fn new(first: &TreeDecomp) -> Self {
        Self {
            t: first.clone(),
            node_names: Renamer::new(first.nodes.iter().cloned()),
            vertex_names: Renamer::new(first.vertex_names().cloned()),
        }
    }

    fn push(&mut self, right: &TreeDecomp) -> Result<(), TdError> {
        let (wl, wr) = (width(&self.t), width(right));
        if wl != wr {
            return Err(TdError::WidthMismatch { left: wl, right: wr });
        }
        let left_leaf = self.t.leaf.clone();
        let mut subst: HashMap<String, String> = right.bags[&right.root]
            .iter()
            .cloned()
            .zip(self.t.bags[&left_leaf].iter().cloned())
            .collect();
        let fresh: BTreeSet<&String> = right.vertex_names().filter(|v| !subst.contains_key(*v)).collect();
        for v in fresh {
            let name = self.vertex_names.fresh(v);
            subst.insert(v.clone(), name);
        }
        let mut node_map: HashMap<&str, String> = HashMap::new();
        node_map.insert(&right.root, left_leaf.clone());
        let mut others: Vec<&String> = right.nodes.iter().filter(|n| **n != right.root).collect();
        others.sort();
        for n in others {
            node_map.insert(n, self.node_names.fresh(n));
        }
        for n in right.nodes.iter().filter(|n| **n != right.root) {
            let new = node_map[n.as_str()].clone();
            let p = node_map[right.parent[n].as_str()].clone();
            self.t.nodes.push(new.clone());
            self.t.parent.insert(new.clone(), p.clone());
            self.t.children.entry(p).or_default().push(new.clone());
            self.t.children.insert(new.clone(), Vec::new());
            let bag = right.bags[n].iter().map(|v| subst[v].clone()).collect();
            self.t.bags.insert(new, bag);
        }
        self.t.leaf = node_map[right.leaf.as_str()].clone();
        Ok(())
    }
}

/// Attaches `right` at `left`'s designated leaf, rewriting right's bags by the positional
/// substitution root bag ← leaf bag.
pub fn glue_td(left: &TreeDecomp, right: &TreeDecomp) -> Result<TreeDecomp, TdError> {
    let mut g = TdGluer::new(left);
    g.push(right)?;
    Ok(g.t)
}

pub fn lambda<S: AsRef<str>>(family: &DecompFamily, word: &[S]) -> Result<TreeDecomp, TdError> {
    let (first, rest) = word.split_first().ok_or(TdError::EmptyWord)?;
    let mut g = TdGluer::new(family.get(first.as_ref())?);
    for sym in rest {
        g.push(family.get(sym.as_ref())?)?;
    }
    Ok(g.t)
}

/// Induced subgraph of `g` on the union of the bags of `nodes`, with the given port bags.
pub(crate) fn part_graph(
    t: &TreeDecomp,
    g: &Digraph,
    nodes: &[String],
    primary: &[String],
    secondary: &[String],
) -> Result<PortedGraph, TdError> {
    let mut keep = Vec::new();
    for n in nodes {
        for v in t.bag(n)? {
            keep.push(g.index_of(v).ok_or_else(|| TdError::UnknownVertex(v.clone()))?);
        }
    }
    let sub = g.induced(&keep);
    Ok(PortedGraph::from_names(sub, primary, secondary)?)
}

/// The boundaried graph spanned by the bags of the subtree at `v`, with ports `B(v)`.
pub fn boundaried_subgraph(t: &TreeDecomp, g: &Digraph, v: &str) -> Result<PortedGraph, TdError> {
    let nodes = t.subtree(v)?;
    let ports = t.bag(v)?.to_vec();
    part_graph(t, g, &nodes, &ports, &ports)
}

/// Comparison key for 𝒩-difference: vertex set, edge set and port sequence.
pub(crate) fn n_key(p: &PortedGraph) -> (BTreeSet<String>, BTreeSet<(String, String)>, Vec<String>) {
    let g = &p.graph;
    (
        g.names().iter().cloned().collect(),
        g.edges().map(|(u, v)| (g.name(u).to_string(), g.name(v).to_string())).collect(),
        p.primary_names().into_iter().map(String::from).collect(),
    )
}

/// Number of pairwise 𝒩-different nodes along a downward path.
pub fn n_length<S: AsRef<str>>(t: &TreeDecomp, g: &Digraph, path: &[S]) -> Result<usize, TdError> {
    if path.is_empty() {
        return Err(TdError::InvalidPath("empty path".into()));
    }
    for w in path.windows(2) {
        let (a, b) = (w[0].as_ref(), w[1].as_ref());
        if t.parent(b) != Some(a) {
            return Err(TdError::InvalidPath(format!("{b:?} is not a child of {a:?}")));
        }
    }
    let mut keys = HashSet::new();
    for v in path {
        keys.insert(n_key(&boundaried_subgraph(t, g, v.as_ref())?));
    }
    Ok(keys.len())
}

/// Checks that `lambda(tfam, word)` decomposes the digraph underlying `delta(gamma, word)`.
pub fn remark2_check<S: AsRef<str>>(gamma: &GadgetFamily, tfam: &DecompFamily, word: &[S]) -> Result<bool, TdError> {
    let gk: Vec<&String> = gamma.members.keys().collect();
    let tk: Vec<&String> = tfam.members.keys().collect();
    if gk != tk {
        return Err(TdError::FamilyMismatch("index sets differ".into()));
    }
    for (sym, g) in &gamma.members {
        let t = &tfam.members[sym];
        if t.bag(t.root())? != g.primary_names().as_slice() || t.bag(t.leaf())? != g.secondary_names().as_slice() {
            return Err(TdError::FamilyMismatch(format!(
                "member {sym:?}: root and leaf bags must equal the primary and secondary ports"
            )));
        }
    }
    let glued = delta(gamma, word)?;
    let tree = lambda(tfam, word)?;
    Ok(is_valid_decomposition(&tree, &glued.graph))
}

/// Small paired fixtures: a graph `G` with ports (1,3)/(4,5), a graph `G'` with ports
/// (7,6)/(10,11), and path decompositions whose root and leaf bags are those ports.
/// Only the port labels are fixed; the inner edges are arbitrary.
pub mod fixtures {
    use super::*;

    fn named(vs: &[&str], es: &[(&str, &str)]) -> Digraph {
        Digraph::from_named_edges(vs.iter().map(|s| s.to_string()).collect(), es.iter().copied())
            .expect("fixture is well formed")
    }

    pub fn left_graph() -> PortedGraph {
        let g = named(&["1", "2", "3", "4", "5"], &[("1", "3"), ("3", "2"), ("2", "4"), ("4", "5")]);
        PortedGraph::from_names(g, &["1", "3"], &["4", "5"]).expect("fixture ports")
    }

    pub fn right_graph() -> PortedGraph {
        let g = named(
            &["6", "7", "8", "9", "10", "11"],
            &[("7", "6"), ("6", "8"), ("8", "9"), ("9", "10"), ("10", "11")],
        );
        PortedGraph::from_names(g, &["7", "6"], &["10", "11"]).expect("fixture ports")
    }

    pub fn left_decomp() -> TreeDecomp {
        let t = TreeDecomp::path(&[vec!["1", "3"], vec!["3", "2"], vec!["2", "4"], vec!["4", "5"]]);
        t.expect("fixture decomposition")
    }

    pub fn right_decomp() -> TreeDecomp {
        let bags = [vec!["7", "6"], vec!["6", "8"], vec!["8", "9"], vec!["9", "10"], vec!["10", "11"]];
        let t = TreeDecomp::path(&bags).expect("fixture decomposition");
        // Distinct node names from the left decomposition keep the example readable.
        let rename = |n: &str| format!("r{}", &n[1..]);
        let nodes = t.nodes().iter().map(|n| rename(n)).collect();
        let parent = t.parent.iter().map(|(a, b)| (rename(a), rename(b))).collect();
        let bags = t.bags.iter().map(|(n, b)| (rename(n), b.clone())).collect();
        TreeDecomp::new(nodes, parent, bags, rename(t.root()), rename(t.leaf())).expect("fixture decomposition")
    }

    pub fn gadgets() -> (GadgetFamily, DecompFamily) {
        let g = GadgetFamily::new([("1".to_string(), left_graph()), ("2".to_string(), right_graph())])
            .expect("same arity");
        let t = DecompFamily::new([("1".to_string(), left_decomp()), ("2".to_string(), right_decomp())])
            .expect("same width");
        (g, t)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn path3(extra: bool) -> Digraph {
        let mut es = vec![("1", "2"), ("2", "3")];
        if extra {
            es.push(("1", "3"));
        }
        Digraph::from_named_edges(vec!["1".into(), "2".into(), "3".into()], es).unwrap()
    }

    #[test]
    fn validity_examples() {
        let single = TreeDecomp::path(&[vec!["1", "2", "3"]]).unwrap();
        assert!(is_valid_decomposition(&single, &path3(false)));
        let two = TreeDecomp::path(&[vec!["1", "2"], vec!["2", "3"]]).unwrap();
        assert!(is_valid_decomposition(&two, &path3(false)));
        assert!(!is_valid_decomposition(&two, &path3(true)));
        // Vertex 1 appears in two bags that are not adjacent.
        let gap = TreeDecomp::path(&[vec!["1", "2"], vec!["2", "3"], vec!["3", "1"]]).unwrap();
        assert!(!is_valid_decomposition(&gap, &path3(false)));
        let missing = TreeDecomp::path(&[vec!["1", "2"]]).unwrap();
        assert!(!is_valid_decomposition(&missing, &path3(false)));
    }

    #[test]
    fn width_examples() {
        assert_eq!(width(&TreeDecomp::path(&[vec!["a", "b"]]).unwrap()), 1);
        assert_eq!(width(&TreeDecomp::path(&[vec!["a", "b", "c", "d"]]).unwrap()), 3);
        assert_eq!(width(&TreeDecomp::path(&[vec!["a"]]).unwrap()), 0);
    }

    #[test]
    fn loader_rejects_non_uniform_bags_and_bad_trees() {
        let err = TreeDecomp::path(&[vec!["a", "b"], vec!["c"]]).unwrap_err();
        assert!(matches!(err, TdError::NonUniformBags { .. }));
        let json = r#"{"nodes":["a","b"],"parent":{"a":"b","b":"a"},"bags":{"a":["x"],"b":["y"]},"root":"a","leaf":"b"}"#;
        assert!(serde_json::from_str::<TreeDecomp>(json).is_err());
        let json = r#"{"nodes":["a","b"],"parent":{"b":"a"},"bags":{"a":["x"],"b":["y"]},"root":"a","leaf":"a"}"#;
        assert!(serde_json::from_str::<TreeDecomp>(json).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = left_decomp();
        let text = serde_json::to_string(&t).unwrap();
        let back: TreeDecomp = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        assert!(text.contains(r#""root":"t0""#) && text.contains(r#""leaf":"t3""#));
    }

    #[test]
    fn glue_propagates_the_port_substitution() {
        let glued = glue_td(&left_decomp(), &right_decomp()).unwrap();
        assert_eq!(glued.nodes().len(), 4 + 5 - 1);
        assert_eq!(glued.root(), "t0");
        assert_eq!(glued.leaf(), "r4");
        // (7,6) <- (4,5): vertex 7 becomes 4 and 6 becomes 5 in every bag.
        assert_eq!(glued.bag("r1").unwrap(), ["5", "8"]);
        assert_eq!(glued.bag("t3").unwrap(), ["4", "5"]);
        assert_eq!(glued.parent("r1"), Some("t3"));
        let names: Vec<&String> = glued.bags.values().flatten().collect();
        assert!(!names.iter().any(|v| *v == "6" || *v == "7"));
        assert_eq!(width(&glued), 1);
        let g = crate::graph::glue(&left_graph(), &right_graph()).unwrap();
        assert!(is_valid_decomposition(&glued, &g.graph));
    }

    #[test]
    fn single_node_self_glue_keeps_left_bag() {
        let t = TreeDecomp::path(&[vec!["a", "b"]]).unwrap();
        let glued = glue_td(&t, &t).unwrap();
        assert_eq!(glued.nodes(), ["t0"]);
        assert_eq!(glued.bag("t0").unwrap(), ["a", "b"]);
    }

    #[test]
    fn glue_rejects_width_mismatch() {
        let a = TreeDecomp::path(&[vec!["a", "b"]]).unwrap();
        let b = TreeDecomp::path(&[vec!["a"]]).unwrap();
        assert_eq!(glue_td(&a, &b), Err(TdError::WidthMismatch { left: 1, right: 0 }));
    }

    #[test]
    fn lambda_mirrors_delta() {
        let (gamma, tfam) = gadgets();
        assert_eq!(lambda(&tfam, &["1"]).unwrap(), left_decomp());
        for word in ["1", "2", "12", "21", "121", "2212"] {
            let w = crate::graph::parse_word(word);
            let t = lambda(&tfam, &w).unwrap();
            let g = delta(&gamma, &w).unwrap();
            let nodes: usize = w.iter().map(|s| tfam.members[s].nodes().len()).sum::<usize>() - (w.len() - 1);
            assert_eq!(t.nodes().len(), nodes);
            assert!(is_valid_decomposition(&t, &g.graph), "{word}");
            assert!(remark2_check(&gamma, &tfam, &w).unwrap());
        }
        assert_eq!(lambda(&tfam, &["3"]), Err(TdError::UnknownSymbol("3".into())));
    }

    #[test]
    fn word_check_rejects_mismatched_families() {
        let (gamma, _) = gadgets();
        let t = DecompFamily::new([("1".to_string(), left_decomp())]).unwrap();
        assert!(matches!(remark2_check(&gamma, &t, &["1"]), Err(TdError::FamilyMismatch(_))));
        let swapped = DecompFamily::new([("1".to_string(), right_decomp()), ("2".to_string(), left_decomp())]).unwrap();
        assert!(matches!(remark2_check(&gamma, &swapped, &["1"]), Err(TdError::FamilyMismatch(_))));
    }

    #[test]
    fn boundaried_subgraph_examples() {
        let g = crate::graph::glue(&left_graph(), &right_graph()).unwrap().graph;
        let t = glue_td(&left_decomp(), &right_decomp()).unwrap();
        let whole = boundaried_subgraph(&t, &g, "t0").unwrap();
        assert_eq!(whole.len(), g.len());
        assert_eq!(whole.graph.edge_count(), g.edge_count());
        assert_eq!(whole.primary_names(), ["1", "3"]);
        let leaf = boundaried_subgraph(&t, &g, "r4").unwrap();
        assert_eq!(leaf.graph.names(), ["10", "11"]);
        // The merged node with bag (4,5) spans the right-hand part.
        let mid = boundaried_subgraph(&t, &g, "t3").unwrap();
        let names: BTreeSet<&str> = mid.graph.names().iter().map(String::as_str).collect();
        assert_eq!(names, ["10", "11", "4", "5", "8", "9"].into_iter().collect());
        assert_eq!(mid.graph.edge_count(), 5);
        assert_eq!(mid.primary_names(), ["4", "5"]);
        assert!(matches!(boundaried_subgraph(&t, &g, "zz"), Err(TdError::InvalidNode(_))));
    }

    #[test]
    fn n_length_examples() {
        // One node per bag on a single self-loop: every 𝒩 is the same.
        let g = Digraph::from_named_edges(vec!["a".into(), "b".into()], [("a", "b")]).unwrap();
        let t = TreeDecomp::path(&[vec!["a", "b"]]).unwrap();
        assert_eq!(n_length(&t, &g, &["t0"]).unwrap(), 1);
        let g = path3(false);
        let t = TreeDecomp::path(&[vec!["1", "2"], vec!["2", "3"]]).unwrap();
        assert_eq!(n_length(&t, &g, &["t0", "t1"]).unwrap(), 2);
        // Repeated bags at the bottom of a path share their 𝒩.
        let t = TreeDecomp::path(&[vec!["1", "2"], vec!["2", "3"], vec!["2", "3"], vec!["2", "3"], vec!["3", "2"]])
            .unwrap();
        let all = ["t0", "t1", "t2", "t3", "t4"];
        assert_eq!(n_length(&t, &g, &all[..4]).unwrap(), 2);
        assert_eq!(n_length(&t, &g, &all).unwrap(), 3);
        assert!(matches!(n_length(&t, &g, &["t0", "t2"]), Err(TdError::InvalidPath(_))));
    }

    #[test]
    fn validity_is_stable_under_node_reordering() {
        let g = crate::graph::glue(&left_graph(), &right_graph()).unwrap().graph;
        let t = glue_td(&left_decomp(), &right_decomp()).unwrap();
        let mut order = t.nodes().to_vec();
        order.reverse();
        assert!(is_valid_decomposition(&t.with_node_order(order).unwrap(), &g));
    }
}
