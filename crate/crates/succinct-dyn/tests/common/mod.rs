//! Helpers shared by the integration tests: small-graph enumeration up to isomorphism and
//! random paired gadget/decomposition families.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use succinct_dyn::treedec::{DecompFamily, TreeDecomp};
use succinct_dyn::{Digraph, GadgetFamily, PortedGraph};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn go(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            go(p, i + 1, out);
            p.swap(i, j);
        }
    }
    go(&mut p, 0, &mut out);
    out
}

/// Adjacency matrix of an `n`-vertex digraph packed row-major into a `u64` (`n ≤ 8`).
fn mask_of(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> u64 {
    let mut m = 0u64;
    for u in 0..n {
        for v in succ(u) {
            m |= 1 << (u * n + v);
        }
    }
    m
}

fn from_mask(n: usize, m: u64) -> Digraph {
    Digraph::from_edges(n, (0..n * n).filter(|&i| m >> i & 1 == 1).map(|i| (i / n, i % n)))
}

/// Least relabelled adjacency mask, a complete isomorphism invariant.
fn canonical(n: usize, m: u64, perms: &[Vec<usize>]) -> u64 {
    perms
        .iter()
        .map(|p| {
            let mut c = 0u64;
            for i in (0..n * n).filter(|&i| m >> i & 1 == 1) {
                c |= 1 << (p[i / n] * n + p[i % n]);
            }
            c
        })
        .min()
        .expect("at least one permutation")
}

/// One representative per isomorphism class of digraphs (loops allowed) on `n ≤ 4` vertices.
pub fn digraph_classes(n: usize) -> Vec<Digraph> {
    assert!(n <= 4);
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in 0..1u64 << (n * n) {
        if seen.insert(canonical(n, m, &perms)) {
            out.push(from_mask(n, m));
        }
    }
    out
}

/// One representative per isomorphism class of functional digraphs on `n ≤ 6` vertices.
pub fn functional_classes(n: usize) -> Vec<Digraph> {
    assert!((1..=6).contains(&n));
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let total = (n as u64).pow(n as u32);
    for code in 0..total {
        let image: Vec<usize> = (0..n).map(|i| (code / (n as u64).pow(i as u32) % n as u64) as usize).collect();
        let m = mask_of(n, |u| vec![image[u]]);
        if seen.insert(canonical(n, m, &perms)) {
            out.push(from_mask(n, m));
        }
    }
    out
}

/// A random `k`-graph with a path decomposition of uniform bag size `k` whose first bag is
/// the primary ports and whose last bag is the secondary ports. Each step replaces one bag
/// entry by a fresh vertex; edges only join vertices sharing a bag.
pub fn random_paired<R: Rng>(rng: &mut R, k: usize, steps: usize, tag: &str) -> (PortedGraph, TreeDecomp) {
    let mut names: Vec<String> = (0..k).map(|i| format!("{tag}v{i}")).collect();
    let mut bags = vec![names.clone()];
    for _ in 0..steps {
        let mut bag = bags.last().expect("nonempty").clone();
        let pos = rng.gen_range(0..k);
        let fresh = format!("{tag}v{}", names.len());
        names.push(fresh.clone());
        bag[pos] = fresh;
        if rng.gen_bool(0.5) {
            bag.shuffle(rng);
        }
        bags.push(bag);
    }
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut edges = HashSet::new();
    for bag in &bags {
        for u in bag {
            for v in bag {
                if rng.gen_bool(0.3) {
                    edges.insert((index[u.as_str()], index[v.as_str()]));
                }
            }
        }
    }
    let mut g = Digraph::with_names(names.clone()).expect("distinct names");
    for (u, v) in edges {
        g.add_edge(u, v);
    }
    let first = bags.first().expect("nonempty").clone();
    let last = bags.last().expect("nonempty").clone();
    let pg = PortedGraph::from_names(g, &first, &last).expect("ports are vertices");
    let t = TreeDecomp::path(&bags).expect("uniform bags");
    (pg, t)
}

/// A family over the symbols `a`, `b`, ... with a shared arity.
pub fn random_family<R: Rng>(rng: &mut R, symbols: usize) -> (GadgetFamily, DecompFamily) {
    let k = rng.gen_range(1..=3);
    let mut gs = Vec::new();
    let mut ts = Vec::new();
    for i in 0..symbols {
        let sym = ((b'a' + i as u8) as char).to_string();
        let steps = rng.gen_range(0..=4);
        let (g, t) = random_paired(rng, k, steps, &sym);
        gs.push((sym.clone(), g));
        ts.push((sym, t));
    }
    (GadgetFamily::new(gs).expect("same arity"), DecompFamily::new(ts).expect("same width"))
}
