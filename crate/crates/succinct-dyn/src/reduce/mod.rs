//! The metareduction compiler: from assembled gadgets `G₀..G₄` and a propositional
//! formula `S` over `s` variables, a network circuit whose dynamics is the gluing of
//! `2 · w · 4^L · 3`, where letter `w_i` of the valuation word is `0` or `1` according to
//! assignment `i`. Also the end-to-end verifier.
//!
//! Configuration space layout, in index order: `G₂`, the `2^s` valuation blocks, the
//! non-primary part of `G₃`, then the `L` padding blocks. Every block holds the non-primary
//! vertices of its gadget in rank order; ports resolve to earlier vertices.

pub mod demos;
mod ir;
mod prop;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use prop::{truth_word, PropExpr, PropFormula, MAX_VARS};

use crate::annet::{expand_dynamics, AnError, CircuitBuilder, Kind, NetworkDescriptor, Wire};
use crate::arith::{self, Padding};
use crate::graph::{delta, isomorphic, out_degree_exactly, parse_word, GraphError, PortedGraph};
use crate::logic::{evaluate, Formula};
use crate::pump::{AssembledGadgets, PumpError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("formula: {0}")]
    Formula(String),
    #[error("arithmetic infeasible: {0}")]
    ArithmeticInfeasible(String),
    #[error("invalid gadgets: {0}")]
    InvalidGadgets(String),
    #[error("mode violation: {0}")]
    ModeViolation(String),
    #[error("circuit of {size} gates exceeds the budget of {bound}")]
    BudgetExceeded { size: u128, bound: u128 },
    #[error(transparent)]
    Network(#[from] AnError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pump(#[from] PumpError),
}

/// Which letter marks satisfied assignments. With `Sat`, assignment `i` gets letter `0`
/// (gadget `G₀`) iff it satisfies `S`; with `Unsat` the word is [`truth_word`] itself, so
/// letter `0` marks falsifying assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Sat,
    Unsat,
}

impl FromStr for Orientation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sat" => Ok(Orientation::Sat),
            "unsat" => Ok(Orientation::Unsat),
            _ => Err(format!("unknown orientation {s:?}; expected sat or unsat")),
        }
    }
}

/// Target configuration space: `2^n` Boolean automata or `q^n` automata over `q` letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Boolean,
    QUniform(u64),
}

impl Mode {
    pub fn base(self) -> u64 {
        match self {
            Mode::Boolean => 2,
            Mode::QUniform(q) => q,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Boolean => write!(f, "boolean"),
            Mode::QUniform(q) => write!(f, "q:{q}"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "boolean" {
            return Ok(Mode::Boolean);
        }
        match s.strip_prefix("q:").map(str::parse::<u64>) {
            Some(Ok(q)) if q >= 2 => Ok(Mode::QUniform(q)),
            _ => Err(format!("unknown mode {s:?}; expected boolean or q:<q> with q ≥ 2")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub kind: Kind,
    pub mode: Mode,
    pub padding: Padding,
    pub orientation: Orientation,
}

/// `count` consecutive blocks of `extent` configurations starting at `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub offset: u64,
    pub extent: u64,
    pub count: u64,
}

impl Region {
    pub fn len(&self) -> u64 {
        self.extent * self.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end(&self) -> u64 {
        self.offset + self.len()
    }

    pub fn contains(&self, x: u64) -> bool {
        (self.offset..self.end()).contains(&x)
    }

    /// `(block, position)` of `x`.
    pub fn locate(&self, x: u64) -> Option<(u64, u64)> {
        self.contains(x).then(|| ((x - self.offset) / self.extent, (x - self.offset) % self.extent))
    }
}

/// Vertex counts of the five gadgets and their common arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetSizes {
    pub k: usize,
    pub g1: usize,
    pub g2: usize,
    pub g3: usize,
    pub g4: usize,
}

impl GadgetSizes {
    pub fn of(g: &AssembledGadgets) -> Self {
        Self { k: g.k(), g1: g.g1.len(), g2: g.g2.len(), g3: g.g3.len(), g4: g.g4.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub k: usize,
    pub s: u32,
    pub alpha: u64,
    pub a: u64,
    pub b: u64,
    pub g2: Region,
    pub valuation: Region,
    pub g3: Region,
    pub padding: Region,
    pub n: u32,
    pub alphabet_sizes: Vec<u64>,
    pub total: u64,
}

impl Layout {
    /// Region offsets for `2^s` valuation blocks and `padding_blocks` padding blocks.
    pub fn from_sizes(sizes: GadgetSizes, s: u32, padding_blocks: u64, alphabet_sizes: Vec<u64>) -> Self {
        let k = sizes.k as u64;
        let g2 = Region { offset: 0, extent: sizes.g2 as u64, count: 1 };
        let valuation = Region { offset: g2.end(), extent: sizes.g1 as u64 - k, count: 1 << s };
        let g3 = Region { offset: valuation.end(), extent: sizes.g3 as u64 - k, count: 1 };
        let padding = Region { offset: g3.end(), extent: sizes.g4 as u64 - k, count: padding_blocks };
        let a = sizes.g4 as u64 - k;
        Layout {
            k: sizes.k,
            s,
            alpha: valuation.extent.checked_div(a).unwrap_or(0),
            a,
            b: (sizes.g2 + sizes.g3) as u64 - k,
            g2,
            valuation,
            g3,
            padding,
            n: alphabet_sizes.len() as u32,
            alphabet_sizes,
            total: padding.end(),
        }
    }

    /// Regions in index order.
    pub fn regions(&self) -> [Region; 4] {
        [self.g2, self.valuation, self.g3, self.padding]
    }

    /// The regions tile `[0, total)`, the total matches `a(α·2^s + L) + b`, and the
    /// alphabet product.
    pub fn check_partition(&self) -> Result<(), String> {
        let mut at = 0;
        for r in self.regions() {
            if r.offset != at {
                return Err(format!("region at {} should start at {at}", r.offset));
            }
            at = r.end();
        }
        if at != self.total {
            return Err(format!("regions end at {at}, not at {}", self.total));
        }
        let formula = self.a as u128 * (self.alpha as u128 * (1u128 << self.s) + self.padding.count as u128) + self.b as u128;
        if formula != self.total as u128 {
            return Err(format!("a(α·2^s + L) + b = {formula} differs from {}", self.total));
        }
        let product = self.alphabet_sizes.iter().try_fold(1u128, |p, &q| p.checked_mul(q as u128));
        if product != Some(self.total as u128) {
            return Err(format!("alphabet product {product:?} differs from {}", self.total));
        }
        Ok(())
    }

    /// Index of configuration `x` in the gluing order `2 · w · 4^L · 3`.
    pub fn delta_index(&self, x: u64) -> u64 {
        if self.g3.contains(x) {
            x + self.padding.len()
        } else if self.padding.contains(x) {
            x - self.g3.len()
        } else {
            x
        }
    }
}

fn infeasible(e: impl fmt::Display) -> ReduceError {
    ReduceError::ArithmeticInfeasible(e.to_string())
}

/// Largest padding exponent [`Padding::Minimal`] searches.
const MINIMAL_PADDING_EXPONENT: u32 = 62;

pub fn plan_layout(g: &AssembledGadgets, s: &PropFormula, mode: Mode, padding: Padding) -> Result<Layout, ReduceError> {
    let sizes = GadgetSizes::of(g);
    let (a, b, alpha, vars) = (g.a, g.b, g.alpha, s.vars());
    if a == 0 {
        return Err(ReduceError::InvalidGadgets("G4 has no vertex beyond its ports".into()));
    }
    if g.g0.len() != g.g1.len() {
        return Err(ReduceError::InvalidGadgets(format!("|G0| = {} but |G1| = {}", g.g0.len(), g.g1.len())));
    }
    if (sizes.g1 - sizes.k) as u64 != alpha * a {
        return Err(ReduceError::InvalidGadgets(format!("|G1| − k = {} is not α·a = {}", sizes.g1 - sizes.k, alpha * a)));
    }
    let q = mode.base();
    let (l, n) = match (mode, padding) {
        (Mode::Boolean, Padding::Formula) => (
            arith::padding_boolean(a, b, alpha, vars).map_err(infeasible)?,
            arith::boolean_exponent(a, b, alpha, vars).map_err(infeasible)?,
        ),
        (Mode::QUniform(q), Padding::Formula) => {
            let (mu, _) = arith::periodicity(a, b, q)
                .ok_or_else(|| infeasible(format!("a = {a}, b = {b} admit no period in base {q}")))?;
            (
                arith::padding_q(a, b, q, mu, alpha, vars).map_err(infeasible)?,
                arith::q_exponent(a, b, q, mu, alpha, vars).map_err(infeasible)?,
            )
        }
        (_, Padding::Minimal) => arith::minimal_padding(a, b, q, alpha, vars, MINIMAL_PADDING_EXPONENT)
            .ok_or_else(|| infeasible(format!("no size a(α·2^s + L) + b is a power of {q} up to {q}^{MINIMAL_PADDING_EXPONENT}")))?,
    };
    let l = l.to_u64().ok_or_else(|| infeasible(format!("padding count {l} does not fit 64 bits")))?;
    if (q as f64).powi(n as i32) >= 2f64.powi(62) {
        return Err(infeasible(format!("{q}^{n} configurations are out of range")));
    }
    let layout = Layout::from_sizes(sizes, vars, l, vec![q; n as usize]);
    layout.check_partition().map_err(ReduceError::InvalidGadgets)?;
    Ok(layout)
}

/// A compiled reduction: the network, its layout, the word whose gluing it must realise
/// and the formula with the orientation it was compiled for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOutput {
    pub descriptor: NetworkDescriptor,
    pub layout: Layout,
    pub expected_word: String,
    pub formula: PropFormula,
    pub orientation: Orientation,
}

/// Letter of assignment `i`.
fn is_zero_letter(s: &PropFormula, orientation: Orientation, i: u64) -> bool {
    s.eval(i) == (orientation == Orientation::Sat)
}

/// `2 · w · 4^L · 3` as one character per symbol.
pub fn expected_word(s: &PropFormula, orientation: Orientation, padding_blocks: u64) -> String {
    let mut w = String::from("2");
    w.extend((0..1u64 << s.vars()).map(|i| if is_zero_letter(s, orientation, i) { '0' } else { '1' }));
    w.extend(std::iter::repeat_n('4', padding_blocks as usize));
    w.push('3');
    w
}

/// Where an edge endpoint of a repeated block sits: its own block, the previous block
/// (through a fresh port) or a fixed configuration (through a pass-through port).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum End {
    Own(u64),
    Prev(u64),
    Const(u64),
}

/// Which block type carries a template edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Carrier {
    Any,
    G0,
    G1,
}

/// Per secondary port: `Some(rank)` when it is a non-primary vertex, `None` for a
/// positional pass-through.
fn port_pattern(name: &str, g: &PortedGraph) -> Result<Vec<Option<u64>>, ReduceError> {
    let np = g.non_primary();
    let distinct: BTreeSet<usize> = g.primary_ports().iter().copied().collect();
    if distinct.len() != g.k() {
        return Err(ReduceError::ModeViolation(format!("{name} repeats a primary port")));
    }
    g.secondary_ports()
        .iter()
        .enumerate()
        .map(|(i, &v)| match np.binary_search(&v) {
            Ok(r) => Ok(Some(r as u64)),
            Err(_) if g.primary_ports()[i] == v => Ok(None),
            Err(_) => Err(ReduceError::ModeViolation(format!(
                "secondary port {i} of {name} is a primary port at another position"
            ))),
        })
        .collect()
}

/// Absolute configuration of every vertex of a gadget placed at `offset` with its primary
/// ports bound to `entry`.
fn place(g: &PortedGraph, entry: &[u64], offset: u64) -> Vec<u64> {
    let mut at = vec![0; g.len()];
    for (r, v) in g.non_primary().into_iter().enumerate() {
        at[v] = offset + r as u64;
    }
    for (i, &p) in g.primary_ports().iter().enumerate() {
        at[p] = entry[i];
    }
    at
}

/// One repeated region: blocks `1..count` follow templates, block 0 is explicit.
struct RegionPlan {
    region: Region,
    templates: BTreeSet<(Carrier, End, End)>,
    valuation: bool,
}

struct Plan {
    constant_edges: BTreeSet<(u64, u64)>,
    regions: Vec<RegionPlan>,
}

fn exit_ports(region: Region, entry: &[u64], pattern: &[Option<u64>]) -> Vec<u64> {
    if region.count == 0 {
        return entry.to_vec();
    }
    pattern
        .iter()
        .zip(entry)
        .map(|(p, &e)| match p {
            Some(r) => region.offset + (region.count - 1) * region.extent + r,
            None => e,
        })
        .collect()
}

fn classify(g: &PortedGraph, pattern: &[Option<u64>], entry: &[u64], v: usize) -> End {
    match g.primary_ports().iter().position(|&p| p == v) {
        Some(i) => match pattern[i] {
            Some(r) => End::Prev(r),
            None => End::Const(entry[i]),
        },
        None => End::Own(g.non_primary().binary_search(&v).expect("non-primary vertex") as u64),
    }
}

fn plan(g: &AssembledGadgets, layout: &Layout, s: &PropFormula, orientation: Orientation, kind: Kind) -> Result<Plan, ReduceError> {
    let p0 = port_pattern("G0", &g.g0)?;
    let p1 = port_pattern("G1", &g.g1)?;
    let p4 = port_pattern("G4", &g.g4)?;
    port_pattern("G3", &g.g3)?;
    if p0 != p1 {
        return Err(ReduceError::ModeViolation(format!("G0 and G1 place their secondary ports differently: {p0:?} vs {p1:?}")));
    }
    let mut constant_edges = BTreeSet::new();
    let mut add_explicit = |gadget: &PortedGraph, at: &[u64]| {
        for (u, v) in gadget.graph.edges() {
            constant_edges.insert((at[u], at[v]));
        }
    };
    let g2_at: Vec<u64> = (0..g.g2.len() as u64).collect();
    add_explicit(&g.g2, &g2_at);
    let val_entry: Vec<u64> = g.g2.secondary_ports().iter().map(|&p| g2_at[p]).collect();
    let first = if is_zero_letter(s, orientation, 0) { &g.g0 } else { &g.g1 };
    add_explicit(first, &place(first, &val_entry, layout.valuation.offset));
    let pad_entry = exit_ports(layout.valuation, &val_entry, &p0);
    if layout.padding.count > 0 {
        add_explicit(&g.g4, &place(&g.g4, &pad_entry, layout.padding.offset));
    }
    let g3_entry = exit_ports(layout.padding, &pad_entry, &p4);
    add_explicit(&g.g3, &place(&g.g3, &g3_entry, layout.g3.offset));

    let mut regions = Vec::new();
    type RegionRow<'a> = (Region, &'a [(Carrier, &'a PortedGraph)], &'a [Option<u64>], &'a [u64], bool);
    let rows: [RegionRow; 2] = [
        (layout.valuation, &[(Carrier::G0, &g.g0), (Carrier::G1, &g.g1)], &p0, &val_entry, true),
        (layout.padding, &[(Carrier::Any, &g.g4)], &p4, &pad_entry, false),
    ];
    for (region, gadgets, pattern, entry, valuation) in rows {
        if region.count < 2 {
            continue;
        }
        let mut per_type: Vec<BTreeSet<(End, End)>> = Vec::new();
        for (_, gadget) in gadgets {
            let es = gadget
                .graph
                .edges()
                .map(|(u, v)| (classify(gadget, pattern, entry, u), classify(gadget, pattern, entry, v)))
                .collect();
            per_type.push(es);
        }
        let mut templates = BTreeSet::new();
        for (t, (carrier, _)) in gadgets.iter().enumerate() {
            for &(u, v) in &per_type[t] {
                let everywhere = per_type.iter().all(|es| es.contains(&(u, v)));
                templates.insert((if everywhere { Carrier::Any } else { *carrier }, u, v));
            }
        }
        let mut kept = BTreeSet::new();
        for (carrier, u, v) in templates {
            match (u, v) {
                (End::Const(x), End::Const(y)) if carrier == Carrier::Any => {
                    constant_edges.insert((x, y));
                }
                (End::Const(_), End::Const(_)) => {
                    return Err(ReduceError::ModeViolation(
                        "an edge between pass-through ports occurs in only one of G0 and G1".into(),
                    ))
                }
                (End::Const(_), _) if kind == Kind::Deterministic => {
                    return Err(ReduceError::ModeViolation(
                        "a pass-through port of a repeated gadget has an out-edge, so gluing breaks determinism".into(),
                    ))
                }
                _ => {
                    kept.insert((carrier, u, v));
                }
            }
        }
        regions.push(RegionPlan { region, templates: kept, valuation });
    }
    Ok(Plan { constant_edges, regions })
}

/// Deterministic mode: short words exercising every adjacent pair of gadget types glue to
/// functional graphs.
fn check_functional_gluing(g: &AssembledGadgets, layout: &Layout) -> Result<(), ReduceError> {
    let family = g.family();
    let blocks = layout.valuation.count.min(3) as usize;
    let pads = layout.padding.count.min(2) as usize;
    for len in blocks.min(2)..=blocks {
        for mask in 0..1usize << len {
            let mut word = vec!["2".to_string()];
            word.extend((0..len).map(|i| (mask >> i & 1).to_string()));
            word.extend(std::iter::repeat_n("4".to_string(), pads));
            word.push("3".into());
            let glued = delta(&family, &word)?;
            if !out_degree_exactly(&glued.graph, 1) {
                return Err(ReduceError::ModeViolation(format!(
                    "gluing {} is not functional, so no deterministic network realises it",
                    word.concat()
                )));
            }
        }
    }
    Ok(())
}

fn lower_prop(b: &mut CircuitBuilder, e: &PropExpr, bits: &[Wire]) -> Wire {
    match e {
        PropExpr::Var(i) => bits.get(i - 1).copied().unwrap_or_else(|| b.constant(false)),
        PropExpr::Not(a) => {
            let x = lower_prop(b, a, bits);
            b.not(x)
        }
        PropExpr::And(l, r) => {
            let (x, y) = (lower_prop(b, l, bits), lower_prop(b, r, bits));
            b.and(x, y)
        }
        PropExpr::Or(l, r) => {
            let (x, y) = (lower_prop(b, l, bits), lower_prop(b, r, bits));
            b.or(x, y)
        }
    }
}

/// A word decoded against one region.
struct Located {
    inside: Wire,
    block: Vec<Wire>,
    pos: Vec<Wire>,
    zero_here: Option<Wire>,
    zero_next: Option<Wire>,
}

struct Lowering<'a> {
    b: CircuitBuilder,
    s: &'a PropFormula,
    orientation: Orientation,
}

impl Lowering<'_> {
    fn locate(&mut self, x: &[Wire], region: Region) -> Located {
        let b = &mut self.b;
        let (d, below) = ir::sub_const(b, x, region.offset);
        let (block, pos) = ir::divmod_const(b, &d, region.extent);
        let fits = ir::lt_const(b, &block, region.count);
        let above = b.not(below);
        let inside = b.and(above, fits);
        Located { inside, block, pos, zero_here: None, zero_next: None }
    }

    /// Whether the block carries letter `0`.
    fn zero_letter(&mut self, block: &[Wire]) -> Wire {
        let sat = lower_prop(&mut self.b, self.s.expr(), block);
        match self.orientation {
            Orientation::Sat => sat,
            Orientation::Unsat => self.b.not(sat),
        }
    }

    fn carrier_at(&mut self, loc: &mut Located, next: bool, carrier: Carrier) -> Wire {
        if carrier == Carrier::Any {
            return self.b.constant(true);
        }
        let zero = if next {
            match loc.zero_next {
                Some(w) => w,
                None => {
                    let succ = ir::add_const(&mut self.b, &loc.block, 1);
                    let w = self.zero_letter(&succ);
                    loc.zero_next = Some(w);
                    w
                }
            }
        } else {
            match loc.zero_here {
                Some(w) => w,
                None => {
                    let block = loc.block.clone();
                    let w = self.zero_letter(&block);
                    loc.zero_here = Some(w);
                    w
                }
            }
        };
        if carrier == Carrier::G0 {
            zero
        } else {
            self.b.not(zero)
        }
    }

    /// `x` sits at rank `r` of a template block whose carrier matches: its own block when
    /// `via_prev` is false, the next block otherwise.
    fn source_condition(&mut self, loc: &mut Located, region: Region, r: u64, via_prev: bool, carrier: Carrier) -> Wire {
        let at_rank = ir::eq_const(&mut self.b, &loc.pos, r);
        let edge_block = if via_prev { region.count - 1 } else { 0 };
        let excluded = ir::eq_const(&mut self.b, &loc.block, edge_block);
        let allowed = self.b.not(excluded);
        let typed = self.carrier_at(loc, via_prev, carrier);
        self.b.and_many(&[loc.inside, at_rank, allowed, typed])
    }
}

/// Target of a template edge as a function of the source configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Target {
    Shift(i64),
    Fixed(u64),
}

fn target_of(src: End, dst: End, extent: u64) -> Target {
    let base: i64 = match src {
        End::Own(r) => -(r as i64),
        End::Prev(r) => extent as i64 - r as i64,
        End::Const(_) => unreachable!("constant sources are handled on the target side"),
    };
    match dst {
        End::Own(r) => Target::Shift(base + r as i64),
        End::Prev(r) => Target::Shift(base - extent as i64 + r as i64),
        End::Const(c) => Target::Fixed(c),
    }
}

fn target_word(b: &mut CircuitBuilder, x: &[Wire], t: Target) -> Vec<Wire> {
    match t {
        Target::Shift(d) => ir::add_const(b, x, d),
        Target::Fixed(c) => ir::constant(b, c, x.len()),
    }
}

/// Compiles against a caller-supplied layout without checking it; [`compile_reduction`]
/// is the checked entry point.
pub fn compile_with_layout(
    g: &AssembledGadgets,
    s: &PropFormula,
    settings: Settings,
    layout: Layout,
) -> Result<ReductionOutput, ReduceError> {
    let plan = plan(g, &layout, s, settings.orientation, settings.kind)?;
    let w = crate::annet::bit_width(layout.total);
    let inputs = match settings.kind {
        Kind::Deterministic => w,
        Kind::Nondeterministic => 2 * w,
    };
    let mut lo = Lowering { b: CircuitBuilder::new(inputs), s, orientation: settings.orientation };
    let x = ir::input_word(&mut lo.b, 0, w);

    // Conditions on x grouped by the target they select.
    let mut by_target: BTreeMap<Target, Vec<Wire>> = BTreeMap::new();
    // Conditions on y grouped by the fixed source they need (nondeterministic only).
    let mut by_source: BTreeMap<u64, Vec<Wire>> = BTreeMap::new();
    for &(u, v) in &plan.constant_edges {
        let at = ir::eq_const(&mut lo.b, &x, u);
        by_target.entry(Target::Fixed(v)).or_default().push(at);
    }
    let y = (settings.kind == Kind::Nondeterministic).then(|| ir::input_word(&mut lo.b, w, w));
    for rp in &plan.regions {
        let region = rp.region;
        let mut lx = lo.locate(&x, region);
        let mut ly = y.as_ref().map(|y| lo.locate(y, region));
        for &(carrier, u, v) in &rp.templates {
            let carrier = if rp.valuation { carrier } else { Carrier::Any };
            match u {
                End::Own(r) | End::Prev(r) => {
                    let cond = lo.source_condition(&mut lx, region, r, matches!(u, End::Prev(_)), carrier);
                    by_target.entry(target_of(u, v, region.extent)).or_default().push(cond);
                }
                End::Const(c) => {
                    let ly = ly.as_mut().expect("deterministic plans have no constant sources");
                    let cond = match v {
                        End::Own(r) => lo.source_condition(ly, region, r, false, carrier),
                        End::Prev(r) => lo.source_condition(ly, region, r, true, carrier),
                        End::Const(_) => unreachable!("constant pairs were folded into the edge list"),
                    };
                    by_source.entry(c).or_default().push(cond);
                }
            }
        }
    }

    let outputs = match &y {
        None => {
            let mut out = Vec::new();
            let mut terms: Vec<(Wire, Vec<Wire>)> = Vec::new();
            for (t, conds) in &by_target {
                let c = lo.b.or_many(conds);
                let value = target_word(&mut lo.b, &x, *t);
                terms.push((c, value));
            }
            for j in 0..w {
                let bits: Vec<Wire> = terms.iter().map(|(c, v)| lo.b.and(*c, v[j])).collect();
                out.push(lo.b.or_many(&bits));
            }
            out
        }
        Some(y) => {
            let mut any = Vec::new();
            for (t, conds) in &by_target {
                let c = lo.b.or_many(conds);
                let value = target_word(&mut lo.b, &x, *t);
                let hit = ir::eq(&mut lo.b, y, &value);
                any.push(lo.b.and(c, hit));
            }
            for (src, conds) in &by_source {
                let c = lo.b.or_many(conds);
                let at = ir::eq_const(&mut lo.b, &x, *src);
                any.push(lo.b.and(c, at));
            }
            vec![lo.b.or_many(&any)]
        }
    };
    let circuit = lo.b.finish(&outputs);
    let descriptor = NetworkDescriptor::new(settings.kind, &layout.alphabet_sizes, circuit).map_err(|e| match e {
        AnError::SizeBoundExceeded { size, bound } => ReduceError::BudgetExceeded { size, bound },
        e => ReduceError::Network(e),
    })?;
    Ok(ReductionOutput {
        descriptor,
        expected_word: expected_word(s, settings.orientation, layout.padding.count),
        layout,
        formula: s.clone(),
        orientation: settings.orientation,
    })
}

/// Builds the network whose dynamics is the gluing of [`expected_word`].
pub fn compile_reduction(g: &AssembledGadgets, s: &PropFormula, settings: Settings) -> Result<ReductionOutput, ReduceError> {
    let layout = plan_layout(g, s, settings.mode, settings.padding)?;
    if settings.kind == Kind::Deterministic {
        check_functional_gluing(g, &layout)?;
    }
    compile_with_layout(g, s, settings, layout)
}

/// Outcome of [`verify_reduction`]; failures are recorded, not raised.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub orientation: Orientation,
    /// (i) the expanded dynamics is isomorphic to the glued word.
    pub dynamics_match: bool,
    /// The match holds under the layout's index map, not just up to isomorphism.
    pub index_exact: bool,
    pub psi_value: Option<bool>,
    pub contains_zero: bool,
    /// (ii) `ψ` holds on the dynamics iff the word contains letter `0`.
    pub psi_agrees: bool,
    /// `S` is satisfiable (`Sat`) or falsifiable (`Unsat`).
    pub witness_exists: bool,
    /// (iii) brute force agrees with the word.
    pub orientation_agrees: bool,
    pub errors: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.dynamics_match && self.psi_agrees && self.orientation_agrees && self.errors.is_empty()
    }
}

pub fn verify_reduction(out: &ReductionOutput, g: &AssembledGadgets, psi: &Formula) -> VerifyReport {
    let mut errors = Vec::new();
    let contains_zero = out.expected_word[1..out.expected_word.len().saturating_sub(1)].contains('0');
    let witness_exists = match out.orientation {
        Orientation::Sat => out.formula.is_satisfiable(),
        Orientation::Unsat => !out.formula.is_tautology(),
    };
    let dynamics = expand_dynamics(&out.descriptor).map_err(|e| errors.push(format!("expansion: {e}"))).ok();
    let glued = delta(&g.family(), &parse_word(&out.expected_word)).map_err(|e| errors.push(format!("gluing: {e}"))).ok();
    let (mut dynamics_match, mut index_exact) = (false, false);
    if let (Some(d), Some(h)) = (&dynamics, &glued) {
        if d.len() == h.len() {
            let perm: Vec<usize> = (0..d.len() as u64).map(|x| out.layout.delta_index(x) as usize).collect();
            let is_perm = perm.iter().collect::<BTreeSet<_>>().len() == perm.len() && perm.iter().all(|&p| p < d.len());
            index_exact = is_perm && d.relabel(&perm).same_indexed_edges(&h.graph);
        }
        dynamics_match = index_exact
            || isomorphic(d, &h.graph).unwrap_or_else(|e| {
                errors.push(format!("isomorphism: {e}"));
                false
            });
    }
    let psi_value = dynamics.as_ref().and_then(|d| evaluate(psi, d).map_err(|e| errors.push(format!("evaluation: {e}"))).ok());
    VerifyReport {
        orientation: out.orientation,
        dynamics_match,
        index_exact,
        psi_value,
        contains_zero,
        psi_agrees: psi_value == Some(contains_zero),
        witness_exists,
        orientation_agrees: witness_exists == contains_zero,
        errors,
    }
}

#[derive(Serialize, Deserialize)]
struct PropJson {
    vars: u32,
    expr: String,
}

impl Serialize for PropFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PropJson { vars: self.vars(), expr: self.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PropFormula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PropJson::deserialize(d)?;
        PropFormula::parse(&raw.expr, Some(raw.vars)).map_err(serde::de::Error::custom)
    }
}
