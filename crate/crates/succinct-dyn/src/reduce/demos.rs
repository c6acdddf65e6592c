//! Built-in gadget families for end-to-end runs of the compiler.

use std::fmt;
use std::str::FromStr;

use super::{Mode, Orientation, PropFormula, ReduceError, Settings};
use crate::annet::Kind;
use crate::arith::Padding;
use crate::graph::{Digraph, PortedGraph};
use crate::logic::{chi, fixed_point, strongly_connected, Formula};
use crate::pump::{assemble_gadgets, find_pump_multi, fixtures, AssembledGadgets, ContextFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Demo {
    /// Per valuation a loop-ended path (`G₀`) or a 2-cycle (`G₁`); `ψ` asks for a fixed point.
    FixedPoint,
    /// A centre joined to one spoke per valuation, both ways for `G₁`, outwards only for
    /// `G₀`; `ψ` says the dynamics is not strongly connected.
    Tautology,
    /// Gadgets assembled from the pump found in the shipped chain fixture.
    Pumped,
    /// The fixed-point pattern over a 3-uniform space with a nine-vertex prefix.
    QUniform,
}

impl Demo {
    pub const ALL: [Demo; 4] = [Demo::FixedPoint, Demo::Tautology, Demo::Pumped, Demo::QUniform];

    pub fn name(self) -> &'static str {
        match self {
            Demo::FixedPoint => "fixed-point",
            Demo::Tautology => "tautology",
            Demo::Pumped => "pumped",
            Demo::QUniform => "q-uniform",
        }
    }

    pub fn gadgets(self) -> Result<AssembledGadgets, ReduceError> {
        match self {
            Demo::FixedPoint => fixed_point_gadgets(PortedGraph::unported(Digraph::empty(0))),
            Demo::QUniform => {
                let cycles = (0..3).flat_map(|c| (0..3).map(move |i| (3 * c + i, 3 * c + (i + 1) % 3)));
                fixed_point_gadgets(PortedGraph::unported(Digraph::from_edges(9, cycles)))
            }
            Demo::Tautology => tautology_gadgets(),
            Demo::Pumped => pumped_gadgets(),
        }
    }

    /// The formula whose truth on the dynamics marks letter `0`.
    pub fn psi(self) -> Formula {
        match self {
            Demo::Tautology => strongly_connected().not(),
            _ => fixed_point(),
        }
    }

    pub fn settings(self) -> Settings {
        let (kind, mode, padding, orientation) = match self {
            Demo::FixedPoint => (Kind::Deterministic, Mode::Boolean, Padding::Formula, Orientation::Sat),
            Demo::Tautology => (Kind::Nondeterministic, Mode::QUniform(3), Padding::Minimal, Orientation::Unsat),
            Demo::Pumped => (Kind::Deterministic, Mode::Boolean, Padding::Formula, Orientation::Sat),
            Demo::QUniform => (Kind::Deterministic, Mode::QUniform(3), Padding::Formula, Orientation::Sat),
        };
        Settings { kind, mode, padding, orientation }
    }

    /// A representative `S` at the variable count the demo is usually shown with.
    pub fn default_formula(self) -> PropFormula {
        let (text, vars) = match self {
            Demo::FixedPoint => ("(x1 | x2) & (!x1 | !x2) & x3", 3),
            Demo::Tautology => ("x1 | !x2 | x3", 3),
            Demo::Pumped => ("x1 & !x2", 2),
            Demo::QUniform => ("x1", 1),
        };
        PropFormula::parse(text, Some(vars)).expect("demo formula")
    }
}

impl fmt::Display for Demo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Demo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Demo::ALL.into_iter().find(|d| d.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Demo::ALL.iter().map(|d| d.name()).collect();
            format!("unknown demo {s:?}; expected one of {}", names.join(", "))
        })
    }
}

fn named(names: &[&str], edges: &[(&str, &str)]) -> Digraph {
    Digraph::from_named_edges(names.iter().map(|s| s.to_string()).collect(), edges.iter().copied())
        .expect("demo graph")
}

/// `k = 0`: `G₀ = a → b ↺`, `G₁ = G₄` a 2-cycle, `G₃` empty.
fn fixed_point_gadgets(g2: PortedGraph) -> Result<AssembledGadgets, ReduceError> {
    let g0 = PortedGraph::unported(named(&["a", "b"], &[("a", "b"), ("b", "b")]));
    let g1 = PortedGraph::unported(named(&["c", "d"], &[("c", "d"), ("d", "c")]));
    let g3 = PortedGraph::unported(Digraph::empty(0));
    Ok(AssembledGadgets::new(g0, g1.clone(), g2, g3, g1, 1)?)
}

fn tautology_gadgets() -> Result<AssembledGadgets, ReduceError> {
    let spoke = |edges: &[(&str, &str)]| PortedGraph::from_names(named(&["p", "u"], edges), &["p"], &["p"]);
    let g0 = spoke(&[("p", "u")])?;
    let g1 = spoke(&[("p", "u"), ("u", "p")])?;
    let g2 = PortedGraph::from_names(named(&["c"], &[]), &["c"], &["c"])?;
    let g3 = PortedGraph::from_names(named(&["p"], &[]), &["p"], &["p"])?;
    Ok(AssembledGadgets::new(g0, g1.clone(), g2, g3, g1, 1)?)
}

fn pumped_gadgets() -> Result<AssembledGadgets, ReduceError> {
    let (model, t) = (fixtures::chain_model(), fixtures::chain_decomp());
    let ctx = ContextFamily::exhaustive(2, 1);
    let triple = find_pump_multi(&model, &t, &[fixtures::chain_psi(), chi()], &ctx)?
        .ok_or_else(|| ReduceError::InvalidGadgets("the chain fixture has no pump".into()))?;
    let omega = Digraph::from_edges(1, [(0, 0)]);
    Ok(assemble_gadgets(&triple, &omega, Some(2))?)
}
