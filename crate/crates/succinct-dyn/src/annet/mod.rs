//! Circuit-encoded automata networks: configurations, descriptors, one-step semantics,
//! expansion of the dynamics and the lookup-table construction of a network from a graph.
//!
//! Conventions: automaton 1 is the least significant mixed-radix digit of a configuration
//! index; a configuration is fed to a circuit as `⌈log₂|X|⌉` little-endian bits, and a
//! non-deterministic circuit reads the bits of `x` followed by those of `y`.

mod circuit;
mod lookup;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Digraph;
use crate::par::{self, Exec};

pub use circuit::{eval_circuit, Circuit, CircuitBuilder, Gate, Op, Wire};
pub use lookup::lookup_table_network;

/// Default constant in the gate budgets `C·|X|·⌈log₂|X|⌉` and `C·|X|²`.
pub const DEFAULT_BUDGET_CONSTANT: u128 = 64;
/// Default largest configuration space that [`expand_dynamics`] enumerates.
pub const DEFAULT_EXPANSION_BOUND: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnError {
    #[error("expected {expected} input bits, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("operation needs a {0} network")]
    KindMismatch(Kind),
    #[error("configuration {index} outside [0, {size})")]
    ConfigOutOfRange { index: u64, size: u64 },
    #[error("graph has {graph} vertices but the alphabets give {space} configurations")]
    SizeMismatch { graph: usize, space: u64 },
    #[error("size {size} exceeds the bound {bound}")]
    SizeBoundExceeded { size: u128, bound: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Deterministic,
    Nondeterministic,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Deterministic => "deterministic",
            Kind::Nondeterministic => "nondeterministic",
        })
    }
}

/// Bits needed for indices in `[0, size)`.
pub fn bit_width(size: u64) -> usize {
    (64 - size.saturating_sub(1).leading_zeros()) as usize
}

/// The product of the alphabets, with mixed-radix conversions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSpace {
    sizes: Vec<u64>,
    total: u64,
}

impl ConfigSpace {
    pub fn new(sizes: &[u64]) -> Result<Self, AnError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(AnError::InvalidDescriptor("alphabet sizes must be positive and nonempty".into()));
        }
        let total = sizes.iter().try_fold(1u64, |acc, &q| acc.checked_mul(q)).ok_or(AnError::SizeBoundExceeded {
            size: sizes.iter().map(|&q| q as u128).fold(1u128, u128::saturating_mul),
            bound: u64::MAX as u128,
        })?;
        Ok(Self { sizes: sizes.to_vec(), total })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> usize {
        bit_width(self.total)
    }

    /// Digits of `index`, automaton 1 first.
    pub fn decode(&self, index: u64) -> Result<Vec<u64>, AnError> {
        if index >= self.total {
            return Err(AnError::ConfigOutOfRange { index, size: self.total });
        }
        let mut rest = index;
        Ok(self
            .sizes
            .iter()
            .map(|&q| {
                let d = rest % q;
                rest /= q;
                d
            })
            .collect())
    }

    pub fn encode(&self, digits: &[u64]) -> Result<u64, AnError> {
        if digits.len() != self.sizes.len() || digits.iter().zip(&self.sizes).any(|(d, q)| d >= q) {
            return Err(AnError::InvalidDescriptor(format!("{digits:?} is not a configuration of {:?}", self.sizes)));
        }
        Ok(digits.iter().zip(&self.sizes).rev().fold(0u64, |acc, (&d, &q)| acc * q + d))
    }
}

/// An AN (`deterministic`) or NAN (`nondeterministic`) given by its circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DescriptorJson", into = "DescriptorJson")]
pub struct NetworkDescriptor {
    kind: Kind,
    space: ConfigSpace,
    circuit: Circuit,
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    kind: Kind,
    alphabet_sizes: Vec<u64>,
    circuit: Circuit,
}

impl TryFrom<DescriptorJson> for NetworkDescriptor {
    type Error = AnError;
    fn try_from(raw: DescriptorJson) -> Result<Self, AnError> {
        NetworkDescriptor::new(raw.kind, &raw.alphabet_sizes, raw.circuit)
    }
}

impl From<NetworkDescriptor> for DescriptorJson {
    fn from(d: NetworkDescriptor) -> Self {
        DescriptorJson { kind: d.kind, alphabet_sizes: d.space.sizes, circuit: d.circuit }
    }
}

impl NetworkDescriptor {
    /// Checks the bit widths and the default gate budget.
    pub fn new(kind: Kind, alphabet_sizes: &[u64], circuit: Circuit) -> Result<Self, AnError> {
        Self::with_budget(kind, alphabet_sizes, circuit, DEFAULT_BUDGET_CONSTANT)
    }

    pub fn with_budget(kind: Kind, alphabet_sizes: &[u64], circuit: Circuit, c: u128) -> Result<Self, AnError> {
        let space = ConfigSpace::new(alphabet_sizes)?;
        let w = space.bits();
        let (ins, outs) = match kind {
            Kind::Deterministic => (w, w),
            Kind::Nondeterministic => (2 * w, 1),
        };
        if circuit.input_count() != ins || circuit.output_count() != outs {
            return Err(AnError::InvalidDescriptor(format!(
                "a {kind} network on {} configurations needs {ins} inputs and {outs} outputs, the circuit has {} and {}",
                space.len(),
                circuit.input_count(),
                circuit.output_count()
            )));
        }
        let bound = budget(kind, space.len(), c);
        if circuit.gate_count() as u128 > bound {
            return Err(AnError::SizeBoundExceeded { size: circuit.gate_count() as u128, bound });
        }
        Ok(Self { kind, space, circuit })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn alphabet_sizes(&self) -> &[u64] {
        self.space.sizes()
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Number of automata.
    pub fn n(&self) -> usize {
        self.space.sizes().len()
    }

    fn check_config(&self, x: u64) -> Result<(), AnError> {
        if x >= self.space.len() {
            return Err(AnError::ConfigOutOfRange { index: x, size: self.space.len() });
        }
        Ok(())
    }
}

/// Gate budget for a network of `kind` on `size` configurations.
pub fn budget(kind: Kind, size: u64, c: u128) -> u128 {
    let size = size as u128;
    match kind {
        Kind::Deterministic => c * size * bit_width(size as u64) as u128,
        Kind::Nondeterministic => c * size * size,
    }
}

fn bits_of(x: u64, w: usize) -> Vec<bool> {
    (0..w).map(|i| x >> i & 1 == 1).collect()
}

/// Image of `x`: the circuit's output read as a number, modulo `|X|`.
pub fn step(d: &NetworkDescriptor, x: u64) -> Result<u64, AnError> {
    if d.kind != Kind::Deterministic {
        return Err(AnError::KindMismatch(Kind::Deterministic));
    }
    d.check_config(x)?;
    let out = eval_circuit(&d.circuit, &bits_of(x, d.space.bits()))?;
    Ok(read_number(out.iter().map(|&b| b as u64), d.space.len()))
}

/// Little-endian bits to a number modulo `modulus`, exact for any output width.
fn read_number(bits: impl DoubleEndedIterator<Item = u64>, modulus: u64) -> u64 {
    let m = modulus as u128;
    bits.rev().fold(0u128, |acc, b| (acc * 2 + b as u128) % m) as u64
}

/// Whether `y ∈ f(x)`.
pub fn adjacent(d: &NetworkDescriptor, x: u64, y: u64) -> Result<bool, AnError> {
    if d.kind != Kind::Nondeterministic {
        return Err(AnError::KindMismatch(Kind::Nondeterministic));
    }
    d.check_config(x)?;
    d.check_config(y)?;
    let w = d.space.bits();
    let mut bits = bits_of(x, w);
    bits.extend(bits_of(y, w));
    Ok(eval_circuit(&d.circuit, &bits)?[0])
}

pub fn expand_dynamics(d: &NetworkDescriptor) -> Result<Digraph, AnError> {
    expand_dynamics_with(d, Exec::default(), DEFAULT_EXPANSION_BOUND)
}

/// Enumerates the dynamics 64 configurations at a time.
pub fn expand_dynamics_with(d: &NetworkDescriptor, exec: Exec, bound: u64) -> Result<Digraph, AnError> {
    let size = d.space.len();
    if size > bound {
        return Err(AnError::SizeBoundExceeded { size: size as u128, bound: bound as u128 });
    }
    let w = d.space.bits();
    let chunks = size.div_ceil(64) as usize;
    // Lane word for bit `j` of the configurations `base..base+64`.
    let lane_words = |base: u64| -> Vec<u64> {
        (0..w)
            .map(|j| (0..64u64).filter(|&l| (base + l) >> j & 1 == 1).fold(0u64, |acc, l| acc | 1 << l))
            .collect()
    };
    let edges: Vec<Vec<(usize, usize)>> = match d.kind {
        Kind::Deterministic => par::map_range(exec, chunks, |c| {
            let base = c as u64 * 64;
            let out = d.circuit.eval_words(&lane_words(base)).expect("descriptor arity checked");
            (0..64u64.min(size - base))
                .map(|l| {
                    let y = read_number(out.iter().map(|o| o >> l & 1), size);
                    ((base + l) as usize, y as usize)
                })
                .collect()
        }),
        Kind::Nondeterministic => par::map_range(exec, size as usize, |x| {
            let mut found = Vec::new();
            for c in 0..chunks {
                let base = c as u64 * 64;
                let mut words: Vec<u64> = (0..w).map(|j| if x >> j & 1 == 1 { !0 } else { 0 }).collect();
                words.extend(lane_words(base));
                let out = d.circuit.eval_words(&words).expect("descriptor arity checked")[0];
                for l in 0..64u64.min(size - base) {
                    if out >> l & 1 == 1 {
                        found.push((x, (base + l) as usize));
                    }
                }
            }
            found
        }),
    };
    Ok(Digraph::from_edges(size as usize, edges.into_iter().flatten()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{isomorphic, out_degree_exactly};
    use crate::logic::{chi, evaluate};

    fn gate(id: u64, op: Op, args: &[u64]) -> Gate {
        Gate { id, op, args: args.to_vec() }
    }

    fn identity(w: usize) -> Circuit {
        Circuit::new(w, (0..w as u64).map(|i| gate(i, Op::Input, &[i])).collect(), (0..w as u64).collect()).unwrap()
    }

    /// Two-bit `x + 1` (no carry out).
    fn increment() -> Circuit {
        Circuit::new(
            2,
            vec![
                gate(0, Op::Input, &[0]),
                gate(1, Op::Input, &[1]),
                gate(2, Op::Not, &[0]),
                gate(3, Op::Xor, &[0, 1]),
            ],
            vec![2, 3],
        )
        .unwrap()
    }

    #[test]
    fn codec_round_trips() {
        let s = ConfigSpace::new(&[3, 2, 4]).unwrap();
        assert_eq!(s.len(), 24);
        assert_eq!(s.decode(1).unwrap(), vec![1, 0, 0]);
        assert_eq!(s.decode(3).unwrap(), vec![0, 1, 0]);
        for x in 0..24 {
            assert_eq!(s.encode(&s.decode(x).unwrap()).unwrap(), x);
        }
        assert!(s.decode(24).is_err());
        assert_eq!(bit_width(1), 0);
        assert_eq!(bit_width(2), 1);
        assert_eq!(bit_width(9), 4);
        assert_eq!(bit_width(16), 4);
    }

    #[test]
    fn step_examples() {
        let d = NetworkDescriptor::new(Kind::Deterministic, &[2, 2], identity(2)).unwrap();
        for x in 0..4 {
            assert_eq!(step(&d, x).unwrap(), x);
        }
        // Constant output 3 on a 3-configuration space wraps to 0.
        let three = Circuit::new(2, vec![gate(0, Op::Const1, &[])], vec![0, 0]).unwrap();
        let d = NetworkDescriptor::new(Kind::Deterministic, &[3], three).unwrap();
        assert!((0..3).all(|x| step(&d, x).unwrap() == 0));
        let d = NetworkDescriptor::new(Kind::Deterministic, &[3], increment()).unwrap();
        assert_eq!((0..3).map(|x| step(&d, x).unwrap()).collect::<Vec<_>>(), vec![1, 2, 0]);
        assert!(matches!(adjacent(&d, 0, 0), Err(AnError::KindMismatch(_))));
        assert!(matches!(step(&d, 3), Err(AnError::ConfigOutOfRange { .. })));
    }

    #[test]
    fn adjacent_examples() {
        let one = Circuit::new(4, vec![gate(0, Op::Const1, &[])], vec![0]).unwrap();
        let d = NetworkDescriptor::new(Kind::Nondeterministic, &[2, 2], one).unwrap();
        assert!(adjacent(&d, 1, 3).unwrap());
        assert_eq!(expand_dynamics(&d).unwrap().edge_count(), 16);
        let zero = Circuit::new(4, vec![gate(0, Op::Const0, &[])], vec![0]).unwrap();
        let d = NetworkDescriptor::new(Kind::Nondeterministic, &[2, 2], zero).unwrap();
        assert_eq!(expand_dynamics(&d).unwrap().edge_count(), 0);
        assert!(matches!(step(&d, 0), Err(AnError::KindMismatch(_))));
    }

    #[test]
    fn expand_examples() {
        let d = NetworkDescriptor::new(Kind::Deterministic, &[2, 2], identity(2)).unwrap();
        let g = expand_dynamics(&d).unwrap();
        assert!((0..4).all(|v| g.succ(v) == [v]));
        let d = NetworkDescriptor::new(Kind::Deterministic, &[3], increment()).unwrap();
        let g = expand_dynamics(&d).unwrap();
        assert!(isomorphic(&g, &Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)])).unwrap());
        assert!(evaluate(&chi(), &g).unwrap());
    }

    #[test]
    fn descriptor_validation() {
        assert!(NetworkDescriptor::new(Kind::Deterministic, &[2, 2], identity(3)).is_err());
        assert!(NetworkDescriptor::new(Kind::Nondeterministic, &[2, 2], identity(2)).is_err());
        assert!(NetworkDescriptor::new(Kind::Deterministic, &[0], identity(0)).is_err());
        // A one-configuration AN has no bits and no room for gates.
        let empty = Circuit::new(0, Vec::new(), Vec::new()).unwrap();
        let d = NetworkDescriptor::new(Kind::Deterministic, &[1], empty).unwrap();
        assert_eq!(expand_dynamics(&d).unwrap().edge_count(), 1);
        let mut b = CircuitBuilder::new(1);
        let mut w = b.input(0);
        for _ in 0..200 {
            let nw = b.not(w);
            let x = b.xor(nw, w);
            w = b.xor(x, w);
        }
        let c = b.finish(&[w]);
        assert!(c.gate_count() > 128);
        let err = NetworkDescriptor::new(Kind::Deterministic, &[2], c).unwrap_err();
        assert!(matches!(err, AnError::SizeBoundExceeded { bound: 128, .. }));
    }

    #[test]
    fn expansion_modes_agree_and_stay_functional() {
        let c = increment();
        let d = NetworkDescriptor::new(Kind::Deterministic, &[2, 2], c).unwrap();
        let a = expand_dynamics_with(&d, Exec::Sequential, 16).unwrap();
        let b = expand_dynamics_with(&d, Exec::Parallel, 16).unwrap();
        assert!(a.same_as(&b));
        assert!(out_degree_exactly(&a, 1));
        assert!(matches!(expand_dynamics_with(&d, Exec::Sequential, 3), Err(AnError::SizeBoundExceeded { .. })));
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = NetworkDescriptor::new(Kind::Deterministic, &[3], increment()).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.starts_with(r#"{"kind":"deterministic","alphabet_sizes":[3],"circuit":"#));
        let back: NetworkDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }
}
