//! Boolean gate DAGs: validation, scalar and 64-lane evaluation, and a hash-consing builder.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::AnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Op {
    And,
    Or,
    Not,
    Xor,
    Const0,
    Const1,
    Input,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: u64,
    pub op: Op,
    /// Argument gate ids; for `INPUT` the single input bit position.
    pub args: Vec<u64>,
}

/// Gates in definition order; every argument refers to an earlier gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircuitJson", into = "CircuitJson")]
pub struct Circuit {
    inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<u64>,
    // Positions of arguments and outputs in `gates`.
    args_at: Vec<Vec<usize>>,
    outputs_at: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<u64>,
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = AnError;
    fn try_from(raw: CircuitJson) -> Result<Self, AnError> {
        Circuit::new(raw.inputs, raw.gates, raw.outputs)
    }
}

impl From<Circuit> for CircuitJson {
    fn from(c: Circuit) -> Self {
        CircuitJson { inputs: c.inputs, gates: c.gates, outputs: c.outputs }
    }
}

impl Circuit {
    pub fn new(inputs: usize, gates: Vec<Gate>, outputs: Vec<u64>) -> Result<Self, AnError> {
        let bad = |msg: String| AnError::InvalidCircuit(msg);
        let mut pos: HashMap<u64, usize> = HashMap::with_capacity(gates.len());
        let mut args_at = Vec::with_capacity(gates.len());
        for (i, g) in gates.iter().enumerate() {
            let arity_ok = match g.op {
                Op::And | Op::Or | Op::Xor => !g.args.is_empty(),
                Op::Not => g.args.len() == 1,
                Op::Const0 | Op::Const1 => g.args.is_empty(),
                Op::Input => g.args.len() == 1,
            };
            if !arity_ok {
                return Err(bad(format!("gate {} has {} arguments for {:?}", g.id, g.args.len(), g.op)));
            }
            if g.op == Op::Input {
                if g.args[0] as usize >= inputs {
                    return Err(bad(format!("gate {} reads input bit {} of {inputs}", g.id, g.args[0])));
                }
                args_at.push(vec![g.args[0] as usize]);
            } else {
                let at = g
                    .args
                    .iter()
                    .map(|a| pos.get(a).copied().ok_or_else(|| bad(format!("gate {} uses undefined gate {a}", g.id))))
                    .collect::<Result<Vec<_>, _>>()?;
                args_at.push(at);
            }
            if pos.insert(g.id, i).is_some() {
                return Err(bad(format!("gate id {} defined twice", g.id)));
            }
        }
        let outputs_at = outputs
            .iter()
            .map(|o| pos.get(o).copied().ok_or_else(|| bad(format!("output refers to undefined gate {o}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { inputs, gates, outputs, args_at, outputs_at })
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[u64] {
        &self.outputs
    }

    /// Evaluates 64 independent inputs at once: `words[j]` holds input bit `j` of every lane.
    pub fn eval_words(&self, words: &[u64]) -> Result<Vec<u64>, AnError> {
        if words.len() != self.inputs {
            return Err(AnError::ArityMismatch { expected: self.inputs, found: words.len() });
        }
        let mut val: Vec<u64> = Vec::with_capacity(self.gates.len());
        for (g, at) in self.gates.iter().zip(&self.args_at) {
            let v = match g.op {
                Op::And => at.iter().fold(!0u64, |acc, &i| acc & val[i]),
                Op::Or => at.iter().fold(0u64, |acc, &i| acc | val[i]),
                Op::Xor => at.iter().fold(0u64, |acc, &i| acc ^ val[i]),
                Op::Not => !val[at[0]],
                Op::Const0 => 0,
                Op::Const1 => !0,
                Op::Input => words[at[0]],
            };
            val.push(v);
        }
        Ok(self.outputs_at.iter().map(|&i| val[i]).collect())
    }
}

pub fn eval_circuit(c: &Circuit, bits: &[bool]) -> Result<Vec<bool>, AnError> {
    let words: Vec<u64> = bits.iter().map(|&b| if b { 1 } else { 0 }).collect();
    Ok(c.eval_words(&words)?.into_iter().map(|w| w & 1 == 1).collect())
}

/// Handle to a builder node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wire(usize);

/// Circuit builder with structural hashing and constant folding. Unreachable gates are
/// dropped by [`CircuitBuilder::finish`].
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    inputs: usize,
    nodes: Vec<(Op, Vec<usize>)>,
    memo: HashMap<(Op, Vec<usize>), usize>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        Self { inputs, ..Self::default() }
    }

    fn node(&mut self, op: Op, args: Vec<usize>) -> Wire {
        if let Some(&i) = self.memo.get(&(op, args.clone())) {
            return Wire(i);
        }
        let i = self.nodes.len();
        self.nodes.push((op, args.clone()));
        self.memo.insert((op, args), i);
        Wire(i)
    }

    fn constant_of(&self, w: Wire) -> Option<bool> {
        match self.nodes[w.0].0 {
            Op::Const0 => Some(false),
            Op::Const1 => Some(true),
            _ => None,
        }
    }

    pub fn input(&mut self, bit: usize) -> Wire {
        assert!(bit < self.inputs, "input bit out of range");
        self.node(Op::Input, vec![bit])
    }

    pub fn constant(&mut self, b: bool) -> Wire {
        self.node(if b { Op::Const1 } else { Op::Const0 }, Vec::new())
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        if let Some(b) = self.constant_of(a) {
            return self.constant(!b);
        }
        if let (Op::Not, args) = &self.nodes[a.0] {
            return Wire(args[0]);
        }
        self.node(Op::Not, vec![a.0])
    }

    /// n-ary AND (`identity` = true) or OR (`identity` = false).
    fn junction(&mut self, op: Op, identity: bool, xs: &[Wire]) -> Wire {
        let mut args = Vec::with_capacity(xs.len());
        for &x in xs {
            match self.constant_of(x) {
                Some(b) if b == identity => {}
                Some(_) => return self.constant(!identity),
                None => args.push(x.0),
            }
        }
        args.sort_unstable();
        args.dedup();
        // x together with ¬x absorbs.
        for &a in &args {
            if let (Op::Not, inner) = &self.nodes[a] {
                if args.binary_search(&inner[0]).is_ok() {
                    return self.constant(!identity);
                }
            }
        }
        match args.len() {
            0 => self.constant(identity),
            1 => Wire(args[0]),
            _ => self.node(op, args),
        }
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.junction(Op::And, true, &[a, b])
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        self.junction(Op::Or, false, &[a, b])
    }

    pub fn and_many(&mut self, xs: &[Wire]) -> Wire {
        self.junction(Op::And, true, xs)
    }

    pub fn or_many(&mut self, xs: &[Wire]) -> Wire {
        self.junction(Op::Or, false, xs)
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        match (self.constant_of(a), self.constant_of(b)) {
            (Some(x), Some(y)) => self.constant(x ^ y),
            (Some(false), None) => b,
            (None, Some(false)) => a,
            (Some(true), None) => self.not(b),
            (None, Some(true)) => self.not(a),
            (None, None) if a == b => self.constant(false),
            (None, None) => self.node(Op::Xor, if a.0 < b.0 { vec![a.0, b.0] } else { vec![b.0, a.0] }),
        }
    }

    /// `if sel { a } else { b }`.
    pub fn mux(&mut self, sel: Wire, a: Wire, b: Wire) -> Wire {
        if a == b {
            return a;
        }
        match self.constant_of(sel) {
            Some(true) => return a,
            Some(false) => return b,
            None => {}
        }
        let ns = self.not(sel);
        let x = self.and(sel, a);
        let y = self.and(ns, b);
        self.or(x, y)
    }

    /// Number of nodes created so far, including ones `finish` would prune.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Circuit with ids `0..` in creation order, keeping only gates the outputs depend on.
    pub fn finish(&self, outputs: &[Wire]) -> Circuit {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = outputs.iter().map(|w| w.0).collect();
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut live[i], true) {
                continue;
            }
            if self.nodes[i].0 != Op::Input {
                stack.extend(self.nodes[i].1.iter().copied());
            }
        }
        let mut new_id = vec![u64::MAX; self.nodes.len()];
        let mut gates = Vec::new();
        for (i, (op, args)) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            new_id[i] = gates.len() as u64;
            let args = if *op == Op::Input {
                vec![args[0] as u64]
            } else {
                args.iter().map(|&a| new_id[a]).collect()
            };
            gates.push(Gate { id: new_id[i], op: *op, args });
        }
        let outs = outputs.iter().map(|w| new_id[w.0]).collect();
        Circuit::new(self.inputs, gates, outs).expect("builder output is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(id: u64, op: Op, args: &[u64]) -> Gate {
        Gate { id, op, args: args.to_vec() }
    }

    #[test]
    fn eval_examples() {
        let id = Circuit::new(3, (0..3).map(|i| gate(i, Op::Input, &[i])).collect(), vec![0, 1, 2]).unwrap();
        assert_eq!(eval_circuit(&id, &[true, false, true]).unwrap(), vec![true, false, true]);
        let one = Circuit::new(2, vec![gate(7, Op::Const1, &[])], vec![7]).unwrap();
        assert_eq!(eval_circuit(&one, &[false, false]).unwrap(), vec![true]);
        let and = Circuit::new(
            2,
            vec![gate(0, Op::Input, &[0]), gate(1, Op::Input, &[1]), gate(2, Op::And, &[0, 1])],
            vec![2],
        )
        .unwrap();
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(eval_circuit(&and, &[a, b]).unwrap(), vec![a && b]);
        }
        assert_eq!(eval_circuit(&and, &[true]), Err(AnError::ArityMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn validation_rejects_malformed_circuits() {
        assert!(Circuit::new(1, vec![gate(0, Op::Not, &[1]), gate(1, Op::Input, &[0])], vec![0]).is_err());
        assert!(Circuit::new(1, vec![gate(0, Op::Input, &[1])], vec![0]).is_err());
        assert!(Circuit::new(1, vec![gate(0, Op::Input, &[0])], vec![3]).is_err());
        assert!(Circuit::new(1, vec![gate(0, Op::Input, &[0]), gate(0, Op::Not, &[0])], vec![0]).is_err());
        assert!(Circuit::new(1, vec![gate(0, Op::Input, &[0]), gate(1, Op::Not, &[0, 0])], vec![1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"inputs":2,"gates":[{"id":0,"op":"INPUT","args":[0]},{"id":1,"op":"INPUT","args":[1]},{"id":5,"op":"XOR","args":[0,1]}],"outputs":[5]}"#;
        let c: Circuit = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), text);
        assert_eq!(eval_circuit(&c, &[true, false]).unwrap(), vec![true]);
        let bad = r#"{"inputs":1,"gates":[{"id":0,"op":"NOT","args":[4]}],"outputs":[0]}"#;
        assert!(serde_json::from_str::<Circuit>(bad).is_err());
    }

    #[test]
    fn builder_folds_and_shares() {
        let mut b = CircuitBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let one = b.constant(true);
        assert_eq!(b.and(x, one), x);
        let nx = b.not(x);
        assert_eq!(b.not(nx), x);
        assert_eq!(b.and(x, y), b.and(y, x));
        let zero = b.constant(false);
        assert_eq!(b.and(x, nx), zero);
        assert_eq!(b.or(x, nx), one);
        assert_eq!(b.mux(one, x, y), x);
        let m = b.mux(x, y, nx);
        let c = b.finish(&[m]);
        for (p, q) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(eval_circuit(&c, &[p, q]).unwrap(), vec![if p { q } else { !p }]);
        }
        // The unused AND gate was pruned.
        assert!(c.gates().iter().all(|g| g.op != Op::And || g.args.len() == 2));
        assert!(c.gate_count() < b.len());
    }

    #[test]
    fn word_evaluation_matches_scalar() {
        let mut b = CircuitBuilder::new(3);
        let (x, y, z) = (b.input(0), b.input(1), b.input(2));
        let t = b.xor(x, y);
        let u = b.mux(z, t, x);
        let c = b.finish(&[u, t]);
        let words = [0b1010_1010u64, 0b1100_1100, 0b1111_0000];
        let out = c.eval_words(&words).unwrap();
        for lane in 0..8 {
            let bits: Vec<bool> = words.iter().map(|w| w >> lane & 1 == 1).collect();
            let scalar = eval_circuit(&c, &bits).unwrap();
            assert_eq!(scalar, out.iter().map(|w| w >> lane & 1 == 1).collect::<Vec<_>>());
        }
    }
}
