//! Propositional formulas over variables `x1..xs`.

use std::fmt;

use super::ReduceError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropExpr {
    /// 1-based variable index.
    Var(usize),
    Not(Box<PropExpr>),
    And(Box<PropExpr>, Box<PropExpr>),
    Or(Box<PropExpr>, Box<PropExpr>),
}

impl PropExpr {
    pub fn var(i: usize) -> Self {
        PropExpr::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        PropExpr::Not(Box::new(self))
    }

    pub fn and(self, other: PropExpr) -> Self {
        PropExpr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: PropExpr) -> Self {
        PropExpr::Or(Box::new(self), Box::new(other))
    }

    fn max_var(&self) -> usize {
        match self {
            PropExpr::Var(i) => *i,
            PropExpr::Not(a) => a.max_var(),
            PropExpr::And(a, b) | PropExpr::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn min_var(&self) -> usize {
        match self {
            PropExpr::Var(i) => *i,
            PropExpr::Not(a) => a.min_var(),
            PropExpr::And(a, b) | PropExpr::Or(a, b) => a.min_var().min(b.min_var()),
        }
    }

    /// Value under `assignment`, whose bit `i − 1` is variable `xi`.
    pub fn eval(&self, assignment: u64) -> bool {
        match self {
            PropExpr::Var(i) => assignment >> (i - 1) & 1 == 1,
            PropExpr::Not(a) => !a.eval(assignment),
            PropExpr::And(a, b) => a.eval(assignment) && b.eval(assignment),
            PropExpr::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }

    fn level(&self) -> u8 {
        match self {
            PropExpr::Or(..) => 0,
            PropExpr::And(..) => 1,
            PropExpr::Not(..) | PropExpr::Var(..) => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            PropExpr::Var(i) => write!(f, "x{i}"),
            PropExpr::Not(a) => {
                write!(f, "!")?;
                a.fmt_at(f, 2)
            }
            PropExpr::And(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " & ")?;
                b.fmt_at(f, 2)
            }
            PropExpr::Or(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " | ")?;
                b.fmt_at(f, 1)
            }
        }
    }
}

impl fmt::Display for PropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A formula `S` together with its variable count `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropFormula {
    vars: u32,
    expr: PropExpr,
}

/// Largest variable count [`truth_word`] enumerates.
pub const MAX_VARS: u32 = 20;

impl PropFormula {
    pub fn new(vars: u32, expr: PropExpr) -> Result<Self, ReduceError> {
        if expr.min_var() == 0 || expr.max_var() > vars as usize {
            return Err(ReduceError::Formula(format!("variable indices of {expr} must lie in 1..={vars}")));
        }
        if vars > MAX_VARS {
            return Err(ReduceError::Formula(format!("{vars} variables exceed the limit of {MAX_VARS}")));
        }
        Ok(Self { vars, expr })
    }

    /// Parses `x1 & (!x2 | x3)`; `vars` defaults to the largest index used.
    pub fn parse(text: &str, vars: Option<u32>) -> Result<Self, ReduceError> {
        let expr = Parser { chars: text.char_indices().collect(), i: 0 }.top()?;
        let vars = vars.unwrap_or(expr.max_var() as u32);
        Self::new(vars, expr)
    }

    /// Disjunction of the minterms of the assignments whose bit is set in `table`
    /// (`x1 & !x1` when there are none).
    pub fn from_truth_table(vars: u32, table: &[bool]) -> Result<Self, ReduceError> {
        if vars == 0 || table.len() != 1 << vars {
            return Err(ReduceError::Formula(format!("a table over {vars} variables needs {} entries", 1u64 << vars)));
        }
        let minterm = |a: usize| {
            (1..=vars as usize)
                .map(|i| if a >> (i - 1) & 1 == 1 { PropExpr::var(i) } else { PropExpr::var(i).not() })
                .reduce(PropExpr::and)
                .expect("at least one variable")
        };
        let expr = (0..table.len())
            .filter(|&a| table[a])
            .map(minterm)
            .reduce(PropExpr::or)
            .unwrap_or_else(|| PropExpr::var(1).and(PropExpr::var(1).not()));
        Self::new(vars, expr)
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn expr(&self) -> &PropExpr {
        &self.expr
    }

    pub fn eval(&self, assignment: u64) -> bool {
        self.expr.eval(assignment)
    }

    pub fn is_satisfiable(&self) -> bool {
        (0..1u64 << self.vars).any(|a| self.eval(a))
    }

    pub fn is_tautology(&self) -> bool {
        (0..1u64 << self.vars).all(|a| self.eval(a))
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

/// Character `i` is `1` iff assignment `i` (x1 least significant) satisfies `S`.
pub fn truth_word(s: &PropFormula) -> String {
    (0..1u64 << s.vars).map(|a| if s.eval(a) { '1' } else { '0' }).collect()
}

struct Parser {
    chars: Vec<(usize, char)>,
    i: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> ReduceError {
        let pos = self.chars.get(self.i).map_or_else(|| self.chars.last().map_or(0, |c| c.0 + 1), |c| c.0);
        ReduceError::Formula(format!("{msg} at offset {pos}"))
    }

    fn peek(&mut self) -> Option<char> {
        while self.chars.get(self.i).is_some_and(|c| c.1.is_whitespace()) {
            self.i += 1;
        }
        self.chars.get(self.i).map(|c| c.1)
    }

    fn top(mut self) -> Result<PropExpr, ReduceError> {
        let e = self.or()?;
        match self.peek() {
            None => Ok(e),
            Some(_) => Err(self.err("trailing input")),
        }
    }

    fn or(&mut self) -> Result<PropExpr, ReduceError> {
        let mut e = self.and()?;
        while matches!(self.peek(), Some('|' | '∨')) {
            self.i += 1;
            e = e.or(self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<PropExpr, ReduceError> {
        let mut e = self.unary()?;
        while matches!(self.peek(), Some('&' | '∧')) {
            self.i += 1;
            e = e.and(self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<PropExpr, ReduceError> {
        match self.peek() {
            Some('!' | '~' | '¬') => {
                self.i += 1;
                Ok(self.unary()?.not())
            }
            Some('(') => {
                self.i += 1;
                let e = self.or()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some('x' | 'X') => {
                self.i += 1;
                let start = self.i;
                while self.chars.get(self.i).is_some_and(|c| c.1.is_ascii_digit()) {
                    self.i += 1;
                }
                let digits: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
                match digits.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(PropExpr::var(v)),
                    _ => Err(self.err("expected a variable index of at least 1")),
                }
            }
            _ => Err(self.err("expected a variable, '!' or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, vars: Option<u32>) -> PropFormula {
        PropFormula::parse(text, vars).unwrap()
    }

    #[test]
    fn truth_word_examples() {
        assert_eq!(truth_word(&p("x1", None)), "01");
        assert_eq!(truth_word(&p("x1 | !x1", None)), "11");
        assert_eq!(truth_word(&p("x1 & x2", None)), "0001");
        assert_eq!(truth_word(&p("x1 & !x1", Some(3))), "00000000");
        assert_eq!(truth_word(&p("(x1 | x2) & (!x1 | !x2) & x3", None)), "00000110");
    }

    #[test]
    fn parse_and_print() {
        let f = p("x1 ∧ ¬(x2 ∨ x3) | ~x1", None);
        assert_eq!(f.to_string(), "x1 & !(x2 | x3) | !x1");
        assert_eq!(p(&f.to_string(), None), f);
        assert_eq!(f.vars(), 3);
        for bad in ["", "x0", "x1 &", "(x1", "x1 x2", "y1"] {
            assert!(PropFormula::parse(bad, None).is_err(), "{bad}");
        }
        assert!(PropFormula::parse("x4", Some(3)).is_err());
        assert!(PropFormula::parse("x1", Some(21)).is_err());
    }

    #[test]
    fn truth_tables_round_trip() {
        for vars in 1..=3u32 {
            for mask in 0u32..1 << (1 << vars) {
                let table: Vec<bool> = (0..1 << vars).map(|i| mask >> i & 1 == 1).collect();
                let f = PropFormula::from_truth_table(vars, &table).unwrap();
                let word: String = table.iter().map(|&b| if b { '1' } else { '0' }).collect();
                assert_eq!(truth_word(&f), word);
                assert_eq!(f.is_satisfiable(), mask != 0);
                assert_eq!(f.is_tautology(), table.iter().all(|&b| b));
            }
        }
    }
}
